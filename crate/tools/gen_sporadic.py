#!/usr/bin/env python3
"""Construct generator files for the sporadic two-transitive actions.

Every group is built from an explicit combinatorial model:

* M24 as the automorphism group of the extended binary quadratic-residue code
  of length 24 (the Golay code), generated by PSL(2,23) on the projective
  line plus the extra element x -> 9x^3 (x a residue), x^3/9 (otherwise).
* M23, M22 as point stabilizers in M24; M12 as a dodecad stabilizer acting on
  the dodecad; M11 (degree 11 and 12) as the stabilizer of a dodecad point,
  acting on the rest of the dodecad and on the complementary dodecad;
  PSL(2,11) as a point stabilizer of the degree-12 M11.
* A7 on the 15 Fano planes of one A7-orbit on the 30 Fano planes on 7 points.
* Co3 as the stabilizer of the type-3 Leech vector (5,1^23), acting on the
  276 pairs {a, v-a} of type-2 vectors; HS as the stabilizer in Co3 of a
  type-2 vector u with v-u of type 3, acting on its orbit of length 176.

Orders are checked here with a randomized Schreier-Sims against the known
group orders; the Rust test-suite re-checks every file deterministically.
Output format: "degree N" then one generator per line (0-based images).
"""

import os
import random
import sys

rng = random.Random(20240601)


# ---------------------------------------------------------------- perms ---

def compose(p, q):
    """Apply p first, then q."""
    return tuple(q[x] for x in p)


def inverse(p):
    r = [0] * len(p)
    for i, x in enumerate(p):
        r[x] = i
    return tuple(r)


def identity(n):
    return tuple(range(n))


def orbit_tree(gens, root, n):
    """BFS orbit with coset representatives (transversal) stored explicitly."""
    trans = {root: identity(n)}
    queue = [root]
    for x in queue:
        for g in gens:
            y = g[x]
            if y not in trans:
                trans[y] = compose(trans[x], g)
                queue.append(y)
    return trans


class RandomBSGS:
    """Randomized Schreier-Sims, run until a target order is reached."""

    def __init__(self, n, gens, target):
        self.n = n
        self.gens = [g for g in gens if g != identity(n)]
        self.base = []
        self.levels = []  # list of (strong gens, transversal)
        self.target = target
        self.pool = list(self.gens) + [identity(n)] * max(0, 10 - len(self.gens))
        self.acc = identity(n)
        for _ in range(50):
            self._random()
        self._build()

    def _random(self):
        i, j = rng.sample(range(len(self.pool)), 2)
        if rng.random() < 0.5:
            self.pool[i] = compose(self.pool[i], self.pool[j])
        else:
            self.pool[i] = compose(self.pool[j], self.pool[i])
        self.acc = compose(self.acc, self.pool[i])
        return self.acc

    def order(self):
        o = 1
        for _, t in self.levels:
            o *= len(t)
        return o

    def _sift(self, g):
        for lvl, b in enumerate(self.base):
            y = g[b]
            t = self.levels[lvl][1]
            if y not in t:
                return g, lvl
            g = compose(g, inverse(t[y]))
        return g, len(self.base)

    def _add(self, h, lvl):
        if lvl == len(self.base):
            b = next(x for x in range(self.n) if h[x] != x)
            self.base.append(b)
            self.levels.append(([], None))
        for i in range(lvl + 1):
            sg, _ = self.levels[i]
            sg.append(h)
        for i in range(lvl, -1, -1):
            sg, _ = self.levels[i]
            self.levels[i] = (sg, orbit_tree(sg, self.base[i], self.n))

    def _build(self):
        for g in self.gens:
            h, lvl = self._sift(g)
            if h != identity(self.n):
                self._add(h, lvl)
        stale = 0
        while self.order() < self.target and stale < 4000:
            h, lvl = self._sift(self._random())
            if h != identity(self.n):
                self._add(h, lvl)
                stale = 0
            else:
                stale += 1

    def contains(self, g):
        h, _ = self._sift(g)
        return h == identity(self.n)


def group_order(gens, n, target):
    return RandomBSGS(n, gens, target).order()


def restrict(perm, points):
    pos = {x: i for i, x in enumerate(points)}
    return tuple(pos[perm[x]] for x in points)


def random_element(gens, n, steps=60):
    g = identity(n)
    for _ in range(steps):
        g = compose(g, rng.choice(gens))
    return g


def small_generating_set(gens, n, target, tries=200):
    """Replace a generating set by two or three random elements of the group."""
    pool = RandomBSGS(n, gens, target)
    for size in (2, 3, 4):
        for _ in range(tries):
            cand = [pool._random() for _ in range(size)]
            if group_order(cand, n, target) == target:
                return cand
    return gens


def stabilizer_gens(gens, n, target_group, target_stab, act, obj, count=12):
    """Random Schreier elements of the stabilizer of obj under the action act."""
    # orbit of obj with transporters, as words applied via act
    trans = {obj: identity(n)}
    queue = [obj]
    for o in queue:
        for g in gens:
            o2 = act(g, o)
            if o2 not in trans:
                trans[o2] = compose(trans[o], g)
                queue.append(o2)
    assert target_group % len(trans) == 0, (target_group, len(trans))
    assert target_group // len(trans) == target_stab
    out = []
    bs = RandomBSGS(n, gens, target_group)
    while True:
        r = bs._random()
        o2 = act(r, obj)
        s = compose(r, inverse(trans[o2]))
        assert act(s, obj) == obj
        if s != identity(n):
            out.append(s)
        if len(out) >= count and group_order(out, n, target_stab) == target_stab:
            return out


def write_group(path, degree, gens):
    with open(path, "w") as f:
        f.write(f"degree {degree}\n")
        for g in gens:
            assert sorted(g) == list(range(degree))
            f.write(" ".join(str(x) for x in g) + "\n")


# ---------------------------------------------------------------- Golay ---

INF = 23
QR23 = {(x * x) % 23 for x in range(1, 23)}


def pl23(f):
    return tuple(f(x) for x in range(24))


def golay_code():
    base = [0] * 24
    for x in QR23:
        base[x] = 1
    rows = []
    for s in range(23):
        r = [0] * 24
        for x in range(23):
            r[(x + s) % 23] = base[x]
        r[INF] = sum(r[:23]) % 2
        rows.append(r)
    rows.append([1] * 24)
    # reduce to a basis and enumerate
    basis = []
    for r in rows:
        v = int("".join(map(str, r)), 2)
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    code = {0}
    for b in basis:
        code |= {c ^ b for c in code}
    words = set()
    for c in code:
        s = format(c, "024b")
        words.add(frozenset(i for i, ch in enumerate(s) if ch == "1"))
    return words


def mathieu():
    code = golay_code()
    assert len(code) == 4096
    weights = sorted({len(c) for c in code})
    assert weights == [0, 8, 12, 16, 24], weights

    def inv23(x):
        return pow(x, 21, 23)

    s = pl23(lambda x: INF if x == INF else (x + 1) % 23)
    t = pl23(lambda x: INF if x == INF else (2 * x) % 23)
    u = pl23(lambda x: 0 if x == INF else INF if x == 0 else (-inv23(x)) % 23)

    def delta(x):
        if x in (0, INF):
            return x
        c = pow(x, 3, 23)
        if x not in QR23:
            return (c * inv23(9)) % 23
        return (9 * c) % 23

    d = pl23(delta)
    gens = [s, t, u, d]
    for g in gens:
        for c in code:
            assert frozenset(g[x] for x in c) in code
    m24_order = 244823040
    assert group_order(gens, 24, m24_order) == m24_order
    return code, gens


def set_action(g, obj):
    return frozenset(g[x] for x in obj)


# ----------------------------------------------------------------- Fano ---

def fano_planes():
    from itertools import combinations, permutations
    base = [frozenset(l) for l in ((0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5),
                                   (1, 4, 6), (2, 3, 6), (2, 4, 5))]
    planes = set()
    for p in permutations(range(7)):
        planes.add(frozenset(frozenset(p[x] for x in l) for l in base))
    assert len(planes) == 30
    return sorted(planes, key=lambda pl: sorted(sorted(l) for l in pl))


def a7_on_15():
    a = (1, 2, 0, 3, 4, 5, 6)
    b = (1, 2, 3, 4, 5, 6, 0)
    planes = fano_planes()
    index = {p: i for i, p in enumerate(planes)}

    def act(g, pl):
        return frozenset(frozenset(g[x] for x in l) for l in pl)

    orbit = [planes[0]]
    seen = {planes[0]}
    for pl in orbit:
        for g in (a, b):
            im = act(g, pl)
            if im not in seen:
                seen.add(im)
                orbit.append(im)
    assert len(orbit) == 15
    orbit.sort(key=lambda pl: index[pl])
    pos = {pl: i for i, pl in enumerate(orbit)}
    gens = [tuple(pos[act(g, pl)] for pl in orbit) for g in (a, b)]
    assert group_order(gens, 15, 2520) == 2520
    return gens


# ---------------------------------------------------------------- Leech ---

def leech_tools(code):
    codeset = code

    def in_leech(x):
        m = x[0] % 2
        if any(c % 2 != m for c in x):
            return False
        if sum(x) % 8 != (4 * m) % 8:
            return False
        r = 2 if m == 0 else 1
        return frozenset(i for i, c in enumerate(x) if c % 4 == r) in codeset

    return in_leech


def minimal_vectors(code):
    vecs = []
    octads = [c for c in code if len(c) == 8]
    for o in octads:
        o = sorted(o)
        for mask in range(256):
            if bin(mask).count("1") % 2:
                continue
            v = [0] * 24
            for bit, i in enumerate(o):
                v[i] = -2 if (mask >> bit) & 1 else 2
            vecs.append(tuple(v))
    for c in code:
        for i in range(24):
            v = [1] * 24
            for j in c:
                v[j] = -1
            v[i] = -3 * v[i]
            vecs.append(tuple(v))
    for i in range(24):
        for j in range(i + 1, 24):
            for si in (4, -4):
                for sj in (4, -4):
                    v = [0] * 24
                    v[i], v[j] = si, sj
                    vecs.append(tuple(v))
    return vecs


def find_sextet(code):
    tet = (0, 1, 2, 3)
    octads = [c for c in code if len(c) == 8]
    parts = [frozenset(tet)]
    for o in octads:
        if set(tet) <= o:
            rest = o - set(tet)
            if rest not in parts:
                parts.append(frozenset(rest))
    assert len(parts) == 6 and len(set().union(*parts)) == 24
    return [sorted(p) for p in parts]


def make_xi(tetrads, negate):
    def xi(x):
        y = list(x)
        for idx, t in enumerate(tetrads):
            s = sum(x[i] for i in t)
            for i in t:
                val = s - 2 * x[i]
                assert val % 2 == 0
                y[i] = val // 2
                if idx == negate:
                    y[i] = -y[i]
        return tuple(y)
    return xi


def main():
    out_dir = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(__file__), "..", "data", "sporadic")
    os.makedirs(out_dir, exist_ok=True)
    only = set(sys.argv[2:])

    code, m24 = mathieu()
    print("M24 ok")
    write_group(os.path.join(out_dir, "m24.txt"), 24,
                small_generating_set(m24, 24, 244823040))

    m23_full = stabilizer_gens(m24, 24, 244823040, 10200960,
                               lambda g, o: g[o], INF, count=6)
    pts23 = list(range(23))
    m23 = [restrict(g, pts23) for g in m23_full]
    write_group(os.path.join(out_dir, "m23.txt"), 23,
                small_generating_set(m23, 23, 10200960))
    print("M23 ok")

    m22_full = stabilizer_gens(m23_full, 24, 10200960, 443520,
                               lambda g, o: g[o], 22, count=6)
    pts22 = list(range(22))
    m22 = [restrict(g, pts22) for g in m22_full]
    write_group(os.path.join(out_dir, "m22.txt"), 22,
                small_generating_set(m22, 22, 443520))
    print("M22 ok")

    dodecad = sorted(next(c for c in sorted(code, key=sorted) if len(c) == 12))
    comp = [x for x in range(24) if x not in dodecad]
    m12_full = stabilizer_gens(m24, 24, 244823040, 95040, set_action,
                               frozenset(dodecad), count=6)
    m12 = [restrict(g, dodecad) for g in m12_full]
    write_group(os.path.join(out_dir, "m12.txt"), 12,
                small_generating_set(m12, 12, 95040))
    print("M12 ok")

    d0 = dodecad[0]
    m11_full = stabilizer_gens(m12_full, 24, 95040, 7920,
                               lambda g, o: g[o], d0, count=6)
    m11 = [restrict(g, dodecad[1:]) for g in m11_full]
    write_group(os.path.join(out_dir, "m11.txt"), 11,
                small_generating_set(m11, 11, 7920))
    m11_12 = [restrict(g, comp) for g in m11_full]
    assert group_order(m11_12, 12, 7920) == 7920
    write_group(os.path.join(out_dir, "m11_12.txt"), 12,
                small_generating_set(m11_12, 12, 7920))
    print("M11 ok")

    e0 = comp[0]
    l211_full = stabilizer_gens(m11_full, 24, 7920, 660,
                                lambda g, o: g[o], e0, count=6)
    l211 = [restrict(g, comp[1:]) for g in l211_full]
    write_group(os.path.join(out_dir, "psl2_11.txt"), 11,
                small_generating_set(l211, 11, 660))
    print("PSL(2,11) ok")

    write_group(os.path.join(out_dir, "a7_15.txt"), 15, a7_on_15())
    print("A7 ok")

    if "nolarge" in only:
        return
    large(code, m24, m23_full, out_dir)


def large(code, m24, m23_full, out_dir):
    in_leech = leech_tools(code)
    mins = minimal_vectors(code)
    assert len(mins) == 196560
    minset = set(mins)
    assert all(in_leech(v) for v in mins[::101])
    tetrads = find_sextet(code)

    xi = None
    for negate in [None, 0, 1, 2, 3, 4, 5]:
        cand = make_xi(tetrads, negate)
        try:
            ok = all(cand(v) in minset for v in mins[::13]) and \
                all(cand(v) in minset for v in mins)
        except AssertionError:
            ok = False
        if ok:
            xi = cand
            print("xi variant", negate)
            break
    assert xi is not None, "no xi variant preserves the Leech lattice"

    def perm_vec(p):
        def f(x):
            y = [0] * 24
            for i in range(24):
                y[p[i]] = x[i]
            return tuple(y)
        return f

    def sign_vec(c):
        def f(x):
            return tuple(-x[i] if i in c else x[i] for i in range(24))
        return f

    octads = sorted((c for c in code if len(c) == 8), key=sorted)
    co0 = [xi] + [perm_vec(g) for g in m24] + [sign_vec(octads[0]), sign_vec(octads[5])]

    v = tuple([1] * 23 + [5])
    m24_trans = orbit_tree(m24, INF, 24)

    axis_pairs = [tuple(4 if i in (j, INF) else 0 for i in range(24))
                  for j in range(23)]
    # Elements of Co0 fixing v, as vector maps.
    co3_vec = [perm_vec(p) for p in m23_full]
    found = 0
    while found < 2:
        word = [xi] + [rng.choice(co0) for _ in range(rng.randint(3, 9))] + [xi]
        x = v
        for f in word:
            x = f(x)
        big = [i for i in range(24) if abs(x[i]) == 5]
        if len(big) != 1 or any(abs(c) not in (1, 5) for c in x):
            continue
        pi = inverse(m24_trans[big[0]])
        pf = perm_vec(pi)
        y = pf(x)
        neg = frozenset(i for i in range(24) if (y[i] < 0) != (v[i] < 0))
        if neg not in code:
            continue
        sf = sign_vec(neg)
        assert sf(y) == v

        def g(a, word=word, pf=pf, sf=sf):
            for f in word:
                a = f(a)
            return sf(pf(a))

        # reject elements preserving the 23 pairs {4e_i + 4e_inf, ...}, which
        # lie in the M23 we already have
        if all(max(abs(c) for c in g(a)) == 4 for a in axis_pairs):
            continue
        co3_vec.append(g)
        found += 1
    print("Co3 elements found")

    def canon(a):
        return min(a, tuple(vi - ai for vi, ai in zip(v, a)))

    pairs = sorted({canon(a) for a in mins
                    if sum((vi - ai) ** 2 for vi, ai in zip(v, a)) == 32})
    assert len(pairs) == 276, len(pairs)

    u = tuple([-4] + [0] * 22 + [4])
    # combined domain: 276 pairs followed by the Co3-orbit of u
    uorb = [u]
    useen = {u}
    for w in uorb:
        for f in co3_vec:
            w2 = f(w)
            if w2 not in useen:
                useen.add(w2)
                uorb.append(w2)
    print("u-orbit", len(uorb))
    assert 495766656000 % len(uorb) == 0
    dom = [("p", a) for a in pairs] + [("u", w) for w in uorb]
    pos = {d: i for i, d in enumerate(dom)}

    def on_dom(f):
        out = []
        for kind, a in dom:
            if kind == "p":
                out.append(pos[("p", canon(f(a)))])
            else:
                out.append(pos[("u", f(a))])
        return tuple(out)

    big_gens = [on_dom(f) for f in co3_vec]
    n_big = len(dom)
    co3 = [g[:276] for g in big_gens]
    co3_order = 495766656000
    assert group_order(co3, 276, co3_order) == co3_order
    write_group(os.path.join(out_dir, "co3_276.txt"), 276,
                small_generating_set(co3, 276, co3_order, tries=30))
    print("Co3 ok")

    hs_order = 44352000
    assert co3_order // len(uorb) == hs_order
    upos = pos[("u", u)]
    trans = orbit_tree(big_gens, upos, n_big)
    pool = list(big_gens) + [identity(n_big)] * 6
    acc = identity(n_big)
    hs = []
    while True:
        i, j = rng.sample(range(len(pool)), 2)
        pool[i] = compose(pool[i], pool[j])
        acc = compose(acc, pool[i])
        s = compose(acc, inverse(trans[acc[upos]]))
        assert s[upos] == upos
        hs.append(s[:276])
        if len(hs) >= 6 and group_order(hs, 276, hs_order) == hs_order:
            break
    orbits = []
    seen = set()
    for x in range(276):
        if x in seen:
            continue
        t = orbit_tree(hs, x, 276)
        seen |= set(t)
        orbits.append(sorted(t))
    print("HS orbits on 276:", [len(o) for o in orbits])
    o176 = next(o for o in orbits if len(o) == 176)
    hs176 = [restrict(g, o176) for g in hs]
    assert group_order(hs176, 176, hs_order) == hs_order
    write_group(os.path.join(out_dir, "hs_176.txt"), 176,
                small_generating_set(hs176, 176, hs_order, tries=30))
    print("HS ok")


if __name__ == "__main__":
    main()
