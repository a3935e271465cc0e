//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines always show up in `cargo test` output.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use trischeme::actions::{self, ActionSpec, Epsilon, Flavor, LabeledDomain};
use trischeme::closedform::{self, Prediction, RelLabel};
use trischeme::permgrp::PermGroup;
use trischeme::scheme::{self, IntersectionTensor, TripleScheme, VerifyMode};
use trischeme::ternalg;
use trischeme::Tensor;

/// Per-sporadic time budget for building the scheme (criterion 2).
const SPORADIC_BUDGET: Duration = Duration::from_secs(60);

#[derive(Clone)]
enum Source {
    Spec(ActionSpec),
    Sporadic(&'static str),
}

#[derive(Clone)]
struct Inst {
    name: String,
    source: Source,
}

fn spec(name: impl Into<String>, s: ActionSpec) -> Inst {
    Inst { name: name.into(), source: Source::Spec(s) }
}

fn sporadic(key: &'static str) -> Inst {
    Inst { name: key.to_string(), source: Source::Sporadic(key) }
}

fn sym(n: usize, alternating: bool) -> Inst {
    spec(format!("{}{n}", if alternating { "A" } else { "S" }), ActionSpec::SymAlt { n, alternating })
}

fn agl(k: usize, p: u32, alpha: u32, frak_a: u32) -> Inst {
    spec(format!("AGL_H(k={k},n={}^{alpha},a={frak_a})", p), ActionSpec::AglH { k, p, alpha, frak_a })
}

fn proj(k: usize, n: u64, flavor: Flavor) -> Inst {
    spec(format!("{flavor}({k},{n})"), ActionSpec::Projective { k, n, flavor })
}

fn sp(k: usize, epsilon: Epsilon) -> Inst {
    let s = if epsilon == Epsilon::Plus { "+" } else { "-" };
    spec(format!("Sp({},2){s}", 2 * k), ActionSpec::Sp2k2 { k, epsilon })
}

impl Inst {
    fn group(&self) -> (PermGroup, LabeledDomain) {
        match &self.source {
            Source::Spec(s) => s.build_group().unwrap_or_else(|e| panic!("{}: {e}", self.name)),
            Source::Sporadic(k) => actions::load_sporadic(k, &actions::default_data_dir())
                .unwrap_or_else(|e| panic!("{}: {e}", self.name)),
        }
    }

    fn prediction(&self) -> Prediction {
        match &self.source {
            Source::Spec(s) => closedform::predict(s).unwrap_or_else(|e| panic!("{}: {e}", self.name)),
            Source::Sporadic(k) => closedform::sporadic_prediction(k).unwrap(),
        }
    }
}

struct Built {
    inst: Inst,
    group: PermGroup,
    domain: LabeledDomain,
    scheme: TripleScheme,
}

fn build(inst: &Inst) -> Built {
    let (group, domain) = inst.group();
    let scheme = scheme::build_scheme(&group).unwrap_or_else(|e| panic!("{}: {e}", inst.name));
    Built { inst: inst.clone(), group, domain, scheme }
}

fn tensor(b: &Built) -> Tensor {
    scheme::intersection_tensor(&b.scheme).unwrap()
}

/// Instances with ν ≤ 30 checked against the brute-force oracle.
fn oracle_instances() -> Vec<Inst> {
    let mut v = vec![sym(5, false), sym(5, true), sym(4, true), agl(1, 5, 1, 1), agl(1, 7, 1, 1), agl(1, 2, 3, 3)];
    v.push(agl(1, 2, 3, 1));
    v.push(agl(2, 3, 1, 1));
    for q in [3, 4, 5, 7, 8, 9, 11, 13] {
        v.push(proj(2, q, Flavor::Pgl));
    }
    for q in [5, 7, 9, 11, 13] {
        v.push(proj(2, q, Flavor::Psl));
    }
    v.push(proj(3, 2, Flavor::Pgl));
    v.push(proj(3, 3, Flavor::Pgl));
    v.push(sp(2, Epsilon::Plus));
    v.push(sp(2, Epsilon::Minus));
    v.push(spec("PGU(3,2)", ActionSpec::Pgu3 { q: 2 }));
    v.push(spec("PSU(3,2)", ActionSpec::Psu3 { q: 2 }));
    v
}

fn projective_identity_instances() -> Vec<Inst> {
    let mut v: Vec<Inst> = [(2, 3), (2, 4), (2, 5), (2, 7), (2, 8), (2, 9), (3, 2), (3, 3), (4, 2)]
        .into_iter()
        .map(|(k, n)| proj(k, n, Flavor::Pgl))
        .collect();
    v.extend([5, 7, 9, 11, 13].into_iter().map(|n| proj(2, n, Flavor::Psl)));
    v
}

fn agl_identity_instances() -> Vec<Inst> {
    let mut v = Vec::new();
    for (p, alpha) in [(2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1)] {
        v.push(agl(1, p, alpha, alpha));
    }
    v.push(agl(1, 2, 3, 1));
    v.push(agl(1, 3, 2, 1));
    for frak_a in [1, 2, 4] {
        v.push(agl(1, 2, 4, frak_a));
    }
    v.push(agl(2, 3, 1, 1));
    v.push(agl(2, 2, 2, 1));
    v
}

type Outcome = Result<String, String>;

fn fail_if(failures: Vec<String>, ok: String) -> Outcome {
    if failures.is_empty() {
        Ok(ok)
    } else {
        Err(failures.join("; "))
    }
}

fn criterion_1() -> Outcome {
    let insts = oracle_instances();
    let mut failures = Vec::new();
    for inst in &insts {
        let b = build(inst);
        let oracle = scheme::triple_orbit_oracle(&b.group, scheme::ORACLE_CAP).unwrap();
        let ours = scheme::scheme_partition(&b.scheme);
        if oracle != ours {
            failures.push(format!("{}: oracle {} orbits, scheme {}", inst.name, oracle.count, ours.count));
        }
    }
    fail_if(failures, format!("{} instances, partitions identical", insts.len()))
}

fn criterion_2() -> Outcome {
    let mut failures = Vec::new();
    let mut slowest = (String::new(), Duration::ZERO);
    for (key, _, _) in actions::SPORADIC {
        let start = Instant::now();
        let b = build(&sporadic(key));
        let elapsed = start.elapsed();
        if elapsed > slowest.1 {
            slowest = (key.to_string(), elapsed);
        }
        if elapsed > SPORADIC_BUDGET {
            failures.push(format!("{key}: {elapsed:?} over budget"));
        }
        let rep = closedform::match_predicted::<u64>(&b.scheme, None, &sporadic(key).prediction(), &BTreeMap::new());
        if !rep.passed() {
            failures.push(format!("{key}: size {} vs {}, valencies {:?} vs {:?}", rep.computed_size, rep.predicted_size, rep.computed_valencies, rep.predicted_valencies));
        }
    }
    fail_if(failures, format!("10 rows exact; slowest build {} in {:.2?}", slowest.0, slowest.1))
}

fn criterion_3() -> Outcome {
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for (number, key, _) in closedform::TENSOR_TABLES {
        let b = build(&sporadic(key));
        let t = tensor(&b);
        let rep = closedform::match_predicted(&b.scheme, Some(&t), &b.inst.prediction(), &BTreeMap::new());
        let tm = rep.tensor.as_ref().unwrap();
        if rep.passed() {
            notes.push(format!("table {number} ({} entries)", tm.entries_checked));
        } else {
            failures.push(format!("table {number}: {:?}", tm.discrepancy));
        }
    }
    fail_if(failures, notes.join(", "))
}

/// Tensor match with anchors; returns the match and the anchor map.
fn anchored_match(b: &Built, t: &Tensor, pred: &Prediction) -> (closedform::MatchReport, BTreeMap<RelLabel, usize>) {
    let pt = pred.tensor.as_ref().expect("family has a tensor prediction");
    let fixed = closedform::resolve_anchors(&b.scheme, &b.domain, pt).unwrap();
    (closedform::match_predicted(&b.scheme, Some(t), pred, &fixed), fixed)
}

fn criterion_4() -> Outcome {
    let insts = projective_identity_instances();
    let mut failures = Vec::new();
    let mut entries = 0;
    for inst in &insts {
        let b = build(inst);
        let t = tensor(&b);
        let (rep, _) = anchored_match(&b, &t, &inst.prediction());
        entries += rep.tensor.as_ref().map_or(0, |m| m.entries_checked);
        if !rep.passed() {
            failures.push(format!("{}: {:?}", inst.name, rep));
        }
    }
    fail_if(failures, format!("{} instances, {entries} entries equal", insts.len()))
}

fn criterion_5() -> Outcome {
    let insts = agl_identity_instances();
    let mut failures = Vec::new();
    let mut entries = 0;
    for inst in &insts {
        let b = build(inst);
        let t = tensor(&b);
        let (rep, fixed) = anchored_match(&b, &t, &inst.prediction());
        entries += rep.tensor.as_ref().map_or(0, |m| m.entries_checked);
        if !rep.passed() {
            failures.push(format!("{}: {:?}", inst.name, rep));
        }
        if inst.name == agl(1, 5, 1, 1).name {
            let (a3, a4) = (fixed[&RelLabel::Elem(3)], fixed[&RelLabel::Elem(4)]);
            if t.get(a3, 2, a4, 2) != 1 || t.get(a3, a3, 3, 3) != 1 {
                failures.push(format!(
                    "AGL(1,5) corrections: A3 I2 A4 -> {}, A3 A3 I3 -> {}",
                    t.get(a3, 2, a4, 2),
                    t.get(a3, a3, 3, 3)
                ));
            }
        }
    }
    fail_if(failures, format!("{} instances, {entries} entries equal, AGL(1,5) corrections hold", insts.len()))
}

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    let mut count = 0;
    let mut stab = |name: String, s: ActionSpec| {
        count += 1;
        let st = s.build_stabilizer().unwrap_or_else(|e| panic!("{name}: {e}"));
        let sch = scheme::build_scheme_from_stabilizer(&st).unwrap_or_else(|e| panic!("{name}: {e}"));
        let rep = closedform::match_predicted::<u64>(&sch, None, &closedform::predict(&s).unwrap(), &BTreeMap::new());
        if !rep.passed() {
            failures.push(format!("{name}: size {} vs {}, {:?} vs {:?}", rep.computed_size, rep.predicted_size, rep.computed_valencies, rep.predicted_valencies));
        }
        sch
    };
    stab("Sz(8)".into(), ActionSpec::Suzuki { q: 8 });
    stab("Sz(32)".into(), ActionSpec::Suzuki { q: 32 });
    stab("Ree(3)".into(), ActionSpec::Ree { q: 3 });
    let ree27 = stab("Ree(27)".into(), ActionSpec::Ree { q: 27 });
    for q in [2, 3, 4, 5] {
        stab(format!("PGU(3,{q})"), ActionSpec::Pgu3 { q });
    }
    for q in [2, 5] {
        stab(format!("PSU(3,{q})"), ActionSpec::Psu3 { q });
    }
    let thirteens = (4..ree27.size()).filter(|&i| ree27.third_valency(i) == 13).count();
    if ree27.size() != 762 || thirteens != 2 {
        failures.push(format!("Ree(27): {} relations, {thirteens} of valency 13", ree27.size()));
    }
    for k in [2, 3] {
        for e in [Epsilon::Plus, Epsilon::Minus] {
            count += 1;
            let inst = sp(k, e);
            let b = build(&inst);
            let rep = closedform::match_predicted::<u64>(&b.scheme, None, &inst.prediction(), &BTreeMap::new());
            if !rep.passed() {
                failures.push(format!("{}: {:?} vs {:?}", inst.name, rep.computed_valencies, rep.predicted_valencies));
            }
        }
    }
    fail_if(failures, format!("{count} instances; Ree(27) has 762 relations with two of valency 13"))
}

fn axiom_instances() -> Vec<Inst> {
    let mut v = oracle_instances();
    v.extend(agl_identity_instances());
    v.extend(projective_identity_instances());
    v.push(sp(3, Epsilon::Plus));
    v.push(sp(3, Epsilon::Minus));
    v.push(spec("PGU(3,3)", ActionSpec::Pgu3 { q: 3 }));
    v.push(spec("PSU(3,3)", ActionSpec::Psu3 { q: 3 }));
    v.push(spec("PGU(3,4)", ActionSpec::Pgu3 { q: 4 }));
    for (key, _, _) in actions::SPORADIC {
        v.push(sporadic(key));
    }
    let mut seen = std::collections::BTreeSet::new();
    v.retain(|i| seen.insert(i.name.clone()));
    v
}

fn criterion_7() -> Outcome {
    let mut failures = Vec::new();
    let (mut exhaustive, mut structure) = (0, 0);
    for inst in axiom_instances() {
        let b = build(&inst);
        let nu = b.scheme.nu();
        if nu <= scheme::EXHAUSTIVE_CAP {
            exhaustive += 1;
            let rep = scheme::verify_axioms(&b.scheme, &b.group, VerifyMode::Exhaustive { cap: scheme::EXHAUSTIVE_CAP })
                .unwrap();
            if !rep.passed() {
                failures.push(format!("{} axioms: {:?}", inst.name, rep));
            }
        }
        if nu <= ternalg::HYPERMATRIX_CAP {
            structure += 1;
            let rep = ternalg::verify_structure_constants(&b.scheme, &tensor(&b), ternalg::HYPERMATRIX_CAP).unwrap();
            if !rep.passed() {
                failures.push(format!("{} structure constants: {} violations", inst.name, rep.violation_count));
            }
        }
    }

    // mutations must be caught
    let b = build(&proj(2, 5, Flavor::Psl));
    let (pt, _) = (4..b.scheme.nu()).map(|x| (x, b.scheme.point_label(x))).find(|(_, l)| *l == Some(4)).unwrap();
    let corrupted = b.scheme.clone().with_point_label(pt, 5);
    let rep = scheme::verify_axioms(&corrupted, &b.group, VerifyMode::Exhaustive { cap: scheme::EXHAUSTIVE_CAP }).unwrap();
    let caught: Vec<u8> = rep.conditions.iter().filter(|c| !c.passed).map(|c| c.condition).collect();
    if caught.is_empty() {
        failures.push("corrupted label map not detected".into());
    }
    let mut t: IntersectionTensor<u64> = tensor(&b);
    t.set(4, 4, 5, 4, t.get(4, 4, 5, 4) + 1);
    let rep = ternalg::verify_structure_constants(&b.scheme, &t, ternalg::HYPERMATRIX_CAP).unwrap();
    if rep.passed() {
        failures.push("perturbed tensor entry not detected".into());
    }
    fail_if(
        failures,
        format!(
            "{exhaustive} exhaustive axiom runs, {structure} structure-constant runs; corrupted label caught by conditions {caught:?}, perturbed entry caught ({} violations)",
            rep.violation_count
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    let mut observed = Vec::new();
    let mut claimed = 0;
    let mut insts: Vec<(Inst, bool)> = projective_identity_instances().into_iter().map(|i| (i, true)).collect();
    insts.extend(actions::SPORADIC.iter().map(|(k, _, _)| (sporadic(k), true)));
    insts.extend(agl_identity_instances().into_iter().map(|i| (i, false)));
    insts.extend([sp(2, Epsilon::Plus), sp(2, Epsilon::Minus), sp(3, Epsilon::Plus), sp(3, Epsilon::Minus)].map(|i| (i, false)));
    for (inst, in_claim) in &insts {
        let b = build(inst);
        let commutative = scheme::is_commutative(&tensor(&b));
        if *in_claim {
            claimed += 1;
            if !commutative {
                failures.push(format!("{} is not commutative", inst.name));
            }
        } else if !commutative {
            observed.push(inst.name.clone());
        }
    }
    let extra = if observed.is_empty() {
        "all AGL_H and Sp tensors also commutative".to_string()
    } else {
        format!("observed non-commutative outside the claim: {}", observed.join(", "))
    };
    fail_if(failures, format!("{claimed} projective/sporadic tensors commutative; {extra}"))
}

fn criterion_9() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_trischeme");
    let runs: &[&[&str]] = &[
        &["params", "--family", "pgl", "--k", "3", "--n", "2"],
        &["build", "--family", "pgu", "--q", "3"],
        &["tensor", "--family", "psl", "--n", "11", "--format", "tsv"],
        &["verify", "--family", "agl", "--k", "1", "--p", "5", "--alpha", "1"],
        &["verify", "--family", "sporadic", "--name", "HS", "--seed", "7"],
        &["compare", "--family", "agl", "--k", "2", "--p", "2", "--alpha", "2", "--frak-a", "1"],
        &["params", "--family", "ree", "--q", "27", "--format", "text"],
        &["table", "--name", "1", "--format", "tsv"],
        &["table", "--name", "4"],
        &["params", "--family", "nonsense"],
    ];
    let mut failures = Vec::new();
    for args in runs {
        let out: Vec<_> = (0..2).map(|_| Command::new(exe).args(*args).output().expect("run cli")).collect();
        if out[0].stdout != out[1].stdout || out[0].stderr != out[1].stderr || out[0].status != out[1].status {
            failures.push(format!("{args:?} differs between runs"));
        }
    }
    fail_if(failures, format!("{} commands byte-identical across two runs", runs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("schurian construction oracle", criterion_1),
        ("table 1 reproduction", criterion_2),
        ("tables 2-5 reproduction", criterion_3),
        ("PGL/PSL intersection identities", criterion_4),
        ("AGL_H intersection identities", criterion_5),
        ("Sz/Ree/PGU/PSU/Sp sizes and valencies", criterion_6),
        ("axiom suite and mutations", criterion_7),
        ("commutativity", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} [{name}]: PASS ({secs:.1}s) {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL ({secs:.1}s) {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
