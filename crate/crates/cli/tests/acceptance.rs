//! The ten acceptance criteria, one PASS/FAIL line each.
//!
//! Run with `cargo test -p gks-cli --test acceptance -- --nocapture`.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gks_core::algebra::{is_identity, ratio, weighted_sum_dim, RationalMatrix};
use gks_core::builtin::{builtin_cover, BUILTIN_COVERS};
use gks_core::coloring::cnf::{encode_cnf, export_cnf, parse_dimacs, solve_cnf};
use gks_core::coloring::{
    criticality_report, exhaustive_oracle, search_assignment, verify_assignment, DeletionSemantics, Status,
};
use gks_core::rays::RayId;
use gks_core::spin::{direction_completeness_error, generate_gks, Direction, Spin};
use gks_core::structures::{parity_certificate, CoverStructure};

/// Completeness tolerance for floating constructions.
const TOL: f64 = 1e-10;
const LIMIT_AC1: Duration = Duration::from_secs(1);
const LIMIT_AC2: Duration = Duration::from_secs(5);
const LIMIT_AC3: Duration = Duration::from_secs(5);
const LIMIT_AC4: Duration = Duration::from_secs(1);
const LIMIT_AC6: Duration = Duration::from_secs(1);
const LIMIT_AC7: Duration = Duration::from_secs(5);
const LIMIT_AC10: Duration = Duration::from_secs(30);

const RAYS18_TETRADS: [[RayId; 4]; 9] = [
    [2, 3, 21, 23],
    [2, 4, 13, 15],
    [3, 4, 17, 18],
    [6, 7, 21, 22],
    [6, 8, 17, 19],
    [7, 8, 13, 14],
    [9, 11, 14, 15],
    [9, 12, 18, 19],
    [11, 12, 22, 23],
];

type Check = Result<(), String>;

/// Id, label, check, runtime limit.
type Criterion = (&'static str, &'static str, fn() -> Check, Option<Duration>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($msg)+)),
        }
    };
}

fn gks(args: &[&str]) -> (bool, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gks")).args(args).output().expect("run gks");
    (out.status.success(), String::from_utf8(out.stdout).expect("utf-8 output"))
}

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn core_fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn cover(name: &str) -> CoverStructure {
    builtin_cover(name).unwrap_or_else(|| panic!("missing built-in {name}"))
}

/// `ctx` lines of a cover file as id sets.
fn ctx_sets(text: &str) -> BTreeSet<BTreeSet<RayId>> {
    text.lines()
        .filter_map(|l| l.strip_prefix("ctx "))
        .map(|l| l.split_whitespace().skip(1).map(|t| t.parse().unwrap()).collect())
        .collect()
}

fn incidence_of(sets: &BTreeSet<BTreeSet<RayId>>) -> std::collections::BTreeMap<RayId, usize> {
    let mut m = std::collections::BTreeMap::new();
    for s in sets {
        for &id in s {
            *m.entry(id).or_insert(0) += 1;
        }
    }
    m
}

fn uniform_incidence(cs: &CoverStructure, want: usize) -> bool {
    cs.incidence().values().all(|&c| c == want)
}

/// Exact sum of weighted projectors over one context.
fn exact_context_sum(cs: &CoverStructure, ctx: usize) -> RationalMatrix {
    let c = &cs.contexts()[ctx];
    let projs: Vec<RationalMatrix> =
        c.element_ids.iter().map(|&id| cs.rays().get(id).unwrap().exact_projector().unwrap()).collect();
    weighted_sum_dim(cs.rays().dim(), &projs, &c.weight).unwrap()
}

fn ac1() -> Check {
    let (ok, out) = gks(&["bases", "rays18"]);
    ensure!(ok, "bases exited nonzero");
    let got = ctx_sets(&out);
    let want: BTreeSet<BTreeSet<RayId>> = RAYS18_TETRADS.iter().map(|t| t.iter().copied().collect()).collect();
    ensure!(got == want, "tetrads differ from the expected nine: {got:?}");
    let inc = incidence_of(&got);
    ensure!(inc.len() == 18 && inc.values().all(|&c| c == 2), "incidence not 2 everywhere: {inc:?}");
    Ok(())
}

fn ac2() -> Check {
    let cs = cover("rays18-ks");
    let search = search_assignment(&cs);
    ensure!(search.status == Status::Unsat, "search returned {}", search.status);
    let oracle = exhaustive_oracle(&cs).map_err(|e| e.to_string())?;
    ensure!(oracle.status == Status::Unsat, "oracle returned {}", oracle.status);
    ensure!(oracle.nodes_visited == 1 << 18, "oracle scanned {} assignments", oracle.nodes_visited);
    Ok(())
}

fn ac3() -> Check {
    let cs = cover("rays18-ks");
    let report = criticality_report(&cs, DeletionSemantics::DropContext);
    ensure!(report.per_element.len() == 18, "{} deletions", report.per_element.len());
    for (id, o) in &report.per_element {
        ensure!(o.collapses, "deleting {id} stays UNSAT");
        let w = o.witness.as_ref().ok_or(format!("no witness for {id}"))?;
        let reduced: Vec<_> = cs.contexts().iter().filter(|c| !c.contains(*id)).collect();
        ensure!(
            reduced.iter().all(|c| c.element_ids.iter().filter(|&&e| w.get(e) == Some(true)).count() == 1),
            "witness for {id} fails a remaining tetrad"
        );
    }
    ensure!(report.critical, "verdict not CRITICAL");
    let (ok, out) = gks(&["critical", "rays18-ks"]);
    ensure!(ok && out.contains("18/18 deletions SAT") && out.contains("verdict: CRITICAL"), "CLI report: {out}");
    Ok(())
}

fn ac4() -> Check {
    let cs = cover("24cell-gks");
    ensure!(cs.contexts().len() == 3, "{} POVMs", cs.contexts().len());
    ensure!(cs.weight() == Some(&ratio(1, 2)), "weight {:?}", cs.weight());
    for k in 0..3 {
        ensure!(is_identity(&exact_context_sum(&cs, k)), "tesseract POVM {k} does not sum to I");
    }
    let cert = parity_certificate(&cs);
    ensure!(cert.valid && cert.context_count == 3 && cert.uniform_incidence() == Some(2), "certificate {cert:?}");
    ensure!(search_assignment(&cs).status == Status::Unsat, "search SAT");
    Ok(())
}

fn ac5() -> Check {
    let cs = cover("rays18-gks");
    let names: Vec<&str> = cs.contexts().iter().map(|c| c.name.as_str()).collect();
    ensure!(names == ["T1+T5+T7", "T2+T4+T8", "T3+T6+T9"], "groups {names:?}");
    ensure!(cs.weight() == Some(&ratio(1, 3)), "weight {:?}", cs.weight());
    for k in 0..3 {
        ensure!(is_identity(&exact_context_sum(&cs, k)), "POVM {k} does not sum to I");
    }
    ensure!(uniform_incidence(&cs, 2) && cs.incidence().len() == 18, "incidence {:?}", cs.incidence());
    ensure!(search_assignment(&cs).status == Status::Unsat, "search SAT");
    for (sem, flag, file) in [
        (DeletionSemantics::DropContext, "drop", "critical-rays18-gks-drop.txt"),
        (DeletionSemantics::ShrinkContext, "shrink", "critical-rays18-gks-shrink.txt"),
    ] {
        let report = criticality_report(&cs, sem);
        ensure!(report.per_element.len() == 18, "{flag}: {} deletions", report.per_element.len());
        ensure!(report.table() == core_fixture(&format!("criticality-rays18-gks-{flag}.txt")), "{flag} table drifted");
        let (_, out) = gks(&["critical", "rays18-gks", "--semantics", flag]);
        ensure!(out == fixture(file), "{flag} report drifted from fixture");
    }
    Ok(())
}

fn ac6() -> Check {
    let cs = cover("hexagon-gks");
    ensure!(cs.contexts().len() == 3, "{} contexts", cs.contexts().len());
    ensure!(cs.contexts().iter().all(|c| c.len() == 4), "context sizes");
    cs.reverify(TOL).map_err(|e| e.to_string())?;
    ensure!(parity_certificate(&cs).valid, "certificate invalid");
    let oracle = exhaustive_oracle(&cs).map_err(|e| e.to_string())?;
    ensure!(oracle.status == Status::Unsat && oracle.nodes_visited == 1 << 6, "oracle {:?}", oracle.status);
    Ok(())
}

fn ac7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for two_j in 1..=3 {
        let j = Spin::from_twice(two_j).map_err(|e| e.to_string())?;
        let dirs: Vec<Direction> = (0..3)
            .map(|_| {
                let z: f64 = rng.gen_range(-1.0..1.0);
                Direction::new(z.acos(), rng.gen_range(0.0..std::f64::consts::TAU)).unwrap()
            })
            .collect();
        for d in &dirs {
            let err = direction_completeness_error(j, d);
            ensure!(err < TOL, "j={j}: completeness error {err:e}");
        }
        let cs = generate_gks(j, &dirs, 2).map_err(|e| e.to_string())?;
        ensure!(cs.contexts().len() == 3, "j={j}: N={}", cs.contexts().len());
        ensure!(uniform_incidence(&cs, 2), "j={j}: M != 2");
        ensure!(parity_certificate(&cs).valid, "j={j}: certificate invalid");
        ensure!(search_assignment(&cs).status == Status::Unsat, "j={j}: search SAT");
    }
    Ok(())
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    (1..=k).fold(BigUint::from(1u32), |acc, i| acc * BigUint::from(n + 1 - i) / BigUint::from(i))
}

fn ac8() -> Check {
    let (ok, out) = gks(&["params", "20"]);
    ensure!(ok, "params exited nonzero");
    let mut listed = BTreeSet::new();
    for line in out.lines().filter_map(|l| l.strip_prefix("  ")).skip(1) {
        let f: Vec<&str> = line.split_whitespace().collect();
        ensure!(f.len() == 4, "bad row `{line}`");
        let (n, r): (u64, u64) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let big_n = binomial(n, r);
        let m = &big_n - binomial(n - 1, r);
        ensure!(big_n.bit(0) && !m.bit(0), "({n},{r}) fails parity");
        ensure!(f[2] == big_n.to_string() && f[3] == m.to_string(), "({n},{r}) printed N={} M={}", f[2], f[3]);
        listed.insert((n, r));
    }
    let expected: BTreeSet<(u64, u64)> = (1..=20u64)
        .flat_map(|n| (1..=n).map(move |r| (n, r)))
        .filter(|&(n, r)| binomial(n, r).bit(0) && !binomial(n - 1, r - 1).bit(0))
        .collect();
    ensure!(listed == expected, "listed set differs from the full search");
    ensure!(listed.contains(&(3, 2)), "(3,2) missing");
    ensure!(!listed.contains(&(4, 2)) && !listed.contains(&(5, 2)), "(4,2) or (5,2) listed");
    Ok(())
}

fn ac9() -> Check {
    for name in BUILTIN_COVERS {
        let cs = cover(name);
        let parsed = parse_dimacs(&export_cnf(&cs)).map_err(|e| format!("{name}: {e}"))?;
        ensure!(parsed == encode_cnf(&cs).cnf, "{name}: clauses changed in round trip");
        let sat = solve_cnf(&parsed).is_some();
        ensure!(sat == (search_assignment(&cs).status == Status::Sat), "{name}: CNF and cover search disagree");
    }
    Ok(())
}

fn ac10() -> Check {
    let (ok, out) = gks(&["bases", "peres24"]);
    ensure!(ok, "bases exited nonzero");
    let brute: BTreeSet<BTreeSet<RayId>> = core_fixture("peres24_bases.txt")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
        .collect();
    ensure!(ctx_sets(&out) == brute, "bases differ from the brute-force fixture");
    ensure!(out == fixture("peres24.cover"), "bases output drifted from fixture");
    let (ok, out) = gks(&["search", "peres24-ks"]);
    ensure!(ok && out.contains("status: UNSAT"), "search: {out}");
    ensure!(out == fixture("search-peres24-ks.txt"), "search report drifted from fixture");
    let cs = cover("peres24-ks");
    let w = search_assignment(&cs);
    ensure!(w.witness.as_ref().is_none_or(|a| verify_assignment(&cs, a)), "bad witness");
    Ok(())
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        ("AC1", "18-ray tetrads via bases", ac1, Some(LIMIT_AC1)),
        ("AC2", "KS search UNSAT, oracle agrees", ac2, Some(LIMIT_AC2)),
        ("AC3", "KS criticality (drop)", ac3, Some(LIMIT_AC3)),
        ("AC4", "24-cell tesseract GKS exact", ac4, Some(LIMIT_AC4)),
        ("AC5", "18-element GKS and criticality fixture", ac5, None),
        ("AC6", "hexagon POVMs", ac6, Some(LIMIT_AC6)),
        ("AC7", "spin j = 1/2, 1, 3/2 with n=3, r=2", ac7, Some(LIMIT_AC7)),
        ("AC8", "params 20", ac8, None),
        ("AC9", "CNF bridge on built-ins", ac9, None),
        ("AC10", "Peres-24 regression", ac10, Some(LIMIT_AC10)),
    ];
    let mut failed = Vec::new();
    for (id, label, check, limit) in criteria {
        let start = Instant::now();
        let mut result = check();
        let elapsed = start.elapsed();
        if let (Ok(()), Some(limit)) = (&result, limit) {
            if elapsed > limit {
                result = Err(format!("took {elapsed:?}, limit {limit:?}"));
            }
        }
        match &result {
            Ok(()) => println!("[PASS] {id} {label} ({:.3}s)", elapsed.as_secs_f64()),
            Err(e) => {
                println!("[FAIL] {id} {label}: {e}");
                failed.push(id);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
