use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use gks_core::coloring::cnf::{export_cnf, parse_model, verify_model};
use gks_core::coloring::{
    criticality_report_with, exhaustive_oracle, search_assignment_with, verify_assignment, DeletionSemantics,
    SearchOptions,
};
use gks_core::rays::{write_rayset, Backend};
use gks_core::spin::{
    find_parity_params, generate_gks_with_tolerance, hexagon_directions, parse_directions, write_directions,
    Direction, SpinConstructionParams, Spin,
};
use gks_core::structures::{
    enumerate_bases_with_tolerance, parity_certificate, write_cover, CoverKind, CoverStructure,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::inputs::{load_rayset, CoverSource};
use crate::report::{certificate_line, cover_digest, digest_text, incidence_summary, incidence_table, RunReport};
use crate::{Command, Common, Semantics};

/// `Ok(false)` means the command ran but a check failed.
pub fn run(cmd: Command, echo: &str) -> Result<bool> {
    match cmd {
        Command::Rayset { name, common } => rayset(name.as_deref(), &common),
        Command::Bases { name, common } => bases(name.as_deref(), &common),
        Command::Verify { name, common } => verify(name.as_deref(), &common, echo),
        Command::Search { name, oracle, common } => search(name.as_deref(), oracle, &common, echo),
        Command::Critical { name, common } => critical(name.as_deref(), &common, echo),
        Command::Cnf { name, model, common } => cnf(name.as_deref(), model.as_deref(), &common, echo),
        Command::Spin { j, r, dirs, random, seed, common } => {
            spin(&j, r, dirs.as_deref(), random, seed, &common, echo)
        }
        Command::Params { n_max, common } => params(n_max, &common, echo),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn options(common: &Common) -> Result<SearchOptions> {
    if common.jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    Ok(SearchOptions { jobs: common.jobs })
}

fn exactness(cs: &CoverStructure) -> &'static str {
    match cs.rays().backend() {
        Backend::Exact => "exact",
        Backend::Floating => "floating",
    }
}

fn load_verified(name: Option<&str>, common: &Common) -> Result<CoverStructure> {
    let cs = CoverSource::load(name, common)?.resolve(common.tolerance)?;
    cs.reverify(common.tolerance)?;
    Ok(cs)
}

fn rayset(name: Option<&str>, common: &Common) -> Result<bool> {
    let rs = load_rayset(name, common)?;
    emit(&write_rayset(&rs), common.out.as_deref())?;
    Ok(true)
}

fn bases(name: Option<&str>, common: &Common) -> Result<bool> {
    let rs = load_rayset(name, common)?;
    let found = enumerate_bases_with_tolerance(&rs, common.tolerance);
    let count = found.len();
    let cs = CoverStructure::new(rs, CoverKind::Basis, found, common.tolerance)?;
    let cert = parity_certificate(&cs);
    let text = format!("# {count} bases, {}\n{}", incidence_summary(&cert), write_cover(&cs));
    emit(&text, common.out.as_deref())?;
    Ok(true)
}

fn verify(name: Option<&str>, common: &Common, echo: &str) -> Result<bool> {
    let source = CoverSource::load(name, common)?;
    let digest = match &source {
        CoverSource::Builtin(cs) => cover_digest(cs),
        CoverSource::File { rays, cover } => digest_text(&[&write_rayset(rays), &cover.write()]),
    };
    let mut rep = RunReport::new(echo, &digest);
    let checked = source
        .resolve(common.tolerance)
        .and_then(|cs| cs.reverify(common.tolerance).map(|_| cs).map_err(Into::into));
    let cs = match checked {
        Ok(cs) => cs,
        Err(e) => {
            rep.field("status", "verification failed");
            rep.block("error", &format!("{e:#}"));
            emit(&rep.finish(false), common.out.as_deref())?;
            return Ok(false);
        }
    };
    let cert = parity_certificate(&cs);
    let n = cs.contexts().len();
    rep.field("kind", cs.kind().as_str());
    rep.field("rays", format!("{} ({})", cs.rays().len(), exactness(&cs)));
    if let Some(w) = cs.weight() {
        rep.field("weight", w);
    }
    rep.field("contexts", n);
    let complete = match cs.kind() {
        CoverKind::Basis => format!("{n} contexts"),
        CoverKind::Povm => format!("{n} POVMs complete ({})", exactness(&cs)),
    };
    rep.block("incidence", &incidence_table(&cs));
    rep.field("parity certificate", certificate_line(&cert));
    rep.field(
        "summary",
        format!(
            "{complete}, {}, parity certificate {}",
            incidence_summary(&cert),
            if cert.valid { "VALID" } else { "INVALID" }
        ),
    );
    emit(&rep.finish(true), common.out.as_deref())?;
    Ok(true)
}

fn search(name: Option<&str>, oracle: bool, common: &Common, echo: &str) -> Result<bool> {
    let cs = load_verified(name, common)?;
    let result = search_assignment_with(&cs, &options(common)?);
    let mut rep = RunReport::new(echo, &cover_digest(&cs));
    rep.field("elements", cs.element_ids().len());
    rep.field("contexts", cs.contexts().len());
    rep.field("status", result.status);
    rep.field("nodes", result.nodes_visited);
    let mut ok = true;
    if let Some(w) = &result.witness {
        let ones: Vec<String> = w.ones().iter().map(|id| id.to_string()).collect();
        rep.field("witness", ones.join(" "));
        let good = verify_assignment(&cs, w);
        rep.field("witness check", if good { "exactly one per context" } else { "FAILED" });
        ok &= good;
    }
    if oracle {
        let brute = exhaustive_oracle(&cs)?;
        let agree = brute.status == result.status;
        rep.field("oracle", format!("{} ({} assignments)", brute.status, brute.nodes_visited));
        rep.field("agreement", if agree { "yes" } else { "NO" });
        ok &= agree;
    }
    emit(&rep.finish(ok), common.out.as_deref())?;
    Ok(ok)
}

fn critical(name: Option<&str>, common: &Common, echo: &str) -> Result<bool> {
    let cs = load_verified(name, common)?;
    let semantics = match common.semantics {
        Semantics::Drop => DeletionSemantics::DropContext,
        Semantics::Shrink => DeletionSemantics::ShrinkContext,
    };
    let report = criticality_report_with(&cs, semantics, &options(common)?);
    let total = report.per_element.len();
    let mut rep = RunReport::new(echo, &cover_digest(&cs));
    rep.field(
        "semantics",
        match common.semantics {
            Semantics::Drop => "drop (contexts containing the element are removed)",
            Semantics::Shrink => "shrink (the element is removed from its contexts)",
        },
    );
    rep.block("deletions", &report.table());
    rep.field("collapses", format!("{}/{total} deletions SAT", report.collapse_count()));
    rep.field("verdict", if report.critical { "CRITICAL" } else { "NOT CRITICAL" });
    emit(&rep.finish(true), common.out.as_deref())?;
    Ok(true)
}

fn cnf(name: Option<&str>, model: Option<&Path>, common: &Common, echo: &str) -> Result<bool> {
    let cs = load_verified(name, common)?;
    let Some(path) = model else {
        emit(&export_cnf(&cs), common.out.as_deref())?;
        return Ok(true);
    };
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let lits = parse_model(&text).with_context(|| format!("in {}", path.display()))?;
    let good = verify_model(&cs, &lits);
    let mut rep = RunReport::new(echo, &digest_text(&[&write_rayset(cs.rays()), &write_cover(&cs), &text]));
    rep.field("model", if good { "VALID exactly-one assignment" } else { "INVALID" });
    emit(&rep.finish(good), common.out.as_deref())?;
    Ok(good)
}

fn random_directions(n: usize, seed: u64) -> Vec<Direction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let z: f64 = rng.gen_range(-1.0..1.0);
            Direction::new(z.acos(), rng.gen_range(0.0..std::f64::consts::TAU)).expect("in range")
        })
        .collect()
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn spin(
    j: &str,
    r: u64,
    dirs: Option<&Path>,
    random: Option<usize>,
    seed: u64,
    common: &Common,
    echo: &str,
) -> Result<bool> {
    let j: Spin = j.parse()?;
    let directions = match (dirs, random) {
        (Some(p), _) => {
            let text = fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            parse_directions(&text).with_context(|| format!("in {}", p.display()))?
        }
        (None, Some(n)) => random_directions(n, seed),
        (None, None) => hexagon_directions(),
    };
    let params = SpinConstructionParams::new(j, directions.len() as u64, r)?;
    let cs = generate_gks_with_tolerance(j, &directions, r, common.tolerance)?;
    let cert = parity_certificate(&cs);
    let result = search_assignment_with(&cs, &options(common)?);

    let rays_text = write_rayset(cs.rays());
    let cover_text = write_cover(&cs);
    let dirs_text = write_directions(&directions);
    let mut rep = RunReport::new(echo, &digest_text(&[&dirs_text, &rays_text, &cover_text]));
    rep.field("j", j);
    rep.field("d", params.d);
    rep.field("n", params.parity.n);
    rep.field("r", params.parity.r);
    rep.field("POVMs", &params.parity.povm_count);
    rep.field("incidence", &params.parity.incidence);
    rep.field("elements", cs.element_ids().len());
    rep.field("completeness", format!("{} POVMs within {:e}", cs.contexts().len(), common.tolerance));
    rep.field("parity certificate", certificate_line(&cert));
    rep.field("status", result.status);
    if let Some(prefix) = &common.out {
        for (suffix, text) in [(".rays", &rays_text), (".cover", &cover_text), (".dirs", &dirs_text)] {
            let path = with_suffix(prefix, suffix);
            fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
            rep.field("wrote", path.display());
        }
    }
    print!("{}", rep.finish(true));
    Ok(true)
}

fn params(n_max: u64, common: &Common, echo: &str) -> Result<bool> {
    let mut table = String::from("n r N M\n");
    for p in find_parity_params(n_max) {
        table.push_str(&format!("{} {} {} {}\n", p.n, p.r, p.povm_count, p.incidence));
    }
    let mut rep = RunReport::new(echo, &digest_text(&[&n_max.to_string()]));
    rep.block("params", &table);
    emit(&rep.finish(true), common.out.as_deref())?;
    Ok(true)
}
