use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context as _, Result};
use gks_core::builtin::{builtin_cover, BUILTIN_COVERS};
use gks_core::rays::{builtin_rayset, parse_rayset, RaySet, BUILTIN_RAYSETS};
use gks_core::structures::{CoverFile, CoverStructure};

use crate::Common;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn load_rayset(name: Option<&str>, common: &Common) -> Result<RaySet> {
    match (name, &common.rays) {
        (_, Some(path)) => parse_rayset(&read(path)?).with_context(|| format!("in {}", path.display())),
        (Some(name), None) => builtin_rayset(name)
            .ok_or_else(|| anyhow!("unknown ray set `{name}` (built-in: {})", BUILTIN_RAYSETS.join(", "))),
        (None, None) => bail!("give a built-in ray set name or --rays <file>"),
    }
}

/// Either an unverified cover file bound to its ray set, or a built-in cover.
pub enum CoverSource {
    Builtin(CoverStructure),
    File { rays: RaySet, cover: CoverFile },
}

impl CoverSource {
    pub fn load(name: Option<&str>, common: &Common) -> Result<CoverSource> {
        match (name, &common.cover) {
            (_, Some(path)) => {
                let rays = load_rayset(None, common).context("--cover needs --rays")?;
                let cover = CoverFile::parse(&read(path)?).with_context(|| format!("in {}", path.display()))?;
                Ok(CoverSource::File { rays, cover })
            }
            (Some(name), None) => builtin_cover(name)
                .map(CoverSource::Builtin)
                .ok_or_else(|| anyhow!("unknown cover `{name}` (built-in: {})", BUILTIN_COVERS.join(", "))),
            (None, None) => bail!("give a built-in cover name or --rays <file> --cover <file>"),
        }
    }

    /// Bind and verify; verification failures are returned as errors.
    pub fn resolve(&self, tol: f64) -> Result<CoverStructure> {
        match self {
            CoverSource::Builtin(cs) => Ok(cs.clone()),
            CoverSource::File { rays, cover } => Ok(cover.resolve(rays, tol)?),
        }
    }
}
