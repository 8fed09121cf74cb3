//! Ray sets: the 24-cell and its dual, the Peres 24-ray set, the 18-ray
//! subset, the qubit hexagon, and a line-oriented text format.
//!
//! Ids follow the standard numbering of the 24-cell construction: rays 1-12
//! are the antipodal pairs of the 24-cell vertices, rays 13-24 those of the
//! dual. The 18-ray set keeps the gaps left by removing 1, 5, 10, 16, 20, 24.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::algebra::{
    complex_dot, complex_projector, dot, format_rational, parse_rational, projector, ComplexMatrix,
    Rational, RationalMatrix, RationalVector,
};

/// Magnitude below which a floating component counts as zero when fixing the
/// global phase of a state.
const PHASE_EPS: f64 = 1e-12;

/// Default orthogonality tolerance for floating rays.
pub const TOL_ORTHO: f64 = 1e-10;

pub type RayId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Exact,
    Floating,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coords {
    Exact(RationalVector),
    Floating(Vec<Complex64>),
}

impl Coords {
    pub fn dim(&self) -> usize {
        match self {
            Coords::Exact(v) => v.dim(),
            Coords::Floating(v) => v.len(),
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            Coords::Exact(_) => Backend::Exact,
            Coords::Floating(_) => Backend::Floating,
        }
    }

    /// Components as complex floats (exact coordinates are converted).
    pub fn to_complex(&self) -> Vec<Complex64> {
        match self {
            Coords::Exact(v) => v.to_f64().into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
            Coords::Floating(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ray {
    pub id: RayId,
    pub coords: Coords,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RayError {
    #[error("ray {0}: zero vector does not define a ray")]
    ZeroRay(RayId),
    #[error("duplicate ray id {0}")]
    DuplicateId(RayId),
    #[error("rays {0} and {1} are the same ray")]
    DuplicateRay(RayId, RayId),
    #[error("ray {id} has dimension {found}, expected {expected}")]
    Dimension { id: RayId, expected: usize, found: usize },
    #[error("ray {0} uses a different backend from the rest of the set")]
    MixedBackend(RayId),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Scale an exact vector to coprime integers with a positive first nonzero
/// component. `v` and `-v` map to the same representative.
pub fn canonical_exact(v: &RationalVector) -> RationalVector {
    let lcm = v.components().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = v.components().iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        return v.clone();
    }
    let sign = match ints.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    RationalVector::new(ints.iter().map(|x| Rational::from_integer(x * &sign / &gcd)).collect())
}

/// Normalize a floating state to unit length with its first non-negligible
/// component real and positive.
pub fn canonical_floating(v: &[Complex64]) -> Vec<Complex64> {
    let norm = complex_dot(v, v).re.sqrt();
    if norm == 0.0 {
        return v.to_vec();
    }
    let phase = v
        .iter()
        .find(|z| z.norm() > PHASE_EPS * norm)
        .map(|z| z.conj() / z.norm())
        .unwrap_or(Complex64::new(1.0, 0.0));
    v.iter().map(|z| z * phase / norm).collect()
}

impl Ray {
    /// Exact ray, stored in canonical form.
    pub fn exact(id: RayId, v: RationalVector, label: impl Into<String>) -> Result<Ray, RayError> {
        if v.is_zero() {
            return Err(RayError::ZeroRay(id));
        }
        Ok(Ray { id, coords: Coords::Exact(canonical_exact(&v)), label: label.into() })
    }

    pub fn from_ints(id: RayId, v: &[i64]) -> Result<Ray, RayError> {
        let label = format!("{}", RationalVector::from_ints(v));
        Ray::exact(id, RationalVector::from_ints(v), label)
    }

    /// Floating ray, normalized and phase-fixed.
    pub fn floating(id: RayId, v: Vec<Complex64>, label: impl Into<String>) -> Result<Ray, RayError> {
        if v.iter().all(|z| z.norm() == 0.0) || v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(RayError::ZeroRay(id));
        }
        Ok(Ray { id, coords: Coords::Floating(canonical_floating(&v)), label: label.into() })
    }

    pub fn dim(&self) -> usize {
        self.coords.dim()
    }

    pub fn exact_coords(&self) -> Option<&RationalVector> {
        match &self.coords {
            Coords::Exact(v) => Some(v),
            Coords::Floating(_) => None,
        }
    }

    pub fn exact_projector(&self) -> Option<RationalMatrix> {
        self.exact_coords().map(|v| projector(v).expect("rays are nonzero"))
    }

    pub fn complex_projector(&self) -> ComplexMatrix {
        complex_projector(&self.coords.to_complex()).expect("rays are nonzero")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RaySet {
    dim: usize,
    backend: Backend,
    rays: Vec<Ray>,
}

impl RaySet {
    /// Validates ids, dimensions, backend uniformity and ray distinctness.
    pub fn new(dim: usize, rays: Vec<Ray>) -> Result<RaySet, RayError> {
        let backend = rays.first().map_or(Backend::Exact, |r| r.coords.backend());
        let mut seen = BTreeSet::new();
        for r in &rays {
            if !seen.insert(r.id) {
                return Err(RayError::DuplicateId(r.id));
            }
            if r.dim() != dim {
                return Err(RayError::Dimension { id: r.id, expected: dim, found: r.dim() });
            }
            if r.coords.backend() != backend {
                return Err(RayError::MixedBackend(r.id));
            }
        }
        for (i, a) in rays.iter().enumerate() {
            for b in &rays[i + 1..] {
                if same_ray(&a.coords, &b.coords) {
                    return Err(RayError::DuplicateRay(a.id, b.id));
                }
            }
        }
        Ok(RaySet { dim, backend, rays })
    }

    pub fn empty(dim: usize) -> RaySet {
        RaySet { dim, backend: Backend::Exact, rays: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn ids(&self) -> Vec<RayId> {
        self.rays.iter().map(|r| r.id).collect()
    }

    pub fn get(&self, id: RayId) -> Option<&Ray> {
        self.rays.iter().find(|r| r.id == id)
    }

    pub fn contains(&self, id: RayId) -> bool {
        self.get(id).is_some()
    }

    /// Copy of this set keeping only rays whose id satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(RayId) -> bool) -> RaySet {
        RaySet {
            dim: self.dim,
            backend: self.backend,
            rays: self.rays.iter().filter(|r| keep(r.id)).cloned().collect(),
        }
    }

    /// Union of two sets over the same dimension and backend.
    pub fn union(&self, other: &RaySet) -> Result<RaySet, RayError> {
        let mut rays = self.rays.clone();
        rays.extend(other.rays.iter().cloned());
        RaySet::new(self.dim, rays)
    }

    /// Exact zero inner product, or `|⟨a|b⟩| < tol` for floating rays.
    pub fn orthogonal(&self, a: &Ray, b: &Ray, tol: f64) -> bool {
        match (&a.coords, &b.coords) {
            (Coords::Exact(u), Coords::Exact(v)) => dot(u, v).map(|x| x.is_zero()).unwrap_or(false),
            _ => complex_dot(&a.coords.to_complex(), &b.coords.to_complex()).norm() < tol,
        }
    }
}

fn same_ray(a: &Coords, b: &Coords) -> bool {
    match (a, b) {
        (Coords::Exact(u), Coords::Exact(v)) => u == v,
        _ => {
            let (u, v) = (a.to_complex(), b.to_complex());
            let overlap = complex_dot(&u, &v).norm_sqr();
            let norms = complex_dot(&u, &u).re * complex_dot(&v, &v).re;
            overlap > norms * (1.0 - TOL_ORTHO)
        }
    }
}

/// The twelve 24-cell vertices listed up to sign, rays 1-12 in order.
pub const CELL24_VERTICES: [[i64; 4]; 12] = [
    [2, 0, 0, 0],
    [0, 2, 0, 0],
    [0, 0, 2, 0],
    [0, 0, 0, 2],
    [1, 1, 1, 1],
    [1, -1, 1, -1],
    [1, 1, -1, -1],
    [1, -1, -1, 1],
    [1, 1, 1, -1],
    [-1, 1, 1, 1],
    [1, -1, 1, 1],
    [1, 1, -1, 1],
];

/// Dual 24-cell vertices up to sign, rays 13-24 in order.
pub const DUAL24_VERTICES: [[i64; 4]; 12] = [
    [1, 0, 1, 0],
    [0, 1, 0, 1],
    [1, 0, -1, 0],
    [0, 1, 0, -1],
    [1, 1, 0, 0],
    [1, -1, 0, 0],
    [0, 0, 1, 1],
    [0, 0, 1, -1],
    [1, 0, 0, 1],
    [0, 1, 1, 0],
    [1, 0, 0, -1],
    [0, 1, -1, 0],
];

/// Ids removed from the Peres set to obtain the 18-ray set.
pub const RAYS18_OMITTED: [RayId; 6] = [1, 5, 10, 16, 20, 24];

fn rayset_from_table(first_id: RayId, table: &[[i64; 4]]) -> RaySet {
    let rays = table
        .iter()
        .zip(first_id..)
        .map(|(v, id)| Ray::from_ints(id, v).expect("table vertices are nonzero"))
        .collect();
    RaySet::new(4, rays).expect("vertex table is a valid ray set")
}

/// Rays 1-12 from the 24-cell vertices.
pub fn build_24cell_rays() -> RaySet {
    rayset_from_table(1, &CELL24_VERTICES)
}

/// Rays 13-24 from the vertices of the dual 24-cell.
pub fn build_dual_24cell_rays() -> RaySet {
    rayset_from_table(13, &DUAL24_VERTICES)
}

/// The Peres 24-ray set, ids 1-24.
pub fn build_peres24() -> RaySet {
    build_24cell_rays().union(&build_dual_24cell_rays()).expect("24-cell and dual share no ray")
}

pub fn build_18ray() -> RaySet {
    build_peres24().filter(|id| !RAYS18_OMITTED.contains(&id))
}

/// Six qubit states `(cos(θ/2), sin(θ/2))` with `θ = k·60°`, ids `k+1`.
/// States `k` and `k+3` are orthogonal.
pub fn build_hexagon_rays() -> RaySet {
    let rays = (0..6u32)
        .map(|k| {
            let half = (k as f64) * std::f64::consts::PI / 6.0;
            let v = vec![Complex64::new(half.cos(), 0.0), Complex64::new(half.sin(), 0.0)];
            Ray::floating(k + 1, v, format!("hexagon {}deg", 60 * k)).expect("unit state")
        })
        .collect();
    RaySet::new(2, rays).expect("hexagon states are distinct")
}

/// The three cross polytopes of the 24-cell as tetrads of ray ids.
pub fn cross_polytopes() -> [Vec<RayId>; 3] {
    [vec![1, 2, 3, 4], vec![5, 6, 7, 8], vec![9, 10, 11, 12]]
}

/// The three inscribed tesseracts: unions of pairs of cross polytopes.
pub fn inscribed_tesseracts() -> [Vec<RayId>; 3] {
    let [c1, c2, c3] = cross_polytopes();
    let join = |a: &[RayId], b: &[RayId]| [a, b].concat();
    [join(&c1, &c2), join(&c1, &c3), join(&c2, &c3)]
}

/// The hexagon's opposite-direction pairs as ray ids.
pub fn hexagon_pairs() -> [Vec<RayId>; 3] {
    [vec![1, 4], vec![2, 5], vec![3, 6]]
}

/// Names accepted by [`builtin_rayset`].
pub const BUILTIN_RAYSETS: [&str; 5] = ["24cell", "dual24cell", "peres24", "rays18", "hexagon"];

pub fn builtin_rayset(name: &str) -> Option<RaySet> {
    match name {
        "24cell" => Some(build_24cell_rays()),
        "dual24cell" => Some(build_dual_24cell_rays()),
        "peres24" => Some(build_peres24()),
        "rays18" => Some(build_18ray()),
        "hexagon" => Some(build_hexagon_rays()),
        _ => None,
    }
}

fn format_complex(z: &Complex64) -> String {
    if z.im == 0.0 {
        format!("{:?}", z.re)
    } else {
        format!("{:?},{:?}", z.re, z.im)
    }
}

/// Serialize in the ray text format. Labels travel as trailing comments.
pub fn write_rayset(rs: &RaySet) -> String {
    let mut out = String::new();
    writeln!(out, "dim {}", rs.dim).unwrap();
    if rs.backend == Backend::Floating {
        writeln!(out, "backend float").unwrap();
    }
    for r in &rs.rays {
        write!(out, "ray {}", r.id).unwrap();
        match &r.coords {
            Coords::Exact(v) => {
                for c in v.components() {
                    write!(out, " {}", format_rational(c)).unwrap();
                }
            }
            Coords::Floating(v) => {
                for z in v {
                    write!(out, " {}", format_complex(z)).unwrap();
                }
            }
        }
        if !r.label.is_empty() {
            write!(out, " # {}", r.label).unwrap();
        }
        out.push('\n');
    }
    out
}

fn parse_complex(tok: &str) -> Option<Complex64> {
    match tok.split_once(',') {
        Some((re, im)) => Some(Complex64::new(re.parse().ok()?, im.parse().ok()?)),
        None => Some(Complex64::new(tok.parse().ok()?, 0.0)),
    }
}

fn looks_floating(tok: &str) -> bool {
    tok.contains(['.', 'e', 'E', ',']) || tok == "inf" || tok == "NaN"
}

/// Parse the ray text format. Rays are canonicalized on the way in.
pub fn parse_rayset(text: &str) -> Result<RaySet, RayError> {
    let mut dim: Option<usize> = None;
    let mut force_float = false;
    let mut pending: Vec<(usize, RayId, Vec<String>, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let (body, comment) = match raw.split_once('#') {
            Some((b, c)) => (b, c.trim().to_string()),
            None => (raw, String::new()),
        };
        let mut toks = body.split_whitespace();
        let Some(head) = toks.next() else { continue };
        let err = |msg: String| RayError::Parse { line, msg };
        match head {
            "dim" => {
                let d = toks
                    .next()
                    .and_then(|t| t.parse::<usize>().ok())
                    .filter(|&d| d > 0)
                    .ok_or_else(|| err("expected `dim <positive integer>`".into()))?;
                if dim.replace(d).is_some() {
                    return Err(err("repeated `dim` line".into()));
                }
            }
            "backend" => match toks.next() {
                Some("float") => force_float = true,
                Some("exact") => {}
                other => return Err(err(format!("unknown backend {other:?}"))),
            },
            "ray" => {
                let d = dim.ok_or_else(|| err("`ray` before `dim`".into()))?;
                let id = toks
                    .next()
                    .and_then(|t| t.parse::<RayId>().ok())
                    .ok_or_else(|| err("expected `ray <id> <components...>`".into()))?;
                let comps: Vec<String> = toks.map(str::to_string).collect();
                if comps.len() != d {
                    return Err(err(format!("ray {id} has {} components, expected {d}", comps.len())));
                }
                pending.push((line, id, comps, comment));
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }

    let dim = dim.ok_or(RayError::Parse { line: 0, msg: "missing `dim` line".into() })?;
    let floating = force_float || pending.iter().any(|(_, _, c, _)| c.iter().any(|t| looks_floating(t)));
    let mut rays = Vec::with_capacity(pending.len());
    for (line, id, comps, label) in pending {
        let bad = |t: &str| RayError::Parse { line, msg: format!("bad component `{t}`") };
        let ray = if floating {
            let v = comps.iter().map(|t| parse_complex(t).ok_or_else(|| bad(t))).collect::<Result<_, _>>()?;
            Ray::floating(id, v, label)?
        } else {
            let v = comps.iter().map(|t| parse_rational(t).ok_or_else(|| bad(t))).collect::<Result<_, _>>()?;
            Ray::exact(id, RationalVector::new(v), label)?
        };
        rays.push(ray);
    }
    RaySet::new(dim, rays)
}
