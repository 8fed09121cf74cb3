//! Spin-j constructions over `n` directions.
//!
//! Each direction contributes the `2j+1` eigenstates of the spin component
//! along it; every element is the projector onto one of those states scaled
//! by `1/r`. The elements of any `r` directions form a POVM, giving `C(n, r)`
//! contexts in which each element appears `C(n-1, r-1)` times.
//!
//! Rotation convention: the state `|j,m; n̂⟩` along `n̂ = (θ, φ)` is
//! `D(φ, θ, 0)|j,m⟩` with z-y-z Euler angles, so its `m'` component is
//! `e^{-i m' φ} d^j_{m'm}(θ)`. Basis vectors are ordered `m = j, j-1, ..., -j`.
//! With this convention `d^{1/2}(π) = [[0, -1], [1, 0]]`. Only projectors
//! are compared in tests, so the global phase never matters.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::algebra::{complex_weighted_sum, ratio, ComplexMatrix, TOL_ID};
use crate::rays::{Ray, RayError, RayId, RaySet};
use crate::structures::{Context, CoverError, CoverKind, CoverStructure};

/// Two directions closer than this (as unit vectors) are treated as equal.
const DIRECTION_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpinError {
    #[error("spin must be a positive half-integer (1/2, 1, 3/2, ...), got {0}")]
    InvalidSpin(String),
    #[error("direction ({theta}, {phi}) out of range: need 0 <= theta <= pi, 0 <= phi < 2pi")]
    InvalidDirection { theta: f64, phi: f64 },
    #[error("directions {0} and {1} coincide or are antipodal")]
    DegenerateDirections(usize, usize),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Ray(#[from] RayError),
}

/// Spin quantum number `j`, stored as `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin {
    two_j: u32,
}

impl Spin {
    pub fn from_twice(two_j: u32) -> Result<Spin, SpinError> {
        if two_j == 0 {
            return Err(SpinError::InvalidSpin("0".into()));
        }
        Ok(Spin { two_j })
    }

    pub fn half() -> Spin {
        Spin { two_j: 1 }
    }

    pub fn twice(self) -> u32 {
        self.two_j
    }

    pub fn value(self) -> f64 {
        self.two_j as f64 / 2.0
    }

    /// `2j + 1`.
    pub fn dim(self) -> usize {
        self.two_j as usize + 1
    }

    /// `2m` for `m = j, j-1, ..., -j`.
    pub fn twice_m_values(self) -> Vec<i32> {
        let tj = self.two_j as i32;
        (0..=tj).map(|k| tj - 2 * k).collect()
    }
}

fn format_half(twice: i32) -> String {
    if twice % 2 == 0 {
        format!("{}", twice / 2)
    } else {
        format!("{twice}/2")
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_half(self.two_j as i32))
    }
}

impl FromStr for Spin {
    type Err = SpinError;

    /// Accepts `1/2`, `3/2`, `1`, or decimals such as `1.5`.
    fn from_str(s: &str) -> Result<Spin, SpinError> {
        let bad = || SpinError::InvalidSpin(s.to_string());
        let twice = if let Some((n, d)) = s.split_once('/') {
            let n: u32 = n.trim().parse().map_err(|_| bad())?;
            match d.trim() {
                "2" => n,
                "1" => n * 2,
                _ => return Err(bad()),
            }
        } else {
            let x: f64 = s.trim().parse().map_err(|_| bad())?;
            let t = 2.0 * x;
            if !t.is_finite() || t < 0.0 || (t - t.round()).abs() > 1e-12 {
                return Err(bad());
            }
            t.round() as u32
        };
        Spin::from_twice(twice).map_err(|_| bad())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub theta: f64,
    pub phi: f64,
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Result<Direction, SpinError> {
        let ok = theta.is_finite()
            && phi.is_finite()
            && (0.0..=std::f64::consts::PI).contains(&theta)
            && (0.0..std::f64::consts::TAU).contains(&phi);
        if ok {
            Ok(Direction { theta, phi })
        } else {
            Err(SpinError::InvalidDirection { theta, phi })
        }
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Three directions in the x-z plane at polar angles 0°, 60°, 120°: the
/// diameters of a regular hexagon.
pub fn hexagon_directions() -> Vec<Direction> {
    (0..3).map(|k| Direction { theta: k as f64 * std::f64::consts::PI / 3.0, phi: 0.0 }).collect()
}

/// Exact `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * BigUint::from(n - i) / BigUint::from(i + 1))
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Parity data for `n` directions grouped `r` at a time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityParams {
    pub n: u64,
    pub r: u64,
    /// Number of POVMs, `C(n, r)`.
    pub povm_count: BigUint,
    /// POVMs per element, `C(n, r) - C(n-1, r)`.
    pub incidence: BigUint,
}

impl ParityParams {
    pub fn new(n: u64, r: u64) -> Result<ParityParams, SpinError> {
        if n < 1 || r < 1 || r > n {
            return Err(SpinError::InvalidParams(format!("need 1 <= r <= n, got n={n}, r={r}")));
        }
        let povm_count = binomial(n, r);
        let incidence = &povm_count - binomial(n - 1, r);
        Ok(ParityParams { n, r, povm_count, incidence })
    }

    /// Odd POVM count and even incidence.
    pub fn parity_ok(&self) -> bool {
        let two = BigUint::from(2u32);
        &self.povm_count % &two == BigUint::one() && (&self.incidence % &two).is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinConstructionParams {
    pub j: Spin,
    pub d: usize,
    pub parity: ParityParams,
}

impl SpinConstructionParams {
    pub fn new(j: Spin, n: u64, r: u64) -> Result<Self, SpinError> {
        if n < 2 {
            return Err(SpinError::InvalidParams(format!("need at least 2 directions, got {n}")));
        }
        Ok(SpinConstructionParams { j, d: j.dim(), parity: ParityParams::new(n, r)? })
    }

    pub fn parity_ok(&self) -> bool {
        self.parity.parity_ok()
    }
}

/// All `(n, r)` with `1 <= r <= n <= n_max`, `C(n,r)` odd and
/// `C(n,r) - C(n-1,r)` even, in ascending `(n, r)` order.
pub fn find_parity_params(n_max: u64) -> Vec<ParityParams> {
    (1..=n_max)
        .flat_map(|n| (1..=n).map(move |r| ParityParams::new(n, r).expect("1 <= r <= n")))
        .filter(ParityParams::parity_ok)
        .collect()
}

/// Wigner small-d matrix `d^j_{m'm}(θ)`; row and column `k` correspond to
/// `m = j - k`.
pub fn wigner_small_d(j: Spin, theta: f64) -> Vec<Vec<f64>> {
    let tj = j.two_j as i64;
    let (s, c) = (theta / 2.0).sin_cos();
    let ms = j.twice_m_values();
    ms.iter()
        .map(|&tmp| {
            ms.iter()
                .map(|&tm| {
                    // All of j±m, j±m' are integers.
                    let a = (tj + tm as i64) / 2;
                    let b = (tj - tm as i64) / 2;
                    let ap = (tj + tmp as i64) / 2;
                    let bp = (tj - tmp as i64) / 2;
                    let norm = factorial(a as u64) * factorial(b as u64) * factorial(ap as u64) * factorial(bp as u64);
                    let k_min = 0.max(a - ap);
                    let k_max = a.min(bp);
                    (k_min..=k_max)
                        .map(|k| {
                            let den = factorial((a - k) as u64)
                                * factorial(k as u64)
                                * factorial((bp - k) as u64)
                                * factorial((k - a + ap) as u64);
                            let coeff = BigRational::new(BigInt::from(norm.clone()), BigInt::from(&den * &den))
                                .to_f64()
                                .unwrap_or(f64::NAN)
                                .sqrt();
                            let sign = if (k - a + ap) % 2 == 0 { 1.0 } else { -1.0 };
                            sign * coeff * c.powi((a + bp - 2 * k) as i32) * s.powi((2 * k - a + ap) as i32)
                        })
                        .sum()
                })
                .collect()
        })
        .collect()
}

/// The `2j+1` states `|j,m; n̂⟩`, `m = j, ..., -j`.
pub fn spin_states(j: Spin, dir: &Direction) -> Vec<Vec<Complex64>> {
    let d = wigner_small_d(j, dir.theta);
    let ms = j.twice_m_values();
    (0..ms.len())
        .map(|col| {
            ms.iter()
                .enumerate()
                .map(|(row, &tmp)| Complex64::from_polar(1.0, -(tmp as f64) / 2.0 * dir.phi) * d[row][col])
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinElement {
    pub id: RayId,
    /// 0-based.
    pub direction: usize,
    /// `2m`.
    pub twice_m: i32,
    /// Projector onto the state, scaled by `1/r`.
    pub operator: ComplexMatrix,
}

/// Element id for direction `dir` (0-based) and basis index `k` (`m = j - k`).
pub fn element_id(j: Spin, dir: usize, k: usize) -> RayId {
    (dir * j.dim() + k + 1) as RayId
}

fn check_directions(directions: &[Direction]) -> Result<(), SpinError> {
    for (i, a) in directions.iter().enumerate() {
        Direction::new(a.theta, a.phi)?;
        let ua = a.unit_vector();
        for (k, b) in directions.iter().enumerate().skip(i + 1) {
            let ub = b.unit_vector();
            let same = (0..3).map(|t| (ua[t] - ub[t]).abs()).fold(0.0, f64::max) < DIRECTION_EPS;
            let opposite = (0..3).map(|t| (ua[t] + ub[t]).abs()).fold(0.0, f64::max) < DIRECTION_EPS;
            if same || opposite {
                return Err(SpinError::DegenerateDirections(i, k));
            }
        }
    }
    Ok(())
}

/// Ray set of all `n·(2j+1)` states, ids per [`element_id`].
pub fn spin_rayset(j: Spin, directions: &[Direction]) -> Result<RaySet, SpinError> {
    check_directions(directions)?;
    let mut rays = Vec::with_capacity(directions.len() * j.dim());
    for (i, dir) in directions.iter().enumerate() {
        for (k, (state, tm)) in spin_states(j, dir).into_iter().zip(j.twice_m_values()).enumerate() {
            let label = format!("dir {} m={}", i + 1, format_half(tm));
            rays.push(Ray::floating(element_id(j, i, k), state, label)?);
        }
    }
    Ok(RaySet::new(j.dim(), rays)?)
}

pub fn spin_elements(j: Spin, directions: &[Direction], r: u64) -> Result<Vec<SpinElement>, SpinError> {
    let rs = spin_rayset(j, directions)?;
    let ms = j.twice_m_values();
    Ok(rs
        .rays()
        .iter()
        .map(|ray| {
            let idx = ray.id as usize - 1;
            SpinElement {
                id: ray.id,
                direction: idx / j.dim(),
                twice_m: ms[idx % j.dim()],
                operator: ray.complex_projector().scale(1.0 / r as f64),
            }
        })
        .collect())
}

/// Lexicographic `r`-subsets of `0..n`.
fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, r, &mut Vec::new(), &mut out);
    out
}

pub fn generate_gks(j: Spin, directions: &[Direction], r: u64) -> Result<CoverStructure, SpinError> {
    generate_gks_with_tolerance(j, directions, r, TOL_ID)
}

/// One POVM per `r`-subset of directions (named `D1+D3`, ...), weight `1/r`,
/// each verified to resolve the identity within `tol`.
pub fn generate_gks_with_tolerance(
    j: Spin,
    directions: &[Direction],
    r: u64,
    tol: f64,
) -> Result<CoverStructure, SpinError> {
    let params = SpinConstructionParams::new(j, directions.len() as u64, r)?;
    let rs = spin_rayset(j, directions)?;
    let weight = ratio(1, r as i64);
    let contexts = combinations(directions.len(), r as usize)
        .into_iter()
        .map(|subset| {
            let name = subset.iter().map(|i| format!("D{}", i + 1)).collect::<Vec<_>>().join("+");
            let ids = subset.iter().flat_map(|&i| (0..j.dim()).map(move |k| element_id(j, i, k)));
            Context::new(name, ids, weight.clone())
        })
        .collect();
    let cs = CoverStructure::new(rs, CoverKind::Povm, contexts, tol)?;
    let expected = params.parity.incidence.to_usize().unwrap_or(usize::MAX);
    debug_assert!(cs.incidence().values().all(|&c| c == expected));
    Ok(cs)
}

/// Largest deviation of `Σ_m |j,m;n̂⟩⟨j,m;n̂|` from the identity.
pub fn direction_completeness_error(j: Spin, dir: &Direction) -> f64 {
    let projs: Vec<ComplexMatrix> = spin_states(j, dir)
        .iter()
        .map(|s| crate::algebra::complex_projector(s).expect("unit state"))
        .collect();
    complex_weighted_sum(j.dim(), &projs, 1.0)
        .expect("same dim")
        .max_abs_diff(&ComplexMatrix::identity(j.dim()))
}

pub fn parse_directions(text: &str) -> Result<Vec<Direction>, SpinError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let err = |msg: String| SpinError::Parse { line, msg };
        if toks[0] != "dir" || toks.len() != 3 {
            return Err(err("expected `dir <theta> <phi>`".into()));
        }
        let theta: f64 = toks[1].parse().map_err(|_| err(format!("bad theta `{}`", toks[1])))?;
        let phi: f64 = toks[2].parse().map_err(|_| err(format!("bad phi `{}`", toks[2])))?;
        out.push(Direction::new(theta, phi).map_err(|e| err(e.to_string()))?);
    }
    Ok(out)
}

pub fn write_directions(dirs: &[Direction]) -> String {
    dirs.iter().map(|d| format!("dir {:?} {:?}\n", d.theta, d.phi)).collect()
}
