//! Exact rational vectors and matrices, plus a small floating complex backend.
//!
//! Integer-coordinate ray sets are checked with [`RationalMatrix`], so POVM
//! completeness holds with zero tolerance. Spin-j states involve half-angle
//! cosines and live in [`ComplexMatrix`], compared against [`TOL_HERM`] and
//! [`TOL_ID`].

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always reduced with a positive denominator.
pub type Rational = BigRational;

/// Hermiticity tolerance for floating projectors.
pub const TOL_HERM: f64 = 1e-10;
/// Tolerance for floating identity-resolution checks.
pub const TOL_ID: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cannot build a projector from the zero vector")]
    ZeroVector,
}

/// Shorthand for an integer-valued rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `num / den`. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Render a rational as `p/q`, or `p` when the denominator is 1.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parse `p`, `-p` or `p/q` into a reduced rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.parse::<BigInt>().ok()?, d.parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalVector(Vec<Rational>);

impl RationalVector {
    pub fn new(components: Vec<Rational>) -> Self {
        RationalVector(components)
    }

    pub fn from_ints(components: &[i64]) -> Self {
        RationalVector(components.iter().map(|&c| int(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> RationalVector {
        RationalVector(self.0.iter().map(|x| x * c).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.0.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

impl Index<usize> for RationalVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", format_rational(c))?;
        }
        write!(f, ")")
    }
}

/// Exact inner product.
pub fn dot(u: &RationalVector, v: &RationalVector) -> Result<Rational, AlgebraError> {
    if u.dim() != v.dim() {
        return Err(AlgebraError::DimensionMismatch { expected: u.dim(), found: v.dim() });
    }
    Ok(u.0.iter().zip(&v.0).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
}

/// Square matrix with exact rational entries, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    dim: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(dim: usize) -> Self {
        RationalMatrix { dim, entries: vec![Rational::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn diagonal(diag: &[Rational]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, x) in diag.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix, AlgebraError> {
        if self.dim != other.dim {
            return Err(AlgebraError::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &RationalMatrix) -> Result<RationalMatrix, AlgebraError> {
        if self.dim != other.dim {
            return Err(AlgebraError::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(RationalMatrix { dim: self.dim, entries })
    }

    pub fn trace(&self) -> Rational {
        (0..self.dim).fold(Rational::zero(), |acc, i| acc + &self[(i, i)])
    }

    pub fn transpose(&self) -> RationalMatrix {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.entries[i * self.dim + j]
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|j| format_rational(&self[(i, j)])).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// `v·vᵀ / (vᵀ·v)`, computed exactly without normalizing `v`.
pub fn projector(v: &RationalVector) -> Result<RationalMatrix, AlgebraError> {
    if v.is_zero() {
        return Err(AlgebraError::ZeroVector);
    }
    let norm = dot(v, v)?;
    let n = v.dim();
    let mut m = RationalMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = &v[i] * &v[j] / &norm;
        }
    }
    Ok(m)
}

/// `w · Σ mats`. An empty list yields the zero matrix of dimension 0; use
/// [`weighted_sum_dim`] when the dimension must be preserved.
pub fn weighted_sum(mats: &[RationalMatrix], w: &Rational) -> Result<RationalMatrix, AlgebraError> {
    let dim = mats.first().map_or(0, RationalMatrix::dim);
    weighted_sum_dim(dim, mats, w)
}

pub fn weighted_sum_dim(
    dim: usize,
    mats: &[RationalMatrix],
    w: &Rational,
) -> Result<RationalMatrix, AlgebraError> {
    let mut acc = RationalMatrix::zeros(dim);
    for m in mats {
        if m.dim != dim {
            return Err(AlgebraError::DimensionMismatch { expected: dim, found: m.dim });
        }
        for (a, b) in acc.entries.iter_mut().zip(&m.entries) {
            *a += b;
        }
    }
    for a in acc.entries.iter_mut() {
        *a *= w;
    }
    Ok(acc)
}

pub fn is_identity(m: &RationalMatrix) -> bool {
    *m == RationalMatrix::identity(m.dim)
}

/// Square complex matrix, row-major. Only the spin and hexagon backends use it.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix { dim, entries: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self, s: f64) -> ComplexMatrix {
        ComplexMatrix { dim: self.dim, entries: self.entries.iter().map(|z| z * s).collect() }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() < tol))
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.max_abs_diff(&ComplexMatrix::identity(self.dim)) < tol
    }

    /// `⟨v|M|v⟩`, real part.
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        let n = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += v[i].conj() * self[(i, j)] * v[j];
            }
        }
        acc.re
    }

    pub fn mul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    out[(i, j)] += self[(i, k)] * other[(k, j)];
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

/// Hermitian inner product `⟨u|v⟩`.
pub fn complex_dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// `|v⟩⟨v| / ⟨v|v⟩`.
pub fn complex_projector(v: &[Complex64]) -> Result<ComplexMatrix, AlgebraError> {
    let norm = complex_dot(v, v).re;
    if norm == 0.0 {
        return Err(AlgebraError::ZeroVector);
    }
    let n = v.len();
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = v[i] * v[j].conj() / norm;
        }
    }
    Ok(m)
}

pub fn complex_weighted_sum(
    dim: usize,
    mats: &[ComplexMatrix],
    w: f64,
) -> Result<ComplexMatrix, AlgebraError> {
    let mut acc = ComplexMatrix::zeros(dim);
    for m in mats {
        if m.dim != dim {
            return Err(AlgebraError::DimensionMismatch { expected: dim, found: m.dim });
        }
        for (a, b) in acc.entries.iter_mut().zip(&m.entries) {
            *a += b;
        }
    }
    Ok(acc.scale(w))
}
