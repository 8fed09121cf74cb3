//! Orthogonality graphs, basis enumeration, KS/GKS covers and parity
//! certificates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;

use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::algebra::{
    complex_weighted_sum, format_rational, is_identity, parse_rational, weighted_sum_dim,
    ComplexMatrix, Rational, RationalMatrix, TOL_ID,
};
use crate::rays::{Backend, Ray, RayId, RaySet, TOL_ORTHO};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context {
    pub name: String,
    /// Sorted ascending, no repeats.
    pub element_ids: Vec<RayId>,
    pub weight: Rational,
}

impl Context {
    pub fn new(name: impl Into<String>, ids: impl IntoIterator<Item = RayId>, weight: Rational) -> Self {
        let set: BTreeSet<RayId> = ids.into_iter().collect();
        Context { name: name.into(), element_ids: set.into_iter().collect(), weight }
    }

    pub fn len(&self) -> usize {
        self.element_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.element_ids.is_empty()
    }

    pub fn contains(&self, id: RayId) -> bool {
        self.element_ids.binary_search(&id).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoverKind {
    /// Orthogonal bases (KS).
    Basis,
    /// Weighted rank-1 POVMs (GKS).
    Povm,
}

impl CoverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CoverKind::Basis => "basis",
            CoverKind::Povm => "povm",
        }
    }
}

/// Deviation of a would-be POVM from the identity.
#[derive(Debug, Clone, PartialEq)]
pub enum Residual {
    Exact(RationalMatrix),
    Floating { max_abs: f64, matrix: ComplexMatrix },
}

impl fmt::Display for Residual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Residual::Exact(m) => write!(f, "exact residual\n{m}"),
            Residual::Floating { max_abs, matrix } => {
                writeln!(f, "max |residual| = {max_abs:e}")?;
                for i in 0..matrix.dim() {
                    let row: Vec<String> =
                        (0..matrix.dim()).map(|j| format!("{:.3e}", matrix[(i, j)])).collect();
                    writeln!(f, "[{}]", row.join(" "))?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoverError {
    #[error("context {context}: unknown element id {id}")]
    UnknownElement { context: String, id: RayId },
    #[error("unknown context name {0}")]
    UnknownContextName(String),
    #[error("context {0} is empty")]
    EmptyContext(String),
    #[error("context {context} repeats element {id}")]
    RepeatedElement { context: String, id: RayId },
    #[error("context {context} has {found} rays, a basis needs {dim}")]
    BasisSize { context: String, dim: usize, found: usize },
    #[error("context {context}: rays {a} and {b} are not orthogonal")]
    NotOrthogonal { context: String, a: RayId, b: RayId },
    #[error("POVM weight must be positive, got {0}")]
    NonPositiveWeight(String),
    #[error("POVM {context} is not a resolution of the identity: {residual}")]
    Incomplete { context: String, residual: Residual },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Orthogonality graph over the rays of a set, indexed by position in the set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalityGraph {
    ids: Vec<RayId>,
    adj: Vec<Vec<usize>>,
}

impl OrthogonalityGraph {
    pub fn ids(&self) -> &[RayId] {
        &self.ids
    }

    fn index(&self, id: RayId) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }

    /// Neighbouring ray ids, ascending.
    pub fn neighbors(&self, id: RayId) -> Vec<RayId> {
        let mut out: Vec<RayId> = self
            .index(id)
            .map(|i| self.adj[i].iter().map(|&j| self.ids[j]).collect())
            .unwrap_or_default();
        out.sort_unstable();
        out
    }

    pub fn degree(&self, id: RayId) -> usize {
        self.index(id).map_or(0, |i| self.adj[i].len())
    }

    pub fn has_edge(&self, a: RayId, b: RayId) -> bool {
        match (self.index(a), self.index(b)) {
            (Some(i), Some(j)) => self.adj[i].contains(&j),
            _ => false,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }
}

pub fn orthogonality_graph(rs: &RaySet) -> OrthogonalityGraph {
    orthogonality_graph_with_tolerance(rs, TOL_ORTHO)
}

/// `tol` only applies to floating ray sets; exact sets test for zero.
pub fn orthogonality_graph_with_tolerance(rs: &RaySet, tol: f64) -> OrthogonalityGraph {
    let rays = rs.rays();
    let mut adj = vec![Vec::new(); rays.len()];
    for i in 0..rays.len() {
        for j in i + 1..rays.len() {
            if rs.orthogonal(&rays[i], &rays[j], tol) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    OrthogonalityGraph { ids: rs.ids(), adj }
}

/// Bron–Kerbosch with pivoting; reports maximal cliques.
fn bron_kerbosch(
    adj: &[BTreeSet<usize>],
    r: &mut Vec<usize>,
    mut p: BTreeSet<usize>,
    mut x: BTreeSet<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() {
        if x.is_empty() {
            out.push(r.clone());
        }
        return;
    }
    let pivot = *p.union(&x).max_by_key(|&&u| p.intersection(&adj[u]).count()).unwrap();
    let candidates: Vec<usize> = p.difference(&adj[pivot]).copied().collect();
    for v in candidates {
        r.push(v);
        let np = p.intersection(&adj[v]).copied().collect();
        let nx = x.intersection(&adj[v]).copied().collect();
        bron_kerbosch(adj, r, np, nx, out);
        r.pop();
        p.remove(&v);
        x.insert(v);
    }
}

fn basis_prefix(dim: usize) -> &'static str {
    if dim == 4 {
        "T"
    } else {
        "B"
    }
}

pub fn enumerate_bases(rs: &RaySet) -> Vec<Context> {
    enumerate_bases_with_tolerance(rs, TOL_ORTHO)
}

/// All complete orthogonal bases in the set, as weight-1 contexts sorted by
/// their id lists and named `T1, T2, ...` (tetrads) or `B1, ...` otherwise.
pub fn enumerate_bases_with_tolerance(rs: &RaySet, tol: f64) -> Vec<Context> {
    let graph = orthogonality_graph_with_tolerance(rs, tol);
    let adj: Vec<BTreeSet<usize>> = graph.adj.iter().map(|a| a.iter().copied().collect()).collect();
    let mut cliques = Vec::new();
    bron_kerbosch(&adj, &mut Vec::new(), (0..adj.len()).collect(), BTreeSet::new(), &mut cliques);

    let mut bases: Vec<Vec<RayId>> = cliques
        .into_iter()
        .filter(|c| c.len() == rs.dim())
        .map(|c| {
            let mut ids: Vec<RayId> = c.into_iter().map(|i| graph.ids[i]).collect();
            ids.sort_unstable();
            ids
        })
        .collect();
    bases.sort();
    bases.dedup();
    let prefix = basis_prefix(rs.dim());
    bases
        .into_iter()
        .enumerate()
        .map(|(k, ids)| Context::new(format!("{prefix}{}", k + 1), ids, Rational::from_integer(1.into())))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverStructure {
    rays: RaySet,
    kind: CoverKind,
    contexts: Vec<Context>,
    incidence: BTreeMap<RayId, usize>,
}

impl CoverStructure {
    /// Builds and verifies a cover. Basis contexts must be complete orthogonal
    /// bases; POVM contexts must resolve the identity (exactly, or within
    /// `tol` on the floating backend).
    pub fn new(rays: RaySet, kind: CoverKind, contexts: Vec<Context>, tol: f64) -> Result<Self, CoverError> {
        for ctx in &contexts {
            validate_context(&rays, kind, ctx, tol)?;
        }
        Ok(Self::assemble(rays, kind, contexts))
    }

    fn assemble(rays: RaySet, kind: CoverKind, contexts: Vec<Context>) -> Self {
        let mut incidence: BTreeMap<RayId, usize> = rays.ids().into_iter().map(|id| (id, 0)).collect();
        for ctx in &contexts {
            for id in &ctx.element_ids {
                *incidence.entry(*id).or_default() += 1;
            }
        }
        CoverStructure { rays, kind, contexts, incidence }
    }

    pub fn rays(&self) -> &RaySet {
        &self.rays
    }

    pub fn kind(&self) -> CoverKind {
        self.kind
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    /// Number of contexts containing each element; zero for unused rays.
    pub fn incidence(&self) -> &BTreeMap<RayId, usize> {
        &self.incidence
    }

    /// Element ids, ascending.
    pub fn element_ids(&self) -> Vec<RayId> {
        self.incidence.keys().copied().collect()
    }

    /// The common weight if all contexts share one.
    pub fn weight(&self) -> Option<&Rational> {
        let first = &self.contexts.first()?.weight;
        self.contexts.iter().all(|c| &c.weight == first).then_some(first)
    }

    /// Re-run every orthogonality or completeness check.
    pub fn reverify(&self, tol: f64) -> Result<(), CoverError> {
        self.contexts.iter().try_for_each(|c| validate_context(&self.rays, self.kind, c, tol))
    }
}

fn validate_context(rays: &RaySet, kind: CoverKind, ctx: &Context, tol: f64) -> Result<(), CoverError> {
    if ctx.is_empty() {
        return Err(CoverError::EmptyContext(ctx.name.clone()));
    }
    let members: Vec<&Ray> = ctx
        .element_ids
        .iter()
        .map(|&id| rays.get(id).ok_or(CoverError::UnknownElement { context: ctx.name.clone(), id }))
        .collect::<Result<_, _>>()?;
    for w in ctx.element_ids.windows(2) {
        if w[0] == w[1] {
            return Err(CoverError::RepeatedElement { context: ctx.name.clone(), id: w[0] });
        }
    }
    match kind {
        CoverKind::Basis => {
            if members.len() != rays.dim() {
                return Err(CoverError::BasisSize { context: ctx.name.clone(), dim: rays.dim(), found: members.len() });
            }
            for (i, a) in members.iter().enumerate() {
                for b in &members[i + 1..] {
                    if !rays.orthogonal(a, b, tol) {
                        return Err(CoverError::NotOrthogonal { context: ctx.name.clone(), a: a.id, b: b.id });
                    }
                }
            }
            Ok(())
        }
        CoverKind::Povm => {
            if ctx.weight <= Rational::zero() {
                return Err(CoverError::NonPositiveWeight(format_rational(&ctx.weight)));
            }
            match povm_residual(rays, ctx, tol) {
                None => Ok(()),
                Some(residual) => Err(CoverError::Incomplete { context: ctx.name.clone(), residual }),
            }
        }
    }
}

/// `None` when `weight·Σ projectors = I`; otherwise the residual `sum - I`.
pub fn povm_residual(rays: &RaySet, ctx: &Context, tol: f64) -> Option<Residual> {
    let members: Vec<&Ray> = ctx.element_ids.iter().filter_map(|&id| rays.get(id)).collect();
    let dim = rays.dim();
    match rays.backend() {
        Backend::Exact => {
            let mats: Vec<RationalMatrix> = members.iter().filter_map(|r| r.exact_projector()).collect();
            let sum = weighted_sum_dim(dim, &mats, &ctx.weight).expect("rays share the set dimension");
            if is_identity(&sum) {
                None
            } else {
                Some(Residual::Exact(sum.sub(&RationalMatrix::identity(dim)).expect("same dim")))
            }
        }
        Backend::Floating => {
            let mats: Vec<ComplexMatrix> = members.iter().map(|r| r.complex_projector()).collect();
            let w = ctx.weight.to_f64().unwrap_or(f64::NAN);
            let sum = complex_weighted_sum(dim, &mats, w).expect("rays share the set dimension");
            let max_abs = sum.max_abs_diff(&ComplexMatrix::identity(dim));
            if max_abs < tol {
                None
            } else {
                let mut matrix = sum;
                for i in 0..dim {
                    matrix[(i, i)] -= 1.0;
                }
                Some(Residual::Floating { max_abs, matrix })
            }
        }
    }
}

/// Weight-1 cover by every orthogonal basis found in the set.
pub fn build_ks_cover(rs: &RaySet) -> CoverStructure {
    let contexts = enumerate_bases(rs);
    CoverStructure::assemble(rs.clone(), CoverKind::Basis, contexts)
}

/// One group of a GKS grouping: basis names (as produced by
/// [`enumerate_bases`]) or raw ray ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Group {
    Names(Vec<String>),
    Ids(Vec<RayId>),
}

impl Group {
    pub fn names<S: AsRef<str>>(names: &[S]) -> Group {
        Group::Names(names.iter().map(|s| s.as_ref().to_string()).collect())
    }
}

pub fn build_gks_cover(rs: &RaySet, grouping: &[Group], weight: &Rational) -> Result<CoverStructure, CoverError> {
    build_gks_cover_with_tolerance(rs, grouping, weight, TOL_ID)
}

/// POVM cover whose contexts are the unions of each group (shared rays count
/// once), every element scaled by `weight`. Fails unless every context resolves the identity.
pub fn build_gks_cover_with_tolerance(
    rs: &RaySet,
    grouping: &[Group],
    weight: &Rational,
    tol: f64,
) -> Result<CoverStructure, CoverError> {
    if *weight <= Rational::zero() {
        return Err(CoverError::NonPositiveWeight(format_rational(weight)));
    }
    let needs_bases = grouping.iter().any(|g| matches!(g, Group::Names(_)));
    let bases = if needs_bases { enumerate_bases_with_tolerance(rs, tol.max(TOL_ORTHO)) } else { Vec::new() };

    let mut contexts = Vec::with_capacity(grouping.len());
    for (k, group) in grouping.iter().enumerate() {
        let (name, ids) = match group {
            Group::Names(names) => {
                let mut ids = Vec::new();
                for n in names {
                    let basis = bases.iter().find(|b| &b.name == n).ok_or_else(|| CoverError::UnknownContextName(n.clone()))?;
                    ids.extend_from_slice(&basis.element_ids);
                }
                (names.join("+"), ids)
            }
            Group::Ids(ids) => (format!("P{}", k + 1), ids.clone()),
        };
        contexts.push(Context::new(name, ids, weight.clone()));
    }
    CoverStructure::new(rs.clone(), CoverKind::Povm, contexts, tol)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCertificate {
    pub context_count: usize,
    pub incidence_counts: BTreeMap<RayId, usize>,
    pub valid: bool,
}

impl ParityCertificate {
    /// Common incidence if every element has the same one.
    pub fn uniform_incidence(&self) -> Option<usize> {
        let mut it = self.incidence_counts.values();
        let first = *it.next()?;
        it.all(|&c| c == first).then_some(first)
    }
}

/// An odd number of contexts in which every element occurs a nonzero even
/// number of times rules out any exactly-one 0/1 assignment: summing the
/// value-1 elements per context gives an odd total, summing per element an
/// even one.
pub fn parity_certificate(cs: &CoverStructure) -> ParityCertificate {
    let context_count = cs.contexts.len();
    let incidence_counts = cs.incidence.clone();
    let valid = context_count % 2 == 1 && incidence_counts.values().all(|&c| c > 0 && c % 2 == 0);
    ParityCertificate { context_count, incidence_counts, valid }
}

/// Parsed cover file before it is bound to a ray set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverFile {
    pub kind: CoverKind,
    pub weight: Rational,
    pub contexts: Vec<(String, Vec<RayId>)>,
}

impl CoverFile {
    pub fn from_cover(cs: &CoverStructure) -> CoverFile {
        let weight = cs.weight().cloned().unwrap_or_else(|| Rational::from_integer(1.into()));
        CoverFile {
            kind: cs.kind,
            weight,
            contexts: cs.contexts.iter().map(|c| (c.name.clone(), c.element_ids.clone())).collect(),
        }
    }

    /// Bind to `rays` and verify every context.
    pub fn resolve(&self, rays: &RaySet, tol: f64) -> Result<CoverStructure, CoverError> {
        let contexts = self
            .contexts
            .iter()
            .map(|(name, ids)| {
                let ctx = Context::new(name.clone(), ids.iter().copied(), self.weight.clone());
                if ctx.len() != ids.len() {
                    let mut seen = BTreeSet::new();
                    let dup = ids.iter().find(|id| !seen.insert(**id)).copied().unwrap_or_default();
                    return Err(CoverError::RepeatedElement { context: name.clone(), id: dup });
                }
                Ok(ctx)
            })
            .collect::<Result<Vec<_>, _>>()?;
        CoverStructure::new(rays.clone(), self.kind, contexts, tol)
    }

    pub fn write(&self) -> String {
        let mut out = String::new();
        writeln!(out, "kind {}", self.kind.as_str()).unwrap();
        writeln!(out, "weight {}/{}", self.weight.numer(), self.weight.denom()).unwrap();
        for (name, ids) in &self.contexts {
            write!(out, "ctx {name}").unwrap();
            for id in ids {
                write!(out, " {id}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<CoverFile, CoverError> {
        let mut kind = None;
        let mut weight = None;
        let mut contexts = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |msg: String| CoverError::Parse { line, msg };
            let body = raw.split('#').next().unwrap_or("");
            let mut toks = body.split_whitespace();
            let Some(head) = toks.next() else { continue };
            match head {
                "kind" => {
                    let k = match toks.next() {
                        Some("basis") => CoverKind::Basis,
                        Some("povm") => CoverKind::Povm,
                        other => return Err(err(format!("expected `kind basis|povm`, got {other:?}"))),
                    };
                    if kind.replace(k).is_some() {
                        return Err(err("repeated `kind` line".into()));
                    }
                }
                "weight" => {
                    let w = toks
                        .next()
                        .and_then(parse_rational)
                        .ok_or_else(|| err("expected `weight p/q`".into()))?;
                    if weight.replace(w).is_some() {
                        return Err(err("repeated `weight` line".into()));
                    }
                }
                "ctx" => {
                    let name = toks.next().ok_or_else(|| err("expected `ctx <name> <ids...>`".into()))?;
                    let ids = toks
                        .map(|t| t.parse::<RayId>().map_err(|_| err(format!("bad element id `{t}`"))))
                        .collect::<Result<Vec<_>, _>>()?;
                    if ids.is_empty() {
                        return Err(err(format!("context {name} has no elements")));
                    }
                    contexts.push((name.to_string(), ids));
                }
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }
        let kind = kind.ok_or(CoverError::Parse { line: 0, msg: "missing `kind` line".into() })?;
        let weight = weight.unwrap_or_else(|| Rational::from_integer(1.into()));
        Ok(CoverFile { kind, weight, contexts })
    }
}

pub fn write_cover(cs: &CoverStructure) -> String {
    CoverFile::from_cover(cs).write()
}
