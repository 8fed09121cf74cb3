//! 0/1 assignments with exactly one value-1 element per context.
//!
//! [`search_assignment`] is a complete backtracking search with propagation;
//! [`exhaustive_oracle`] enumerates every assignment and serves as the
//! independent check on small covers.

pub mod cnf;
mod oracle;
mod search;

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::time::Duration;

use crate::rays::RayId;
use crate::structures::CoverStructure;

pub use oracle::{count_assignments, exhaustive_oracle, OracleError, MAX_ORACLE_ELEMENTS};
pub use search::{search_assignment, search_assignment_with, search_problem, SearchOptions};

/// Value per element; `true` is the value 1 ("white").
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Assignment {
    pub values: BTreeMap<RayId, bool>,
}

impl Assignment {
    /// Ids valued 1, ascending.
    pub fn ones(&self) -> Vec<RayId> {
        self.values.iter().filter(|(_, &v)| v).map(|(&id, _)| id).collect()
    }

    pub fn get(&self, id: RayId) -> Option<bool> {
        self.values.get(&id).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Sat,
    Unsat,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Sat => "SAT",
            Status::Unsat => "UNSAT",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub status: Status,
    /// Present iff `status == Sat`.
    pub witness: Option<Assignment>,
    pub nodes_visited: u64,
    pub elapsed: Duration,
}

impl SearchResult {
    pub fn is_sat(&self) -> bool {
        self.status == Status::Sat
    }
}

/// What deleting an element does to the contexts that contained it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DeletionSemantics {
    /// The context is no longer a complete measurement and is discarded.
    #[default]
    DropContext,
    /// The context keeps its other elements and still needs exactly one 1.
    ShrinkContext,
}

/// Flat exactly-one constraint system: contexts index into `elements`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactlyOne {
    elements: Vec<RayId>,
    contexts: Vec<Vec<usize>>,
}

impl ExactlyOne {
    /// Elements are all rays of the cover, ascending; rays in no context are
    /// unconstrained.
    pub fn from_cover(cs: &CoverStructure) -> ExactlyOne {
        let elements = cs.element_ids();
        let contexts = cs
            .contexts()
            .iter()
            .map(|c| c.element_ids.iter().map(|id| elements.binary_search(id).expect("cover element")).collect())
            .collect();
        ExactlyOne { elements, contexts }
    }

    pub fn new(elements: Vec<RayId>, contexts: Vec<Vec<RayId>>) -> ExactlyOne {
        let mut elements = elements;
        elements.sort_unstable();
        elements.dedup();
        let contexts = contexts
            .into_iter()
            .map(|c| c.into_iter().filter_map(|id| elements.binary_search(&id).ok()).collect())
            .collect();
        ExactlyOne { elements, contexts }
    }

    pub fn elements(&self) -> &[RayId] {
        &self.elements
    }

    pub fn context_count(&self) -> usize {
        self.contexts.len()
    }

    /// Contexts as lists of element ids.
    pub fn contexts(&self) -> Vec<Vec<RayId>> {
        self.contexts.iter().map(|c| c.iter().map(|&i| self.elements[i]).collect()).collect()
    }

    pub(crate) fn context_indices(&self) -> &[Vec<usize>] {
        &self.contexts
    }

    /// The system left after removing element `id`.
    pub fn delete(&self, id: RayId, semantics: DeletionSemantics) -> ExactlyOne {
        let elements: Vec<RayId> = self.elements.iter().copied().filter(|&e| e != id).collect();
        let contexts = self
            .contexts()
            .into_iter()
            .filter(|c| semantics == DeletionSemantics::ShrinkContext || !c.contains(&id))
            .map(|c| c.into_iter().filter(|&e| e != id).collect())
            .collect();
        ExactlyOne::new(elements, contexts)
    }

    /// True iff `a` gives every element a value and every context exactly one 1.
    pub fn satisfied_by(&self, a: &Assignment) -> bool {
        self.elements.iter().all(|id| a.values.contains_key(id))
            && self
                .contexts
                .iter()
                .all(|c| c.iter().filter(|&&i| a.get(self.elements[i]) == Some(true)).count() == 1)
    }
}

/// Independent exactly-one check of `a` against the cover's contexts.
pub fn verify_assignment(cs: &CoverStructure, a: &Assignment) -> bool {
    ExactlyOne::from_cover(cs).satisfied_by(a)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementOutcome {
    /// The deletion leaves a satisfiable system.
    pub collapses: bool,
    pub witness: Option<Assignment>,
    pub nodes_visited: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalityReport {
    pub semantics: DeletionSemantics,
    pub per_element: BTreeMap<RayId, ElementOutcome>,
    /// Every single-element deletion yields SAT.
    pub critical: bool,
}

impl CriticalityReport {
    pub fn collapse_count(&self) -> usize {
        self.per_element.values().filter(|o| o.collapses).count()
    }

    /// One line per element: `<id> <SAT|UNSAT> [ids valued 1]`.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for (id, o) in &self.per_element {
            write!(out, "{id} {}", if o.collapses { "SAT" } else { "UNSAT" }).unwrap();
            if let Some(w) = &o.witness {
                for one in w.ones() {
                    write!(out, " {one}").unwrap();
                }
            }
            out.push('\n');
        }
        out
    }
}

pub fn criticality_report(cs: &CoverStructure, semantics: DeletionSemantics) -> CriticalityReport {
    criticality_report_with(cs, semantics, &SearchOptions::default())
}

/// Delete each element in turn and search the remainder.
pub fn criticality_report_with(
    cs: &CoverStructure,
    semantics: DeletionSemantics,
    opts: &SearchOptions,
) -> CriticalityReport {
    let base = ExactlyOne::from_cover(cs);
    let per_element: BTreeMap<RayId, ElementOutcome> = base
        .elements()
        .iter()
        .map(|&id| {
            let r = search_problem(&base.delete(id, semantics), opts);
            (id, ElementOutcome { collapses: r.is_sat(), witness: r.witness, nodes_visited: r.nodes_visited })
        })
        .collect();
    let critical = per_element.values().all(|o| o.collapses);
    CriticalityReport { semantics, per_element, critical }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, ratio};
    use crate::rays::{build_18ray, build_24cell_rays, build_hexagon_rays, hexagon_pairs, inscribed_tesseracts, Ray, RaySet};
    use crate::structures::{build_gks_cover, build_ks_cover, parity_certificate, Context, CoverKind, Group};

    fn rays18_gks() -> CoverStructure {
        let g = [
            Group::names(&["T1", "T5", "T7"]),
            Group::names(&["T2", "T4", "T8"]),
            Group::names(&["T3", "T6", "T9"]),
        ];
        build_gks_cover(&build_18ray(), &g, &ratio(1, 3)).unwrap()
    }

    fn single_tetrad() -> CoverStructure {
        let rs = build_24cell_rays().filter(|id| id <= 4);
        CoverStructure::new(rs, CoverKind::Basis, vec![Context::new("T", [1, 2, 3, 4], int(1))], 0.0).unwrap()
    }

    fn two_ray_context() -> CoverStructure {
        let rs = RaySet::new(2, vec![Ray::from_ints(1, &[1, 0]).unwrap(), Ray::from_ints(2, &[0, 1]).unwrap()]).unwrap();
        CoverStructure::new(rs, CoverKind::Basis, vec![Context::new("B", [1, 2], int(1))], 0.0).unwrap()
    }

    fn hexagon_gks() -> CoverStructure {
        let [a, b, c] = hexagon_pairs();
        let g = [Group::Ids([a.clone(), b.clone()].concat()), Group::Ids([a, c.clone()].concat()), Group::Ids([b, c].concat())];
        build_gks_cover(&build_hexagon_rays(), &g, &ratio(1, 2)).unwrap()
    }

    #[test]
    fn ks_18ray_unsat() {
        let r = search_assignment(&build_ks_cover(&build_18ray()));
        assert_eq!(r.status, Status::Unsat);
        assert!(r.witness.is_none());
    }

    #[test]
    fn tesseract_gks_unsat() {
        let g: Vec<Group> = inscribed_tesseracts().into_iter().map(Group::Ids).collect();
        let cs = build_gks_cover(&build_24cell_rays(), &g, &ratio(1, 2)).unwrap();
        assert_eq!(search_assignment(&cs).status, Status::Unsat);
    }

    #[test]
    fn single_tetrad_sat_picks_lowest_id() {
        let cs = single_tetrad();
        let r = search_assignment(&cs);
        assert_eq!(r.status, Status::Sat);
        let w = r.witness.unwrap();
        assert_eq!(w.ones(), vec![1]);
        assert!(verify_assignment(&cs, &w));
    }

    #[test]
    fn oracle_examples() {
        let r = exhaustive_oracle(&build_ks_cover(&build_18ray())).unwrap();
        assert_eq!((r.status, r.nodes_visited), (Status::Unsat, 262_144));
        let r = exhaustive_oracle(&hexagon_gks()).unwrap();
        assert_eq!((r.status, r.nodes_visited), (Status::Unsat, 64));
        let cs = two_ray_context();
        assert_eq!(exhaustive_oracle(&cs).unwrap().status, Status::Sat);
        assert_eq!(count_assignments(&cs).unwrap(), 2);
    }

    #[test]
    fn oracle_rejects_large_covers() {
        let cs = CoverStructure::new(big_rayset(26), CoverKind::Basis, vec![], 0.0).unwrap();
        let err = exhaustive_oracle(&cs).unwrap_err();
        assert_eq!(err, OracleError::TooManyElements { elements: 26, max: MAX_ORACLE_ELEMENTS });
        assert!(err.to_string().contains("25"));
    }

    fn big_rayset(n: u32) -> RaySet {
        let rays = (1..=n).map(|k| Ray::from_ints(k, &[1, k as i64]).unwrap()).collect();
        RaySet::new(2, rays).unwrap()
    }

    #[test]
    fn ks_18ray_critical_under_drop() {
        let report = criticality_report(&build_ks_cover(&build_18ray()), DeletionSemantics::DropContext);
        assert!(report.critical);
        assert_eq!(report.collapse_count(), 18);
        let cs = build_ks_cover(&build_18ray());
        for (id, o) in &report.per_element {
            let w = o.witness.as_ref().unwrap();
            let reduced = ExactlyOne::from_cover(&cs).delete(*id, DeletionSemantics::DropContext);
            assert!(reduced.satisfied_by(w));
            assert!(w.get(*id).is_none());
        }
    }

    #[test]
    fn shrink_semantics_keeps_parity_obstruction() {
        // Removing one element from both of its contexts leaves an odd number
        // of contexts with every remaining element still counted twice.
        let report = criticality_report(&rays18_gks(), DeletionSemantics::ShrinkContext);
        assert!(!report.critical);
        assert_eq!(report.collapse_count(), 0);
    }

    #[test]
    fn single_context_deletion_is_trivially_sat() {
        let report = criticality_report(&single_tetrad(), DeletionSemantics::DropContext);
        assert!(report.critical);
        assert!(report.per_element.values().all(|o| o.witness.as_ref().unwrap().ones().is_empty()));
    }

    #[test]
    fn table_format() {
        let report = criticality_report(&single_tetrad(), DeletionSemantics::ShrinkContext);
        assert_eq!(report.table(), "1 SAT 2\n2 SAT 1\n3 SAT 1\n4 SAT 1\n");
    }

    #[test]
    fn parity_implies_unsat_on_builtin_covers() {
        for cs in [build_ks_cover(&build_18ray()), rays18_gks(), hexagon_gks()] {
            assert!(parity_certificate(&cs).valid);
            assert_eq!(search_assignment(&cs).status, Status::Unsat);
        }
    }

    #[test]
    fn parallel_matches_serial() {
        for cs in [build_ks_cover(&build_18ray()), single_tetrad(), rays18_gks()] {
            let serial = search_assignment(&cs);
            let par = search_assignment_with(&cs, &SearchOptions { jobs: 4 });
            assert_eq!(serial.status, par.status);
            assert_eq!(serial.witness, par.witness);
        }
    }

    #[test]
    fn deterministic_node_counts() {
        let cs = build_ks_cover(&crate::rays::build_peres24());
        let a = search_assignment(&cs);
        let b = search_assignment(&cs);
        assert_eq!((a.status, a.nodes_visited), (b.status, b.nodes_visited));
    }

    #[test]
    fn empty_context_is_unsat() {
        let p = ExactlyOne::new(vec![1, 2], vec![vec![1, 2], vec![]]);
        assert_eq!(search_problem(&p, &SearchOptions::default()).status, Status::Unsat);
    }
}
