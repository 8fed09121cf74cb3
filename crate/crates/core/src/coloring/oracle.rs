use std::time::Instant;

use thiserror::Error;

use super::{Assignment, ExactlyOne, SearchResult, Status};
use crate::structures::CoverStructure;

/// Largest element count the brute-force oracle accepts (2^25 assignments).
pub const MAX_ORACLE_ELEMENTS: usize = 25;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("exhaustive oracle supports at most {max} elements, cover has {elements}")]
    TooManyElements { elements: usize, max: usize },
}

fn masks(cs: &CoverStructure) -> Result<(ExactlyOne, Vec<u32>), OracleError> {
    let problem = ExactlyOne::from_cover(cs);
    let n = problem.elements().len();
    if n > MAX_ORACLE_ELEMENTS {
        return Err(OracleError::TooManyElements { elements: n, max: MAX_ORACLE_ELEMENTS });
    }
    let masks = problem.context_indices().iter().map(|c| c.iter().fold(0u32, |m, &i| m | (1 << i))).collect();
    Ok((problem, masks))
}

fn exactly_one_everywhere(masks: &[u32], assignment: u32) -> bool {
    masks.iter().all(|m| (m & assignment).count_ones() == 1)
}

/// Scan assignments in increasing bitmask order (bit `i` is the `i`-th
/// element id ascending) and stop at the first satisfying one.
/// `nodes_visited` is the number of assignments examined.
pub fn exhaustive_oracle(cs: &CoverStructure) -> Result<SearchResult, OracleError> {
    let start = Instant::now();
    let (problem, masks) = masks(cs)?;
    let total = 1u64 << problem.elements().len();
    let hit = (0..total).find(|&a| exactly_one_everywhere(&masks, a as u32));
    let witness = hit.map(|a| Assignment {
        values: problem.elements().iter().enumerate().map(|(i, &id)| (id, a >> i & 1 == 1)).collect(),
    });
    Ok(SearchResult {
        status: if witness.is_some() { Status::Sat } else { Status::Unsat },
        witness,
        nodes_visited: hit.map_or(total, |a| a + 1),
        elapsed: start.elapsed(),
    })
}

/// Number of satisfying assignments, by full enumeration.
pub fn count_assignments(cs: &CoverStructure) -> Result<u64, OracleError> {
    let (problem, masks) = masks(cs)?;
    let total = 1u64 << problem.elements().len();
    Ok((0..total).filter(|&a| exactly_one_everywhere(&masks, a as u32)).count() as u64)
}
