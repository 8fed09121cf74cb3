//! DIMACS CNF bridge for external SAT solvers.
//!
//! Variable `k` (1-based) is the `k`-th element id in ascending order. Each
//! context contributes one at-least-one clause followed by the pairwise
//! at-most-one clauses `-x_i -x_j` in lexicographic pair order.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Assignment, ExactlyOne};
use crate::rays::RayId;
use crate::structures::CoverStructure;

pub type Literal = i32;
pub type Clause = Vec<Literal>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Clause>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfEncoding {
    pub cnf: Cnf,
    /// `var_ids[k - 1]` is the element behind variable `k`.
    pub var_ids: Vec<RayId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("line {line}: malformed header: {msg}")]
    MalformedHeader { line: usize, msg: String },
    #[error("line {line}: clause data before the `p cnf` header")]
    MissingHeader { line: usize },
    #[error("line {line}: literal {literal} out of range for {num_vars} variables")]
    LiteralOutOfRange { line: usize, literal: i64, num_vars: usize },
    #[error("line {line}: bad token `{token}`")]
    BadToken { line: usize, token: String },
    #[error("line {line}: clause not terminated by 0")]
    UnterminatedClause { line: usize },
    #[error("line {line}: header declares {declared} clauses, found {found}")]
    ClauseCount { line: usize, declared: usize, found: usize },
}

pub fn encode_cnf(cs: &CoverStructure) -> CnfEncoding {
    encode_problem(&ExactlyOne::from_cover(cs))
}

pub fn encode_problem(problem: &ExactlyOne) -> CnfEncoding {
    let mut clauses = Vec::new();
    for ctx in problem.context_indices() {
        let vars: Vec<Literal> = ctx.iter().map(|&i| i as Literal + 1).collect();
        clauses.push(vars.clone());
        for (a, &x) in vars.iter().enumerate() {
            for &y in &vars[a + 1..] {
                clauses.push(vec![-x, -y]);
            }
        }
    }
    CnfEncoding { cnf: Cnf { num_vars: problem.elements().len(), clauses }, var_ids: problem.elements().to_vec() }
}

/// DIMACS text: one `c var <k> ray <id>` line per variable, the header, then
/// clauses. LF line endings.
pub fn export_cnf(cs: &CoverStructure) -> String {
    let enc = encode_cnf(cs);
    let mut out = String::new();
    for (k, id) in enc.var_ids.iter().enumerate() {
        writeln!(out, "c var {} ray {id}", k + 1).unwrap();
    }
    out.push_str(&write_dimacs(&enc.cnf));
    out
}

/// Header and clauses only.
pub fn write_dimacs(cnf: &Cnf) -> String {
    let mut out = String::new();
    writeln!(out, "p cnf {} {}", cnf.num_vars, cnf.clauses.len()).unwrap();
    for clause in &cnf.clauses {
        for lit in clause {
            write!(out, "{lit} ").unwrap();
        }
        out.push_str("0\n");
    }
    out
}

pub fn parse_dimacs(text: &str) -> Result<Cnf, CnfError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Clause = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('p') {
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            let bad = |msg: &str| CnfError::MalformedHeader { line, msg: msg.to_string() };
            if header.is_some() {
                return Err(bad("repeated header"));
            }
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(bad("expected `p cnf <vars> <clauses>`"));
            }
            let vars = parts[2].parse().map_err(|_| bad("variable count is not a number"))?;
            let count = parts[3].parse().map_err(|_| bad("clause count is not a number"))?;
            header = Some((vars, count, line));
            continue;
        }
        let Some((num_vars, _, _)) = header else {
            return Err(CnfError::MissingHeader { line });
        };
        for tok in trimmed.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| CnfError::BadToken { line, token: tok.to_string() })?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() > num_vars as u64 {
                return Err(CnfError::LiteralOutOfRange { line, literal: lit, num_vars });
            } else {
                current.push(lit as Literal);
            }
        }
        last_line = line;
    }

    let Some((num_vars, declared, header_line)) = header else {
        return Err(CnfError::MalformedHeader { line: 0, msg: "missing `p cnf` header".into() });
    };
    if !current.is_empty() {
        return Err(CnfError::UnterminatedClause { line: last_line });
    }
    if clauses.len() != declared {
        return Err(CnfError::ClauseCount { line: header_line, declared, found: clauses.len() });
    }
    Ok(Cnf { num_vars, clauses })
}

/// Read a solver model: `v` lines or bare literals; `s` and `c` lines skipped.
pub fn parse_model(text: &str) -> Result<Vec<Literal>, CnfError> {
    let mut lits = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('s') {
            continue;
        }
        let body = trimmed.strip_prefix('v').unwrap_or(trimmed);
        for tok in body.split_whitespace() {
            let lit: Literal =
                tok.parse().map_err(|_| CnfError::BadToken { line: idx + 1, token: tok.to_string() })?;
            if lit != 0 {
                lits.push(lit);
            }
        }
    }
    Ok(lits)
}

/// Map a model (variables absent from it are false) back to ray ids and check
/// exactly-one in every context.
pub fn verify_model(cs: &CoverStructure, model: &[Literal]) -> bool {
    let problem = ExactlyOne::from_cover(cs);
    let n = problem.elements().len();
    if model.iter().any(|l| l.unsigned_abs() as usize > n || *l == 0) {
        return false;
    }
    let assignment = model_to_assignment(problem.elements(), model);
    problem.satisfied_by(&assignment)
}

pub fn model_to_assignment(var_ids: &[RayId], model: &[Literal]) -> Assignment {
    let values = var_ids
        .iter()
        .enumerate()
        .map(|(k, &id)| (id, model.contains(&(k as Literal + 1))))
        .collect();
    Assignment { values }
}

/// DPLL with unit propagation. Returns a model (index `k - 1` for variable
/// `k`) when satisfiable.
pub fn solve_cnf(cnf: &Cnf) -> Option<Vec<bool>> {
    let mut values = vec![None; cnf.num_vars];
    dpll(&cnf.clauses, &mut values).then(|| values.iter().map(|v| v.unwrap_or(false)).collect())
}

fn lit_value(values: &[Option<bool>], lit: Literal) -> Option<bool> {
    values[lit.unsigned_abs() as usize - 1].map(|v| v == (lit > 0))
}

fn dpll(clauses: &[Clause], values: &mut Vec<Option<bool>>) -> bool {
    loop {
        let mut changed = false;
        for clause in clauses {
            let mut unassigned = None;
            let mut open = 0;
            let mut satisfied = false;
            for &lit in clause {
                match lit_value(values, lit) {
                    Some(true) => {
                        satisfied = true;
                        break;
                    }
                    Some(false) => {}
                    None => {
                        open += 1;
                        unassigned = Some(lit);
                    }
                }
            }
            if satisfied {
                continue;
            }
            match (open, unassigned) {
                (0, _) => return false,
                (1, Some(lit)) => {
                    values[lit.unsigned_abs() as usize - 1] = Some(lit > 0);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    let Some(var) = values.iter().position(Option::is_none) else { return true };
    for v in [true, false] {
        let mut trial = values.clone();
        trial[var] = Some(v);
        if dpll(clauses, &mut trial) {
            *values = trial;
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, ratio};
    use crate::rays::{build_18ray, Ray, RaySet};
    use crate::structures::{build_gks_cover, build_ks_cover, Context, CoverKind, Group};

    fn pair_cover() -> CoverStructure {
        let rs = RaySet::new(2, vec![Ray::from_ints(1, &[1, 0]).unwrap(), Ray::from_ints(2, &[0, 1]).unwrap()]).unwrap();
        CoverStructure::new(rs, CoverKind::Basis, vec![Context::new("B", [1, 2], int(1))], 0.0).unwrap()
    }

    #[test]
    fn smallest_instance_bit_exact() {
        assert_eq!(export_cnf(&pair_cover()), "c var 1 ray 1\nc var 2 ray 2\np cnf 2 2\n1 2 0\n-1 -2 0\n");
    }

    #[test]
    fn clause_counts() {
        let ks = encode_cnf(&build_ks_cover(&build_18ray())).cnf;
        assert_eq!((ks.num_vars, ks.clauses.len()), (18, 9 * (1 + 6)));
        let g = [
            Group::names(&["T1", "T5", "T7"]),
            Group::names(&["T2", "T4", "T8"]),
            Group::names(&["T3", "T6", "T9"]),
        ];
        let gks = encode_cnf(&build_gks_cover(&build_18ray(), &g, &ratio(1, 3)).unwrap()).cnf;
        assert_eq!((gks.num_vars, gks.clauses.len()), (18, 3 * (1 + 66)));
    }

    #[test]
    fn variable_mapping_follows_ascending_ids() {
        let text = export_cnf(&build_ks_cover(&build_18ray()));
        assert!(text.starts_with("c var 1 ray 2\nc var 2 ray 3\nc var 3 ray 4\nc var 4 ray 6\n"));
        assert!(text.contains("c var 18 ray 23\np cnf 18 63\n"));
    }

    #[test]
    fn round_trip() {
        let cs = build_ks_cover(&build_18ray());
        assert_eq!(parse_dimacs(&export_cnf(&cs)).unwrap(), encode_cnf(&cs).cnf);
    }

    #[test]
    fn verify_models() {
        let cs = pair_cover();
        assert!(verify_model(&cs, &[1, -2]));
        assert!(verify_model(&cs, &[-1, 2]));
        assert!(!verify_model(&cs, &[-1, -2]));
        assert!(!verify_model(&cs, &[]));
        assert!(!verify_model(&cs, &[1, 2]));
        assert!(!verify_model(&cs, &[3]));
        assert!(!verify_model(&build_ks_cover(&build_18ray()), &[]));
    }

    #[test]
    fn model_text() {
        assert_eq!(parse_model("s SATISFIABLE\nv 1 -2\nv 3 0\n").unwrap(), vec![1, -2, 3]);
        assert!(parse_model("v 1 x 0").is_err());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert_eq!(
            parse_dimacs("c hi\np cnf x 1\n"),
            Err(CnfError::MalformedHeader { line: 2, msg: "variable count is not a number".into() })
        );
        assert!(matches!(parse_dimacs("p dnf 2 1\n1 0\n"), Err(CnfError::MalformedHeader { line: 1, .. })));
        assert_eq!(
            parse_dimacs("p cnf 2 1\n1 3 0\n"),
            Err(CnfError::LiteralOutOfRange { line: 2, literal: 3, num_vars: 2 })
        );
        assert_eq!(parse_dimacs("p cnf 2 2\n1 2 0\n-1 -2\n"), Err(CnfError::UnterminatedClause { line: 3 }));
        assert_eq!(parse_dimacs("1 2 0\n"), Err(CnfError::MissingHeader { line: 1 }));
        assert!(matches!(parse_dimacs("p cnf 2 3\n1 2 0\n"), Err(CnfError::ClauseCount { line: 1, .. })));
        assert!(matches!(parse_dimacs(""), Err(CnfError::MalformedHeader { line: 0, .. })));
    }

    #[test]
    fn multi_line_clauses_parse() {
        let cnf = parse_dimacs("p cnf 3 2\n1 2\n3 0 -1\n-2 0\n").unwrap();
        assert_eq!(cnf.clauses, vec![vec![1, 2, 3], vec![-1, -2]]);
    }

    #[test]
    fn dpll_decides() {
        let sat = Cnf { num_vars: 2, clauses: vec![vec![1, 2], vec![-1, -2]] };
        let model = solve_cnf(&sat).unwrap();
        assert_eq!(model, vec![true, false]);
        let unsat = Cnf { num_vars: 1, clauses: vec![vec![1], vec![-1]] };
        assert!(solve_cnf(&unsat).is_none());
        assert!(solve_cnf(&encode_cnf(&build_ks_cover(&build_18ray())).cnf).is_none());
    }
}
