use std::thread;
use std::time::Instant;

use super::{Assignment, ExactlyOne, SearchResult, Status};
use crate::structures::CoverStructure;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOptions {
    /// Worker threads. Values above 1 split the first decision between two
    /// workers; the returned status and witness do not depend on it.
    pub jobs: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { jobs: 1 }
    }
}

pub fn search_assignment(cs: &CoverStructure) -> SearchResult {
    search_assignment_with(cs, &SearchOptions::default())
}

pub fn search_assignment_with(cs: &CoverStructure, opts: &SearchOptions) -> SearchResult {
    search_problem(&ExactlyOne::from_cover(cs), opts)
}

pub fn search_problem(problem: &ExactlyOne, opts: &SearchOptions) -> SearchResult {
    let start = Instant::now();
    let mut solver = Solver::new(problem);
    let (found, nodes) = if !solver.init() {
        (None, 0)
    } else if opts.jobs > 1 {
        solver.run_split()
    } else {
        let found = solver.dfs().then(|| solver.values());
        (found, solver.nodes)
    };

    let witness = found.map(|values| {
        let a = Assignment { values: problem.elements().iter().copied().zip(values).collect() };
        assert!(problem.satisfied_by(&a), "search produced an invalid witness");
        a
    });
    SearchResult {
        status: if witness.is_some() { Status::Sat } else { Status::Unsat },
        witness,
        nodes_visited: nodes,
        elapsed: start.elapsed(),
    }
}

#[derive(Clone)]
struct Solver<'a> {
    contexts: &'a [Vec<usize>],
    ctx_of: Vec<Vec<usize>>,
    /// Decision order: highest incidence first, ties by ascending id.
    order: Vec<usize>,
    value: Vec<Option<bool>>,
    ones: Vec<usize>,
    open: Vec<usize>,
    trail: Vec<usize>,
    queue: Vec<usize>,
    nodes: u64,
}

impl<'a> Solver<'a> {
    fn new(problem: &'a ExactlyOne) -> Self {
        let contexts = problem.context_indices();
        let n = problem.elements().len();
        let mut ctx_of = vec![Vec::new(); n];
        for (c, members) in contexts.iter().enumerate() {
            for &e in members {
                ctx_of[e].push(c);
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        // Elements are sorted by id, so a stable sort keeps ids ascending on ties.
        order.sort_by_key(|&e| std::cmp::Reverse(ctx_of[e].len()));
        Solver {
            contexts,
            ctx_of,
            order,
            value: vec![None; n],
            ones: vec![0; contexts.len()],
            open: contexts.iter().map(Vec::len).collect(),
            trail: Vec::new(),
            queue: Vec::new(),
            nodes: 0,
        }
    }

    /// Fix unconstrained elements to 0 and reject empty contexts.
    fn init(&mut self) -> bool {
        if self.contexts.iter().any(Vec::is_empty) {
            return false;
        }
        for e in 0..self.value.len() {
            if self.ctx_of[e].is_empty() {
                self.value[e] = Some(false);
            }
        }
        true
    }

    fn values(&self) -> Vec<bool> {
        self.value.iter().map(|v| v.expect("complete assignment")).collect()
    }

    fn set(&mut self, e: usize, v: bool) -> bool {
        if let Some(old) = self.value[e] {
            return old == v;
        }
        self.value[e] = Some(v);
        self.trail.push(e);
        for &c in &self.ctx_of[e] {
            self.open[c] -= 1;
            if v {
                self.ones[c] += 1;
            }
        }
        self.queue.push(e);
        true
    }

    fn propagate(&mut self) -> bool {
        while let Some(e) = self.queue.pop() {
            let v = self.value[e].expect("queued elements are assigned");
            for k in 0..self.ctx_of[e].len() {
                let c = self.ctx_of[e][k];
                if v {
                    if self.ones[c] > 1 {
                        return false;
                    }
                    for idx in 0..self.contexts[c].len() {
                        let f = self.contexts[c][idx];
                        if self.value[f].is_none() {
                            self.set(f, false);
                        }
                    }
                } else if self.ones[c] == 0 {
                    match self.open[c] {
                        0 => return false,
                        1 => {
                            let f = *self.contexts[c].iter().find(|&&f| self.value[f].is_none()).unwrap();
                            self.set(f, true);
                        }
                        _ => {}
                    }
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        self.queue.clear();
        while self.trail.len() > mark {
            let e = self.trail.pop().unwrap();
            let v = self.value[e].take().unwrap();
            for &c in &self.ctx_of[e] {
                self.open[c] += 1;
                if v {
                    self.ones[c] -= 1;
                }
            }
        }
    }

    fn next_decision(&self) -> Option<usize> {
        self.order.iter().copied().find(|&e| self.value[e].is_none())
    }

    /// Try `e = v` and continue the search below it.
    fn branch(&mut self, e: usize, v: bool) -> bool {
        let mark = self.trail.len();
        if self.set(e, v) && self.propagate() && self.dfs() {
            return true;
        }
        self.undo(mark);
        false
    }

    fn dfs(&mut self) -> bool {
        let Some(e) = self.next_decision() else { return true };
        self.nodes += 1;
        self.branch(e, true) || self.branch(e, false)
    }

    /// Run the two values of the first decision on separate threads.
    fn run_split(&mut self) -> (Option<Vec<bool>>, u64) {
        let Some(e) = self.next_decision() else {
            return (Some(self.values()), 0);
        };
        let (hi, lo) = thread::scope(|s| {
            let workers: Vec<_> = [true, false]
                .into_iter()
                .map(|v| {
                    let mut w = self.clone();
                    s.spawn(move || {
                        let found = w.branch(e, v).then(|| w.values());
                        (found, w.nodes)
                    })
                })
                .collect();
            let mut results = workers.into_iter().map(|h| h.join().expect("search worker panicked"));
            (results.next().unwrap(), results.next().unwrap())
        });
        (hi.0.or(lo.0), 1 + hi.1 + lo.1)
    }
}
