use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::space::SearchSpace;
use super::{build_report, check_instance, candidate_cmp, SolveError, SolverReport, Status, TracePoint, Workers};
use crate::model::Instance;
use crate::scalar::Scalar;

// how many nodes between clock reads
const CLOCK_STRIDE: u64 = 1 << 12;

/// Exhaustive search for a minimum-objective feasible assignment.
///
/// Equivalent to trying every ordered selection of distinct VMs for the components and
/// keeping the best feasible one, but walked depth-first in `(sp, vm)` order so that a
/// partial matching breaking a deadline, range or contact constraint is abandoned together
/// with all its completions. Among equal totals the lexicographically smallest `(sp, vm)`
/// sequence wins. `evaluations` counts the tree nodes visited.
pub fn solve_optimal<T: Scalar>(
    inst: &Instance<T>,
    budget: Option<Duration>,
) -> Result<SolverReport<T>, SolveError> {
    solve_optimal_with(inst, budget, Workers::SEQUENTIAL)
}

/// [`solve_optimal`] with the first component's choices explored in parallel.
///
/// Identical output to the sequential search (except `wall_time`) unless the budget expires.
pub fn solve_optimal_with<T: Scalar>(
    inst: &Instance<T>,
    budget: Option<Duration>,
    workers: Workers,
) -> Result<SolverReport<T>, SolveError> {
    check_instance(inst)?;
    let start = Instant::now();
    let deadline = budget.map(|b| start + b);
    let space = SearchSpace::new(inst);
    let n = space.num_components();

    if n > space.num_vms() {
        return Ok(build_report(&space, "optimal", Status::Infeasible, None, vec![], start.elapsed(), 0, 0));
    }

    let outcome = if n == 0 || workers.0 <= 1 {
        let mut dfs = Dfs::new(&space, deadline);
        dfs.descend(0);
        dfs.into_outcome()
    } else {
        let roots = space.admissible[0].clone();
        let parts: Vec<Outcome<T>> = workers.run(|| {
            roots
                .par_iter()
                .map(|&v| {
                    let mut dfs = Dfs::new(&space, deadline);
                    dfs.place_root(v);
                    dfs.into_outcome()
                })
                .collect()
        })?;
        Outcome::merge(parts)
    };

    let status = if outcome.aborted {
        Status::Aborted
    } else if outcome.best.is_some() {
        Status::Solved
    } else {
        Status::Infeasible
    };
    Ok(build_report(
        &space,
        "optimal",
        status,
        outcome.best.as_ref().map(|(_, p)| p.as_slice()),
        outcome.trace,
        start.elapsed(),
        0,
        outcome.nodes,
    ))
}

struct Outcome<T> {
    best: Option<(T, Vec<usize>)>,
    // (leaf ordinal within this search, total) at each improvement
    trace: Vec<TracePoint<T>>,
    leaves: u64,
    nodes: u64,
    aborted: bool,
}

impl<T: Scalar> Outcome<T> {
    /// Combines subtree searches listed in sequential visiting order.
    fn merge(parts: Vec<Outcome<T>>) -> Outcome<T> {
        let mut out = Outcome {
            best: None,
            trace: Vec::new(),
            leaves: 0,
            nodes: 0,
            aborted: false,
        };
        for part in parts {
            // a subtree improvement is global iff it beats everything seen before the subtree
            for tp in &part.trace {
                if out.trace.last().is_none_or(|last| tp.best_total < last.best_total) {
                    out.trace.push(TracePoint {
                        iteration: out.leaves + tp.iteration,
                        best_total: tp.best_total,
                    });
                }
            }
            if let Some((total, placement)) = part.best {
                let better = match &out.best {
                    None => true,
                    Some((bt, bp)) => candidate_cmp((total, &placement), (*bt, bp)).is_lt(),
                };
                if better {
                    out.best = Some((total, placement));
                }
            }
            out.leaves += part.leaves;
            out.nodes += part.nodes;
            out.aborted |= part.aborted;
        }
        out
    }
}

struct Dfs<'s, 'a, T> {
    space: &'s SearchSpace<'a, T>,
    deadline: Option<Instant>,
    used: Vec<bool>,
    placed: Vec<Option<usize>>,
    placement: Vec<usize>,
    out: Outcome<T>,
}

impl<'s, 'a, T: Scalar> Dfs<'s, 'a, T> {
    fn new(space: &'s SearchSpace<'a, T>, deadline: Option<Instant>) -> Self {
        let n = space.num_components();
        Self {
            space,
            deadline,
            used: vec![false; space.num_vms()],
            placed: vec![None; n],
            placement: vec![0; n],
            out: Outcome {
                best: None,
                trace: Vec::new(),
                leaves: 0,
                nodes: 0,
                aborted: false,
            },
        }
    }

    fn into_outcome(self) -> Outcome<T> {
        self.out
    }

    fn place_root(&mut self, v: usize) {
        // component 0 has no placed neighbors, so admissibility is the only filter
        self.visit(0, v);
    }

    fn descend(&mut self, depth: usize) {
        if depth == self.placement.len() {
            self.leaf();
            return;
        }
        let space = self.space;
        for &v in &space.admissible[depth] {
            if self.out.aborted {
                return;
            }
            if self.used[v] || !space.compatible(depth, v, &self.placed) {
                continue;
            }
            self.visit(depth, v);
        }
    }

    fn visit(&mut self, depth: usize, v: usize) {
        self.out.nodes += 1;
        if self.out.nodes % CLOCK_STRIDE == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.out.aborted = true;
                    return;
                }
            }
        }
        self.used[v] = true;
        self.placed[depth] = Some(v);
        self.placement[depth] = v;
        self.descend(depth + 1);
        self.used[v] = false;
        self.placed[depth] = None;
    }

    fn leaf(&mut self) {
        self.out.leaves += 1;
        let total = self.space.total(&self.placement);
        // visiting order is lexicographic, so strict improvement keeps the smallest sequence
        if self.out.best.as_ref().is_none_or(|(bt, _)| total < *bt) {
            self.out.best = Some((total, self.placement.clone()));
            self.out.trace.push(TracePoint {
                iteration: self.out.leaves,
                best_total: total,
            });
        }
    }
}
