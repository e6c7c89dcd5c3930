//! Assignment search procedures.
//!
//! * [`solve_optimal`]: exhaustive depth-first enumeration of injective component-to-VM
//!   matchings, pruning partial matchings that already break a constraint.
//! * [`solve_crrm`]: connection-restricted random matching. Each attempt visits every
//!   component once in random order and places it on a uniformly drawn VM that satisfies
//!   the constraints against already-placed neighbors; the best completed attempt wins.
//! * [`solve_dpm`]: degree-preferred greedy baseline.
//! * [`solve_etpm`]: execution-time-preferred greedy baseline.
//!
//! All solvers are deterministic in `(instance, parameters, seed)`. Candidates are compared
//! by total objective first and by the `(sp, vm)` sequence in component order second.

mod crrm;
mod greedy;
mod optimal;
mod space;

use std::cmp::Ordering;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Assignment, Instance};
use crate::objective::ObjectiveBreakdown;
use crate::scalar::Scalar;
use crate::validate::{validate_instance, Violation};

pub use crrm::{solve_crrm, solve_crrm_with};
pub use greedy::{solve_dpm, solve_etpm};
pub use optimal::{solve_optimal, solve_optimal_with};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Solved,
    Infeasible,
    /// Time budget ran out; the report carries the best assignment found so far, if any.
    Aborted,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Solved => "solved",
            Status::Infeasible => "infeasible",
            Status::Aborted => "aborted",
        }
    }
}

/// Best-so-far objective after `iteration` candidates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TracePoint<T> {
    pub iteration: u64,
    pub best_total: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SolverReport<T> {
    pub solver: String,
    pub status: Status,
    pub assignment: Option<Assignment>,
    pub breakdown: Option<ObjectiveBreakdown<T>>,
    pub trace: Vec<TracePoint<T>>,
    /// Seconds spent inside the solver.
    pub wall_time: f64,
    pub seed: u64,
    /// Search-tree nodes for the optimal solver, completed attempts for CRRM,
    /// and complete assignments for the greedy baselines.
    pub evaluations: u64,
}

impl<T: Scalar> SolverReport<T> {
    pub fn total(&self) -> Option<T> {
        self.breakdown.as_ref().map(|b| b.total)
    }

    pub fn is_solved(&self) -> bool {
        self.status == Status::Solved
    }

    /// Copy with `wall_time` zeroed, for comparing runs.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_time: 0.0,
            ..self.clone()
        }
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("instance is invalid: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidInstance(Vec<Violation>),
    #[error("CRRM needs at least one iteration")]
    ZeroIterations,
    #[error("failed to start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

pub(crate) fn check_instance<T: Scalar>(inst: &Instance<T>) -> Result<(), SolveError> {
    let v = validate_instance(inst);
    if v.is_empty() {
        Ok(())
    } else {
        Err(SolveError::InvalidInstance(v))
    }
}

/// Degree of parallelism for solvers that support it. Results never depend on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Workers(pub usize);

impl Workers {
    pub const SEQUENTIAL: Workers = Workers(1);

    pub(crate) fn run<R: Send>(self, f: impl FnOnce() -> R + Send) -> Result<R, SolveError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.0.max(1))
            .build()?;
        Ok(pool.install(f))
    }
}

impl Default for Workers {
    fn default() -> Self {
        Self::SEQUENTIAL
    }
}

/// Random stream for attempt `ordinal` of a run seeded with `seed`.
///
/// ChaCha8 keyed by `seed` (expanded with `seed_from_u64`), with the ChaCha stream id set to
/// `ordinal`. Attempt streams are independent, so attempts can run in any order or in
/// parallel and still draw identical numbers.
pub fn attempt_rng(seed: u64, ordinal: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(ordinal);
    rng
}

/// Uniform index in `0..n`, drawn through `u64` so results do not depend on pointer width.
pub(crate) fn uniform_index(rng: &mut ChaCha8Rng, n: usize) -> usize {
    rng.gen_range(0..n as u64) as usize
}

/// Total order on candidates: objective, then the placement sequence.
pub(crate) fn candidate_cmp<T: Scalar>(a: (T, &[usize]), b: (T, &[usize])) -> Ordering {
    a.0.partial_cmp(&b.0)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.1.cmp(b.1))
}

/// A solver with its parameters, as named in experiment plans and on the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolverSpec {
    Optimal {
        #[serde(default)]
        budget_s: Option<f64>,
    },
    Crrm {
        gamma: u64,
    },
    Dpm,
    Etpm,
}

impl SolverSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SolverSpec::Optimal { .. } => "optimal",
            SolverSpec::Crrm { .. } => "crrm",
            SolverSpec::Dpm => "dpm",
            SolverSpec::Etpm => "etpm",
        }
    }

    pub fn gamma(&self) -> Option<u64> {
        match self {
            SolverSpec::Crrm { gamma } => Some(*gamma),
            _ => None,
        }
    }

    pub fn run<T: Scalar>(
        &self,
        inst: &Instance<T>,
        seed: u64,
        workers: Workers,
    ) -> Result<SolverReport<T>, SolveError> {
        match self {
            SolverSpec::Optimal { budget_s } => {
                let budget = budget_s.map(Duration::from_secs_f64);
                let mut r = solve_optimal_with(inst, budget, workers)?;
                r.seed = seed;
                Ok(r)
            }
            SolverSpec::Crrm { gamma } => solve_crrm_with(inst, *gamma, seed, workers),
            SolverSpec::Dpm => solve_dpm(inst, seed),
            SolverSpec::Etpm => solve_etpm(inst, seed),
        }
    }
}

pub(crate) fn build_report<T: Scalar>(
    space: &space::SearchSpace<'_, T>,
    solver: &str,
    status: Status,
    best: Option<&[usize]>,
    trace: Vec<TracePoint<T>>,
    wall_time: Duration,
    seed: u64,
    evaluations: u64,
) -> SolverReport<T> {
    let assignment = best.map(|p| space.assignment(p));
    let breakdown = assignment
        .as_ref()
        .map(|a| crate::objective::objective(space.inst, a));
    SolverReport {
        solver: solver.to_string(),
        status,
        assignment,
        breakdown,
        trace,
        wall_time: wall_time.as_secs_f64(),
        seed,
        evaluations,
    }
}
