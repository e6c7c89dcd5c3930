use std::time::Instant;

use rayon::prelude::*;

use super::space::SearchSpace;
use super::{
    attempt_rng, build_report, candidate_cmp, check_instance, uniform_index, SolveError, SolverReport,
    Status, TracePoint, Workers,
};
use crate::model::Instance;
use crate::scalar::Scalar;

/// Connection-restricted random matching with `gamma` attempts.
///
/// Attempt `r` (1-based) draws from [`attempt_rng`]`(seed, r)`. It takes the components in
/// uniformly random order and puts each on a VM drawn uniformly from those that are free,
/// admissible for the component, and, when the component already has placed neighbors,
/// contact-feasible against all of them. If no such VM exists the attempt is dropped. A
/// completed attempt replaces the incumbent only if it is strictly better; equal totals
/// keep the lexicographically smaller placement.
///
/// The VM draw rejection-samples the admissible list (at most one try per admissible VM)
/// and falls back to scanning it, so an attempt costs O(Σ components) in the common case.
///
/// `trace` has one point per attempt from the first completed attempt on; `evaluations`
/// counts completed attempts.
pub fn solve_crrm<T: Scalar>(inst: &Instance<T>, gamma: u64, seed: u64) -> Result<SolverReport<T>, SolveError> {
    solve_crrm_with(inst, gamma, seed, Workers::SEQUENTIAL)
}

/// [`solve_crrm`] with attempts spread over `workers` threads; output is identical.
pub fn solve_crrm_with<T: Scalar>(
    inst: &Instance<T>,
    gamma: u64,
    seed: u64,
    workers: Workers,
) -> Result<SolverReport<T>, SolveError> {
    check_instance(inst)?;
    if gamma == 0 {
        return Err(SolveError::ZeroIterations);
    }
    let start = Instant::now();
    let space = SearchSpace::new(inst);

    if space.num_vms() == 0 && space.num_components() > 0 {
        return Ok(build_report(&space, "crrm", Status::Infeasible, None, vec![], start.elapsed(), seed, 0));
    }

    let mut best: Option<(T, Vec<usize>)> = None;
    let mut trace = Vec::new();
    let mut completed = 0u64;
    let mut absorb = |r: u64, result: Option<(T, Vec<usize>)>| {
        if let Some((total, placement)) = result {
            completed += 1;
            let better = match &best {
                None => true,
                Some((bt, bp)) => candidate_cmp((total, &placement), (*bt, bp)).is_lt(),
            };
            if better {
                best = Some((total, placement));
            }
        }
        if let Some((bt, _)) = &best {
            trace.push(TracePoint {
                iteration: r,
                best_total: *bt,
            });
        }
    };

    if workers.0 <= 1 {
        let mut scratch = Scratch::new(&space);
        for r in 1..=gamma {
            let result = attempt(&space, seed, r, &mut scratch).map(|p| (space.total(p), p.to_vec()));
            absorb(r, result);
        }
    } else {
        let results: Vec<Option<(T, Vec<usize>)>> = workers.run(|| {
            (1..=gamma)
                .into_par_iter()
                .map_init(
                    || Scratch::new(&space),
                    |scratch, r| attempt(&space, seed, r, scratch).map(|p| (space.total(p), p.to_vec())),
                )
                .collect()
        })?;
        for (r, result) in (1..=gamma).zip(results) {
            absorb(r, result);
        }
    }

    let status = if best.is_some() { Status::Solved } else { Status::Infeasible };
    Ok(build_report(
        &space,
        "crrm",
        status,
        best.as_ref().map(|(_, p)| p.as_slice()),
        trace,
        start.elapsed(),
        seed,
        completed,
    ))
}

struct Scratch {
    remaining: Vec<usize>,
    free: Vec<bool>,
    placed: Vec<Option<usize>>,
    placement: Vec<usize>,
    candidates: Vec<usize>,
}

impl Scratch {
    fn new<T: Scalar>(space: &SearchSpace<'_, T>) -> Self {
        let n = space.num_components();
        Self {
            remaining: Vec::with_capacity(n),
            free: vec![true; space.num_vms()],
            placed: vec![None; n],
            placement: vec![0; n],
            candidates: Vec::with_capacity(space.num_vms()),
        }
    }
}

/// One randomized construction; returns the placement if every component found a VM.
fn attempt<'s, T: Scalar>(
    space: &SearchSpace<'_, T>,
    seed: u64,
    ordinal: u64,
    s: &'s mut Scratch,
) -> Option<&'s [usize]> {
    let mut rng = attempt_rng(seed, ordinal);
    let n = space.num_components();
    s.remaining.clear();
    s.remaining.extend(0..n);
    s.free.fill(true);
    s.placed.fill(None);

    while !s.remaining.is_empty() {
        let pick = uniform_index(&mut rng, s.remaining.len());
        let comp = s.remaining.swap_remove(pick);
        let linked = space.has_placed_neighbor(comp, &s.placed);
        let admissible = &space.admissible[comp];
        if admissible.is_empty() {
            return None;
        }
        let usable = |v: usize, s: &Scratch| s.free[v] && (!linked || space.compatible(comp, v, &s.placed));
        // rejection sampling first; the full scan only runs when valid VMs are scarce
        let mut chosen = None;
        for _ in 0..admissible.len() {
            let v = admissible[uniform_index(&mut rng, admissible.len())];
            if usable(v, s) {
                chosen = Some(v);
                break;
            }
        }
        let v = match chosen {
            Some(v) => v,
            None => {
                s.candidates.clear();
                for &v in admissible {
                    if usable(v, s) {
                        s.candidates.push(v);
                    }
                }
                if s.candidates.is_empty() {
                    return None;
                }
                s.candidates[uniform_index(&mut rng, s.candidates.len())]
            }
        };
        s.free[v] = false;
        s.placed[comp] = Some(v);
        s.placement[comp] = v;
    }
    Some(&s.placement)
}
