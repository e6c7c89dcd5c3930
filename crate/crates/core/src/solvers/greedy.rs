//! Greedy baselines. Both place one component at a time on a free VM that passes every
//! constraint against the components placed so far, and give up (infeasible) as soon as a
//! component has no such VM.

use std::cmp::{Ordering, Reverse};
use std::time::Instant;

use super::space::SearchSpace;
use super::{attempt_rng, build_report, check_instance, uniform_index, SolveError, SolverReport, Status, TracePoint};
use crate::model::Instance;
use crate::scalar::Scalar;

/// Degree-preferred mechanism.
///
/// Components go in order of decreasing task-graph degree, ties by `(task, component)`.
/// Each takes the feasible VM whose SP has the largest contact-graph degree; ties go to the
/// lower SP index, then the faster VM, then the lower VM index. `seed` is only recorded.
pub fn solve_dpm<T: Scalar>(inst: &Instance<T>, seed: u64) -> Result<SolverReport<T>, SolveError> {
    check_instance(inst)?;
    let start = Instant::now();
    let space = SearchSpace::new(inst);

    let mut order: Vec<usize> = (0..space.num_components()).collect();
    // stable: equal degrees keep global (task, component) order
    order.sort_by_key(|&g| Reverse(space.neighbors[g].len()));

    let sp_degree: Vec<usize> = (0..inst.vc().num_sps()).map(|s| inst.vc().sp_degree(s)).collect();
    let pick = |space: &SearchSpace<'_, T>, feasible: &mut dyn Iterator<Item = usize>| {
        feasible.min_by(|&a, &b| {
            let (sa, sb) = (&space.vms[a], &space.vms[b]);
            sp_degree[sb.sp_index]
                .cmp(&sp_degree[sa.sp_index])
                .then(sa.sp_index.cmp(&sb.sp_index))
                .then(sa.exec_time.partial_cmp(&sb.exec_time).unwrap_or(Ordering::Equal))
                .then(sa.vm_index.cmp(&sb.vm_index))
        })
    };
    let placement = place_in_order(&space, order.into_iter(), pick);
    Ok(finish(&space, "dpm", placement, start, seed))
}

/// Execution-time-preferred mechanism.
///
/// Components are drawn uniformly at random from those not yet placed, using
/// [`attempt_rng`]`(seed, 0)`. Each takes the fastest feasible VM; ties go to the smaller
/// `(sp, vm)`.
pub fn solve_etpm<T: Scalar>(inst: &Instance<T>, seed: u64) -> Result<SolverReport<T>, SolveError> {
    check_instance(inst)?;
    let start = Instant::now();
    let space = SearchSpace::new(inst);

    let mut rng = attempt_rng(seed, 0);
    let mut remaining: Vec<usize> = (0..space.num_components()).collect();
    let order = std::iter::from_fn(move || {
        if remaining.is_empty() {
            None
        } else {
            let i = uniform_index(&mut rng, remaining.len());
            Some(remaining.swap_remove(i))
        }
    });
    let pick = |space: &SearchSpace<'_, T>, feasible: &mut dyn Iterator<Item = usize>| {
        // admissible lists ascend in (sp, vm), so keeping the first minimum breaks ties
        feasible.fold(None, |best: Option<usize>, v| match best {
            Some(b) if space.vms[b].exec_time <= space.vms[v].exec_time => Some(b),
            _ => Some(v),
        })
    };
    let placement = place_in_order(&space, order, pick);
    Ok(finish(&space, "etpm", placement, start, seed))
}

fn place_in_order<T: Scalar>(
    space: &SearchSpace<'_, T>,
    order: impl Iterator<Item = usize>,
    pick: impl Fn(&SearchSpace<'_, T>, &mut dyn Iterator<Item = usize>) -> Option<usize>,
) -> Option<Vec<usize>> {
    let n = space.num_components();
    let mut free = vec![true; space.num_vms()];
    let mut placed = vec![None; n];
    for comp in order {
        let mut feasible = space.admissible[comp]
            .iter()
            .copied()
            .filter(|&v| free[v] && space.compatible(comp, v, &placed));
        let v = pick(space, &mut feasible)?;
        free[v] = false;
        placed[comp] = Some(v);
    }
    placed.into_iter().collect()
}

fn finish<T: Scalar>(
    space: &SearchSpace<'_, T>,
    name: &str,
    placement: Option<Vec<usize>>,
    start: Instant,
    seed: u64,
) -> SolverReport<T> {
    match placement {
        Some(p) => {
            let total = space.total(&p);
            build_report(
                space,
                name,
                Status::Solved,
                Some(&p),
                vec![TracePoint {
                    iteration: 1,
                    best_total: total,
                }],
                start.elapsed(),
                seed,
                1,
            )
        }
        None => build_report(space, name, Status::Infeasible, None, vec![], start.elapsed(), seed, 0),
    }
}
