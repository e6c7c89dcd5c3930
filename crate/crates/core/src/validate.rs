//! Structural checks on instances. Violations are returned as data, one per offending entity.

use std::collections::HashSet;
use std::fmt;

use crate::model::{ComponentId, Instance, VmRef};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    EmptyTask { task: usize },
    NonPositiveDeadline { component: ComponentId },
    SelfLoop { task: usize, component: usize },
    EdgeOutOfRange { task: usize, a: usize, b: usize },
    DuplicateEdge { task: usize, a: usize, b: usize },
    NonPositiveOmega { task: usize, a: usize, b: usize },
    NonPositiveExecTime { vm: VmRef },
    EmptyReachability { task: usize },
    UnknownReachableSp { task: usize, sp: usize },
    ReachabilityCount { tasks: usize, entries: usize },
    NonPositiveContactRate { a: usize, b: usize },
    MissingExchangeCost { a: usize, b: usize },
    NonPositiveExchangeCost { a: usize, b: usize },
    EpsilonOutOfRange,
    NegativeWeight { name: &'static str },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            EmptyTask { task } => write!(f, "task {task} has no components"),
            NonPositiveDeadline { component } => {
                write!(f, "{component}: deadline must be positive")
            }
            SelfLoop { task, component } => {
                write!(f, "task {task}: self-loop on component {component}")
            }
            EdgeOutOfRange { task, a, b } => {
                write!(f, "task {task}: edge ({a}, {b}) references a missing component")
            }
            DuplicateEdge { task, a, b } => write!(f, "task {task}: duplicate edge ({a}, {b})"),
            NonPositiveOmega { task, a, b } => {
                write!(f, "task {task}: edge ({a}, {b}) has non-positive omega")
            }
            NonPositiveExecTime { vm } => write!(f, "{vm}: execution time must be positive"),
            EmptyReachability { task } => write!(f, "task owner {task} reaches no SP"),
            UnknownReachableSp { task, sp } => {
                write!(f, "task owner {task} lists unknown SP {sp} as reachable")
            }
            ReachabilityCount { tasks, entries } => write!(
                f,
                "reachability has {entries} entries but there are {tasks} task owners"
            ),
            NonPositiveContactRate { a, b } => {
                write!(f, "contact rate between SP {a} and SP {b} must be positive")
            }
            MissingExchangeCost { a, b } => {
                write!(f, "no exchange cost between SP {a} and SP {b}")
            }
            NonPositiveExchangeCost { a, b } => {
                write!(f, "exchange cost between SP {a} and SP {b} must be positive")
            }
            EpsilonOutOfRange => write!(f, "epsilon must lie in [0, 1]"),
            NegativeWeight { name } => write!(f, "weight {name} must be non-negative"),
        }
    }
}

fn positive<T: Scalar>(v: T) -> bool {
    v > T::zero() && v.is_finite()
}

/// Returns every invariant breach of `inst`; empty iff the instance is well formed.
pub fn validate_instance<T: Scalar>(inst: &Instance<T>) -> Vec<Violation> {
    let mut out = Vec::new();

    for (x, task) in inst.tasks().iter().enumerate() {
        let n = task.num_components();
        if n == 0 {
            out.push(Violation::EmptyTask { task: x });
        }
        for (i, &d) in task.deadlines().iter().enumerate() {
            if !positive(d) {
                out.push(Violation::NonPositiveDeadline {
                    component: ComponentId::new(x, i),
                });
            }
        }
        let mut seen = HashSet::new();
        for e in task.edges() {
            if e.a == e.b {
                out.push(Violation::SelfLoop {
                    task: x,
                    component: e.a,
                });
                continue;
            }
            if e.a >= n || e.b >= n {
                out.push(Violation::EdgeOutOfRange {
                    task: x,
                    a: e.a,
                    b: e.b,
                });
                continue;
            }
            if !seen.insert((e.a.min(e.b), e.a.max(e.b))) {
                out.push(Violation::DuplicateEdge {
                    task: x,
                    a: e.a,
                    b: e.b,
                });
            }
            if !positive(e.omega) {
                out.push(Violation::NonPositiveOmega {
                    task: x,
                    a: e.a,
                    b: e.b,
                });
            }
        }
    }

    let vc = inst.vc();
    for slot in vc.slots() {
        if !positive(slot.exec_time) {
            out.push(Violation::NonPositiveExecTime { vm: slot.vm_ref() });
        }
    }

    let reach = vc.reachability();
    if reach.len() != inst.num_tasks() {
        out.push(Violation::ReachabilityCount {
            tasks: inst.num_tasks(),
            entries: reach.len(),
        });
    }
    for (x, set) in reach.iter().enumerate() {
        if set.is_empty() {
            out.push(Violation::EmptyReachability { task: x });
        }
        for &sp in set {
            if sp >= vc.num_sps() {
                out.push(Violation::UnknownReachableSp { task: x, sp });
            }
        }
    }

    for (a, b, lambda) in vc.contact_rates().iter() {
        if !positive(lambda) {
            out.push(Violation::NonPositiveContactRate { a, b });
        }
    }

    let costs = inst.exch_costs();
    for a in 0..vc.num_sps() {
        for b in a + 1..vc.num_sps() {
            match costs.get(a, b) {
                None => out.push(Violation::MissingExchangeCost { a, b }),
                Some(c) if !positive(c) => out.push(Violation::NonPositiveExchangeCost { a, b }),
                Some(_) => {}
            }
        }
    }

    let eps = inst.epsilon();
    if !(eps >= T::zero() && eps <= T::one()) {
        out.push(Violation::EpsilonOutOfRange);
    }
    for (name, w) in [("xi_t", inst.xi_t()), ("xi_c", inst.xi_c())] {
        if !(w >= T::zero() && w.is_finite()) {
            out.push(Violation::NegativeWeight { name });
        }
    }

    out
}
