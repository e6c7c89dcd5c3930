//! Objective evaluation and constraint predicates.
//!
//! The objective of an assignment is `ξ_t·‖U^t‖₂ + ξ_c·U^c` where `U^t` holds each task's
//! completion time (slowest assigned VM) and `U^c` sums the exchange cost of every task edge
//! cut across two SPs. Feasibility combines VM capacity, the contact-duration condition
//! `e^(−λω) ≥ ε` on cut edges, and per-component deadline and reachability admissibility.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{Assignment, ComponentId, Instance, OmegaMode, TaskEdge, VmRef, VmSlot};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ObjectiveBreakdown<T> {
    /// Completion time of each task, in task order.
    pub per_task_completion: Vec<T>,
    /// 2-norm of `per_task_completion`.
    pub completion_norm: T,
    /// Sum of exchange costs over cut task edges.
    pub exchange_cost: T,
    /// `xi_t * completion_norm + xi_c * exchange_cost`.
    pub total: T,
}

/// P(contact duration > ω) = e^(−λω) must reach ε.
pub fn contact_feasible<T: Scalar>(lambda: T, omega: T, epsilon: T) -> bool {
    (-(lambda * omega)).exp() >= epsilon
}

/// Deadline and range admissibility of hosting `comp` on `slot`.
///
/// Equal deadline and execution time is admissible.
pub fn slot_admissible<T: Scalar>(inst: &Instance<T>, comp: ComponentId, slot: &VmSlot<T>) -> bool {
    slot.exec_time <= inst.deadline(comp) && inst.vc().reachable(comp.task, slot.sp_index)
}

/// The connecting duration a task edge requires once its endpoints sit on `s1`/`s2`.
pub fn effective_omega<T: Scalar>(mode: OmegaMode, edge_omega: T, s1: &VmSlot<T>, s2: &VmSlot<T>) -> T {
    match mode {
        OmegaMode::Static => edge_omega,
        OmegaMode::DerivedMin => s1.exec_time.min(s2.exec_time),
    }
}

/// Contact condition for a task edge of weight `edge_omega` hosted on `s1`/`s2`.
/// SP pairs without a contact link never stay in contact, so only ε = 0 admits them.
pub(crate) fn edge_feasible_with<T: Scalar>(
    inst: &Instance<T>,
    edge_omega: T,
    s1: &VmSlot<T>,
    s2: &VmSlot<T>,
) -> bool {
    if s1.sp_index == s2.sp_index {
        return true;
    }
    match inst.vc().contact_rate(s1.sp_index, s2.sp_index) {
        Some(lambda) => contact_feasible(
            lambda,
            effective_omega(inst.omega_mode(), edge_omega, s1, s2),
            inst.epsilon(),
        ),
        None => T::zero() >= inst.epsilon(),
    }
}

fn find_edge<T: Scalar>(inst: &Instance<T>, a: ComponentId, b: ComponentId) -> Option<&TaskEdge<T>> {
    if a.task != b.task {
        return None;
    }
    let task = inst.task(a.task);
    task.neighbors(a.component)
        .iter()
        .find(|&&(n, _)| n == b.component)
        .map(|&(_, e)| &task.edges()[e])
}

/// Contact feasibility of the task edge `(comp, other)` with endpoints on `slot`/`other_slot`.
///
/// # Panics
/// If the two components are not joined by an edge.
pub fn edge_feasible<T: Scalar>(
    inst: &Instance<T>,
    comp: ComponentId,
    other: ComponentId,
    slot: &VmSlot<T>,
    other_slot: &VmSlot<T>,
) -> bool {
    let edge = find_edge(inst, comp, other)
        .unwrap_or_else(|| panic!("{comp} and {other} are not adjacent"));
    edge_feasible_with(inst, edge.omega, slot, other_slot)
}

/// First constraint an assignment breaks.
#[derive(Clone, Debug, PartialEq)]
pub enum ConstraintViolation {
    /// The map does not cover every component with an existing VM.
    NotTotal,
    /// Two components share one VM (capacity).
    Capacity {
        vm: VmRef,
        first: ComponentId,
        second: ComponentId,
    },
    /// Assigned VM is slower than the component tolerates.
    Deadline { component: ComponentId, vm: VmRef },
    /// Assigned VM's SP is outside the task owner's range.
    Unreachable { component: ComponentId, sp: usize },
    /// A cut edge whose SPs are unlikely to stay in contact long enough.
    Contact {
        task: usize,
        a: usize,
        b: usize,
        sps: (usize, usize),
    },
}

impl ConstraintViolation {
    /// Short tag naming the constraint family.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::NotTotal => "total",
            Self::Capacity { .. } => "capacity",
            Self::Deadline { .. } => "deadline",
            Self::Unreachable { .. } => "reachability",
            Self::Contact { .. } => "contact",
        }
    }
}

impl fmt::Display for ConstraintViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotTotal => write!(f, "assignment does not cover every component"),
            Self::Capacity { vm, first, second } => {
                write!(f, "{vm} hosts both {first} and {second}")
            }
            Self::Deadline { component, vm } => write!(f, "{vm} is too slow for {component}"),
            Self::Unreachable { component, sp } => {
                write!(f, "SP {sp} is out of range for {component}")
            }
            Self::Contact { task, a, b, sps } => write!(
                f,
                "task {task} edge ({a}, {b}) cut across SPs {} and {} violates the contact threshold",
                sps.0, sps.1
            ),
        }
    }
}

/// Checks capacity, admissibility of every component and contact feasibility of every edge.
pub fn assignment_feasible<T: Scalar>(
    inst: &Instance<T>,
    a: &Assignment,
) -> Result<(), ConstraintViolation> {
    if !a.is_total_for(inst) {
        return Err(ConstraintViolation::NotTotal);
    }
    if let Some((first, second, vm)) = a.first_collision() {
        return Err(ConstraintViolation::Capacity { vm, first, second });
    }
    let vc = inst.vc();
    for (c, vm) in a.iter() {
        let slot = vc.slot(vm).expect("total assignment");
        if slot.exec_time > inst.deadline(c) {
            return Err(ConstraintViolation::Deadline { component: c, vm });
        }
        if !vc.reachable(c.task, vm.sp) {
            return Err(ConstraintViolation::Unreachable {
                component: c,
                sp: vm.sp,
            });
        }
    }
    for (x, task) in inst.tasks().iter().enumerate() {
        for e in task.edges() {
            let s1 = vc.slot(a.slot(ComponentId::new(x, e.a))).expect("total assignment");
            let s2 = vc.slot(a.slot(ComponentId::new(x, e.b))).expect("total assignment");
            if !edge_feasible_with(inst, e.omega, &s1, &s2) {
                return Err(ConstraintViolation::Contact {
                    task: x,
                    a: e.a,
                    b: e.b,
                    sps: (s1.sp_index, s2.sp_index),
                });
            }
        }
    }
    Ok(())
}

/// Per-task completion times: the slowest assigned VM of each task.
pub fn completion_times<T: Scalar>(inst: &Instance<T>, a: &Assignment) -> Vec<T> {
    let lookup = |c: ComponentId| a.slot(c);
    (0..inst.num_tasks())
        .map(|x| task_completion(inst, x, &lookup))
        .collect()
}

/// Exchange cost summed once per cut task edge.
pub fn exchange_cost<T: Scalar>(inst: &Instance<T>, a: &Assignment) -> T {
    exchange_with(inst, &|c: ComponentId| a.slot(c))
}

pub fn objective<T: Scalar>(inst: &Instance<T>, a: &Assignment) -> ObjectiveBreakdown<T> {
    let lookup = |c: ComponentId| a.slot(c);
    let per_task_completion = completion_times(inst, a);
    let (completion_norm, exchange_cost, total) = score_with(inst, &lookup);
    ObjectiveBreakdown {
        per_task_completion,
        completion_norm,
        exchange_cost,
        total,
    }
}

fn task_completion<T: Scalar>(inst: &Instance<T>, x: usize, lookup: &impl Fn(ComponentId) -> VmRef) -> T {
    let vc = inst.vc();
    (0..inst.task(x).num_components())
        .map(|i| vc.exec_time(lookup(ComponentId::new(x, i))))
        .fold(T::zero(), T::max)
}

fn exchange_with<T: Scalar>(inst: &Instance<T>, lookup: &impl Fn(ComponentId) -> VmRef) -> T {
    let mut sum = T::zero();
    for (x, task) in inst.tasks().iter().enumerate() {
        for e in task.edges() {
            let ya = lookup(ComponentId::new(x, e.a)).sp;
            let yb = lookup(ComponentId::new(x, e.b)).sp;
            if ya != yb {
                // validated instances define every distinct pair
                sum = sum + inst.exch_cost(ya, yb).unwrap_or_else(T::zero);
            }
        }
    }
    sum
}

/// `(completion_norm, exchange_cost, total)` for the map `lookup`.
///
/// Shared by `objective` and the solvers so incumbent totals are bit-identical to the
/// reported breakdown.
pub(crate) fn score_with<T: Scalar>(
    inst: &Instance<T>,
    lookup: &impl Fn(ComponentId) -> VmRef,
) -> (T, T, T) {
    let mut sq = T::zero();
    for x in 0..inst.num_tasks() {
        let c = task_completion(inst, x, lookup);
        sq = sq + c * c;
    }
    let norm = sq.sqrt();
    let exch = exchange_with(inst, lookup);
    (norm, exch, inst.xi_t() * norm + inst.xi_c() * exch)
}
