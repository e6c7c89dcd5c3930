//! Domain types: task graphs, the vehicular cloud, assignments and problem instances.
//!
//! Everything is addressed by dense indices. Task owners (TOs) and their tasks share an
//! index, service providers (SPs) are indexed in `VcGraph::sps`, and a VM is addressed by
//! the pair `(sp, vm)` where `vm` is its position in the SP's inventory.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// One component of one task: `task` indexes the task list, `component` the task's vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ComponentId {
    pub task: usize,
    pub component: usize,
}

impl ComponentId {
    pub const fn new(task: usize, component: usize) -> Self {
        Self { task, component }
    }
}

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "task {} component {}", self.task, self.component)
    }
}

/// Address of a VM inside the cloud. Orders lexicographically by `(sp, vm)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VmRef {
    pub sp: usize,
    pub vm: usize,
}

impl VmRef {
    pub const fn new(sp: usize, vm: usize) -> Self {
        Self { sp, vm }
    }
}

impl fmt::Display for VmRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sp {} vm {}", self.sp, self.vm)
    }
}

/// A resolved VM: its address plus the execution time it offers for one component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VmSlot<T> {
    pub sp_index: usize,
    pub vm_index: usize,
    pub exec_time: T,
}

impl<T> VmSlot<T> {
    pub fn vm_ref(&self) -> VmRef {
        VmRef::new(self.sp_index, self.vm_index)
    }
}

/// How the required connecting duration of a task edge is obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaMode {
    /// Use the weight stored on the task edge.
    #[default]
    Static,
    /// Use the smaller execution time of the two VMs hosting the edge's endpoints.
    DerivedMin,
}

/// Undirected task edge between components `a` and `b` with required connecting duration `omega`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaskEdge<T> {
    pub a: usize,
    pub b: usize,
    pub omega: T,
}

impl<T> TaskEdge<T> {
    pub fn new(a: usize, b: usize, omega: T) -> Self {
        Self { a, b, omega }
    }
}

/// One TO's task: components carry deadlines (maximum tolerant execution time), edges carry ω.
///
/// Construction does not reject malformed graphs; `validate_instance` reports them.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskGraph<T> {
    label: Option<String>,
    deadlines: Vec<T>,
    edges: Vec<TaskEdge<T>>,
    // (neighbor, edge index); out-of-range endpoints and self-loops are skipped
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl<T: Scalar> TaskGraph<T> {
    pub fn new(deadlines: Vec<T>, edges: Vec<TaskEdge<T>>) -> Self {
        let n = deadlines.len();
        let mut adjacency = vec![Vec::new(); n];
        for (idx, e) in edges.iter().enumerate() {
            if e.a < n && e.b < n && e.a != e.b {
                adjacency[e.a].push((e.b, idx));
                adjacency[e.b].push((e.a, idx));
            }
        }
        Self {
            label: None,
            deadlines,
            edges,
            adjacency,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn num_components(&self) -> usize {
        self.deadlines.len()
    }

    pub fn deadline(&self, component: usize) -> T {
        self.deadlines[component]
    }

    pub fn deadlines(&self) -> &[T] {
        &self.deadlines
    }

    pub fn edges(&self) -> &[TaskEdge<T>] {
        &self.edges
    }

    pub fn neighbors(&self, component: usize) -> &[(usize, usize)] {
        &self.adjacency[component]
    }

    pub fn degree(&self, component: usize) -> usize {
        self.adjacency[component].len()
    }
}

/// A vehicle contributing idle VMs; `vms[j]` is the execution time of its j-th VM.
#[derive(Clone, Debug, PartialEq)]
pub struct ServiceProvider<T> {
    pub label: Option<String>,
    pub vms: Vec<T>,
}

impl<T> ServiceProvider<T> {
    pub fn new(vms: Vec<T>) -> Self {
        Self { label: None, vms }
    }
}

/// Values keyed by unordered pairs of distinct indices below `n`.
///
/// Symmetric by construction: `(a, b)` and `(b, a)` address the same cell.
#[derive(Clone, Debug, PartialEq)]
pub struct PairMap<T> {
    n: usize,
    cells: Vec<Option<T>>,
}

impl<T: Copy> PairMap<T> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            cells: vec![None; n * n.saturating_sub(1) / 2],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn cell(&self, a: usize, b: usize) -> Option<usize> {
        if a == b || a >= self.n || b >= self.n {
            return None;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        // row-major upper triangle
        Some(lo * (2 * self.n - lo - 1) / 2 + (hi - lo - 1))
    }

    /// Stores `value` for the pair, returning the previous value.
    ///
    /// # Panics
    /// If `a == b` or either index is out of range.
    pub fn insert(&mut self, a: usize, b: usize, value: T) -> Option<T> {
        let idx = self
            .cell(a, b)
            .unwrap_or_else(|| panic!("invalid pair ({a}, {b}) for size {}", self.n));
        self.cells[idx].replace(value)
    }

    pub fn remove(&mut self, a: usize, b: usize) -> Option<T> {
        self.cell(a, b).and_then(|idx| self.cells[idx].take())
    }

    pub fn get(&self, a: usize, b: usize) -> Option<T> {
        self.cell(a, b).and_then(|idx| self.cells[idx])
    }

    /// Defined pairs as `(lo, hi, value)` with `lo < hi`, in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n).flat_map(move |a| {
            (a + 1..self.n).filter_map(move |b| self.get(a, b).map(|v| (a, b, v)))
        })
    }

    pub fn len(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn map<U: Copy>(&self, mut f: impl FnMut(T) -> U) -> PairMap<U> {
        PairMap {
            n: self.n,
            cells: self.cells.iter().map(|c| c.map(&mut f)).collect(),
        }
    }
}

/// The vehicular cloud: SPs with their VMs, the contact graph, and per-TO reachability.
#[derive(Clone, Debug, PartialEq)]
pub struct VcGraph<T> {
    sps: Vec<ServiceProvider<T>>,
    contact_rates: PairMap<T>,
    reachability: Vec<Vec<usize>>,
    reach_mask: Vec<Vec<bool>>,
}

impl<T: Scalar> VcGraph<T> {
    /// `contact_rates` must be sized to `sps.len()`; `reachability[x]` lists the SP indices
    /// within range of TO `x`. Out-of-range SP indices are kept for validation to report.
    pub fn new(
        sps: Vec<ServiceProvider<T>>,
        contact_rates: PairMap<T>,
        reachability: Vec<Vec<usize>>,
    ) -> Self {
        assert_eq!(
            contact_rates.size(),
            sps.len(),
            "contact rate map sized for a different SP count"
        );
        let reach_mask = reachability
            .iter()
            .map(|set| {
                let mut mask = vec![false; sps.len()];
                for &sp in set {
                    if sp < mask.len() {
                        mask[sp] = true;
                    }
                }
                mask
            })
            .collect();
        Self {
            sps,
            contact_rates,
            reachability,
            reach_mask,
        }
    }

    pub fn sps(&self) -> &[ServiceProvider<T>] {
        &self.sps
    }

    pub fn num_sps(&self) -> usize {
        self.sps.len()
    }

    pub fn num_vms(&self) -> usize {
        self.sps.iter().map(|s| s.vms.len()).sum()
    }

    pub fn contact_rates(&self) -> &PairMap<T> {
        &self.contact_rates
    }

    pub fn contact_rate(&self, a: usize, b: usize) -> Option<T> {
        self.contact_rates.get(a, b)
    }

    pub fn reachability(&self) -> &[Vec<usize>] {
        &self.reachability
    }

    /// Whether SP `sp` lies in the communication range of TO `task`.
    pub fn reachable(&self, task: usize, sp: usize) -> bool {
        self.reach_mask
            .get(task)
            .and_then(|m| m.get(sp))
            .copied()
            .unwrap_or(false)
    }

    /// Degree of an SP in the contact graph (number of SPs it has a contact rate with).
    pub fn sp_degree(&self, sp: usize) -> usize {
        (0..self.sps.len())
            .filter(|&o| self.contact_rates.get(sp, o).is_some())
            .count()
    }

    pub fn exec_time(&self, vm: VmRef) -> T {
        self.sps[vm.sp].vms[vm.vm]
    }

    pub fn slot(&self, vm: VmRef) -> Option<VmSlot<T>> {
        self.sps
            .get(vm.sp)
            .and_then(|s| s.vms.get(vm.vm))
            .map(|&exec_time| VmSlot {
                sp_index: vm.sp,
                vm_index: vm.vm,
                exec_time,
            })
    }

    /// All VM slots in `(sp, vm)` order.
    pub fn slots(&self) -> impl Iterator<Item = VmSlot<T>> + '_ {
        self.sps.iter().enumerate().flat_map(|(sp, s)| {
            s.vms.iter().enumerate().map(move |(vm, &exec_time)| VmSlot {
                sp_index: sp,
                vm_index: vm,
                exec_time,
            })
        })
    }
}

/// A complete problem: tasks, the cloud, exchange costs, and objective/constraint parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance<T> {
    tasks: Vec<TaskGraph<T>>,
    vc: VcGraph<T>,
    exch_costs: PairMap<T>,
    epsilon: T,
    xi_t: T,
    xi_c: T,
    omega_mode: OmegaMode,
    offsets: Vec<usize>,
}

/// Objective weights and constraint threshold of an instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params<T> {
    pub epsilon: T,
    pub xi_t: T,
    pub xi_c: T,
    pub omega_mode: OmegaMode,
}

impl<T: Scalar> Params<T> {
    /// ε = 0.9, ξ_t = ξ_c = 0.5, static ω.
    pub fn standard() -> Self {
        Self {
            epsilon: T::lit(0.9),
            xi_t: T::lit(0.5),
            xi_c: T::lit(0.5),
            omega_mode: OmegaMode::Static,
        }
    }
}

impl<T: Scalar> Instance<T> {
    pub fn new(
        tasks: Vec<TaskGraph<T>>,
        vc: VcGraph<T>,
        exch_costs: PairMap<T>,
        params: Params<T>,
    ) -> Self {
        assert_eq!(
            exch_costs.size(),
            vc.num_sps(),
            "exchange cost map sized for a different SP count"
        );
        let mut offsets = Vec::with_capacity(tasks.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for t in &tasks {
            acc += t.num_components();
            offsets.push(acc);
        }
        Self {
            tasks,
            vc,
            exch_costs,
            epsilon: params.epsilon,
            xi_t: params.xi_t,
            xi_c: params.xi_c,
            omega_mode: params.omega_mode,
            offsets,
        }
    }

    pub fn tasks(&self) -> &[TaskGraph<T>] {
        &self.tasks
    }

    pub fn task(&self, x: usize) -> &TaskGraph<T> {
        &self.tasks[x]
    }

    pub fn vc(&self) -> &VcGraph<T> {
        &self.vc
    }

    pub fn exch_costs(&self) -> &PairMap<T> {
        &self.exch_costs
    }

    pub fn exch_cost(&self, a: usize, b: usize) -> Option<T> {
        self.exch_costs.get(a, b)
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn xi_t(&self) -> T {
        self.xi_t
    }

    pub fn xi_c(&self) -> T {
        self.xi_c
    }

    pub fn omega_mode(&self) -> OmegaMode {
        self.omega_mode
    }

    pub fn params(&self) -> Params<T> {
        Params {
            epsilon: self.epsilon,
            xi_t: self.xi_t,
            xi_c: self.xi_c,
            omega_mode: self.omega_mode,
        }
    }

    /// Same instance with different weights, threshold or ω mode.
    pub fn with_params(&self, params: Params<T>) -> Self {
        let mut out = self.clone();
        out.epsilon = params.epsilon;
        out.xi_t = params.xi_t;
        out.xi_c = params.xi_c;
        out.omega_mode = params.omega_mode;
        out
    }

    pub fn with_omega_mode(&self, mode: OmegaMode) -> Self {
        self.with_params(Params {
            omega_mode: mode,
            ..self.params()
        })
    }

    pub fn num_tasks(&self) -> usize {
        self.tasks.len()
    }

    /// Σ|n_x| over all tasks.
    pub fn num_components(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    /// Position of a component in the task-major global component order.
    pub fn global_index(&self, c: ComponentId) -> usize {
        self.offsets[c.task] + c.component
    }

    pub fn component_at(&self, global: usize) -> ComponentId {
        let task = self.offsets.partition_point(|&o| o <= global) - 1;
        ComponentId::new(task, global - self.offsets[task])
    }

    /// All components in task-major order.
    pub fn components(&self) -> impl Iterator<Item = ComponentId> + '_ {
        self.tasks
            .iter()
            .enumerate()
            .flat_map(|(x, t)| (0..t.num_components()).map(move |i| ComponentId::new(x, i)))
    }

    pub fn deadline(&self, c: ComponentId) -> T {
        self.tasks[c.task].deadline(c.component)
    }
}

/// The component-to-VM map κ. `slots[x][i]` is the VM hosting component `i` of task `x`.
///
/// Solvers only ever emit injective maps; non-injective maps can still be built so that
/// feasibility checks can be exercised on them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    slots: Vec<Vec<VmRef>>,
}

impl Assignment {
    pub fn new(slots: Vec<Vec<VmRef>>) -> Self {
        Self { slots }
    }

    /// Builds the map from VM refs listed in global component order.
    pub fn from_global<T: Scalar>(inst: &Instance<T>, refs: &[VmRef]) -> Self {
        assert_eq!(refs.len(), inst.num_components());
        let slots = inst
            .tasks()
            .iter()
            .enumerate()
            .map(|(x, t)| {
                let base = inst.global_index(ComponentId::new(x, 0));
                refs[base..base + t.num_components()].to_vec()
            })
            .collect();
        Self { slots }
    }

    pub fn slots(&self) -> &[Vec<VmRef>] {
        &self.slots
    }

    pub fn get(&self, c: ComponentId) -> Option<VmRef> {
        self.slots.get(c.task).and_then(|t| t.get(c.component)).copied()
    }

    pub fn slot(&self, c: ComponentId) -> VmRef {
        self.slots[c.task][c.component]
    }

    pub fn iter(&self) -> impl Iterator<Item = (ComponentId, VmRef)> + '_ {
        self.slots.iter().enumerate().flat_map(|(x, t)| {
            t.iter()
                .enumerate()
                .map(move |(i, &vm)| (ComponentId::new(x, i), vm))
        })
    }

    /// VM refs in global component order; the key for lexicographic tie-breaking.
    pub fn sequence(&self) -> Vec<VmRef> {
        self.slots.iter().flatten().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.slots.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether every component of `inst` has a VM that exists in its cloud.
    pub fn is_total_for<T: Scalar>(&self, inst: &Instance<T>) -> bool {
        self.slots.len() == inst.num_tasks()
            && self
                .slots
                .iter()
                .zip(inst.tasks())
                .all(|(s, t)| s.len() == t.num_components())
            && self.iter().all(|(_, vm)| inst.vc().slot(vm).is_some())
    }

    /// First pair of components sharing a VM, if any.
    pub fn first_collision(&self) -> Option<(ComponentId, ComponentId, VmRef)> {
        let mut seen = std::collections::HashMap::new();
        for (c, vm) in self.iter() {
            if let Some(&prev) = seen.get(&vm) {
                return Some((prev, c, vm));
            }
            seen.insert(vm, c);
        }
        None
    }

    pub fn is_injective(&self) -> bool {
        self.first_collision().is_none()
    }
}
