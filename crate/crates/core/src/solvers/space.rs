use crate::model::{Assignment, ComponentId, Instance, VmRef, VmSlot};
use crate::objective::{edge_feasible_with, score_with, slot_admissible};
use crate::scalar::Scalar;

/// Flattened view of an instance for the search loops.
///
/// Components are numbered in task-major global order and VMs in `(sp, vm)` order, so
/// comparing placement vectors lexicographically matches comparing `(sp, vm)` sequences.
pub(crate) struct SearchSpace<'a, T> {
    pub inst: &'a Instance<T>,
    pub vms: Vec<VmSlot<T>>,
    /// VMs passing the deadline and reachability check, per component, ascending.
    pub admissible: Vec<Vec<usize>>,
    /// `(neighbor, ω)` per component.
    pub neighbors: Vec<Vec<(usize, T)>>,
}

impl<'a, T: Scalar> SearchSpace<'a, T> {
    pub fn new(inst: &'a Instance<T>) -> Self {
        let vms: Vec<VmSlot<T>> = inst.vc().slots().collect();
        let mut admissible = Vec::with_capacity(inst.num_components());
        let mut neighbors = Vec::with_capacity(inst.num_components());
        for c in inst.components() {
            admissible.push(
                vms.iter()
                    .enumerate()
                    .filter(|(_, s)| slot_admissible(inst, c, s))
                    .map(|(v, _)| v)
                    .collect(),
            );
            let task = inst.task(c.task);
            let base = inst.global_index(ComponentId::new(c.task, 0));
            neighbors.push(
                task.neighbors(c.component)
                    .iter()
                    .map(|&(n, e)| (base + n, task.edges()[e].omega))
                    .collect(),
            );
        }
        Self {
            inst,
            vms,
            admissible,
            neighbors,
        }
    }

    pub fn num_components(&self) -> usize {
        self.admissible.len()
    }

    pub fn num_vms(&self) -> usize {
        self.vms.len()
    }

    /// Whether `comp` on VM `v` meets the contact condition with every placed neighbor.
    pub fn compatible(&self, comp: usize, v: usize, placed: &[Option<usize>]) -> bool {
        let slot = &self.vms[v];
        self.neighbors[comp].iter().all(|&(n, omega)| match placed[n] {
            Some(w) => edge_feasible_with(self.inst, omega, slot, &self.vms[w]),
            None => true,
        })
    }

    pub fn has_placed_neighbor(&self, comp: usize, placed: &[Option<usize>]) -> bool {
        self.neighbors[comp].iter().any(|&(n, _)| placed[n].is_some())
    }

    pub fn vm_ref(&self, v: usize) -> VmRef {
        self.vms[v].vm_ref()
    }

    /// Objective total of a complete placement (global component → flat VM index).
    pub fn total(&self, placement: &[usize]) -> T {
        let lookup = |c: ComponentId| self.vms[placement[self.inst.global_index(c)]].vm_ref();
        score_with(self.inst, &lookup).2
    }

    pub fn assignment(&self, placement: &[usize]) -> Assignment {
        let refs: Vec<VmRef> = placement.iter().map(|&v| self.vm_ref(v)).collect();
        Assignment::from_global(self.inst, &refs)
    }
}
