//! Brute-force reference for tests.
//!
//! Everything here is recomputed from the instance data in the most literal form: the
//! assignment is expanded into the full 0/1 indicator matrix κ (component × VM), the
//! pairwise exchange indicator ν (VM × VM) is materialized, and the exchange cost is the
//! halved double sum over ν. No code is shared with the production evaluation path, so a
//! formula bug has to be made twice, independently, to go unnoticed.

use thiserror::Error;
use vc_offload::{Assignment, ComponentId, Instance, OmegaMode, Scalar, VmRef};

pub const MAX_COMPONENTS: usize = 7;
pub const MAX_VMS: usize = 12;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("instance too large for enumeration: {components} components, {vms} VMs (limit {MAX_COMPONENTS}, {MAX_VMS})")]
    TooLarge { components: usize, vms: usize },
}

/// Literal view: components and VMs flattened, κ as a dense matrix.
struct Literal<'a, T> {
    inst: &'a Instance<T>,
    comps: Vec<ComponentId>,
    vms: Vec<VmRef>,
    // κ[i * |V| + j]
    kappa: Vec<u8>,
}

impl<'a, T: Scalar> Literal<'a, T> {
    fn new(inst: &'a Instance<T>) -> Self {
        let mut comps = Vec::new();
        for (x, t) in inst.tasks().iter().enumerate() {
            for i in 0..t.num_components() {
                comps.push(ComponentId::new(x, i));
            }
        }
        let mut vms = Vec::new();
        for (y, sp) in inst.vc().sps().iter().enumerate() {
            for j in 0..sp.vms.len() {
                vms.push(VmRef::new(y, j));
            }
        }
        let kappa = vec![0; comps.len() * vms.len()];
        Self { inst, comps, vms, kappa }
    }

    fn k(&self, i: usize, j: usize) -> u8 {
        self.kappa[i * self.vms.len() + j]
    }

    fn comp_index(&self, c: ComponentId) -> usize {
        self.comps.iter().position(|&d| d == c).expect("component exists")
    }

    fn exec(&self, j: usize) -> T {
        let v = self.vms[j];
        self.inst.vc().sps()[v.sp].vms[v.vm]
    }

    fn load(&mut self, map: &[usize]) {
        self.kappa.fill(0);
        let nv = self.vms.len();
        for (i, &j) in map.iter().enumerate() {
            self.kappa[i * nv + j] = 1;
        }
    }

    /// Capacity per VM and per SP, deadline/range admissibility, and the contact condition.
    fn feasible(&self) -> bool {
        let (nc, nv) = (self.comps.len(), self.vms.len());
        // each component placed exactly once
        for i in 0..nc {
            if (0..nv).map(|j| self.k(i, j) as usize).sum::<usize>() != 1 {
                return false;
            }
        }
        // one component per VM
        for j in 0..nv {
            if (0..nc).map(|i| self.k(i, j) as usize).sum::<usize>() > 1 {
                return false;
            }
        }
        // at most |m_y| components per SP
        for (y, sp) in self.inst.vc().sps().iter().enumerate() {
            let load: usize = (0..nc)
                .flat_map(|i| (0..nv).map(move |j| (i, j)))
                .filter(|&(_, j)| self.vms[j].sp == y)
                .map(|(i, j)| self.k(i, j) as usize)
                .sum();
            if load > sp.vms.len() {
                return false;
            }
        }
        // κ must be 0 where the VM is too slow or the SP is out of range
        for (i, c) in self.comps.iter().enumerate() {
            let deadline = self.inst.tasks()[c.task].deadlines()[c.component];
            let range = &self.inst.vc().reachability()[c.task];
            for j in 0..nv {
                if self.k(i, j) == 1 && (deadline < self.exec(j) || !range.contains(&self.vms[j].sp)) {
                    return false;
                }
            }
        }
        // e^(−λω) ≥ ε for every edge whose endpoints sit on different SPs
        let eps = self.inst.epsilon();
        for (x, task) in self.inst.tasks().iter().enumerate() {
            for e in task.edges() {
                let ia = self.comp_index(ComponentId::new(x, e.a));
                let ib = self.comp_index(ComponentId::new(x, e.b));
                for j in 0..nv {
                    for jj in 0..nv {
                        let (y, yy) = (self.vms[j].sp, self.vms[jj].sp);
                        if y == yy || self.k(ia, j) * self.k(ib, jj) != 1 {
                            continue;
                        }
                        let omega = match self.inst.omega_mode() {
                            OmegaMode::Static => e.omega,
                            OmegaMode::DerivedMin => {
                                let (p, q) = (self.exec(j), self.exec(jj));
                                if p < q {
                                    p
                                } else {
                                    q
                                }
                            }
                        };
                        let prob = match self.inst.vc().contact_rates().get(y, yy) {
                            Some(lambda) => (-(lambda * omega)).exp(),
                            None => T::zero(),
                        };
                        if prob < eps {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn total(&self) -> T {
        let (nc, nv) = (self.comps.len(), self.vms.len());
        let tasks = self.inst.tasks();

        // U^t_x = max κ·t over the task's rows
        let mut sum_sq = T::zero();
        for x in 0..tasks.len() {
            let mut u = T::zero();
            for i in 0..nc {
                if self.comps[i].task != x {
                    continue;
                }
                for j in 0..nv {
                    let v = T::lit(self.k(i, j) as f64) * self.exec(j);
                    if v > u {
                        u = v;
                    }
                }
            }
            sum_sq = sum_sq + u * u;
        }
        let norm = sum_sq.sqrt();

        // ν[j][j'] = 1 if some edge has endpoints on VMs j and j' of different SPs
        let mut nu = vec![vec![0u8; nv]; nv];
        for (x, task) in tasks.iter().enumerate() {
            for e in task.edges() {
                let ia = self.comp_index(ComponentId::new(x, e.a));
                let ib = self.comp_index(ComponentId::new(x, e.b));
                for j in 0..nv {
                    for jj in 0..nv {
                        if self.vms[j].sp != self.vms[jj].sp && self.k(ia, j) * self.k(ib, jj) == 1 {
                            nu[j][jj] = 1;
                            nu[jj][j] = 1;
                        }
                    }
                }
            }
        }
        let mut double = T::zero();
        for j in 0..nv {
            for jj in 0..nv {
                if nu[j][jj] == 1 {
                    let c = self
                        .inst
                        .exch_costs()
                        .get(self.vms[j].sp, self.vms[jj].sp)
                        .unwrap_or_else(T::zero);
                    double = double + c;
                }
            }
        }
        let exch = double / T::lit(2.0);

        self.inst.xi_t() * norm + self.inst.xi_c() * exch
    }

    fn map_of(&self, a: &Assignment) -> Option<Vec<usize>> {
        self.comps
            .iter()
            .map(|&c| a.get(c).and_then(|vm| self.vms.iter().position(|&v| v == vm)))
            .collect()
    }

    fn assignment(&self, map: &[usize]) -> Assignment {
        let mut slots: Vec<Vec<VmRef>> = self
            .inst
            .tasks()
            .iter()
            .map(|t| Vec::with_capacity(t.num_components()))
            .collect();
        for (i, &j) in map.iter().enumerate() {
            slots[self.comps[i].task].push(self.vms[j]);
        }
        Assignment::new(slots)
    }
}

fn guard<T: Scalar>(inst: &Instance<T>) -> Result<(), OracleError> {
    let components = inst.tasks().iter().map(|t| t.num_components()).sum();
    let vms = inst.vc().sps().iter().map(|s| s.vms.len()).sum();
    if components > MAX_COMPONENTS || vms > MAX_VMS {
        return Err(OracleError::TooLarge { components, vms });
    }
    Ok(())
}

/// Every feasible assignment with its objective total, in lexicographic `(sp, vm)` order.
///
/// Visits all injective total maps of components to VMs, without pruning.
pub fn oracle_enumerate<T: Scalar>(inst: &Instance<T>) -> Result<Vec<(Assignment, T)>, OracleError> {
    guard(inst)?;
    let mut lit = Literal::new(inst);
    let (nc, nv) = (lit.comps.len(), lit.vms.len());
    let mut out = Vec::new();
    let mut map = vec![0usize; nc];
    let mut used = vec![false; nv];

    fn rec<T: Scalar>(
        lit: &mut Literal<'_, T>,
        depth: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<(Assignment, T)>,
    ) {
        if depth == map.len() {
            lit.load(map);
            if lit.feasible() {
                out.push((lit.assignment(map), lit.total()));
            }
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                map[depth] = j;
                rec(lit, depth + 1, map, used, out);
                used[j] = false;
            }
        }
    }

    if nc <= nv {
        rec(&mut lit, 0, &mut map, &mut used, &mut out);
    }
    Ok(out)
}

/// Minimum total over [`oracle_enumerate`], or `None` if nothing is feasible.
pub fn oracle_min_total<T: Scalar>(inst: &Instance<T>) -> Result<Option<T>, OracleError> {
    Ok(oracle_enumerate(inst)?
        .into_iter()
        .map(|(_, t)| t)
        .fold(None, |acc: Option<T>, t| Some(acc.map_or(t, |a| a.min(t)))))
}

/// Literal feasibility of an arbitrary (possibly partial or non-injective) map.
pub fn oracle_feasible<T: Scalar>(inst: &Instance<T>, a: &Assignment) -> bool {
    let mut lit = Literal::new(inst);
    let Some(map) = lit.map_of(a) else {
        return false;
    };
    if a.len() != map.len() {
        return false;
    }
    lit.load(&map);
    lit.feasible()
}

/// Literal objective total of a total map.
pub fn oracle_total<T: Scalar>(inst: &Instance<T>, a: &Assignment) -> T {
    let mut lit = Literal::new(inst);
    let map = lit.map_of(a).expect("assignment covers every component");
    lit.load(&map);
    lit.total()
}
