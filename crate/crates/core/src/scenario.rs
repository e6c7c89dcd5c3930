//! Seeded random instances and the task-type catalog.
//!
//! Default parameter intervals:
//!
//! | parameter          | interval                                   |
//! |--------------------|--------------------------------------------|
//! | ε                  | [0.9, 1)                                   |
//! | ω                  | [0.1, 0.3]                                 |
//! | component deadline | [0.1, 0.2]                                 |
//! | VM execution time  | [0.05, 0.25]                               |
//! | exchange cost      | [0.05, 0.15]                               |
//! | λ                  | [0.04, 0.05] low traffic, [0.01, 0.02] rush hour |
//! | ξ_t, ξ_c           | 0.5, 0.5                                   |
//!
//! Every value is drawn independently and uniformly. Draw order, from a ChaCha8 stream
//! seeded with `seed`: ε; per task its type (unless fixed), component deadlines, then edge
//! ω values; per SP its VM count (if ranged) then VM execution times; per SP pair in
//! lexicographic order the dropout coin (only if `contact_dropout > 0`) and λ; per SP pair
//! the exchange cost; per task owner its reachable subset (only for `random_subset`).

use std::collections::VecDeque;

use rand::distributions::{Distribution, Uniform};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Instance, OmegaMode, PairMap, Params, ServiceProvider, TaskEdge, TaskGraph, VcGraph};
use crate::scalar::Scalar;

/// Named template graph; instantiated with freshly sampled deadlines and ω values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskTemplate {
    pub name: String,
    pub num_components: usize,
    pub edges: Vec<(usize, usize)>,
}

impl TaskTemplate {
    pub fn is_connected(&self) -> bool {
        if self.num_components == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); self.num_components];
        for &(a, b) in &self.edges {
            if a >= self.num_components || b >= self.num_components {
                return false;
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.num_components];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_simple(&self) -> bool {
        let mut pairs: Vec<_> = self.edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        pairs.sort_unstable();
        let before = pairs.len();
        pairs.dedup();
        before == pairs.len() && self.edges.iter().all(|&(a, b)| a != b)
    }
}

/// Ordered task types; type ids are 1-based positions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskTypeCatalog {
    pub version: u32,
    pub types: Vec<TaskTemplate>,
}

impl TaskTypeCatalog {
    pub fn get(&self, type_id: usize) -> Option<&TaskTemplate> {
        type_id.checked_sub(1).and_then(|i| self.types.get(i))
    }
}

/// The four built-in task types (catalog version 1):
///
/// 1. path over 4 components;
/// 2. star on components 0..4 centered at 0, plus component 4 hanging off leaf 1;
/// 3. 6-cycle with chord (0, 3);
/// 4. depth-2 tree of 7 components: 0 → {1, 2}, 1 → {3, 4}, 2 → {5, 6}.
pub fn default_catalog() -> TaskTypeCatalog {
    let t = |name: &str, n: usize, edges: &[(usize, usize)]| TaskTemplate {
        name: name.to_string(),
        num_components: n,
        edges: edges.to_vec(),
    };
    TaskTypeCatalog {
        version: 1,
        types: vec![
            t("path4", 4, &[(0, 1), (1, 2), (2, 3)]),
            t("star_leaf5", 5, &[(0, 1), (0, 2), (0, 3), (1, 4)]),
            t("cycle6_chord", 6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]),
            t("tree7", 7, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]),
        ],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrafficRegime {
    #[serde(alias = "low")]
    LowTraffic,
    #[serde(alias = "rush")]
    RushHour,
}

impl TrafficRegime {
    pub fn default_lambda(self) -> Interval {
        match self {
            TrafficRegime::LowTraffic => Interval::new(0.04, 0.05),
            TrafficRegime::RushHour => Interval::new(0.01, 0.02),
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            TrafficRegime::LowTraffic => "low",
            TrafficRegime::RushHour => "rush",
        }
    }
}

/// Closed interval `[min, max]` (ε alone is sampled half-open).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub min: f64,
    pub max: f64,
}

impl Interval {
    pub const fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }

    fn check(&self, name: &'static str, positive: bool) -> Result<(), ScenarioError> {
        let ok = self.min.is_finite()
            && self.max.is_finite()
            && self.min <= self.max
            && (!positive || self.min > 0.0);
        if ok {
            Ok(())
        } else {
            Err(ScenarioError::InvalidRange(name))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Ranges {
    pub epsilon: Interval,
    pub omega: Interval,
    pub deadline: Interval,
    pub exec_time: Interval,
    pub exch_cost: Interval,
    /// Overrides the regime's λ interval.
    pub lambda: Option<Interval>,
}

impl Default for Ranges {
    fn default() -> Self {
        Self {
            epsilon: Interval::new(0.9, 1.0),
            omega: Interval::new(0.1, 0.3),
            deadline: Interval::new(0.1, 0.2),
            exec_time: Interval::new(0.05, 0.25),
            exch_cost: Interval::new(0.05, 0.15),
            lambda: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VmCount {
    Fixed(usize),
    PerSp(Vec<usize>),
    Range { min: usize, max: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReachabilityPolicy {
    /// Every SP is in range of every task owner.
    #[default]
    All,
    /// Each task owner reaches a uniformly drawn subset of size in `[min_size, |S|]`.
    RandomSubset { min_size: usize },
}

fn half() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub num_tasks: usize,
    /// 1-based catalog ids, one per task; drawn uniformly when absent.
    #[serde(default)]
    pub task_type_ids: Option<Vec<usize>>,
    pub num_sps: usize,
    pub vms_per_sp: VmCount,
    pub regime: TrafficRegime,
    #[serde(default)]
    pub ranges: Ranges,
    #[serde(default = "half")]
    pub xi_t: f64,
    #[serde(default = "half")]
    pub xi_c: f64,
    #[serde(default)]
    pub omega_mode: OmegaMode,
    #[serde(default)]
    pub reachability: ReachabilityPolicy,
    /// Probability that an SP pair has no contact link.
    #[serde(default)]
    pub contact_dropout: f64,
    #[serde(default)]
    pub require_feasible_capacity: bool,
    #[serde(default)]
    pub seed: u64,
    /// Replaces the built-in catalog.
    #[serde(default)]
    pub catalog: Option<TaskTypeCatalog>,
}

impl ScenarioSpec {
    /// Default intervals, full reachability, complete contact graph.
    pub fn new(num_tasks: usize, num_sps: usize, vms_per_sp: VmCount, regime: TrafficRegime, seed: u64) -> Self {
        Self {
            num_tasks,
            task_type_ids: None,
            num_sps,
            vms_per_sp,
            regime,
            ranges: Ranges::default(),
            xi_t: 0.5,
            xi_c: 0.5,
            omega_mode: OmegaMode::Static,
            reachability: ReachabilityPolicy::All,
            contact_dropout: 0.0,
            require_feasible_capacity: false,
            seed,
            catalog: None,
        }
    }

    pub fn with_types(mut self, ids: Vec<usize>) -> Self {
        self.num_tasks = ids.len();
        self.task_type_ids = Some(ids);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn lambda_range(&self) -> Interval {
        self.ranges.lambda.unwrap_or_else(|| self.regime.default_lambda())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("invalid interval for {0}")]
    InvalidRange(&'static str),
    #[error("unknown task type {0}")]
    UnknownTaskType(usize),
    #[error("task type {0} is not a connected simple graph")]
    MalformedTemplate(usize),
    #[error("{given} task types given for {expected} tasks")]
    TaskCountMismatch { given: usize, expected: usize },
    #[error("VM count list has {given} entries for {expected} SPs")]
    VmCountMismatch { given: usize, expected: usize },
    #[error("scenario needs at least one SP")]
    NoSps,
    #[error("{components} components cannot fit on {vms} VMs")]
    Capacity { components: usize, vms: usize },
    #[error("contact dropout must lie in [0, 1)")]
    InvalidDropout,
    #[error("invalid weights: xi_t and xi_c must be non-negative")]
    InvalidWeights,
    #[error("random subset size {0} is out of range")]
    InvalidSubsetSize(usize),
}

fn uniform(iv: Interval) -> Uniform<f64> {
    Uniform::new_inclusive(iv.min, iv.max)
}

/// Builds a random instance from `spec`; identical specs give identical instances.
pub fn generate<T: Scalar>(spec: &ScenarioSpec) -> Result<Instance<T>, ScenarioError> {
    let r = &spec.ranges;
    r.epsilon.check("epsilon", false)?;
    if r.epsilon.min < 0.0 || r.epsilon.max > 1.0 {
        return Err(ScenarioError::InvalidRange("epsilon"));
    }
    r.omega.check("omega", true)?;
    r.deadline.check("deadline", true)?;
    r.exec_time.check("exec_time", true)?;
    r.exch_cost.check("exch_cost", true)?;
    let lambda = spec.lambda_range();
    lambda.check("lambda", true)?;
    if !(0.0..1.0).contains(&spec.contact_dropout) {
        return Err(ScenarioError::InvalidDropout);
    }
    if !(spec.xi_t >= 0.0 && spec.xi_c >= 0.0) {
        return Err(ScenarioError::InvalidWeights);
    }
    if spec.num_sps == 0 {
        return Err(ScenarioError::NoSps);
    }
    if let ReachabilityPolicy::RandomSubset { min_size } = spec.reachability {
        if min_size == 0 || min_size > spec.num_sps {
            return Err(ScenarioError::InvalidSubsetSize(min_size));
        }
    }

    let default = default_catalog();
    let catalog = spec.catalog.as_ref().unwrap_or(&default);
    if let Some(ids) = &spec.task_type_ids {
        if ids.len() != spec.num_tasks {
            return Err(ScenarioError::TaskCountMismatch {
                given: ids.len(),
                expected: spec.num_tasks,
            });
        }
    }
    if catalog.types.is_empty() && spec.num_tasks > 0 {
        return Err(ScenarioError::UnknownTaskType(1));
    }
    for (i, t) in catalog.types.iter().enumerate() {
        if !t.is_connected() || !t.is_simple() {
            return Err(ScenarioError::MalformedTemplate(i + 1));
        }
    }

    let vm_counts_fixed: Option<Vec<usize>> = match &spec.vms_per_sp {
        VmCount::Fixed(k) => Some(vec![*k; spec.num_sps]),
        VmCount::PerSp(list) => {
            if list.len() != spec.num_sps {
                return Err(ScenarioError::VmCountMismatch {
                    given: list.len(),
                    expected: spec.num_sps,
                });
            }
            Some(list.clone())
        }
        VmCount::Range { min, max } => {
            if min > max {
                return Err(ScenarioError::InvalidRange("vms_per_sp"));
            }
            None
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let epsilon = Uniform::new(r.epsilon.min, r.epsilon.max.max(r.epsilon.min + f64::EPSILON)).sample(&mut rng);

    let deadline = uniform(r.deadline);
    let omega = uniform(r.omega);
    let mut tasks = Vec::with_capacity(spec.num_tasks);
    for x in 0..spec.num_tasks {
        let type_id = match &spec.task_type_ids {
            Some(ids) => ids[x],
            None => rng.gen_range(1..=catalog.types.len()),
        };
        let template = catalog.get(type_id).ok_or(ScenarioError::UnknownTaskType(type_id))?;
        let deadlines = (0..template.num_components)
            .map(|_| T::lit(deadline.sample(&mut rng)))
            .collect();
        let edges = template
            .edges
            .iter()
            .map(|&(a, b)| TaskEdge::new(a, b, T::lit(omega.sample(&mut rng))))
            .collect();
        tasks.push(TaskGraph::new(deadlines, edges).with_label(template.name.clone()));
    }

    let exec = uniform(r.exec_time);
    let mut sps = Vec::with_capacity(spec.num_sps);
    for y in 0..spec.num_sps {
        let k = match (&vm_counts_fixed, &spec.vms_per_sp) {
            (Some(list), _) => list[y],
            (None, VmCount::Range { min, max }) => rng.gen_range(*min..=*max),
            _ => unreachable!(),
        };
        sps.push(ServiceProvider::new((0..k).map(|_| T::lit(exec.sample(&mut rng))).collect()));
    }

    let components: usize = tasks.iter().map(|t| t.num_components()).sum();
    let vms: usize = sps.iter().map(|s| s.vms.len()).sum();
    if spec.require_feasible_capacity && components > vms {
        return Err(ScenarioError::Capacity { components, vms });
    }

    let s = spec.num_sps;
    let lambda_dist = uniform(lambda);
    let mut rates = PairMap::new(s);
    for a in 0..s {
        for b in a + 1..s {
            let dropped = spec.contact_dropout > 0.0 && rng.gen_bool(spec.contact_dropout);
            let l = lambda_dist.sample(&mut rng);
            if !dropped {
                rates.insert(a, b, T::lit(l));
            }
        }
    }
    let cost = uniform(r.exch_cost);
    let mut costs = PairMap::new(s);
    for a in 0..s {
        for b in a + 1..s {
            costs.insert(a, b, T::lit(cost.sample(&mut rng)));
        }
    }

    let reachability = (0..spec.num_tasks)
        .map(|_| match spec.reachability {
            ReachabilityPolicy::All => (0..s).collect(),
            ReachabilityPolicy::RandomSubset { min_size } => {
                let k = rng.gen_range(min_size..=s);
                let mut set = index::sample(&mut rng, s, k).into_vec();
                set.sort_unstable();
                set
            }
        })
        .collect();

    let vc = VcGraph::new(sps, rates, reachability);
    Ok(Instance::new(
        tasks,
        vc,
        costs,
        Params {
            epsilon: T::lit(epsilon),
            xi_t: T::lit(spec.xi_t),
            xi_c: T::lit(spec.xi_c),
            omega_mode: spec.omega_mode,
        },
    ))
}

/// Scenarios with the task/SP/VM counts of the running-time comparison table:
/// `(name, spec)` for 2×type 2 on 4 SPs/16 VMs through 5×type 4 on 10 SPs/50 VMs.
///
/// 25 VMs over 4 SPs are split (7, 6, 6, 6).
pub fn runtime_specs(regime: TrafficRegime, seed: u64) -> Vec<(String, ScenarioSpec)> {
    let row = |name: &str, ty: usize, count: usize, sps: usize, vms: VmCount| {
        (
            name.to_string(),
            ScenarioSpec::new(count, sps, vms, regime, seed).with_types(vec![ty; count]),
        )
    };
    vec![
        row("2xT2_4sp_16vm", 2, 2, 4, VmCount::Fixed(4)),
        row("5xT2_8sp_40vm", 2, 5, 8, VmCount::Fixed(5)),
        row("2xT3_4sp_25vm", 3, 2, 4, VmCount::PerSp(vec![7, 6, 6, 6])),
        row("5xT3_8sp_48vm", 3, 5, 8, VmCount::Fixed(6)),
        row("2xT4_5sp_30vm", 4, 2, 5, VmCount::Fixed(6)),
        row("5xT4_10sp_50vm", 4, 5, 10, VmCount::Fixed(5)),
    ]
}
