use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use vc_offload::scenario::{ScenarioSpec, TrafficRegime, VmCount};
use vc_offload::{OmegaMode, SolverSpec};

/// Optimal-solver budget used when a plan does not set one.
pub const DEFAULT_OPTIMAL_BUDGET_S: f64 = 300.0;

/// Where a scenario's instances come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioSource {
    /// Regenerated for every repetition with the repetition's seed.
    Spec(ScenarioSpec),
    /// One fixed instance; repetitions only vary the solver seed.
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEntry {
    pub id: String,
    #[serde(flatten)]
    pub source: ScenarioSource,
}

impl ScenarioEntry {
    pub fn spec(id: impl Into<String>, spec: ScenarioSpec) -> Self {
        Self {
            id: id.into(),
            source: ScenarioSource::Spec(spec),
        }
    }
}

fn one() -> u32 {
    1
}

fn default_budget() -> f64 {
    DEFAULT_OPTIMAL_BUDGET_S
}

/// A grid of scenarios × repetitions × solvers.
///
/// Repetition `k` uses seed `base_seed + k`, both for generating the instance and for the
/// solver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub scenarios: Vec<ScenarioEntry>,
    pub solvers: Vec<SolverSpec>,
    #[serde(default = "one")]
    pub repetitions: u32,
    #[serde(default)]
    pub base_seed: u64,
    /// Applied to optimal-solver entries without their own budget.
    #[serde(default = "default_budget")]
    pub optimal_budget_s: f64,
    /// Overrides every scenario's ω mode when set.
    #[serde(default)]
    pub omega_mode: Option<OmegaMode>,
    /// Default output directory; the CLI's `--out` takes precedence.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl ExperimentPlan {
    pub fn new(scenarios: Vec<ScenarioEntry>, solvers: Vec<SolverSpec>) -> Self {
        Self {
            scenarios,
            solvers,
            repetitions: 1,
            base_seed: 0,
            optimal_budget_s: DEFAULT_OPTIMAL_BUDGET_S,
            omega_mode: None,
            out_dir: None,
        }
    }

    pub fn num_cells(&self) -> usize {
        self.scenarios.len() * self.repetitions as usize * self.solvers.len()
    }

    /// The solver list with the plan-wide optimal budget filled in.
    pub(crate) fn effective_solvers(&self) -> Vec<SolverSpec> {
        self.solvers
            .iter()
            .map(|s| match s {
                SolverSpec::Optimal { budget_s: None } => SolverSpec::Optimal {
                    budget_s: Some(self.optimal_budget_s),
                },
                other => other.clone(),
            })
            .collect()
    }
}

fn crrm_grid(gammas: &[u64]) -> Vec<SolverSpec> {
    gammas.iter().map(|&gamma| SolverSpec::Crrm { gamma }).collect()
}

/// Running-time table: six task/SP/VM configurations, optimal vs CRRM at γ = 1000, 2000, 3000.
pub fn runtime_plan(regime: TrafficRegime, base_seed: u64) -> ExperimentPlan {
    let scenarios = vc_offload::scenario::runtime_specs(regime, base_seed)
        .into_iter()
        .map(|(id, spec)| ScenarioEntry::spec(id, spec))
        .collect();
    let mut solvers = vec![SolverSpec::Optimal { budget_s: None }];
    solvers.extend(crrm_grid(&[1000, 2000, 3000]));
    let mut plan = ExperimentPlan::new(scenarios, solvers);
    plan.base_seed = base_seed;
    plan
}

/// Scaling ladder: 2 and 3 path tasks (type 1) on 4 through 7 SPs, optimal vs CRRM.
pub fn ladder_plan(regime: TrafficRegime, base_seed: u64, gamma: u64, vms_per_sp: usize) -> ExperimentPlan {
    let mut scenarios = Vec::new();
    for tasks in [2, 3] {
        for sps in 4..=7 {
            let spec = ScenarioSpec::new(tasks, sps, VmCount::Fixed(vms_per_sp), regime, base_seed)
                .with_types(vec![1; tasks]);
            scenarios.push(ScenarioEntry::spec(format!("{tasks}xT1_{sps}sp"), spec));
        }
    }
    let mut plan = ExperimentPlan::new(scenarios, vec![SolverSpec::Optimal { budget_s: None }, SolverSpec::Crrm { gamma }]);
    plan.base_seed = base_seed;
    plan
}

/// Objective comparison in four settings: 2 tasks/4 SPs and 3 tasks/5 SPs in low traffic,
/// 4 tasks/6 SPs and 5 tasks/7 SPs in rush hour. CRRM (γ = 1000, 2000, 3000) against DPM and
/// ETPM.
///
/// Task types are drawn at random per repetition. The optimal solver is left out; add it to
/// the plan by hand for instances small enough to enumerate.
pub fn comparison_plan(base_seed: u64, vms_per_sp: usize) -> ExperimentPlan {
    use TrafficRegime::{LowTraffic, RushHour};
    let scenarios = [(2, 4, LowTraffic), (3, 5, LowTraffic), (4, 6, RushHour), (5, 7, RushHour)]
        .into_iter()
        .map(|(tasks, sps, regime)| {
            let mut spec = ScenarioSpec::new(tasks, sps, VmCount::Fixed(vms_per_sp), regime, base_seed);
            spec.require_feasible_capacity = true;
            ScenarioEntry::spec(format!("{tasks}tasks_{sps}sp_{}", regime.short_name()), spec)
        })
        .collect();
    let mut solvers = crrm_grid(&[1000, 2000, 3000]);
    solvers.extend([SolverSpec::Dpm, SolverSpec::Etpm]);
    let mut plan = ExperimentPlan::new(scenarios, solvers);
    plan.base_seed = base_seed;
    plan
}
