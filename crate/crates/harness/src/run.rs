use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use vc_offload::io::read_instance;
use vc_offload::scenario::generate;
use vc_offload::{Instance64, SolverSpec, Workers};

use crate::plan::{ExperimentPlan, ScenarioSource};
use crate::HarnessError;

pub const RESULTS_FILE: &str = "results.csv";
pub const TRACES_FILE: &str = "crrm_traces.csv";
pub const SCALING_FILE: &str = "scaling.csv";

/// Column order of `results.csv`.
pub const RESULT_COLUMNS: [&str; 16] = [
    "scenario",
    "regime",
    "solver",
    "gamma",
    "seed",
    "status",
    "total",
    "completion_norm",
    "exchange_cost",
    "wall_time_s",
    "evaluations",
    "num_tasks",
    "num_sps",
    "num_components",
    "num_vms",
    "detail",
];

pub const TRACE_COLUMNS: [&str; 6] = ["scenario", "solver", "gamma", "seed", "iteration", "best_total"];

pub const SCALING_COLUMNS: [&str; 7] = [
    "scenario",
    "solver",
    "gamma",
    "num_sps",
    "mean_components",
    "mean_wall_time_s",
    "log10_wall_time",
];

/// One solver run. `status` is `solved`, `infeasible`, `aborted`, or `error` (with the message
/// in `detail`); objective columns are empty when there is no assignment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scenario: String,
    /// `low`, `rush`, or `file` for instances loaded from disk.
    pub regime: String,
    pub solver: String,
    pub gamma: Option<u64>,
    pub seed: u64,
    pub status: String,
    pub total: Option<f64>,
    pub completion_norm: Option<f64>,
    pub exchange_cost: Option<f64>,
    pub wall_time_s: f64,
    pub evaluations: u64,
    pub num_tasks: usize,
    pub num_sps: usize,
    pub num_components: usize,
    pub num_vms: usize,
    pub detail: String,
}

/// Best-so-far total after each CRRM attempt, long format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub scenario: String,
    pub solver: String,
    pub gamma: u64,
    pub seed: u64,
    pub iteration: u64,
    pub best_total: f64,
}

/// Mean wall time per (scenario, solver, γ), for log-scale running-time plots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub scenario: String,
    pub solver: String,
    pub gamma: Option<u64>,
    pub num_sps: usize,
    pub mean_components: f64,
    pub mean_wall_time_s: f64,
    pub log10_wall_time: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PlanOutput {
    pub rows: Vec<ResultRow>,
    pub traces: Vec<TraceRow>,
    pub scaling: Vec<ScalingRow>,
}

impl PlanOutput {
    /// Copy with every timing column zeroed.
    pub fn without_timing(&self) -> Self {
        let mut out = self.clone();
        for r in &mut out.rows {
            r.wall_time_s = 0.0;
        }
        for s in &mut out.scaling {
            s.mean_wall_time_s = 0.0;
            s.log10_wall_time = 0.0;
        }
        out
    }

    /// Writes the three CSV files into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<(), HarnessError> {
        fs::create_dir_all(dir)?;
        write_csv(&dir.join(RESULTS_FILE), &RESULT_COLUMNS, &self.rows)?;
        write_csv(&dir.join(TRACES_FILE), &TRACE_COLUMNS, &self.traces)?;
        write_csv(&dir.join(SCALING_FILE), &SCALING_COLUMNS, &self.scaling)?;
        Ok(())
    }
}

/// Header first, so an empty table still yields a valid file.
fn write_csv<R: Serialize>(path: &Path, header: &[&str], rows: &[R]) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

struct Prepared {
    scenario: usize,
    seed: u64,
    regime: &'static str,
    instance: Result<Instance64, String>,
    // shape known even when generation fails
    num_tasks: usize,
    num_sps: usize,
}

/// Runs every cell of `plan` on `workers` threads.
///
/// Cells are numbered scenario-major, then repetition, then solver; rows come back in that
/// order whatever the scheduling. Generation and solver failures become `error` rows.
/// Unreadable instance files fail the whole plan. Solvers themselves run single-threaded.
pub fn run_plan(plan: &ExperimentPlan, workers: usize) -> Result<PlanOutput, HarnessError> {
    let mut files = HashMap::new();
    for entry in &plan.scenarios {
        if let ScenarioSource::File(path) = &entry.source {
            let inst: Instance64 = read_instance(path).map_err(|source| HarnessError::Instance {
                path: path.clone(),
                source,
            })?;
            let inst = match plan.omega_mode {
                Some(mode) => inst.with_omega_mode(mode),
                None => inst,
            };
            files.insert(entry.id.clone(), inst);
        }
    }

    let reps = plan.repetitions as u64;
    let jobs: Vec<(usize, u64)> = (0..plan.scenarios.len())
        .flat_map(|s| (0..reps).map(move |k| (s, plan.base_seed.wrapping_add(k))))
        .collect();
    let solvers = plan.effective_solvers();

    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
    let (rows, traces) = pool.install(|| {
        let prepared: Vec<Prepared> = jobs
            .par_iter()
            .map(|&(s, seed)| prepare(plan, &files, s, seed))
            .collect();
        let cells: Vec<(usize, usize)> = (0..prepared.len())
            .flat_map(|p| (0..solvers.len()).map(move |j| (p, j)))
            .collect();
        let results: Vec<(ResultRow, Vec<TraceRow>)> = cells
            .par_iter()
            .map(|&(p, j)| run_cell(plan, &prepared[p], &solvers[j]))
            .collect();
        let mut rows = Vec::with_capacity(results.len());
        let mut traces = Vec::new();
        for (row, t) in results {
            rows.push(row);
            traces.extend(t);
        }
        (rows, traces)
    });

    let scaling = scaling_series(&rows);
    Ok(PlanOutput { rows, traces, scaling })
}

fn prepare(plan: &ExperimentPlan, files: &HashMap<String, Instance64>, s: usize, seed: u64) -> Prepared {
    let entry = &plan.scenarios[s];
    match &entry.source {
        ScenarioSource::Spec(spec) => {
            let mut spec = spec.clone().with_seed(seed);
            if let Some(mode) = plan.omega_mode {
                spec.omega_mode = mode;
            }
            Prepared {
                scenario: s,
                seed,
                regime: spec.regime.short_name(),
                instance: generate(&spec).map_err(|e| e.to_string()),
                num_tasks: spec.num_tasks,
                num_sps: spec.num_sps,
            }
        }
        ScenarioSource::File(_) => {
            let inst = files[&entry.id].clone();
            Prepared {
                scenario: s,
                seed,
                regime: "file",
                num_tasks: inst.num_tasks(),
                num_sps: inst.vc().num_sps(),
                instance: Ok(inst),
            }
        }
    }
}

fn run_cell(plan: &ExperimentPlan, p: &Prepared, solver: &SolverSpec) -> (ResultRow, Vec<TraceRow>) {
    let scenario = plan.scenarios[p.scenario].id.clone();
    let mut row = ResultRow {
        scenario: scenario.clone(),
        regime: p.regime.to_string(),
        solver: solver.name().to_string(),
        gamma: solver.gamma(),
        seed: p.seed,
        status: "error".to_string(),
        total: None,
        completion_norm: None,
        exchange_cost: None,
        wall_time_s: 0.0,
        evaluations: 0,
        num_tasks: p.num_tasks,
        num_sps: p.num_sps,
        num_components: 0,
        num_vms: 0,
        detail: String::new(),
    };
    let inst = match &p.instance {
        Ok(inst) => inst,
        Err(msg) => {
            row.detail = msg.clone();
            return (row, vec![]);
        }
    };
    row.num_components = inst.num_components();
    row.num_vms = inst.vc().num_vms();

    let report = match solver.run(inst, p.seed, Workers::SEQUENTIAL) {
        Ok(r) => r,
        Err(e) => {
            row.detail = e.to_string();
            return (row, vec![]);
        }
    };
    row.status = report.status.as_str().to_string();
    row.wall_time_s = report.wall_time;
    row.evaluations = report.evaluations;
    if let Some(b) = &report.breakdown {
        row.total = Some(b.total);
        row.completion_norm = Some(b.completion_norm);
        row.exchange_cost = Some(b.exchange_cost);
    }
    let traces = match solver.gamma() {
        Some(gamma) => report
            .trace
            .iter()
            .map(|t| TraceRow {
                scenario: scenario.clone(),
                solver: row.solver.clone(),
                gamma,
                seed: p.seed,
                iteration: t.iteration,
                best_total: t.best_total,
            })
            .collect(),
        None => vec![],
    };
    (row, traces)
}

/// Groups rows by (scenario, solver, γ) in first-appearance order; error rows are skipped.
pub fn scaling_series(rows: &[ResultRow]) -> Vec<ScalingRow> {
    let mut order: Vec<(String, String, Option<u64>)> = Vec::new();
    let mut acc: HashMap<(String, String, Option<u64>), (usize, usize, f64, f64)> = HashMap::new();
    for r in rows.iter().filter(|r| r.status != "error") {
        let key = (r.scenario.clone(), r.solver.clone(), r.gamma);
        let e = acc.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            (r.num_sps, 0, 0.0, 0.0)
        });
        e.1 += 1;
        e.2 += r.num_components as f64;
        e.3 += r.wall_time_s;
    }
    order
        .into_iter()
        .map(|key| {
            let (num_sps, n, comps, wall) = acc[&key];
            let mean = wall / n as f64;
            ScalingRow {
                scenario: key.0,
                solver: key.1,
                gamma: key.2,
                num_sps,
                mean_components: comps / n as f64,
                mean_wall_time_s: mean,
                log10_wall_time: mean.log10(),
            }
        })
        .collect()
}
