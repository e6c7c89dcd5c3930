use std::fs;
use std::path::Path;

use vc_offload::scenario::{runtime_specs, ScenarioSpec, TrafficRegime, VmCount};
use vc_offload::SolverSpec;
use vc_offload_harness::{run_plan, summarize, runtime_plan, ExperimentPlan, HarnessError, ScenarioEntry, RESULT_COLUMNS};

fn small_plan(seed: u64) -> ExperimentPlan {
    let scenarios = [(2, 3, TrafficRegime::LowTraffic), (3, 4, TrafficRegime::RushHour)]
        .into_iter()
        .map(|(t, s, r)| ScenarioEntry::spec(format!("{t}x{s}"), ScenarioSpec::new(t, s, VmCount::Fixed(5), r, seed)))
        .collect();
    let mut plan = ExperimentPlan::new(
        scenarios,
        vec![SolverSpec::Crrm { gamma: 60 }, SolverSpec::Crrm { gamma: 120 }, SolverSpec::Dpm, SolverSpec::Etpm],
    );
    plan.repetitions = 3;
    plan.base_seed = seed;
    plan
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn empty_plan_writes_headers_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_plan(&ExperimentPlan::new(vec![], vec![SolverSpec::Dpm]), 1).unwrap();
    out.write(dir.path()).unwrap();
    let text = fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert_eq!(header(&dir.path().join("results.csv")), RESULT_COLUMNS.join(","));
    for f in ["crrm_traces.csv", "scaling.csv"] {
        assert_eq!(fs::read_to_string(dir.path().join(f)).unwrap().lines().count(), 1, "{f}");
    }
    // a header-only file still summarizes
    let s = summarize(&[dir.path().join("results.csv")]).unwrap();
    assert!(s.groups.is_empty() && s.comparisons.is_empty());
}

#[test]
fn rows_follow_cells_and_seeds() {
    let plan = small_plan(40);
    let out = run_plan(&plan, 2).unwrap();
    assert_eq!(out.rows.len(), plan.num_cells());
    let seeds: Vec<u64> = out.rows.iter().filter(|r| r.scenario == "2x3" && r.solver == "dpm").map(|r| r.seed).collect();
    assert_eq!(seeds, vec![40, 41, 42]);
    for r in &out.rows {
        assert!(["solved", "infeasible"].contains(&r.status.as_str()), "{r:?}");
        assert_eq!(r.total.is_some(), r.status == "solved");
    }
    let traced: usize = out.rows.iter().filter(|r| r.solver == "crrm" && r.status == "solved").count();
    assert!(traced > 0);
    for r in out.rows.iter().filter(|r| r.solver == "crrm" && r.status == "solved") {
        let trace: Vec<_> = out
            .traces
            .iter()
            .filter(|t| t.scenario == r.scenario && t.seed == r.seed && Some(t.gamma) == r.gamma)
            .collect();
        // one point per attempt from the first completed one on
        assert_eq!(trace.last().map(|t| Some(t.iteration)), Some(r.gamma));
        assert_eq!(trace.last().map(|t| Some(t.best_total)), Some(r.total));
        assert!(trace.len() as u64 <= r.gamma.unwrap());
    }
}

#[test]
fn repeated_runs_match_without_timing() {
    let plan = small_plan(7);
    let a = run_plan(&plan, 1).unwrap().without_timing();
    let b = run_plan(&plan, 3).unwrap().without_timing();
    assert_eq!(a, b);
}

#[test]
fn runtime_first_row_has_three_crrm_rows() {
    let mut plan = runtime_plan(TrafficRegime::LowTraffic, 3);
    plan.scenarios.truncate(1);
    plan.optimal_budget_s = 0.5;
    let out = run_plan(&plan, 1).unwrap();
    let crrm: Vec<_> = out.rows.iter().filter(|r| r.solver == "crrm").collect();
    assert_eq!(crrm.iter().map(|r| r.gamma).collect::<Vec<_>>(), vec![Some(1000), Some(2000), Some(3000)]);
    let (_, spec) = &runtime_specs(TrafficRegime::LowTraffic, 3)[0];
    assert!(crrm.iter().all(|r| r.num_tasks == spec.num_tasks && r.num_sps == spec.num_sps && r.num_vms == 16));
    for r in crrm.iter().filter(|r| r.status == "solved") {
        let trace: Vec<_> = out.traces.iter().filter(|t| Some(t.gamma) == r.gamma).collect();
        assert_eq!(trace.last().unwrap().iteration, r.gamma.unwrap());
        assert!(trace.windows(2).all(|w| w[1].best_total <= w[0].best_total));
    }
    assert_eq!(out.rows.iter().filter(|r| r.solver == "optimal").count(), 1);
}

#[test]
fn summarize_accepts_any_plan_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut plan = small_plan(11);
    plan.solvers.push(SolverSpec::Optimal { budget_s: Some(0.2) });
    run_plan(&plan, 1).unwrap().write(dir.path()).unwrap();
    let s = summarize(&[dir.path().join("results.csv")]).unwrap();
    assert_eq!(s.groups.len(), 2 * 5);
    assert!(s.comparisons.iter().all(|c| c.value.is_finite()));
    s.write(dir.path()).unwrap();
    assert!(dir.path().join("summary_groups.csv").exists());
}

#[test]
fn missing_column_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    let cols: Vec<&str> = RESULT_COLUMNS.iter().copied().filter(|c| *c != "evaluations").collect();
    fs::write(&path, format!("{}\n", cols.join(","))).unwrap();
    match summarize(&[path]) {
        Err(HarnessError::Schema { column, .. }) => assert_eq!(column, "evaluations"),
        other => panic!("expected a schema error, got {other:?}"),
    }
}

#[test]
fn unreadable_instance_file_fails_the_plan() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    fs::write(&path, "{not json").unwrap();
    let plan: ExperimentPlan = serde_json::from_str(&format!(
        r#"{{"scenarios": [{{"id": "x", "file": {:?}}}], "solvers": [{{"kind": "dpm"}}]}}"#,
        path.display().to_string()
    ))
    .unwrap();
    assert!(matches!(run_plan(&plan, 1), Err(HarnessError::Instance { .. })));
}
