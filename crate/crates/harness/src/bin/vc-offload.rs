use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use vc_offload::io::{read_instance, read_json, write_instance, write_json};
use vc_offload::scenario::{generate, ScenarioSpec, TrafficRegime, VmCount};
use vc_offload::{Instance64, OmegaMode, SolverSpec, Workers};
use vc_offload_harness::{ladder_plan, comparison_plan, run_plan, summarize, runtime_plan, ExperimentPlan};

#[derive(Parser)]
#[command(name = "vc-offload", version, about = "Multi-task offloading over a vehicular cloud")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance from a scenario spec.
    Generate(GenerateArgs),
    /// Solve one instance and print the report as JSON.
    Solve(SolveArgs),
    /// Run an experiment plan and write CSVs.
    Bench(BenchArgs),
    /// Aggregate result CSVs.
    Summarize(SummarizeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Regime {
    Low,
    Rush,
}

impl From<Regime> for TrafficRegime {
    fn from(r: Regime) -> Self {
        match r {
            Regime::Low => TrafficRegime::LowTraffic,
            Regime::Rush => TrafficRegime::RushHour,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Omega {
    Static,
    DerivedMin,
}

impl From<Omega> for OmegaMode {
    fn from(m: Omega) -> Self {
        match m {
            Omega::Static => OmegaMode::Static,
            Omega::DerivedMin => OmegaMode::DerivedMin,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverKind {
    Optimal,
    Crrm,
    Dpm,
    Etpm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Runtime,
    Ladder,
    Comparison,
}

#[derive(Args)]
struct GenerateArgs {
    /// Scenario spec (JSON); the flags below override its fields.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    tasks: Option<usize>,
    /// Comma-separated 1-based task type ids, one per task.
    #[arg(long, value_delimiter = ',')]
    types: Option<Vec<usize>>,
    #[arg(long)]
    sps: Option<usize>,
    #[arg(long)]
    vms_per_sp: Option<usize>,
    #[arg(long, value_enum)]
    regime: Option<Regime>,
    #[arg(long, value_enum)]
    omega_mode: Option<Omega>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; receives instance.json and spec.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    solver: SolverKind,
    #[arg(long, default_value_t = 3000)]
    gamma: u64,
    /// Wall-clock budget for the optimal solver.
    #[arg(long, default_value_t = vc_offload_harness::plan::DEFAULT_OPTIMAL_BUDGET_S)]
    budget_s: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    omega_mode: Option<Omega>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Write report.json here instead of printing it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Experiment plan (JSON).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    plan: Option<PathBuf>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Base seed; repetition k uses seed + k.
    #[arg(long)]
    seed: Option<u64>,
    /// CRRM iterations for the ladder preset.
    #[arg(long, default_value_t = 3000)]
    gamma: u64,
    #[arg(long)]
    budget_s: Option<f64>,
    /// Traffic regime for the runtime and ladder presets; comparison fixes its own.
    #[arg(long, value_enum, default_value = "low")]
    regime: Regime,
    #[arg(long, value_enum)]
    omega_mode: Option<Omega>,
    #[arg(long)]
    reps: Option<u32>,
    /// VMs per SP for the ladder (default 3) and comparison (default 12) presets.
    #[arg(long)]
    vms_per_sp: Option<usize>,
    /// Cells run concurrently on this many threads; outputs do not depend on it.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SummarizeArgs {
    #[arg(required = true)]
    csv: Vec<PathBuf>,
    /// Also write summary_groups.csv and summary_comparisons.csv here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_generate(a: GenerateArgs) -> Result<()> {
    let mut spec: ScenarioSpec = match &a.spec {
        Some(p) => read_json(p).with_context(|| format!("reading {}", p.display()))?,
        None => ScenarioSpec::new(2, 4, VmCount::Fixed(4), TrafficRegime::LowTraffic, 0),
    };
    if let Some(types) = a.types {
        spec = spec.with_types(types);
    }
    if let Some(n) = a.tasks {
        if spec.task_type_ids.as_ref().is_some_and(|t| t.len() != n) {
            bail!("--tasks {n} disagrees with the number of task types");
        }
        spec.num_tasks = n;
    }
    if let Some(n) = a.sps {
        spec.num_sps = n;
    }
    if let Some(n) = a.vms_per_sp {
        spec.vms_per_sp = VmCount::Fixed(n);
    }
    if let Some(r) = a.regime {
        spec.regime = r.into();
    }
    if let Some(m) = a.omega_mode {
        spec.omega_mode = m.into();
    }
    if let Some(s) = a.seed {
        spec.seed = s;
    }
    let inst: Instance64 = generate(&spec)?;
    std::fs::create_dir_all(&a.out)?;
    write_instance(a.out.join("instance.json"), &inst)?;
    write_json(a.out.join("spec.json"), &spec)?;
    eprintln!(
        "wrote {} ({} tasks, {} components, {} SPs, {} VMs)",
        a.out.join("instance.json").display(),
        inst.num_tasks(),
        inst.num_components(),
        inst.vc().num_sps(),
        inst.vc().num_vms()
    );
    Ok(())
}

fn cmd_solve(a: SolveArgs) -> Result<()> {
    let mut inst: Instance64 = read_instance(&a.instance).with_context(|| format!("reading {}", a.instance.display()))?;
    if let Some(m) = a.omega_mode {
        inst = inst.with_omega_mode(m.into());
    }
    let spec = match a.solver {
        SolverKind::Optimal => SolverSpec::Optimal {
            budget_s: Some(a.budget_s),
        },
        SolverKind::Crrm => SolverSpec::Crrm { gamma: a.gamma },
        SolverKind::Dpm => SolverSpec::Dpm,
        SolverKind::Etpm => SolverSpec::Etpm,
    };
    let report = spec.run(&inst, a.seed, Workers(a.workers))?;
    match a.out {
        Some(dir) => {
            std::fs::create_dir_all(&dir)?;
            write_json(dir.join("report.json"), &report)?;
        }
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let regime: TrafficRegime = a.regime.into();
    let seed = a.seed.unwrap_or(0);
    let mut plan: ExperimentPlan = match (&a.plan, a.preset) {
        (Some(p), _) => read_json(p).with_context(|| format!("reading {}", p.display()))?,
        (None, Some(Preset::Runtime)) => runtime_plan(regime, seed),
        (None, Some(Preset::Ladder)) => ladder_plan(regime, seed, a.gamma, a.vms_per_sp.unwrap_or(3)),
        (None, Some(Preset::Comparison)) => comparison_plan(seed, a.vms_per_sp.unwrap_or(12)),
        (None, None) => unreachable!("clap requires --plan or --preset"),
    };
    if let Some(s) = a.seed {
        plan.base_seed = s;
    }
    if let Some(b) = a.budget_s {
        plan.optimal_budget_s = b;
    }
    if let Some(m) = a.omega_mode {
        plan.omega_mode = Some(m.into());
    }
    if let Some(r) = a.reps {
        plan.repetitions = r;
    }
    let Some(out) = a.out.or_else(|| plan.out_dir.clone()) else {
        bail!("no output directory: pass --out or set out_dir in the plan");
    };
    eprintln!("running {} cells", plan.num_cells());
    let result = run_plan(&plan, a.workers)?;
    result.write(&out)?;
    let errors = result.rows.iter().filter(|r| r.status == "error").count();
    eprintln!("wrote {} rows to {} ({errors} failed cells)", result.rows.len(), out.display());
    Ok(())
}

fn cmd_summarize(a: SummarizeArgs) -> Result<()> {
    let s = summarize(&a.csv)?;
    print!("{s}");
    if let Some(dir) = a.out.as_deref() {
        s.write(Path::new(dir))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Summarize(a) => cmd_summarize(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
