use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::HarnessError;

/// Columns `summarize` needs; other columns are ignored.
pub const REQUIRED_COLUMNS: [&str; 11] = [
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
];

#[derive(Clone, Debug, Deserialize)]
struct InputRow {
    scenario: String,
    solver: String,
    gamma: Option<u64>,
    seed: u64,
    status: String,
    total: Option<f64>,
    wall_time_s: f64,
}

/// Statistics of one (scenario, solver, γ) group. Objective statistics use the runs that
/// returned an assignment; wall-time statistics use every run that did not error.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupStats {
    pub scenario: String,
    pub solver: String,
    pub gamma: Option<u64>,
    pub runs: usize,
    pub solved: usize,
    pub mean_total: Option<f64>,
    pub median_total: Option<f64>,
    pub mean_wall_time_s: Option<f64>,
    pub median_wall_time_s: Option<f64>,
}

/// A pairwise figure for one scenario.
///
/// * `wall_time_improvement_pct`: `(mean_wall(baseline) − mean_wall(solver)) / mean_wall(baseline) · 100`
/// * `win_rate`: over seeds both solvers ran, the share where `solver` has an assignment and
///   either `baseline` has none or a strictly larger total.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub scenario: String,
    pub metric: String,
    pub solver: String,
    pub gamma: Option<u64>,
    pub baseline: String,
    pub value: f64,
    pub pairs: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Summary {
    pub groups: Vec<GroupStats>,
    pub comparisons: Vec<Comparison>,
}

impl Summary {
    pub fn write(&self, dir: &Path) -> Result<(), HarnessError> {
        std::fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join("summary_groups.csv"))?;
        for g in &self.groups {
            w.serialize(g)?;
        }
        w.flush()?;
        let mut w = csv::Writer::from_path(dir.join("summary_comparisons.csv"))?;
        for c in &self.comparisons {
            w.serialize(c)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"))
}

impl std::fmt::Display for Summary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "{:<20} {:<8} {:>6} {:>5} {:>7} {:>12} {:>12} {:>12} {:>12}",
            "scenario", "solver", "gamma", "runs", "solved", "mean_total", "med_total", "mean_wall_s", "med_wall_s"
        )?;
        for g in &self.groups {
            writeln!(
                f,
                "{:<20} {:<8} {:>6} {:>5} {:>7} {:>12} {:>12} {:>12} {:>12}",
                g.scenario,
                g.solver,
                g.gamma.map_or_else(|| "-".to_string(), |v| v.to_string()),
                g.runs,
                g.solved,
                fmt_opt(g.mean_total),
                fmt_opt(g.median_total),
                fmt_opt(g.mean_wall_time_s),
                fmt_opt(g.median_wall_time_s),
            )?;
        }
        if !self.comparisons.is_empty() {
            writeln!(f)?;
            for c in &self.comparisons {
                let who = match c.gamma {
                    Some(g) => format!("{} (gamma={g})", c.solver),
                    None => c.solver.clone(),
                };
                let value = if c.metric == "win_rate" {
                    format!("{:.1}%", c.value * 100.0)
                } else {
                    format!("{:.2}%", c.value)
                };
                writeln!(f, "{:<20} {} vs {}: {} = {} over {}", c.scenario, who, c.baseline, c.metric, value, c.pairs)?;
            }
        }
        Ok(())
    }
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    Some(if s.len() % 2 == 1 { s[m] } else { (s[m - 1] + s[m]) / 2.0 })
}

fn read_rows(path: &Path) -> Result<Vec<InputRow>, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    for col in REQUIRED_COLUMNS {
        if !headers.iter().any(|h| h == col) {
            return Err(HarnessError::Schema {
                path: path.to_path_buf(),
                column: col.to_string(),
            });
        }
    }
    r.deserialize().map(|row| row.map_err(HarnessError::from)).collect()
}

type GroupKey = (String, String, Option<u64>);

/// Reads result CSVs (all `results.csv` columns optional except [`REQUIRED_COLUMNS`]) and
/// aggregates them. Groups keep first-appearance order across files.
pub fn summarize(paths: &[PathBuf]) -> Result<Summary, HarnessError> {
    let mut rows = Vec::new();
    for p in paths {
        rows.extend(read_rows(p)?);
    }
    Ok(summarize_rows(&rows))
}

fn summarize_rows(rows: &[InputRow]) -> Summary {
    let mut order: Vec<GroupKey> = Vec::new();
    let mut groups: HashMap<GroupKey, Vec<&InputRow>> = HashMap::new();
    for r in rows {
        let key = (r.scenario.clone(), r.solver.clone(), r.gamma);
        groups
            .entry(key.clone())
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(r);
    }

    let stats: Vec<GroupStats> = order
        .iter()
        .map(|key| {
            let g = &groups[key];
            let totals: Vec<f64> = g.iter().filter_map(|r| r.total).collect();
            let walls: Vec<f64> = g.iter().filter(|r| r.status != "error").map(|r| r.wall_time_s).collect();
            GroupStats {
                scenario: key.0.clone(),
                solver: key.1.clone(),
                gamma: key.2,
                runs: g.len(),
                solved: g.iter().filter(|r| r.status == "solved").count(),
                mean_total: mean(&totals),
                median_total: median(&totals),
                mean_wall_time_s: mean(&walls),
                median_wall_time_s: median(&walls),
            }
        })
        .collect();

    let mut comparisons = Vec::new();
    let mut scenarios: Vec<&str> = Vec::new();
    for k in &order {
        if !scenarios.contains(&k.0.as_str()) {
            scenarios.push(&k.0);
        }
    }
    for scenario in scenarios {
        let in_scenario: Vec<&GroupStats> = stats.iter().filter(|g| g.scenario == scenario).collect();
        let crrm: Vec<&GroupStats> = in_scenario.iter().copied().filter(|g| g.solver == "crrm").collect();
        for c in &crrm {
            if let Some(opt) = in_scenario.iter().find(|g| g.solver == "optimal") {
                if let (Some(base), Some(own)) = (opt.mean_wall_time_s, c.mean_wall_time_s) {
                    if base > 0.0 {
                        comparisons.push(Comparison {
                            scenario: scenario.to_string(),
                            metric: "wall_time_improvement_pct".to_string(),
                            solver: "crrm".to_string(),
                            gamma: c.gamma,
                            baseline: "optimal".to_string(),
                            value: improvement_pct(base, own),
                            pairs: opt.runs.min(c.runs),
                        });
                    }
                }
            }
            for baseline in ["dpm", "etpm"] {
                let own = &groups[&(scenario.to_string(), "crrm".to_string(), c.gamma)];
                let Some(other) = groups.get(&(scenario.to_string(), baseline.to_string(), None)) else {
                    continue;
                };
                let by_seed: BTreeMap<u64, Option<f64>> = other.iter().map(|r| (r.seed, r.total)).collect();
                let mut pairs = 0;
                let mut wins = 0;
                for r in own {
                    if let Some(theirs) = by_seed.get(&r.seed) {
                        pairs += 1;
                        let win = match (r.total, theirs) {
                            (Some(a), Some(b)) => a < *b,
                            (Some(_), None) => true,
                            _ => false,
                        };
                        wins += win as usize;
                    }
                }
                if pairs > 0 {
                    comparisons.push(Comparison {
                        scenario: scenario.to_string(),
                        metric: "win_rate".to_string(),
                        solver: "crrm".to_string(),
                        gamma: c.gamma,
                        baseline: baseline.to_string(),
                        value: wins as f64 / pairs as f64,
                        pairs,
                    });
                }
            }
        }
    }

    Summary { groups: stats, comparisons }
}

/// Relative wall-time saving of `own` against `base`, in percent.
pub fn improvement_pct(base: f64, own: f64) -> f64 {
    (base - own) / base * 100.0
}
