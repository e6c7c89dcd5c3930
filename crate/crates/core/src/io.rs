//! JSON instance file format (`format_version` 1).
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "tasks": [
//!     { "label": "path4", "deadlines": [0.15, 0.2], "edges": [{ "a": 0, "b": 1, "omega": 0.2 }] }
//!   ],
//!   "sps": [ { "label": "bus-7", "vms": [0.1, 0.22] }, { "vms": [0.05] } ],
//!   "contact_rates": [ { "a": "bus-7", "b": 1, "lambda": 0.04 } ],
//!   "exch_costs": [ { "a": 0, "b": 1, "cost": 0.1 } ],
//!   "reachability": [ [0, 1] ],
//!   "epsilon": 0.95,
//!   "xi_t": 0.5,
//!   "xi_c": 0.5,
//!   "omega_mode": "static"
//! }
//! ```
//!
//! SPs may be referenced by index or by label in `contact_rates`, `exch_costs` and
//! `reachability`; labels are resolved to indices on load. Pairs are unordered and may be
//! listed once. `omega_mode` is `"static"` or `"derived_min"`. Written files always use
//! indices.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Instance, OmegaMode, PairMap, Params, ServiceProvider, TaskEdge, TaskGraph, VcGraph};
use crate::scalar::Scalar;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format_version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("unknown SP label {0:?}")]
    UnknownSp(String),
    #[error("SP index {0} out of range")]
    SpOutOfRange(usize),
    #[error("SP label {0:?} used twice")]
    DuplicateLabel(String),
    #[error("{table}: pair ({a}, {b}) listed twice")]
    DuplicatePair { table: &'static str, a: usize, b: usize },
    #[error("{table}: SP {sp} paired with itself")]
    SelfPair { table: &'static str, sp: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpKey {
    Index(usize),
    Label(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EdgeRecord<T> {
    pub a: usize,
    pub b: usize,
    pub omega: T,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TaskRecord<T> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub deadlines: Vec<T>,
    #[serde(default)]
    pub edges: Vec<EdgeRecord<T>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SpRecord<T> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub vms: Vec<T>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ContactRecord<T> {
    pub a: SpKey,
    pub b: SpKey,
    pub lambda: T,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CostRecord<T> {
    pub a: SpKey,
    pub b: SpKey,
    pub cost: T,
}

/// On-disk layout of an instance.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct InstanceFile<T> {
    pub format_version: u32,
    pub tasks: Vec<TaskRecord<T>>,
    pub sps: Vec<SpRecord<T>>,
    #[serde(default)]
    pub contact_rates: Vec<ContactRecord<T>>,
    #[serde(default)]
    pub exch_costs: Vec<CostRecord<T>>,
    pub reachability: Vec<Vec<SpKey>>,
    pub epsilon: T,
    pub xi_t: T,
    pub xi_c: T,
    #[serde(default)]
    pub omega_mode: OmegaMode,
}

impl<T: Scalar> InstanceFile<T> {
    pub fn from_instance(inst: &Instance<T>) -> Self {
        let vc = inst.vc();
        Self {
            format_version: FORMAT_VERSION,
            tasks: inst
                .tasks()
                .iter()
                .map(|t| TaskRecord {
                    label: t.label().map(str::to_string),
                    deadlines: t.deadlines().to_vec(),
                    edges: t
                        .edges()
                        .iter()
                        .map(|e| EdgeRecord {
                            a: e.a,
                            b: e.b,
                            omega: e.omega,
                        })
                        .collect(),
                })
                .collect(),
            sps: vc
                .sps()
                .iter()
                .map(|s| SpRecord {
                    label: s.label.clone(),
                    vms: s.vms.clone(),
                })
                .collect(),
            contact_rates: vc
                .contact_rates()
                .iter()
                .map(|(a, b, lambda)| ContactRecord {
                    a: SpKey::Index(a),
                    b: SpKey::Index(b),
                    lambda,
                })
                .collect(),
            exch_costs: inst
                .exch_costs()
                .iter()
                .map(|(a, b, cost)| CostRecord {
                    a: SpKey::Index(a),
                    b: SpKey::Index(b),
                    cost,
                })
                .collect(),
            reachability: vc
                .reachability()
                .iter()
                .map(|r| r.iter().map(|&s| SpKey::Index(s)).collect())
                .collect(),
            epsilon: inst.epsilon(),
            xi_t: inst.xi_t(),
            xi_c: inst.xi_c(),
            omega_mode: inst.omega_mode(),
        }
    }

    pub fn into_instance(self) -> Result<Instance<T>, FormatError> {
        if self.format_version != FORMAT_VERSION {
            return Err(FormatError::Version(self.format_version));
        }
        let n = self.sps.len();
        let mut labels = HashMap::new();
        for (i, sp) in self.sps.iter().enumerate() {
            if let Some(l) = &sp.label {
                if labels.insert(l.clone(), i).is_some() {
                    return Err(FormatError::DuplicateLabel(l.clone()));
                }
            }
        }
        let resolve = |k: &SpKey| -> Result<usize, FormatError> {
            match k {
                SpKey::Index(i) if *i < n => Ok(*i),
                SpKey::Index(i) => Err(FormatError::SpOutOfRange(*i)),
                SpKey::Label(l) => labels.get(l).copied().ok_or_else(|| FormatError::UnknownSp(l.clone())),
            }
        };
        let fill = |table: &'static str, rows: Vec<(SpKey, SpKey, T)>| -> Result<PairMap<T>, FormatError> {
            let mut map = PairMap::new(n);
            for (ka, kb, v) in rows {
                let (a, b) = (resolve(&ka)?, resolve(&kb)?);
                if a == b {
                    return Err(FormatError::SelfPair { table, sp: a });
                }
                if map.insert(a, b, v).is_some() {
                    return Err(FormatError::DuplicatePair { table, a, b });
                }
            }
            Ok(map)
        };
        let rates = fill(
            "contact_rates",
            self.contact_rates.into_iter().map(|r| (r.a, r.b, r.lambda)).collect(),
        )?;
        let costs = fill(
            "exch_costs",
            self.exch_costs.into_iter().map(|r| (r.a, r.b, r.cost)).collect(),
        )?;
        let reachability = self
            .reachability
            .iter()
            .map(|set| set.iter().map(&resolve).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let tasks = self
            .tasks
            .into_iter()
            .map(|t| {
                let g = TaskGraph::new(
                    t.deadlines,
                    t.edges.into_iter().map(|e| TaskEdge::new(e.a, e.b, e.omega)).collect(),
                );
                match t.label {
                    Some(l) => g.with_label(l),
                    None => g,
                }
            })
            .collect();
        let sps = self
            .sps
            .into_iter()
            .map(|s| ServiceProvider {
                label: s.label,
                vms: s.vms,
            })
            .collect();
        Ok(Instance::new(
            tasks,
            VcGraph::new(sps, rates, reachability),
            costs,
            Params {
                epsilon: self.epsilon,
                xi_t: self.xi_t,
                xi_c: self.xi_c,
                omega_mode: self.omega_mode,
            },
        ))
    }
}

pub fn instance_to_json<T: Scalar>(inst: &Instance<T>) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(inst)).expect("instance serializes")
}

pub fn instance_from_json<T: Scalar>(text: &str) -> Result<Instance<T>, FormatError> {
    serde_json::from_str::<InstanceFile<T>>(text)?.into_instance()
}

pub fn read_instance<T: Scalar>(path: impl AsRef<Path>) -> Result<Instance<T>, FormatError> {
    instance_from_json(&fs::read_to_string(path)?)
}

pub fn write_instance<T: Scalar>(path: impl AsRef<Path>, inst: &Instance<T>) -> Result<(), FormatError> {
    fs::write(path, instance_to_json(inst))?;
    Ok(())
}

/// Reads any JSON document, e.g. a [`ScenarioSpec`](crate::scenario::ScenarioSpec).
pub fn read_json<D: DeserializeOwned>(path: impl AsRef<Path>) -> Result<D, FormatError> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn write_json<S: Serialize>(path: impl AsRef<Path>, value: &S) -> Result<(), FormatError> {
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}
