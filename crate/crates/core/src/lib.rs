//! Multi-task offloading over a vehicular cloud.
//!
//! Task owners (TOs) each hold a task modeled as an undirected graph of components. Nearby
//! service-provider vehicles (SPs) lend idle VMs. A solution maps every component to a
//! distinct VM, subject to
//!
//! * each component's deadline (the VM must be at least as fast) and the TO's radio range,
//! * a contact condition on every task edge cut across two SPs: with exponentially
//!   distributed contact duration of rate λ, `P(duration > ω) = e^(−λω)` must reach ε,
//!
//! and minimizes `ξ_t·‖U^t‖₂ + ξ_c·U^c`, where `U^t` holds the per-task completion times
//! (slowest assigned VM) and `U^c` the data-exchange cost of the cut edges.
//!
//! The crate is generic over the scalar type ([`Scalar`]: `f32` or `f64`); the `*64`
//! aliases below fix it to `f64`, which is what the command-line harness uses.
//!
//! ```
//! use vc_offload::{scenario, solvers, Instance64};
//!
//! let spec = scenario::ScenarioSpec::new(2, 4, scenario::VmCount::Fixed(4),
//!     scenario::TrafficRegime::LowTraffic, 7).with_types(vec![1, 1]);
//! let inst: Instance64 = scenario::generate(&spec).unwrap();
//! let report = solvers::solve_crrm(&inst, 1000, 7).unwrap();
//! println!("{:?} {:?}", report.status, report.total());
//! ```

pub mod io;
pub mod model;
pub mod objective;
pub mod scalar;
pub mod scenario;
pub mod solvers;
pub mod validate;

pub use model::{
    Assignment, ComponentId, Instance, OmegaMode, PairMap, Params, ServiceProvider, TaskEdge, TaskGraph, VcGraph,
    VmRef, VmSlot,
};
pub use objective::{
    assignment_feasible, completion_times, contact_feasible, edge_feasible, exchange_cost, objective,
    slot_admissible, ConstraintViolation, ObjectiveBreakdown,
};
pub use scalar::Scalar;
pub use solvers::{SolverReport, SolverSpec, Status, Workers};
pub use validate::{validate_instance, Violation};

pub type Instance64 = Instance<f64>;
pub type Instance32 = Instance<f32>;
pub type TaskGraph64 = TaskGraph<f64>;
pub type VcGraph64 = VcGraph<f64>;
pub type ObjectiveBreakdown64 = ObjectiveBreakdown<f64>;
pub type SolverReport64 = SolverReport<f64>;
