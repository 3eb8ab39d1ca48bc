//! Simulation core for multi-UAV wind-turbine inspection.
//!
//! The crate is `no_std` (with `alloc`) and carries every algorithm of the
//! inspection pipeline: spherical zone geometry, the component graph, path
//! planning and fleet assignment, the stochastic sensor model, fusion and
//! criticality scoring, the discrete-event mission engine, and the
//! efficiency metrics. File formats, the CLI and any parallel sweeps live in
//! the `farm-sentinel` companion crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod fusion;
pub mod graph;
pub mod math;
pub mod metrics;
pub mod mission;
pub mod planner;
pub mod rng;
pub mod scenario;
pub mod sensor;
pub mod spatial;
pub mod structure;

pub use fusion::{AggregateResult, ComposedObservation, DefectReport};
pub use graph::{ComponentGraph, ComponentId, ComponentKind, Health};
pub use mission::{run_mission, MissionResult};
pub use planner::{FleetAssignment, InspectionPath, PlannerParams, Waypoint};
pub use scenario::Scenario;
pub use sensor::{GroundTruthDefect, SensorMatrix, SensorSpec};
pub use spatial::{FarmLayout, Point3, TurbineDims, TurbineZone};
