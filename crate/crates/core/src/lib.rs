//! Deterministic microsimulator for coordinated merging of connected
//! automated vehicles on a scaled road network.
//!
//! Modules follow the data flow of one simulation tick: [`road`] geometry and
//! guidance fields feed the [`tracking`] controller, which drives the
//! [`vehicle`] plant; [`coordination`] assigns merge times and plans; the
//! [`engine`] steps the world and records a [`trace::Trace`], which the
//! [`metrics`] and [`export`] modules consume.

// Negated comparisons are the NaN-rejecting guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod coordination;
pub mod engine;
pub mod error;
pub mod export;
pub mod geometry;
pub mod metrics;
pub mod road;
pub mod scenario;
pub mod trace;
pub mod tracking;
pub mod vehicle;

pub use audit::{detect_collisions, SafetyEvent};
pub use engine::{run, Engine};
pub use error::{Result, SimError};
pub use export::{export_trace, import_trace, Format};
pub use geometry::{wrap_angle, Vec2};
pub use metrics::{compare, travel_metrics, Comparison, MetricsReport};
pub use scenario::{load_scenario, ControlMode, Scenario};
pub use trace::{Event, EventKind, Trace, TraceRecord};
