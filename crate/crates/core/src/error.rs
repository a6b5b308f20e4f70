use thiserror::Error;

use crate::coordination::PlanViolation;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("point ({x:.4}, {y:.4}) is outside the active region of the segment")]
    OutOfRegion { x: f64, y: f64 },

    #[error("point ({x:.4}, {y:.4}) is not on any road segment")]
    OffRoad { x: f64, y: f64 },

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("measurement queue is empty")]
    EmptyQueue,

    #[error("merge plan is singular: merge time {t_m} does not follow arrival time {t0}")]
    SingularPlan { t0: f64, t_m: f64 },

    #[error("time {t} is outside the plan window [{t0}, {t_m}]")]
    OutsidePlanWindow { t: f64, t0: f64, t_m: f64 },

    #[error("vehicle {vehicle} received an infeasible merge plan: {violations:?}")]
    InfeasiblePlan {
        vehicle: usize,
        violations: Vec<PlanViolation>,
    },

    #[error("scenario parse error: {0}")]
    Parse(String),

    #[error("scenario field `{field}`: {message}")]
    Invalid { field: String, message: String },

    #[error("trace is missing {0}")]
    MissingEvents(String),

    #[error("reports are not comparable: {0}")]
    Mismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;

impl SimError {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        SimError::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }
}
