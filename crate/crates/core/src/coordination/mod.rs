//! Decentralized merge coordination.
//!
//! Vehicles entering the control zone join a first-in-first-out queue kept by
//! a passive coordinator, pick their merging-zone entry time from the
//! predecessor's shared information, and follow an energy-optimal
//! unconstrained plan to reach it. A yield-at-stop-line policy is provided as
//! the uncoordinated baseline.

mod baseline;
mod plan;
mod queue;
mod safety;

use serde::{Deserialize, Serialize};

pub use baseline::{baseline_yield_policy, rate_limit, MainRoadVehicle, YieldConfig, YieldInputs};
pub use plan::{eval_plan, solve_unconstrained, validate_plan, MergePlan, PlanSample, PlanViolation, ViolationKind};
pub use queue::{
    classify_predecessor, compute_merge_time, insert_into_queue, occupancy_interval, Arrival, Assignment,
    Coordinator, InfoSet, QueueEntry,
};
pub use safety::{rear_end_check, LaneSample, RearEndViolation, TickSnapshot};

use crate::error::{Result, SimError};

/// Road label of a vehicle, `1` for the main road and `2` for the secondary.
pub type RoadLabel = u8;

/// Relation of a vehicle to its queue predecessor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subset {
    /// Same road and lane: rear-end constraint applies.
    SameLane,
    /// Other road: may collide laterally inside the merging zone.
    Conflicting,
}

/// Where a vehicle is relative to the merge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Zone {
    Outside,
    Control,
    Merging,
    Past,
}

impl Zone {
    pub fn as_str(self) -> &'static str {
        match self {
            Zone::Outside => "outside",
            Zone::Control => "control",
            Zone::Merging => "merging",
            Zone::Past => "past",
        }
    }

    pub fn parse(s: &str) -> Option<Zone> {
        match s {
            "outside" => Some(Zone::Outside),
            "control" => Some(Zone::Control),
            "merging" => Some(Zone::Merging),
            "past" => Some(Zone::Past),
            _ => None,
        }
    }

    /// Zone of a point `offset` metres past the merging-zone entry.
    pub fn classify(offset: f64, geom: &MergeGeometry) -> Zone {
        if offset < -geom.control_length {
            Zone::Outside
        } else if offset < 0.0 {
            Zone::Control
        } else if offset < geom.merge_length {
            Zone::Merging
        } else {
            Zone::Past
        }
    }
}

/// Control-zone and merging-zone parameters shared by every vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergeGeometry {
    /// Distance from control-zone entry to merging-zone entry, `L`.
    pub control_length: f64,
    /// Length of the merging zone, `S`.
    pub merge_length: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub u_min: f64,
    pub u_max: f64,
    /// Imposed speed inside the merging zone.
    pub v_merge: f64,
    /// Standstill gap of the rear-end safety distance.
    pub standstill_gap: f64,
    /// Time headway of the rear-end safety distance.
    pub time_headway: f64,
    /// Control-zone travel time assigned to the first vehicle in the queue.
    /// Defaults to cruising at its entry speed.
    #[serde(default)]
    pub first_travel_time: Option<f64>,
}

impl Default for MergeGeometry {
    fn default() -> Self {
        Self {
            control_length: 3.0,
            merge_length: 0.4,
            v_min: 0.05,
            v_max: 0.5,
            u_min: -0.3,
            u_max: 0.3,
            v_merge: 0.3,
            standstill_gap: 0.15,
            time_headway: 0.4,
            first_travel_time: None,
        }
    }
}

impl MergeGeometry {
    /// Rear-end safety distance at average speed `v_ave`.
    pub fn safe_distance(&self, v_ave: f64) -> f64 {
        self.standstill_gap + self.time_headway * v_ave
    }

    /// Time spent crossing the merging zone at the imposed speed.
    pub fn merge_dwell(&self) -> f64 {
        self.merge_length / self.v_merge
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.control_length,
            self.merge_length,
            self.v_min,
            self.v_max,
            self.u_min,
            self.u_max,
            self.v_merge,
            self.standstill_gap,
            self.time_headway,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(SimError::invalid("merge", "all parameters must be finite"));
        }
        if !(self.merge_length > 0.0) {
            return Err(SimError::invalid("merge.merge_length", "must be positive"));
        }
        if !(self.merge_length < self.control_length) {
            return Err(SimError::invalid(
                "merge.merge_length",
                format!(
                    "must be shorter than control_length ({} >= {})",
                    self.merge_length, self.control_length
                ),
            ));
        }
        if !(self.v_min >= 0.0 && self.v_min < self.v_merge && self.v_merge <= self.v_max) {
            return Err(SimError::invalid(
                "merge.v_merge",
                "speeds must satisfy 0 <= v_min < v_merge <= v_max",
            ));
        }
        if !(self.u_min < 0.0 && self.u_max > 0.0) {
            return Err(SimError::invalid("merge.u_min", "acceleration bounds must satisfy u_min < 0 < u_max"));
        }
        if self.standstill_gap < 0.0 || self.time_headway < 0.0 {
            return Err(SimError::invalid(
                "merge.standstill_gap",
                "safety distance parameters must be non-negative",
            ));
        }
        if self.safe_distance(self.v_max) >= self.merge_length {
            return Err(SimError::invalid(
                "merge.time_headway",
                format!(
                    "safety distance at v_max ({:.4} m) must be shorter than merge_length ({} m)",
                    self.safe_distance(self.v_max),
                    self.merge_length
                ),
            ));
        }
        if let Some(t) = self.first_travel_time {
            if !(t > 0.0 && t.is_finite()) {
                return Err(SimError::invalid("merge.first_travel_time", "must be positive"));
            }
        }
        Ok(())
    }
}
