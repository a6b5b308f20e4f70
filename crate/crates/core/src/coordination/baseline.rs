//! Uncoordinated reference behaviour: secondary-road vehicles give way to
//! main-road traffic at a stop line placed at the merging-zone entry.

use serde::{Deserialize, Serialize};

use super::MergeGeometry;

/// Distance to the stop line below which a vehicle counts as stopped on it.
const AT_LINE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct YieldConfig {
    /// Minimum time before the next main-road vehicle reaches the merging
    /// zone for a secondary vehicle to proceed [s].
    pub clearance_time: f64,
    /// Fraction of `|u_min|` used when braking for a stop line or a leader.
    pub brake_fraction: f64,
}

impl Default for YieldConfig {
    fn default() -> Self {
        Self {
            clearance_time: 1.5,
            brake_fraction: 0.8,
        }
    }
}

/// A main-road vehicle as seen by a yielding vehicle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MainRoadVehicle {
    /// Distance to the merging-zone entry; negative once inside or past it.
    pub distance_to_zone: f64,
    pub speed: f64,
    pub in_zone: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct YieldInputs<'a> {
    /// True for vehicles on the secondary road.
    pub must_yield: bool,
    /// Speed the vehicle cruises at when unobstructed.
    pub cruise_speed: f64,
    pub current_speed: f64,
    /// Distance to the stop line; `None` once the line is behind.
    pub distance_to_stop_line: Option<f64>,
    /// Centre-to-centre distance to the vehicle ahead, if any.
    pub leader_gap: Option<f64>,
    pub main_road: &'a [MainRoadVehicle],
}

/// True when no main-road vehicle occupies the merging zone or will reach it
/// within the clearance time.
fn zone_clear(main: &[MainRoadVehicle], clearance: f64) -> bool {
    main.iter().all(|m| {
        if m.in_zone {
            return false;
        }
        if m.distance_to_zone < 0.0 {
            return true;
        }
        m.speed <= 0.0 || m.distance_to_zone / m.speed >= clearance
    })
}

/// Speed that still allows stopping within `distance` at deceleration `brake`.
fn stopping_speed(distance: f64, brake: f64) -> f64 {
    if distance <= AT_LINE {
        0.0
    } else {
        (2.0 * brake * distance).sqrt()
    }
}

/// Speed command for a vehicle under the yield policy.
///
/// Main-road vehicles cruise. Secondary-road vehicles brake for the stop line
/// unless the merging zone is clear, or unless they can no longer stop before
/// it. Every vehicle keeps the rear-end safety distance at `v_max` to its
/// leader, which bounds the distance required at any average speed.
pub fn baseline_yield_policy(inputs: &YieldInputs<'_>, geom: &MergeGeometry, cfg: &YieldConfig) -> f64 {
    let brake = cfg.brake_fraction * geom.u_min.abs();
    let mut speed = inputs.cruise_speed;
    if let Some(gap) = inputs.leader_gap {
        speed = speed.min(stopping_speed(gap - geom.safe_distance(geom.v_max), brake));
    }
    if inputs.must_yield {
        if let Some(d) = inputs.distance_to_stop_line {
            let v = inputs.current_speed;
            let committed = v * v / (2.0 * geom.u_min.abs()) > d + AT_LINE;
            if !committed && !zone_clear(inputs.main_road, cfg.clearance_time) {
                speed = speed.min(stopping_speed(d, brake));
            }
        }
    }
    speed.max(0.0)
}

/// Moves `current` toward `target` within the acceleration bounds.
pub fn rate_limit(current: f64, target: f64, geom: &MergeGeometry, dt: f64) -> f64 {
    target.clamp(current + geom.u_min * dt, current + geom.u_max * dt).max(0.0)
}
