//! Reference generation and pose tracking.
//!
//! A virtual robot runs along the lane field (or along a merge plan) at a
//! commanded speed; the physical vehicle follows it through a nonlinear
//! state-tracking law with speed-scheduled gains.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::geometry::{wrap_angle, Vec2};
use crate::road::{evaluate_route_field, Route};
use crate::vehicle::{ControlInput, VehicleState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceState {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub v: f64,
    pub omega: f64,
}

impl ReferenceState {
    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn pose(&self) -> VehicleState {
        VehicleState::new(self.x, self.y, self.theta)
    }

    /// Reference resting at `s` on `route`, heading along the field.
    pub fn on_route(route: &Route, s: f64, speed: f64) -> Result<(Self, usize)> {
        let (p, _, idx) = route.pose_at(s);
        let (field, idx) = evaluate_route_field(p, route, idx)?;
        let heading = unit(field, p)?;
        Ok((
            Self {
                x: p.x,
                y: p.y,
                theta: heading.angle(),
                v: speed,
                omega: 0.0,
            },
            idx,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackingGains {
    /// Damping, in (0, 1).
    pub zeta: f64,
    pub b: f64,
}

impl Default for TrackingGains {
    fn default() -> Self {
        Self { zeta: 0.8, b: 70.0 }
    }
}

impl TrackingGains {
    pub fn validate(&self) -> Result<()> {
        if !(self.zeta > 0.0 && self.zeta < 1.0) {
            return Err(SimError::invalid("tracking.zeta", "must lie in (0, 1)"));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(SimError::invalid("tracking.b", "must be positive"));
        }
        Ok(())
    }
}

fn unit(field: Vec2, at: Vec2) -> Result<Vec2> {
    field.normalized().ok_or(SimError::OffRoad { x: at.x, y: at.y })
}

/// Advances the virtual robot by `speed * dt` along the route field using a
/// midpoint step on the normalized field. Heading is the field direction at
/// the new position; turn rate is the wrapped heading change over `dt`.
pub fn virtual_robot_step(
    reference: &ReferenceState,
    route: &Route,
    index: usize,
    speed: f64,
    dt: f64,
) -> Result<(ReferenceState, usize)> {
    if !(speed >= 0.0 && speed.is_finite()) {
        return Err(SimError::InvalidArgument(format!(
            "reference speed must be non-negative, got {speed}"
        )));
    }
    if !(dt > 0.0) {
        return Err(SimError::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    let p0 = reference.position();
    let (f0, idx) = evaluate_route_field(p0, route, index)?;
    let d0 = unit(f0, p0)?;
    let (p1, idx) = if speed == 0.0 {
        (p0, idx)
    } else {
        let mid = p0 + d0 * (0.5 * speed * dt);
        let (fm, idx_mid) = evaluate_route_field(mid, route, idx)?;
        let dm = unit(fm, mid)?;
        (p0 + dm * (speed * dt), idx_mid)
    };
    let (f1, idx) = evaluate_route_field(p1, route, idx)?;
    let theta = unit(f1, p1)?.angle();
    Ok((
        ReferenceState {
            x: p1.x,
            y: p1.y,
            theta,
            v: speed,
            omega: wrap_angle(theta - reference.theta) / dt,
        },
        idx,
    ))
}

/// Tracking gains `(k1, k2, k3)` for the current reference speed and turn rate.
pub fn compute_gains(v_d: f64, omega_d: f64, gains: &TrackingGains) -> (f64, f64, f64) {
    let k = 2.0 * gains.zeta * (omega_d * omega_d + gains.b * v_d * v_d).sqrt();
    (k, k, gains.b * v_d)
}

/// Tracking law. `sign(v_d)` is taken as +1 at `v_d = 0`.
pub fn tracking_control(state: &VehicleState, reference: &ReferenceState, gains: &TrackingGains) -> ControlInput {
    let (k1, k2, k3) = compute_gains(reference.v, reference.omega, gains);
    let (s, c) = state.theta.sin_cos();
    let ex = reference.x - state.x;
    let ey = reference.y - state.y;
    let etheta = wrap_angle(reference.theta - state.theta);
    let sign = if reference.v < 0.0 { -1.0 } else { 1.0 };
    ControlInput {
        v: reference.v * etheta.cos() + k1 * (ex * c + ey * s),
        omega: reference.omega + k2 * sign * (ey * c - ex * s) + k3 * etheta,
    }
}
