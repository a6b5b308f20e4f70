//! Closed-form energy-optimal control-zone trajectories.
//!
//! With no state or control bound active, minimizing half the integrated
//! squared acceleration gives a linear acceleration profile, a quadratic
//! speed and a cubic position. Plans are stored in local time
//! `tau = t - t0`, which keeps the boundary conditions exact to rounding for
//! large absolute times.

use serde::{Deserialize, Serialize};

use super::MergeGeometry;
use crate::error::{Result, SimError};

/// Tolerance used when checking speed and acceleration bounds.
const BOUND_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergePlan {
    /// Acceleration slope, `u = a tau + b`.
    pub a: f64,
    pub b: f64,
    /// Speed at `t0`.
    pub c: f64,
    /// Position at `t0` (always zero at control-zone entry).
    pub d: f64,
    pub t0: f64,
    pub t_m: f64,
    pub v0: f64,
    pub v_final: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanSample {
    pub p: f64,
    pub v: f64,
    pub u: f64,
}

impl MergePlan {
    pub fn duration(&self) -> f64 {
        self.t_m - self.t0
    }

    /// Evaluates the polynomials at local time `tau` without a window check.
    pub fn at_local(&self, tau: f64) -> PlanSample {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        PlanSample {
            u: a * tau + b,
            v: 0.5 * a * tau * tau + b * tau + c,
            p: a * tau * tau * tau / 6.0 + 0.5 * b * tau * tau + c * tau + d,
        }
    }

    /// Coefficients `(a, b, c, d)` of the same polynomials written in absolute
    /// time, `u = a t + b`, `v = a t^2/2 + b t + c`,
    /// `p = a t^3/6 + b t^2/2 + c t + d`.
    pub fn absolute_coefficients(&self) -> (f64, f64, f64, f64) {
        let t0 = self.t0;
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let b_abs = b - a * t0;
        let c_abs = c - b * t0 + 0.5 * a * t0 * t0;
        let d_abs = d - c * t0 + 0.5 * b * t0 * t0 - a * t0 * t0 * t0 / 6.0;
        (a, b_abs, c_abs, d_abs)
    }

    /// Control effort `1/2 * integral of u^2` over the window.
    pub fn cost(&self) -> f64 {
        let t = self.duration();
        let (a, b) = (self.a, self.b);
        0.5 * (a * a * t * t * t / 3.0 + a * b * t * t + b * b * t)
    }
}

/// Plan reaching `distance` at `t_m` with final speed `v_final`, starting at
/// position zero and speed `v0` at `t0`.
pub fn solve_unconstrained(t0: f64, t_m: f64, v0: f64, distance: f64, v_final: f64) -> Result<MergePlan> {
    if ![t0, t_m, v0, distance, v_final].iter().all(|v| v.is_finite()) {
        return Err(SimError::NonFinite("plan boundary conditions"));
    }
    if !(v0 > 0.0) {
        return Err(SimError::InvalidArgument(format!("entry speed must be positive, got {v0}")));
    }
    let t = t_m - t0;
    if !(t > 0.0) {
        return Err(SimError::SingularPlan { t0, t_m });
    }
    // Remaining distance and speed change once the entry speed is accounted for.
    let dp = distance - v0 * t;
    let dv = v_final - v0;
    let a = 6.0 * dv / (t * t) - 12.0 * dp / (t * t * t);
    let b = 6.0 * dp / (t * t) - 2.0 * dv / t;
    Ok(MergePlan {
        a,
        b,
        c: v0,
        d: 0.0,
        t0,
        t_m,
        v0,
        v_final,
        distance,
    })
}

impl MergePlan {
    /// Plan across the control zone of `geom`.
    pub fn for_zone(t0: f64, t_m: f64, v0: f64, geom: &MergeGeometry) -> Result<MergePlan> {
        solve_unconstrained(t0, t_m, v0, geom.control_length, geom.v_merge)
    }
}

/// Position, speed and acceleration at absolute time `t`.
pub fn eval_plan(plan: &MergePlan, t: f64) -> Result<PlanSample> {
    let slack = 1e-12 * plan.t_m.abs().max(1.0);
    if !(t >= plan.t0 - slack && t <= plan.t_m + slack) {
        return Err(SimError::OutsidePlanWindow {
            t,
            t0: plan.t0,
            t_m: plan.t_m,
        });
    }
    Ok(plan.at_local(t - plan.t0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    SpeedBelowMin,
    SpeedAboveMax,
    AccelBelowMin,
    AccelAboveMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanViolation {
    pub kind: ViolationKind,
    /// Absolute time of the worst violation.
    pub time: f64,
    pub value: f64,
    pub bound: f64,
}

/// Checks the plan against the speed and acceleration bounds of `geom`.
///
/// Acceleration is linear, so its extremes are at the window ends; speed is
/// quadratic and may also peak or dip at `tau = -b / a`.
pub fn validate_plan(plan: &MergePlan, geom: &MergeGeometry) -> Vec<PlanViolation> {
    let t = plan.duration();
    let mut speed_candidates = vec![0.0, t];
    if plan.a != 0.0 {
        let tau = -plan.b / plan.a;
        if tau > 0.0 && tau < t {
            speed_candidates.push(tau);
        }
    }
    let mut out = Vec::new();
    let speeds: Vec<(f64, f64)> = speed_candidates.iter().map(|&tau| (tau, plan.at_local(tau).v)).collect();
    let (tau_lo, v_lo) = speeds.iter().copied().fold((0.0, f64::INFINITY), |m, s| if s.1 < m.1 { s } else { m });
    let (tau_hi, v_hi) = speeds.iter().copied().fold((0.0, f64::NEG_INFINITY), |m, s| if s.1 > m.1 { s } else { m });
    if v_lo < geom.v_min - BOUND_TOL {
        out.push(PlanViolation {
            kind: ViolationKind::SpeedBelowMin,
            time: plan.t0 + tau_lo,
            value: v_lo,
            bound: geom.v_min,
        });
    }
    if v_hi > geom.v_max + BOUND_TOL {
        out.push(PlanViolation {
            kind: ViolationKind::SpeedAboveMax,
            time: plan.t0 + tau_hi,
            value: v_hi,
            bound: geom.v_max,
        });
    }
    let (u0, u1) = (plan.at_local(0.0).u, plan.at_local(t).u);
    let (tau_umin, u_lo) = if u0 <= u1 { (0.0, u0) } else { (t, u1) };
    let (tau_umax, u_hi) = if u0 >= u1 { (0.0, u0) } else { (t, u1) };
    if u_lo < geom.u_min - BOUND_TOL {
        out.push(PlanViolation {
            kind: ViolationKind::AccelBelowMin,
            time: plan.t0 + tau_umin,
            value: u_lo,
            bound: geom.u_min,
        });
    }
    if u_hi > geom.u_max + BOUND_TOL {
        out.push(PlanViolation {
            kind: ViolationKind::AccelAboveMax,
            time: plan.t0 + tau_umax,
            value: u_hi,
            bound: geom.u_max,
        });
    }
    out
}
