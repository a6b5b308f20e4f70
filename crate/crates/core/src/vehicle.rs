//! Differential-drive vehicle: unicycle kinematics, wheel-speed conversion and
//! a low-level wheel controller driven by quantized encoder feedback.

use std::collections::VecDeque;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::geometry::{wrap_angle, Vec2};

/// Below this turn rate the straight-line update is used.
const STRAIGHT_OMEGA: f64 = 1e-9;

/// Encoder sampling period of the wheel controller (2 kHz).
pub const ENCODER_PERIOD: f64 = 1.0 / 2000.0;

/// Capacity of the speed-estimate smoothing queue.
pub const SMOOTHING_WINDOW: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    /// Heading in (-pi, pi].
    pub theta: f64,
}

impl VehicleState {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: wrap_angle(theta),
        }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.theta.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlInput {
    /// Longitudinal speed [m/s].
    pub v: f64,
    /// Turn rate [rad/s].
    pub omega: f64,
}

impl ControlInput {
    pub fn new(v: f64, omega: f64) -> Self {
        Self { v, omega }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.omega.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DriveGeometry {
    pub wheel_radius: f64,
    /// Distance between the wheel contact points.
    pub track_width: f64,
    /// Encoder counts per motor revolution.
    pub encoder_cpr: u32,
    pub gear_ratio: f64,
    /// Forward speed reached at full duty on both wheels.
    pub v_sat: f64,
    /// Per-vehicle scaling of `v_sat` to model mechanical spread.
    pub saturation_multiplier: f64,
}

impl Default for DriveGeometry {
    fn default() -> Self {
        Self {
            wheel_radius: 0.016,
            track_width: 0.09,
            encoder_cpr: 12,
            gear_ratio: 75.81,
            v_sat: 0.7,
            saturation_multiplier: 1.0,
        }
    }
}

impl DriveGeometry {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(SimError::invalid(name, format!("must be positive, got {v}")))
            }
        };
        positive("wheel_radius", self.wheel_radius)?;
        positive("track_width", self.track_width)?;
        positive("gear_ratio", self.gear_ratio)?;
        positive("v_sat", self.v_sat)?;
        positive("saturation_multiplier", self.saturation_multiplier)?;
        if self.encoder_cpr == 0 {
            return Err(SimError::invalid("encoder_cpr", "must be at least 1"));
        }
        Ok(())
    }

    /// Encoder counts per wheel revolution.
    pub fn counts_per_rev(&self) -> f64 {
        self.encoder_cpr as f64 * self.gear_ratio
    }

    pub fn counts_per_radian(&self) -> f64 {
        self.counts_per_rev() / (2.0 * PI)
    }

    /// Effective forward saturation speed of this vehicle.
    pub fn saturation_speed(&self) -> f64 {
        self.v_sat * self.saturation_multiplier
    }

    /// Wheel angular speed at full duty.
    pub fn max_wheel_speed(&self) -> f64 {
        self.saturation_speed() / self.wheel_radius
    }
}

/// Right and left wheel angular speeds [rad/s].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WheelSpeeds {
    pub right: f64,
    pub left: f64,
}

/// Advances the pose under constant `(v, omega)` for `dt` using the exact
/// solution of the unicycle equations.
pub fn unicycle_step(state: VehicleState, input: ControlInput, dt: f64) -> Result<VehicleState> {
    if !state.is_finite() {
        return Err(SimError::NonFinite("vehicle state"));
    }
    if !input.is_finite() {
        return Err(SimError::NonFinite("control input"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SimError::InvalidArgument(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let ControlInput { v, omega } = input;
    let theta = state.theta;
    let next = if omega.abs() < STRAIGHT_OMEGA {
        VehicleState {
            x: state.x + v * theta.cos() * dt,
            y: state.y + v * theta.sin() * dt,
            theta: wrap_angle(theta + omega * dt),
        }
    } else {
        let turned = theta + omega * dt;
        let radius = v / omega;
        VehicleState {
            x: state.x + radius * (turned.sin() - theta.sin()),
            y: state.y - radius * (turned.cos() - theta.cos()),
            theta: wrap_angle(turned),
        }
    };
    Ok(next)
}

/// Wheel speeds producing `input`.
///
/// Turn rate uses `R (right - left) / d`, where `d` is the track width.
pub fn input_to_wheel_speeds(input: ControlInput, geom: &DriveGeometry) -> WheelSpeeds {
    let r = geom.wheel_radius;
    let d = geom.track_width;
    WheelSpeeds {
        right: (input.v + 0.5 * d * input.omega) / r,
        left: (input.v - 0.5 * d * input.omega) / r,
    }
}

pub fn wheel_speeds_to_input(wheels: WheelSpeeds, geom: &DriveGeometry) -> ControlInput {
    let r = geom.wheel_radius;
    ControlInput {
        v: r * (wheels.right + wheels.left) / 2.0,
        omega: r * (wheels.right - wheels.left) / geom.track_width,
    }
}

/// Counts seen by a wheel encoder during one sampling period.
///
/// `residual` carries the fractional count left over from earlier samples,
/// so the running total never drifts from the true shaft angle by a full
/// count. Returns the whole counts and the new residual in `[0, 1)`.
pub fn encoder_measure(wheel_speed: f64, dt: f64, geom: &DriveGeometry, residual: f64) -> (i64, f64) {
    if wheel_speed == 0.0 {
        return (0, residual);
    }
    let accumulated = residual + wheel_speed * dt * geom.counts_per_radian();
    let counts = accumulated.floor();
    (counts as i64, accumulated - counts)
}

/// Mean of the queued per-sample speed estimates.
pub fn smoothed_estimate(queue: &VecDeque<f64>) -> Result<f64> {
    if queue.is_empty() {
        return Err(SimError::EmptyQueue);
    }
    Ok(queue.iter().sum::<f64>() / queue.len() as f64)
}

/// Fidelity of the drive model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fidelity {
    /// The commanded input is applied exactly.
    #[default]
    Ideal,
    /// Wheels are driven through the encoder-feedback duty controller.
    Actuated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ActuatorConfig {
    /// Duty increment per rad/s of wheel speed error, applied every sample.
    pub kp: f64,
    pub sample_period: f64,
}

impl Default for ActuatorConfig {
    fn default() -> Self {
        Self {
            kp: 3.0e-4,
            sample_period: ENCODER_PERIOD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WheelActuator {
    pub commanded: f64,
    pub queue: VecDeque<f64>,
    /// Duty fraction in [-1, 1].
    pub duty: f64,
    pub residual: f64,
}

impl WheelActuator {
    fn steady(speed: f64, geom: &DriveGeometry) -> Self {
        let duty = (speed / geom.max_wheel_speed()).clamp(-1.0, 1.0);
        let applied = duty * geom.max_wheel_speed();
        Self {
            commanded: speed,
            queue: std::iter::repeat_n(applied, SMOOTHING_WINDOW).collect(),
            duty,
            residual: 0.0,
        }
    }

    pub fn applied_speed(&self, geom: &DriveGeometry) -> f64 {
        self.duty * geom.max_wheel_speed()
    }

    fn step(&mut self, desired: f64, geom: &DriveGeometry, cfg: &ActuatorConfig, dt: f64) -> f64 {
        let true_speed = self.applied_speed(geom);
        let (counts, residual) = encoder_measure(true_speed, dt, geom, self.residual);
        self.residual = residual;
        let estimate = counts as f64 / geom.counts_per_radian() / dt;
        if self.queue.len() == SMOOTHING_WINDOW {
            self.queue.pop_front();
        }
        self.queue.push_back(estimate);
        let measured = self.queue.iter().sum::<f64>() / self.queue.len() as f64;
        self.commanded = desired;
        self.duty = (self.duty + cfg.kp * (desired - measured)).clamp(-1.0, 1.0);
        self.applied_speed(geom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActuatorState {
    pub right: WheelActuator,
    pub left: WheelActuator,
}

impl ActuatorState {
    pub fn at_rest(geom: &DriveGeometry) -> Self {
        Self::steady(ControlInput::default(), geom)
    }

    /// Settled state already producing `input`.
    pub fn steady(input: ControlInput, geom: &DriveGeometry) -> Self {
        let w = input_to_wheel_speeds(input, geom);
        Self {
            right: WheelActuator::steady(w.right, geom),
            left: WheelActuator::steady(w.left, geom),
        }
    }

    pub fn applied(&self, geom: &DriveGeometry) -> WheelSpeeds {
        WheelSpeeds {
            right: self.right.applied_speed(geom),
            left: self.left.applied_speed(geom),
        }
    }
}

/// One encoder-period update of both wheel controllers. Returns the wheel
/// speeds applied over the next period.
pub fn low_level_step(
    desired: ControlInput,
    act: &ActuatorState,
    geom: &DriveGeometry,
    cfg: &ActuatorConfig,
    dt: f64,
) -> Result<(WheelSpeeds, ActuatorState)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SimError::InvalidArgument(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let target = input_to_wheel_speeds(desired, geom);
    let mut next = act.clone();
    let right = next.right.step(target.right, geom, cfg, dt);
    let left = next.left.step(target.left, geom, cfg, dt);
    Ok((WheelSpeeds { right, left }, next))
}

/// Per-vehicle drive plant: either ideal or actuated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plant {
    pub fidelity: Fidelity,
    pub geometry: DriveGeometry,
    pub actuator_config: ActuatorConfig,
    pub actuator: ActuatorState,
}

impl Plant {
    pub fn new(fidelity: Fidelity, geometry: DriveGeometry, cfg: ActuatorConfig, initial: ControlInput) -> Self {
        Self {
            fidelity,
            actuator: ActuatorState::steady(initial, &geometry),
            geometry,
            actuator_config: cfg,
        }
    }

    /// Drives the vehicle for `dt` under `command`. Returns the new pose and
    /// the input actually applied, averaged over the interval.
    pub fn advance(&mut self, state: VehicleState, command: ControlInput, dt: f64) -> Result<(VehicleState, ControlInput)> {
        match self.fidelity {
            Fidelity::Ideal => Ok((unicycle_step(state, command, dt)?, command)),
            Fidelity::Actuated => {
                let substeps = (dt / self.actuator_config.sample_period).round().max(1.0) as usize;
                let h = dt / substeps as f64;
                let mut pose = state;
                let mut v_sum = 0.0;
                let mut w_sum = 0.0;
                for _ in 0..substeps {
                    let (wheels, act) =
                        low_level_step(command, &self.actuator, &self.geometry, &self.actuator_config, h)?;
                    self.actuator = act;
                    let applied = wheel_speeds_to_input(wheels, &self.geometry);
                    pose = unicycle_step(pose, applied, h)?;
                    v_sum += applied.v;
                    w_sum += applied.omega;
                }
                let n = substeps as f64;
                Ok((pose, ControlInput::new(v_sum / n, w_sum / n)))
            }
        }
    }
}
