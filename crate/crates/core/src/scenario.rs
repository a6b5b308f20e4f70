//! Scenario files.
//!
//! Scenarios are TOML documents in SI units. A minimal file:
//!
//! ```toml
//! seed = 7
//! dt = 0.01
//! duration = 60.0
//! mode = "optimal"          # or "baseline"
//!
//! [merge]
//! control_length = 3.0
//! merge_length = 0.4
//! v_min = 0.05
//! v_max = 0.5
//! u_min = -0.3
//! u_max = 0.3
//! v_merge = 0.3
//! standstill_gap = 0.15
//! time_headway = 0.4
//!
//! [[routes]]
//! name = "main"
//! road = 1
//! merge_entry = 3.615       # arc length of the merging-zone entry
//! [[routes.segments]]
//! kind = "line"
//! origin = [-4.0, 0.0]
//! heading_deg = 0.0
//! length = 13.0
//! width = 0.2
//! p = 2.0
//!
//! [[vehicles]]
//! route = "main"
//! spawn_time = 0.0
//! spawn_s = 0.2
//! entry_speed = 0.3
//! ```
//!
//! Optional tables: `[tracking]` (`zeta`, `b`, `min_plan_speed`),
//! `[baseline]` (`clearance_time`, `brake_fraction`), `[actuator]` (`kp`,
//! `sample_period`) and `[drive]` (wheel and encoder geometry). Arc segments
//! take `center`, `radius`, `cw` (1 clockwise, -1 counter-clockwise),
//! `start_deg`, `end_deg`, `width` and `p`. Vehicles may set
//! `fidelity = "actuated"` and `saturation_multiplier`.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coordination::{MergeGeometry, RoadLabel, YieldConfig};
use crate::error::{Result, SimError};
use crate::geometry::Vec2;
use crate::road::{ArcSegment, LineSegment, Rotation, Route, Segment};
use crate::tracking::TrackingGains;
use crate::vehicle::{ActuatorConfig, DriveGeometry, Fidelity};

/// Road label of the main road; vehicles on any other road yield in the
/// baseline mode.
pub const MAIN_ROAD: RoadLabel = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlMode {
    Optimal,
    Baseline,
}

impl ControlMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ControlMode::Optimal => "optimal",
            ControlMode::Baseline => "baseline",
        }
    }
}

impl FromStr for ControlMode {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optimal" => Ok(ControlMode::Optimal),
            "baseline" => Ok(ControlMode::Baseline),
            other => Err(SimError::invalid(
                "mode",
                format!("unknown control mode `{other}` (expected optimal or baseline)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackingConfig {
    pub zeta: f64,
    pub b: f64,
    /// Lower clamp on plan-driven reference speeds.
    pub min_plan_speed: f64,
}

impl Default for TrackingConfig {
    fn default() -> Self {
        let g = TrackingGains::default();
        Self {
            zeta: g.zeta,
            b: g.b,
            min_plan_speed: 0.02,
        }
    }
}

impl TrackingConfig {
    pub fn gains(&self) -> TrackingGains {
        TrackingGains {
            zeta: self.zeta,
            b: self.b,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum SegmentSpec {
    Line {
        origin: [f64; 2],
        #[serde(default)]
        heading_deg: Option<f64>,
        #[serde(default)]
        direction: Option<[f64; 2]>,
        length: f64,
        width: f64,
        p: f64,
    },
    Arc {
        center: [f64; 2],
        radius: f64,
        cw: i64,
        start_deg: f64,
        end_deg: f64,
        width: f64,
        p: f64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RouteSpec {
    name: String,
    road: RoadLabel,
    merge_entry: f64,
    #[serde(default, rename = "loop")]
    looped: bool,
    segments: Vec<SegmentSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct VehicleSpec {
    route: String,
    spawn_time: f64,
    spawn_s: f64,
    entry_speed: f64,
    #[serde(default)]
    fidelity: Fidelity,
    #[serde(default)]
    saturation_multiplier: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    seed: u64,
    #[serde(default = "default_dt")]
    dt: f64,
    duration: f64,
    mode: ControlMode,
    merge: MergeGeometry,
    #[serde(default)]
    tracking: TrackingConfig,
    #[serde(default)]
    baseline: YieldConfig,
    #[serde(default)]
    actuator: ActuatorConfig,
    #[serde(default)]
    drive: DriveGeometry,
    routes: Vec<RouteSpec>,
    #[serde(default)]
    vehicles: Vec<VehicleSpec>,
}

fn default_dt() -> f64 {
    0.01
}

/// A road of the network with its merge landmarks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadSpec {
    pub name: String,
    pub label: RoadLabel,
    pub route: Route,
    /// Arc length of the merging-zone entry along `route`.
    pub merge_entry: f64,
    /// Arc length of the control-zone entry.
    pub control_start: f64,
}

impl RoadSpec {
    pub fn merge_exit(&self, geom: &MergeGeometry) -> f64 {
        self.merge_entry + geom.merge_length
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleConfig {
    pub id: usize,
    /// Index into [`Scenario::roads`].
    pub road: usize,
    pub spawn_time: f64,
    pub spawn_s: f64,
    pub entry_speed: f64,
    pub fidelity: Fidelity,
    pub drive: DriveGeometry,
}

/// A fully validated scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub seed: u64,
    pub dt: f64,
    pub duration: f64,
    pub mode: ControlMode,
    pub merge: MergeGeometry,
    pub tracking: TrackingConfig,
    pub baseline: YieldConfig,
    pub actuator: ActuatorConfig,
    pub roads: Vec<RoadSpec>,
    pub vehicles: Vec<VehicleConfig>,
}

/// Parses and validates scenario text.
pub fn load_scenario(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| SimError::Parse(e.to_string()))?;
    Scenario::from_file(file)
}

impl Scenario {
    pub fn load(path: impl AsRef<Path>) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)?;
        load_scenario(&text)
    }

    /// Same scenario under a different control mode.
    pub fn with_mode(mut self, mode: ControlMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn road_by_label(&self, label: RoadLabel) -> Option<&RoadSpec> {
        self.roads.iter().find(|r| r.label == label)
    }

    fn from_file(file: ScenarioFile) -> Result<Scenario> {
        if !(file.dt > 0.0 && file.dt.is_finite()) {
            return Err(SimError::invalid("dt", format!("must be positive, got {}", file.dt)));
        }
        if !(file.duration > 0.0 && file.duration.is_finite()) {
            return Err(SimError::invalid("duration", "must be positive"));
        }
        file.merge.validate()?;
        let tracking = file.tracking;
        tracking.gains().validate()?;
        if !(tracking.min_plan_speed >= 0.0) {
            return Err(SimError::invalid("tracking.min_plan_speed", "must be non-negative"));
        }
        if !(file.baseline.clearance_time >= 0.0) {
            return Err(SimError::invalid("baseline.clearance_time", "must be non-negative"));
        }
        if !(file.baseline.brake_fraction > 0.0 && file.baseline.brake_fraction <= 1.0) {
            return Err(SimError::invalid("baseline.brake_fraction", "must lie in (0, 1]"));
        }
        if !(file.actuator.kp > 0.0 && file.actuator.sample_period > 0.0) {
            return Err(SimError::invalid("actuator", "kp and sample_period must be positive"));
        }
        file.drive.validate()?;

        if file.routes.is_empty() {
            return Err(SimError::invalid("routes", "at least one route is required"));
        }
        let mut roads: Vec<RoadSpec> = Vec::with_capacity(file.routes.len());
        for (k, spec) in file.routes.iter().enumerate() {
            let field = format!("routes[{k}]");
            if roads.iter().any(|r| r.name == spec.name) {
                return Err(SimError::invalid(&field, format!("duplicate route name `{}`", spec.name)));
            }
            if roads.iter().any(|r| r.label == spec.road) {
                return Err(SimError::invalid(&field, format!("duplicate road label {}", spec.road)));
            }
            let segments = spec
                .segments
                .iter()
                .enumerate()
                .map(|(j, s)| build_segment(s).map_err(|e| SimError::invalid(format!("{field}.segments[{j}]"), e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            let route = Route::new(segments, spec.looped).map_err(|e| SimError::invalid(&field, e.to_string()))?;
            let control_start = spec.merge_entry - file.merge.control_length;
            if control_start < 0.0 {
                return Err(SimError::invalid(
                    format!("{field}.merge_entry"),
                    "route is shorter than the control zone upstream of the merge",
                ));
            }
            if spec.merge_entry + file.merge.merge_length > route.length() {
                return Err(SimError::invalid(
                    format!("{field}.merge_entry"),
                    "merging zone extends past the end of the route",
                ));
            }
            roads.push(RoadSpec {
                name: spec.name.clone(),
                label: spec.road,
                route,
                merge_entry: spec.merge_entry,
                control_start,
            });
        }

        let mut vehicles = Vec::with_capacity(file.vehicles.len());
        for (id, spec) in file.vehicles.iter().enumerate() {
            let field = format!("vehicles[{id}]");
            let road = roads
                .iter()
                .position(|r| r.name == spec.route)
                .ok_or_else(|| SimError::invalid(format!("{field}.route"), format!("unknown route `{}`", spec.route)))?;
            if !(spec.spawn_time >= 0.0 && spec.spawn_time.is_finite()) {
                return Err(SimError::invalid(format!("{field}.spawn_time"), "must be non-negative"));
            }
            let r = &roads[road];
            if !(spec.spawn_s >= 0.0 && spec.spawn_s < r.control_start) {
                return Err(SimError::invalid(
                    format!("{field}.spawn_s"),
                    format!("must lie in [0, {:.4}) upstream of the control zone", r.control_start),
                ));
            }
            if !(spec.entry_speed > 0.0 && spec.entry_speed <= file.merge.v_max) {
                return Err(SimError::invalid(
                    format!("{field}.entry_speed"),
                    format!("must lie in (0, v_max = {}]", file.merge.v_max),
                ));
            }
            let mut drive = file.drive;
            if let Some(m) = spec.saturation_multiplier {
                drive.saturation_multiplier = m;
                drive.validate().map_err(|e| SimError::invalid(&field, e.to_string()))?;
            }
            if spec.fidelity == Fidelity::Actuated && spec.entry_speed > drive.saturation_speed() {
                return Err(SimError::invalid(
                    format!("{field}.entry_speed"),
                    "exceeds the drive saturation speed",
                ));
            }
            vehicles.push(VehicleConfig {
                id,
                road,
                spawn_time: spec.spawn_time,
                spawn_s: spec.spawn_s,
                entry_speed: spec.entry_speed,
                fidelity: spec.fidelity,
                drive,
            });
        }
        check_spawn_spacing(&vehicles, &file.merge)?;

        Ok(Scenario {
            seed: file.seed,
            dt: file.dt,
            duration: file.duration,
            mode: file.mode,
            merge: file.merge,
            tracking,
            baseline: file.baseline,
            actuator: file.actuator,
            roads,
            vehicles,
        })
    }
}

fn build_segment(spec: &SegmentSpec) -> Result<Segment> {
    match *spec {
        SegmentSpec::Line {
            origin,
            heading_deg,
            direction,
            length,
            width,
            p,
        } => {
            let direction = match (heading_deg, direction) {
                (Some(h), None) => Vec2::from_angle(h.to_radians()),
                (None, Some([x, y])) => Vec2::new(x, y),
                _ => {
                    return Err(SimError::Geometry(
                        "line needs exactly one of heading_deg or direction".into(),
                    ))
                }
            };
            Ok(Segment::Line(LineSegment::new(
                Vec2::new(origin[0], origin[1]),
                direction,
                length,
                width,
                p,
            )?))
        }
        SegmentSpec::Arc {
            center,
            radius,
            cw,
            start_deg,
            end_deg,
            width,
            p,
        } => {
            let rotation = Rotation::from_cw(cw)
                .ok_or_else(|| SimError::Geometry(format!("cw must be 1 or -1, got {cw}")))?;
            let arc = ArcSegment {
                center: Vec2::new(center[0], center[1]),
                radius,
                rotation,
                start_angle: start_deg.to_radians(),
                end_angle: end_deg.to_radians(),
                width,
                p,
            };
            arc.validate()?;
            Ok(Segment::Arc(arc))
        }
    }
}

/// Spawn times must be non-decreasing per road, and each vehicle must appear
/// at least the standstill gap behind its predecessor, assuming the
/// predecessor has cruised at its entry speed since spawning.
fn check_spawn_spacing(vehicles: &[VehicleConfig], geom: &MergeGeometry) -> Result<()> {
    let mut last: Vec<Option<&VehicleConfig>> = Vec::new();
    for v in vehicles {
        if last.len() <= v.road {
            last.resize(v.road + 1, None);
        }
        if let Some(prev) = last[v.road] {
            let field = format!("vehicles[{}].spawn_time", v.id);
            if v.spawn_time < prev.spawn_time {
                return Err(SimError::invalid(field, "spawn times must be non-decreasing per route"));
            }
            let lead = prev.spawn_s + prev.entry_speed * (v.spawn_time - prev.spawn_time);
            if lead - v.spawn_s < geom.standstill_gap {
                return Err(SimError::invalid(
                    field,
                    format!(
                        "spawns {:.4} m behind vehicle {}, closer than the standstill gap",
                        lead - v.spawn_s,
                        prev.id
                    ),
                ));
            }
        }
        last[v.road] = Some(v);
    }
    Ok(())
}
