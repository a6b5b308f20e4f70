//! Fixed-step world loop.
//!
//! Each tick runs the same phases in order: spawn, control-zone arrivals,
//! merging-zone boundaries, reference advance, tracking control, plant
//! update and recording. Boundary crossing times are interpolated linearly
//! inside the tick.

use crate::coordination::{
    baseline_yield_policy, rate_limit, validate_plan, Arrival, Coordinator, InfoSet, MainRoadVehicle, MergePlan,
    Subset, YieldInputs, Zone,
};
use crate::error::{Result, SimError};
use crate::road::Route;
use crate::scenario::{ControlMode, Scenario, VehicleConfig, MAIN_ROAD};
use crate::tracking::{tracking_control, virtual_robot_step, ReferenceState};
use crate::trace::{Event, EventKind, Trace, TraceMeta, TraceRecord};
use crate::vehicle::{ControlInput, Plant, VehicleState};

/// Vehicles are removed this far before the end of a non-looping route.
pub const DESPAWN_MARGIN: f64 = 0.15;

/// Arc length of `point` along `route`, measured on segment `index`.
fn arc_length(route: &Route, index: usize, point: crate::Vec2) -> f64 {
    let seg = &route.segments()[index];
    let (s, _) = seg.project(point);
    route.segment_start(index) + s.clamp(0.0, seg.length())
}

/// Fraction of the way through the tick at which `s` passed `mark`.
fn crossing(prev: f64, now: f64, mark: f64) -> Option<f64> {
    (prev < mark && now >= mark).then(|| if now > prev { (mark - prev) / (now - prev) } else { 1.0 })
}

#[derive(Debug, Clone)]
struct Agent {
    cfg: VehicleConfig,
    pose: VehicleState,
    index: usize,
    s: f64,
    s_prev: f64,
    reference: ReferenceState,
    ref_index: usize,
    ref_s: f64,
    plant: Plant,
    applied: ControlInput,
    plan: Option<MergePlan>,
    subset: Option<Subset>,
    control_entry: Option<f64>,
    merge_entry: Option<f64>,
    merge_exit: Option<f64>,
    despawned: bool,
}

/// Read-only view of a live vehicle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleView {
    pub id: usize,
    pub pose: VehicleState,
    pub reference: ReferenceState,
    pub route_s: f64,
    pub plan: Option<MergePlan>,
}

pub struct Engine {
    scenario: Scenario,
    coordinator: Coordinator,
    agents: Vec<Agent>,
    next_spawn: usize,
    tick: u64,
    trace: Trace,
}

impl Engine {
    pub fn new(scenario: &Scenario) -> Self {
        let mut order: Vec<VehicleConfig> = scenario.vehicles.clone();
        order.sort_by(|a, b| a.spawn_time.total_cmp(&b.spawn_time).then(a.id.cmp(&b.id)));
        let scenario = Scenario {
            vehicles: order,
            ..scenario.clone()
        };
        Self {
            coordinator: Coordinator::new(scenario.merge, scenario.seed),
            trace: Trace::new(TraceMeta::from_scenario(&scenario)),
            agents: Vec::new(),
            next_spawn: 0,
            tick: 0,
            scenario,
        }
    }

    pub fn time(&self) -> f64 {
        self.tick as f64 * self.scenario.dt
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn into_trace(self) -> Trace {
        self.trace
    }

    pub fn coordinator(&self) -> &Coordinator {
        &self.coordinator
    }

    pub fn vehicles(&self) -> impl Iterator<Item = VehicleView> + '_ {
        self.agents.iter().filter(|a| !a.despawned).map(|a| VehicleView {
            id: a.cfg.id,
            pose: a.pose,
            reference: a.reference,
            route_s: a.s,
            plan: a.plan,
        })
    }

    /// True once every vehicle has spawned and has left the merging zone or
    /// the road.
    pub fn finished(&self) -> bool {
        self.next_spawn == self.scenario.vehicles.len()
            && self.agents.iter().all(|a| a.despawned || a.merge_exit.is_some())
    }

    /// Runs one tick.
    pub fn step(&mut self) -> Result<()> {
        let t = self.time();
        self.spawn(t)?;
        self.arrivals(t)?;
        self.merge_boundaries(t);
        let speeds = self.reference_speeds(t);
        self.advance(t, &speeds)?;
        self.tick += 1;
        Ok(())
    }

    fn log(&mut self, time: f64, vehicle: usize, kind: EventKind) {
        self.trace.events.push(Event {
            tick: self.tick,
            time,
            vehicle: Some(vehicle),
            kind,
        });
    }

    fn spawn(&mut self, t: f64) -> Result<()> {
        let eps = 1e-9 * self.scenario.dt;
        while let Some(cfg) = self.scenario.vehicles.get(self.next_spawn) {
            if cfg.spawn_time > t + eps {
                break;
            }
            let cfg = cfg.clone();
            let route = &self.scenario.roads[cfg.road].route;
            let (reference, ref_index) = ReferenceState::on_route(route, cfg.spawn_s, cfg.entry_speed)?;
            let initial = ControlInput::new(cfg.entry_speed, 0.0);
            let plant = Plant::new(cfg.fidelity, cfg.drive, self.scenario.actuator, initial);
            let id = cfg.id;
            self.agents.push(Agent {
                pose: reference.pose(),
                index: ref_index,
                s: cfg.spawn_s,
                s_prev: cfg.spawn_s,
                reference,
                ref_index,
                ref_s: cfg.spawn_s,
                plant,
                applied: initial,
                plan: None,
                subset: None,
                control_entry: None,
                merge_entry: None,
                merge_exit: None,
                despawned: false,
                cfg,
            });
            self.next_spawn += 1;
            self.log(t, id, EventKind::Spawn);
        }
        Ok(())
    }

    fn arrivals(&mut self, t: f64) -> Result<()> {
        let dt = self.scenario.dt;
        let roads = &self.scenario.roads;
        let mut crossers = Vec::new();
        for (k, a) in self.agents.iter().enumerate() {
            if a.despawned || a.control_entry.is_some() {
                continue;
            }
            if let Some(f) = crossing(a.s_prev, a.s, roads[a.cfg.road].control_start) {
                crossers.push((k, t - dt + f * dt));
            }
        }
        if crossers.is_empty() {
            return Ok(());
        }
        for &(k, t0) in &crossers {
            self.agents[k].control_entry = Some(t0);
        }
        let geom = self.scenario.merge;
        let in_zone: Vec<f64> = self
            .agents
            .iter()
            .filter(|a| !a.despawned && Zone::classify(a.s - roads[a.cfg.road].merge_entry, &geom) == Zone::Control)
            .map(|a| a.applied.v)
            .collect();
        let v_ave = if in_zone.is_empty() {
            crossers.iter().map(|&(k, _)| self.agents[k].applied.v).sum::<f64>() / crossers.len() as f64
        } else {
            in_zone.iter().sum::<f64>() / in_zone.len() as f64
        };
        let mut arrivals = Vec::with_capacity(crossers.len());
        for &(k, t0) in &crossers {
            let a = &self.agents[k];
            let arrival = Arrival {
                vehicle: a.cfg.id,
                road: roads[a.cfg.road].label,
                t0,
                v0: a.applied.v,
                v_ave,
            };
            arrivals.push((k, arrival));
        }
        for &(_, arr) in &arrivals {
            self.log(
                arr.t0,
                arr.vehicle,
                EventKind::ControlEntry {
                    t0: arr.t0,
                    v0: arr.v0,
                    v_ave: arr.v_ave,
                },
            );
        }
        if self.scenario.mode != ControlMode::Optimal {
            return Ok(());
        }
        let assignments = self.coordinator.arrive(arrivals.iter().map(|&(_, a)| a).collect())?;
        for asg in assignments {
            let e = asg.entry;
            let plan = MergePlan::for_zone(e.t0, e.t_m, e.v0, &geom)?;
            let violations = validate_plan(&plan, &geom);
            if !violations.is_empty() {
                return Err(SimError::InfeasiblePlan {
                    vehicle: e.vehicle,
                    violations,
                });
            }
            let k = arrivals.iter().find(|(_, a)| a.vehicle == e.vehicle).map(|&(k, _)| k).expect("assigned vehicle arrived");
            self.agents[k].plan = Some(plan);
            self.agents[k].subset = asg.subset;
            self.log(
                t,
                e.vehicle,
                EventKind::MergeTimeAssigned {
                    position: e.position,
                    t_m: e.t_m,
                    t_f: e.t_f,
                    subset: asg.subset,
                },
            );
            if asg.reordered {
                self.log(t, e.vehicle, EventKind::QueueReorder { position: e.position });
            }
        }
        Ok(())
    }

    fn merge_boundaries(&mut self, t: f64) {
        let dt = self.scenario.dt;
        let geom = self.scenario.merge;
        let mut events = Vec::new();
        for a in self.agents.iter_mut().filter(|a| !a.despawned) {
            let road = &self.scenario.roads[a.cfg.road];
            if a.merge_entry.is_none() {
                if let Some(f) = crossing(a.s_prev, a.s, road.merge_entry) {
                    let te = t - dt + f * dt;
                    a.merge_entry = Some(te);
                    events.push((te, a.cfg.id, EventKind::MergeEntry));
                }
            }
            if a.merge_entry.is_some() && a.merge_exit.is_none() {
                if let Some(f) = crossing(a.s_prev, a.s, road.merge_exit(&geom)) {
                    let tx = t - dt + f * dt;
                    a.merge_exit = Some(tx);
                    events.push((tx, a.cfg.id, EventKind::MergeExit));
                }
            }
        }
        for (time, id, kind) in events {
            if kind == EventKind::MergeExit && self.scenario.mode == ControlMode::Optimal {
                self.coordinator.depart(id);
            }
            self.log(time, id, kind);
        }
        if self.scenario.mode == ControlMode::Optimal {
            for a in self.agents.iter().filter(|a| !a.despawned && a.merge_exit.is_none()) {
                if let Some(plan) = a.plan {
                    let road = &self.scenario.roads[a.cfg.road];
                    self.coordinator.publish(
                        a.cfg.id,
                        InfoSet {
                            p: a.s - road.control_start,
                            v: a.applied.v,
                            subset: a.subset,
                            t_m: plan.t_m,
                        },
                    );
                }
            }
        }
    }

    /// Reference speed of every agent over the coming tick.
    fn reference_speeds(&self, t: f64) -> Vec<f64> {
        match self.scenario.mode {
            ControlMode::Optimal => self.optimal_speeds(t),
            ControlMode::Baseline => self.baseline_speeds(),
        }
    }

    fn optimal_speeds(&self, t: f64) -> Vec<f64> {
        let dt = self.scenario.dt;
        let geom = &self.scenario.merge;
        let t_next = t + dt;
        self.agents
            .iter()
            .map(|a| {
                let Some(plan) = a.plan else {
                    return a.cfg.entry_speed;
                };
                let start = self.scenario.roads[a.cfg.road].control_start;
                let target = if t_next <= plan.t_m {
                    start + plan.at_local(t_next - plan.t0).p
                } else {
                    start + geom.control_length + geom.v_merge * (t_next - plan.t_m)
                };
                ((target - a.ref_s) / dt).max(self.scenario.tracking.min_plan_speed)
            })
            .collect()
    }

    fn baseline_speeds(&self) -> Vec<f64> {
        let geom = &self.scenario.merge;
        let dt = self.scenario.dt;
        let roads = &self.scenario.roads;
        // Reference positions relative to each road's merging-zone entry.
        let offsets: Vec<f64> = self.agents.iter().map(|a| a.ref_s - roads[a.cfg.road].merge_entry).collect();
        let main: Vec<MainRoadVehicle> = self
            .agents
            .iter()
            .zip(&offsets)
            .filter(|(a, _)| !a.despawned && roads[a.cfg.road].label == MAIN_ROAD)
            .map(|(a, &c)| MainRoadVehicle {
                distance_to_zone: -c,
                speed: a.reference.v,
                in_zone: c >= 0.0 && c < geom.merge_length,
            })
            .collect();
        self.agents
            .iter()
            .enumerate()
            .map(|(k, a)| {
                if a.despawned {
                    return 0.0;
                }
                let c = offsets[k];
                let same_road = |j: usize| self.agents[j].cfg.road == a.cfg.road;
                // Vehicles on other roads lead only once they are on the shared stretch.
                let leader_gap = (0..self.agents.len())
                    .filter(|&j| j != k && !self.agents[j].despawned)
                    .filter(|&j| same_road(j) || offsets[j] >= 0.0)
                    .map(|j| offsets[j] - c)
                    .filter(|&gap| gap > 0.0)
                    .min_by(f64::total_cmp);
                let must_yield = roads[a.cfg.road].label != MAIN_ROAD;
                let inputs = YieldInputs {
                    must_yield,
                    cruise_speed: a.cfg.entry_speed,
                    current_speed: a.reference.v,
                    distance_to_stop_line: (c < 0.0).then_some(-c),
                    leader_gap,
                    main_road: &main,
                };
                let target = baseline_yield_policy(&inputs, geom, &self.scenario.baseline);
                rate_limit(a.reference.v, target, geom, dt)
            })
            .collect()
    }

    fn advance(&mut self, t: f64, speeds: &[f64]) -> Result<()> {
        let dt = self.scenario.dt;
        let geom = self.scenario.merge;
        let gains = self.scenario.tracking.gains();
        let mut despawns = Vec::new();
        for (a, &speed) in self.agents.iter_mut().zip(speeds) {
            if a.despawned {
                continue;
            }
            let road = &self.scenario.roads[a.cfg.road];
            let route = &road.route;
            let (next_ref, next_ref_index) = virtual_robot_step(&a.reference, route, a.ref_index, speed, dt)?;
            let target = ReferenceState {
                v: next_ref.v,
                omega: next_ref.omega,
                ..a.reference
            };
            let command = tracking_control(&a.pose, &target, &gains);
            if !command.is_finite() {
                return Err(SimError::NonFinite("tracking command"));
            }
            let (pose, applied) = a.plant.advance(a.pose, command, dt)?;
            self.trace.records.push(TraceRecord {
                tick: self.tick,
                time: t,
                vehicle: a.cfg.id,
                road: road.label,
                x: a.pose.x,
                y: a.pose.y,
                theta: a.pose.theta,
                v_cmd: command.v,
                omega_cmd: command.omega,
                v_applied: applied.v,
                route_s: a.s,
                zone: Zone::classify(a.s - road.merge_entry, &geom),
            });
            a.pose = pose;
            a.applied = applied;
            a.reference = next_ref;
            a.ref_index = next_ref_index;
            a.ref_s = arc_length(route, a.ref_index, a.reference.position());
            a.s_prev = a.s;
            match route.track_index(pose.position(), a.index) {
                Some(index) => {
                    a.index = index;
                    a.s = arc_length(route, index, pose.position());
                }
                None => a.despawned = true,
            }
            if !route.is_loop() && a.s >= route.length() - DESPAWN_MARGIN {
                a.despawned = true;
            }
            if a.despawned {
                despawns.push(a.cfg.id);
            }
        }
        for id in despawns {
            self.trace.events.push(Event {
                tick: self.tick + 1,
                time: t + dt,
                vehicle: Some(id),
                kind: EventKind::Despawn,
            });
        }
        Ok(())
    }
}

/// Runs `scenario` until every vehicle has cleared the merging zone or the
/// duration elapses.
pub fn run(scenario: &Scenario) -> Result<Trace> {
    let mut engine = Engine::new(scenario);
    while !engine.finished() && engine.time() <= scenario.duration {
        engine.step()?;
    }
    Ok(engine.into_trace())
}
