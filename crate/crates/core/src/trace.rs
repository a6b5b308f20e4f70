//! In-memory record of a run: one row per active vehicle per tick plus the
//! coordination event log.

use serde::{Deserialize, Serialize};

use crate::coordination::{MergeGeometry, RoadLabel, Subset, Zone};
use crate::scenario::{ControlMode, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub tick: u64,
    pub time: f64,
    pub vehicle: usize,
    pub road: RoadLabel,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub v_cmd: f64,
    pub omega_cmd: f64,
    /// Forward speed actually applied over `[time, time + dt)`.
    pub v_applied: f64,
    /// Arc length along the vehicle's route.
    pub route_s: f64,
    pub zone: Zone,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EventKind {
    Spawn,
    ControlEntry {
        t0: f64,
        v0: f64,
        v_ave: f64,
    },
    MergeTimeAssigned {
        position: usize,
        t_m: f64,
        t_f: f64,
        subset: Option<Subset>,
    },
    /// The newcomer was inserted ahead of the queue tail.
    QueueReorder {
        position: usize,
    },
    MergeEntry,
    MergeExit,
    Despawn,
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::Spawn => "spawn",
            EventKind::ControlEntry { .. } => "control_entry",
            EventKind::MergeTimeAssigned { .. } => "merge_time_assigned",
            EventKind::QueueReorder { .. } => "queue_reorder",
            EventKind::MergeEntry => "merge_entry",
            EventKind::MergeExit => "merge_exit",
            EventKind::Despawn => "despawn",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    /// Tick during which the event was detected.
    pub tick: u64,
    /// Event time; boundary crossings are interpolated inside the tick.
    pub time: f64,
    pub vehicle: Option<usize>,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadMeta {
    pub label: RoadLabel,
    pub name: String,
    pub control_start: f64,
    pub merge_entry: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub mode: ControlMode,
    pub dt: f64,
    pub seed: u64,
    pub merge: MergeGeometry,
    pub roads: Vec<RoadMeta>,
}

impl TraceMeta {
    pub fn from_scenario(s: &Scenario) -> Self {
        Self {
            mode: s.mode,
            dt: s.dt,
            seed: s.seed,
            merge: s.merge,
            roads: s
                .roads
                .iter()
                .map(|r| RoadMeta {
                    label: r.label,
                    name: r.name.clone(),
                    control_start: r.control_start,
                    merge_entry: r.merge_entry,
                })
                .collect(),
        }
    }

    pub fn road(&self, label: RoadLabel) -> Option<&RoadMeta> {
        self.roads.iter().find(|r| r.label == label)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub meta: TraceMeta,
    /// Sorted by tick, then by vehicle id.
    pub records: Vec<TraceRecord>,
    pub events: Vec<Event>,
}

impl Trace {
    pub fn new(meta: TraceMeta) -> Self {
        Self {
            meta,
            records: Vec::new(),
            events: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Vehicle ids in order of first appearance.
    pub fn vehicles(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = Vec::new();
        for r in &self.records {
            if !ids.contains(&r.vehicle) {
                ids.push(r.vehicle);
            }
        }
        ids
    }

    pub fn records_for(&self, vehicle: usize) -> impl Iterator<Item = &TraceRecord> {
        self.records.iter().filter(move |r| r.vehicle == vehicle)
    }

    /// Time of the first event of `name` for `vehicle`.
    pub fn event_time(&self, vehicle: usize, name: &str) -> Option<f64> {
        self.events
            .iter()
            .find(|e| e.vehicle == Some(vehicle) && e.kind.name() == name)
            .map(|e| e.time)
    }

    /// Records grouped by tick.
    pub fn ticks(&self) -> Vec<&[TraceRecord]> {
        self.records.chunk_by(|a, b| a.tick == b.tick).collect()
    }
}
