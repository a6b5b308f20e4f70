//! Post-hoc safety audits of a finished trace.

use serde::{Deserialize, Serialize};

use crate::coordination::{rear_end_check, LaneSample, MergeGeometry, RearEndViolation, TickSnapshot};
use crate::trace::{EventKind, Trace};

/// Vehicle footprint radius: half the 13 cm platform length.
pub const VEHICLE_RADIUS: f64 = 0.065;

/// Tolerated overlap of merging-zone occupancy between conflicting vehicles.
/// Crossing times are interpolated from a sampled trajectory, so exact
/// back-to-back occupancy can show a sub-tick overlap.
pub const LATERAL_SLACK: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SafetyEvent {
    RearEnd(RearEndViolation),
    /// Vehicles from different roads inside the merging zone together.
    Lateral {
        first: usize,
        second: usize,
        overlap: f64,
    },
    /// Footprints intersect; reported once per contiguous episode.
    Contact {
        tick: u64,
        time: f64,
        first: usize,
        second: usize,
        distance: f64,
    },
}

/// Rear-end, lateral and footprint audits.
pub fn detect_collisions(trace: &Trace, geom: &MergeGeometry) -> Vec<SafetyEvent> {
    let mut out: Vec<SafetyEvent> = rear_end_check(&snapshots(trace), geom)
        .into_iter()
        .map(SafetyEvent::RearEnd)
        .collect();
    out.extend(lateral_overlaps(trace));
    out.extend(contacts(trace));
    out
}

/// Per-tick samples in control-zone coordinates.
pub fn snapshots(trace: &Trace) -> Vec<TickSnapshot> {
    trace
        .ticks()
        .into_iter()
        .map(|rows| TickSnapshot {
            tick: rows[0].tick,
            time: rows[0].time,
            vehicles: rows
                .iter()
                .map(|r| LaneSample {
                    vehicle: r.vehicle,
                    road: r.road,
                    p: r.route_s - trace.meta.road(r.road).map_or(0.0, |m| m.control_start),
                    v: r.v_applied,
                    zone: r.zone,
                })
                .collect(),
        })
        .collect()
}

/// Merging-zone occupancy intervals from the event log. Vehicles still
/// inside at the end of the trace occupy the zone until its last tick.
pub fn occupancy(trace: &Trace) -> Vec<(usize, u8, f64, f64)> {
    let end = trace.records.last().map_or(0.0, |r| r.time);
    let road_of = |v: usize| trace.records_for(v).next().map(|r| r.road);
    let mut out = Vec::new();
    for e in &trace.events {
        if let (EventKind::MergeEntry, Some(v)) = (e.kind, e.vehicle) {
            let exit = trace.event_time(v, "merge_exit").unwrap_or(end);
            if let Some(road) = road_of(v) {
                out.push((v, road, e.time, exit));
            }
        }
    }
    out
}

fn lateral_overlaps(trace: &Trace) -> Vec<SafetyEvent> {
    let occ = occupancy(trace);
    let mut out = Vec::new();
    for (i, a) in occ.iter().enumerate() {
        for b in &occ[i + 1..] {
            if a.1 == b.1 {
                continue;
            }
            let overlap = a.3.min(b.3) - a.2.max(b.2);
            if overlap > LATERAL_SLACK {
                out.push(SafetyEvent::Lateral {
                    first: a.0,
                    second: b.0,
                    overlap,
                });
            }
        }
    }
    out
}

fn contacts(trace: &Trace) -> Vec<SafetyEvent> {
    let mut out = Vec::new();
    let mut touching: Vec<(usize, usize)> = Vec::new();
    for rows in trace.ticks() {
        let mut now = Vec::new();
        for (i, a) in rows.iter().enumerate() {
            for b in &rows[i + 1..] {
                let distance = (a.x - b.x).hypot(a.y - b.y);
                if distance < 2.0 * VEHICLE_RADIUS {
                    let pair = (a.vehicle.min(b.vehicle), a.vehicle.max(b.vehicle));
                    if !touching.contains(&pair) {
                        out.push(SafetyEvent::Contact {
                            tick: a.tick,
                            time: a.time,
                            first: pair.0,
                            second: pair.1,
                            distance,
                        });
                    }
                    now.push(pair);
                }
            }
        }
        touching = now;
    }
    out
}
