//! Travel-time, stop and energy-proxy metrics computed from a trace.
//!
//! No battery model is simulated. `effort` (∫u² dt) and `traction`
//! (∫max(0, u·v) dt) are control-effort proxies for energy use; `u` is
//! reconstructed from consecutive applied speeds.

use serde::{Deserialize, Serialize};

use crate::audit::detect_collisions;
use crate::coordination::{MergeGeometry, RoadLabel};
use crate::error::{Result, SimError};
use crate::scenario::{ControlMode, MAIN_ROAD};
use crate::trace::{Trace, TraceRecord};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StopCriteria {
    /// Speeds below this count as stopped [m/s].
    pub speed: f64,
    /// Minimum length of a stop [s].
    pub min_duration: f64,
}

impl Default for StopCriteria {
    fn default() -> Self {
        Self {
            speed: 0.005,
            min_duration: 0.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleMetrics {
    pub vehicle: usize,
    pub road: RoadLabel,
    pub control_entry: f64,
    pub merge_entry: f64,
    pub merge_exit: f64,
    /// Time from control-zone entry to merging-zone entry.
    pub control_time: f64,
    /// Time spent inside the merging zone.
    pub zone_dwell: f64,
    pub stops: usize,
    /// Effort proxy ∫u² dt [m²/s³].
    pub effort: f64,
    /// Traction proxy ∫max(0, u·v) dt [m²/s²].
    pub traction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub mode: ControlMode,
    pub seed: u64,
    pub vehicle_count: usize,
    /// First control-zone entry to last merging-zone exit [s].
    pub makespan: f64,
    pub first_control_entry: f64,
    pub last_merge_exit: f64,
    pub total_stops: usize,
    pub secondary_stops: usize,
    /// Largest number of secondary-road vehicles stopped at the same tick.
    pub max_secondary_queue: usize,
    pub total_effort: f64,
    pub total_traction: f64,
    pub safety_events: usize,
    pub energy_note: String,
    pub merge: MergeGeometry,
    pub vehicles: Vec<VehicleMetrics>,
}

/// Intervals of at least `min_duration` with `|v| < speed`.
pub fn stop_intervals(rows: &[TraceRecord], criteria: &StopCriteria) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    let mut last = 0.0;
    for r in rows {
        if r.v_applied.abs() < criteria.speed {
            start.get_or_insert(r.time);
            last = r.time;
        } else if let Some(s) = start.take() {
            // The slow interval lasts until this sample.
            if r.time - s >= criteria.min_duration {
                out.push((s, r.time));
            }
        }
    }
    if let Some(s) = start {
        if last - s >= criteria.min_duration {
            out.push((s, last));
        }
    }
    out
}

/// `(∫u² dt, ∫max(0, u·v) dt)` over one vehicle's rows.
///
/// `u` on each sample interval is the speed difference quotient, placed at
/// the interval midpoint together with the mean speed; both integrands are
/// then integrated with the trapezoidal rule across midpoints.
pub fn effort_metrics(rows: &[TraceRecord]) -> (f64, f64) {
    let mids: Vec<(f64, f64, f64)> = rows
        .windows(2)
        .filter(|w| w[1].time > w[0].time)
        .map(|w| {
            let h = w[1].time - w[0].time;
            let u = (w[1].v_applied - w[0].v_applied) / h;
            (0.5 * (w[0].time + w[1].time), u, 0.5 * (w[0].v_applied + w[1].v_applied))
        })
        .collect();
    let mut effort = 0.0;
    let mut traction = 0.0;
    for w in mids.windows(2) {
        let h = w[1].0 - w[0].0;
        effort += 0.5 * h * (w[0].1 * w[0].1 + w[1].1 * w[1].1);
        traction += 0.5 * h * ((w[0].1 * w[0].2).max(0.0) + (w[1].1 * w[1].2).max(0.0));
    }
    (effort, traction)
}

pub fn travel_metrics(trace: &Trace) -> Result<MetricsReport> {
    travel_metrics_with(trace, &StopCriteria::default())
}

pub fn travel_metrics_with(trace: &Trace, criteria: &StopCriteria) -> Result<MetricsReport> {
    let mut vehicles = Vec::new();
    for id in trace.vehicles() {
        let rows: Vec<TraceRecord> = trace.records_for(id).copied().collect();
        let need = |name: &str| {
            trace
                .event_time(id, name)
                .ok_or_else(|| SimError::MissingEvents(format!("{name} for vehicle {id}")))
        };
        let control_entry = need("control_entry")?;
        let merge_entry = need("merge_entry")?;
        let merge_exit = need("merge_exit")?;
        let (effort, traction) = effort_metrics(&rows);
        vehicles.push(VehicleMetrics {
            vehicle: id,
            road: rows[0].road,
            control_entry,
            merge_entry,
            merge_exit,
            control_time: merge_entry - control_entry,
            zone_dwell: merge_exit - merge_entry,
            stops: stop_intervals(&rows, criteria).len(),
            effort,
            traction,
        });
    }
    let first_control_entry = vehicles.iter().map(|v| v.control_entry).fold(f64::INFINITY, f64::min);
    let last_merge_exit = vehicles.iter().map(|v| v.merge_exit).fold(f64::NEG_INFINITY, f64::max);
    let makespan = if vehicles.is_empty() { 0.0 } else { last_merge_exit - first_control_entry };
    let max_secondary_queue = trace
        .ticks()
        .iter()
        .map(|rows| {
            rows.iter()
                .filter(|r| r.road != MAIN_ROAD && r.v_applied.abs() < criteria.speed)
                .count()
        })
        .max()
        .unwrap_or(0);
    Ok(MetricsReport {
        mode: trace.meta.mode,
        seed: trace.meta.seed,
        vehicle_count: vehicles.len(),
        makespan,
        first_control_entry: if vehicles.is_empty() { 0.0 } else { first_control_entry },
        last_merge_exit: if vehicles.is_empty() { 0.0 } else { last_merge_exit },
        total_stops: vehicles.iter().map(|v| v.stops).sum(),
        secondary_stops: vehicles.iter().filter(|v| v.road != MAIN_ROAD).map(|v| v.stops).sum(),
        max_secondary_queue,
        total_effort: vehicles.iter().map(|v| v.effort).sum(),
        total_traction: vehicles.iter().map(|v| v.traction).sum(),
        safety_events: detect_collisions(trace, &trace.meta.merge).len(),
        energy_note: "effort and traction are control-effort proxies; no battery model is simulated".into(),
        merge: trace.meta.merge,
        vehicles,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub makespan: f64,
    pub baseline_makespan: f64,
    /// Percent savings relative to the baseline; absent when the baseline
    /// value is zero.
    pub makespan_savings_pct: Option<f64>,
    pub effort_savings_pct: Option<f64>,
    pub traction_savings_pct: Option<f64>,
}

/// `(baseline − value) / baseline` in percent, `None` for a zero baseline.
pub fn savings_pct(value: f64, baseline: f64) -> Option<f64> {
    (baseline != 0.0).then(|| 100.0 * (baseline - value) / baseline)
}

/// Savings of `report` relative to `baseline`. Both must come from the same
/// geometry and vehicle set.
pub fn compare(report: &MetricsReport, baseline: &MetricsReport) -> Result<Comparison> {
    if report.merge != baseline.merge {
        return Err(SimError::Mismatch("merge geometry differs".into()));
    }
    let ids = |r: &MetricsReport| {
        let mut v: Vec<(usize, RoadLabel)> = r.vehicles.iter().map(|m| (m.vehicle, m.road)).collect();
        v.sort_unstable();
        v
    };
    if ids(report) != ids(baseline) {
        return Err(SimError::Mismatch("vehicle sets differ".into()));
    }
    Ok(Comparison {
        makespan: report.makespan,
        baseline_makespan: baseline.makespan,
        makespan_savings_pct: savings_pct(report.makespan, baseline.makespan),
        effort_savings_pct: savings_pct(report.total_effort, baseline.total_effort),
        traction_savings_pct: savings_pct(report.total_traction, baseline.total_traction),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coordination::Zone;

    fn row(tick: u64, dt: f64, v: f64) -> TraceRecord {
        TraceRecord {
            tick,
            time: tick as f64 * dt,
            vehicle: 0,
            road: 1,
            x: 0.0,
            y: 0.0,
            theta: 0.0,
            v_cmd: v,
            omega_cmd: 0.0,
            v_applied: v,
            route_s: 0.0,
            zone: Zone::Outside,
        }
    }

    #[test]
    fn constant_speed_has_zero_effort() {
        let rows: Vec<_> = (0..100).map(|k| row(k, 0.01, 0.3)).collect();
        assert_eq!(effort_metrics(&rows), (0.0, 0.0));
    }

    #[test]
    fn linear_ramp_effort() {
        // v = 0.1 t over 10 s: ∫u² = 0.1, ∫u v = 0.5.
        let dt = 0.01;
        let rows: Vec<_> = (0..=1000).map(|k| row(k, dt, 0.1 * k as f64 * dt)).collect();
        let (e, t) = effort_metrics(&rows);
        assert!((e - 0.1).abs() < 1e-3, "{e}");
        assert!((t - 0.5).abs() < 5e-3, "{t}");
    }

    #[test]
    fn stop_detection_thresholds() {
        let dt = 0.01;
        let speeds = |stop_len: u64| -> Vec<TraceRecord> {
            (0..200)
                .map(|k| row(k, dt, if (50..50 + stop_len).contains(&k) { 0.0 } else { 0.3 }))
                .collect()
        };
        assert_eq!(stop_intervals(&speeds(30), &StopCriteria::default()).len(), 1);
        assert_eq!(stop_intervals(&speeds(10), &StopCriteria::default()).len(), 0);
    }

    #[test]
    fn savings_arithmetic() {
        let s = savings_pct(16.5, 20.3).unwrap();
        assert_eq!(format!("{s:.1}"), "18.7");
        assert_eq!(savings_pct(3.0, 3.0), Some(0.0));
        assert_eq!(savings_pct(1.0, 0.0), None);
    }
}
