use serde::{Deserialize, Serialize};

use super::{MergeGeometry, RoadLabel, Zone};

/// One vehicle at one tick, in control-zone coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaneSample {
    pub vehicle: usize,
    pub road: RoadLabel,
    /// Distance past the control-zone entry of the vehicle's road.
    pub p: f64,
    pub v: f64,
    pub zone: Zone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickSnapshot {
    pub tick: u64,
    pub time: f64,
    pub vehicles: Vec<LaneSample>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RearEndViolation {
    pub tick: u64,
    pub time: f64,
    pub follower: usize,
    pub leader: usize,
    pub gap: f64,
    pub required: f64,
}

impl RearEndViolation {
    pub fn deficit(&self) -> f64 {
        self.required - self.gap
    }
}

/// Audits the same-road rear-end constraint for every follower inside the
/// control zone. The required distance uses the mean speed of all vehicles
/// in the control zone at that tick.
pub fn rear_end_check(ticks: &[TickSnapshot], geom: &MergeGeometry) -> Vec<RearEndViolation> {
    let mut out = Vec::new();
    for snap in ticks {
        let in_zone: Vec<&LaneSample> = snap.vehicles.iter().filter(|s| s.zone == Zone::Control).collect();
        if in_zone.is_empty() {
            continue;
        }
        let v_ave = in_zone.iter().map(|s| s.v).sum::<f64>() / in_zone.len() as f64;
        let required = geom.safe_distance(v_ave);
        for follower in &in_zone {
            let leader = snap
                .vehicles
                .iter()
                .filter(|s| s.road == follower.road && s.vehicle != follower.vehicle && s.p >= follower.p)
                .min_by(|a, b| a.p.total_cmp(&b.p));
            if let Some(leader) = leader {
                let gap = leader.p - follower.p;
                if gap < required {
                    out.push(RearEndViolation {
                        tick: snap.tick,
                        time: snap.time,
                        follower: follower.vehicle,
                        leader: leader.vehicle,
                        gap,
                        required,
                    });
                }
            }
        }
    }
    out
}
