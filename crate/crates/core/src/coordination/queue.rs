use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{MergeGeometry, RoadLabel, Subset};
use crate::error::{Result, SimError};

/// A vehicle's slot in the merge queue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueueEntry {
    pub vehicle: usize,
    /// 1-based queue position.
    pub position: usize,
    pub road: RoadLabel,
    /// Control-zone entry time.
    pub t0: f64,
    pub v0: f64,
    /// Assigned merging-zone entry time.
    pub t_m: f64,
    /// Merging-zone exit time.
    pub t_f: f64,
}

/// State a vehicle shares with the others while in the control zone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoSet {
    /// Distance travelled since control-zone entry.
    pub p: f64,
    pub v: f64,
    /// Relation to the queue predecessor; `None` for the queue head.
    pub subset: Option<Subset>,
    pub t_m: f64,
}

/// Subset of a newcomer on `road` with respect to the current queue tail.
/// `None` when there is no predecessor.
pub fn classify_predecessor(queue: &[QueueEntry], road: RoadLabel) -> Option<Subset> {
    queue.last().map(|prev| {
        if prev.road == road {
            Subset::SameLane
        } else {
            Subset::Conflicting
        }
    })
}

/// Merging-zone entry time for a vehicle entering the control zone at `t0`
/// with speed `v0`.
///
/// `predecessor` is the merge time and subset of the vehicle ahead in the
/// queue. The travel-time floors are offset from `t0`; with `v_min = 0` the
/// upper guard is unbounded.
pub fn compute_merge_time(
    predecessor: Option<(f64, Subset)>,
    t0: f64,
    v0: f64,
    geom: &MergeGeometry,
    v_ave: f64,
) -> Result<f64> {
    if !(v0 > 0.0 && v0.is_finite()) {
        return Err(SimError::InvalidArgument(format!("entry speed must be positive, got {v0}")));
    }
    if !(v_ave > 0.0 && v_ave.is_finite()) {
        return Err(SimError::InvalidArgument(format!("average speed must be positive, got {v_ave}")));
    }
    let l = geom.control_length;
    let cruise = t0 + l / v0;
    let earliest = t0 + l / geom.v_max;
    let Some((t_prev, subset)) = predecessor else {
        return Ok(match geom.first_travel_time {
            Some(travel) => (t0 + travel).max(earliest),
            None => cruise.max(earliest),
        });
    };
    let spacing = match subset {
        Subset::SameLane => geom.safe_distance(v_ave),
        Subset::Conflicting => geom.merge_length,
    };
    let latest = if geom.v_min > 0.0 { t0 + l / geom.v_min } else { f64::INFINITY };
    let behind = (t_prev + spacing / geom.v_merge).min(latest);
    Ok(behind.max(cruise).max(earliest))
}

/// Inserts `entry` keeping merge times non-decreasing. Earlier entries keep
/// their times; only positions after the insertion point shift. Returns the
/// 0-based index where the entry landed.
pub fn insert_into_queue(queue: &mut Vec<QueueEntry>, entry: QueueEntry) -> usize {
    let at = queue.partition_point(|e| e.t_m <= entry.t_m);
    queue.insert(at, entry);
    for (k, e) in queue.iter_mut().enumerate().skip(at) {
        e.position = k + 1;
    }
    at
}

/// Merging-zone occupancy `[t_m, t_f]`.
pub fn occupancy_interval(entry: &QueueEntry, geom: &MergeGeometry) -> (f64, f64) {
    (entry.t_m, entry.t_m + geom.merge_dwell())
}

/// A control-zone entry reported to the coordinator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arrival {
    pub vehicle: usize,
    pub road: RoadLabel,
    pub t0: f64,
    pub v0: f64,
    /// Average speed of vehicles in the control zone at `t0`.
    pub v_ave: f64,
}

/// Outcome of processing one arrival.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub entry: QueueEntry,
    pub subset: Option<Subset>,
    /// True when the entry was not appended at the tail.
    pub reordered: bool,
}

/// Passive bookkeeping for the merge queue. It hands out identities and
/// relays shared information but makes no control decision: merge times are
/// computed by [`compute_merge_time`] from the predecessor's shared state.
#[derive(Debug, Clone)]
pub struct Coordinator {
    geom: MergeGeometry,
    queue: Vec<QueueEntry>,
    shared: Vec<(usize, InfoSet)>,
    rng: ChaCha8Rng,
}

impl Coordinator {
    pub fn new(geom: MergeGeometry, seed: u64) -> Self {
        Self {
            geom,
            queue: Vec::new(),
            shared: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn geometry(&self) -> &MergeGeometry {
        &self.geom
    }

    pub fn queue(&self) -> &[QueueEntry] {
        &self.queue
    }

    pub fn entry(&self, vehicle: usize) -> Option<&QueueEntry> {
        self.queue.iter().find(|e| e.vehicle == vehicle)
    }

    /// Processes every arrival of one tick. Arrivals are ordered by entry
    /// time, then road label, then vehicle id; groups with identical entry
    /// times are shuffled with the seeded generator before assignment.
    pub fn arrive(&mut self, mut arrivals: Vec<Arrival>) -> Result<Vec<Assignment>> {
        arrivals.sort_by(|a, b| {
            a.t0.total_cmp(&b.t0)
                .then(a.road.cmp(&b.road))
                .then(a.vehicle.cmp(&b.vehicle))
        });
        let mut start = 0;
        while start < arrivals.len() {
            let mut end = start + 1;
            while end < arrivals.len() && arrivals[end].t0 == arrivals[start].t0 {
                end += 1;
            }
            if end - start > 1 {
                arrivals[start..end].shuffle(&mut self.rng);
            }
            start = end;
        }
        arrivals.into_iter().map(|a| self.assign(a)).collect()
    }

    fn assign(&mut self, arrival: Arrival) -> Result<Assignment> {
        let subset = classify_predecessor(&self.queue, arrival.road);
        let predecessor = self.queue.last().map(|prev| {
            let t_m = self.shared_info(prev.vehicle).map_or(prev.t_m, |info| info.t_m);
            (t_m, subset.expect("tail exists"))
        });
        let t_m = compute_merge_time(predecessor, arrival.t0, arrival.v0, &self.geom, arrival.v_ave)?;
        let entry = QueueEntry {
            vehicle: arrival.vehicle,
            position: 0,
            road: arrival.road,
            t0: arrival.t0,
            v0: arrival.v0,
            t_m,
            t_f: t_m + self.geom.merge_dwell(),
        };
        let at = insert_into_queue(&mut self.queue, entry);
        self.publish(
            arrival.vehicle,
            InfoSet {
                p: 0.0,
                v: arrival.v0,
                subset,
                t_m,
            },
        );
        Ok(Assignment {
            entry: self.queue[at],
            subset,
            reordered: at + 1 != self.queue.len(),
        })
    }

    /// Updates the information a vehicle shares.
    pub fn publish(&mut self, vehicle: usize, info: InfoSet) {
        match self.shared.iter_mut().find(|(v, _)| *v == vehicle) {
            Some(slot) => slot.1 = info,
            None => self.shared.push((vehicle, info)),
        }
    }

    pub fn shared_info(&self, vehicle: usize) -> Option<&InfoSet> {
        self.shared.iter().find(|(v, _)| *v == vehicle).map(|(_, info)| info)
    }

    /// Removes a vehicle that has left the merging zone.
    pub fn depart(&mut self, vehicle: usize) -> Option<QueueEntry> {
        let idx = self.queue.iter().position(|e| e.vehicle == vehicle)?;
        let gone = self.queue.remove(idx);
        for (k, e) in self.queue.iter_mut().enumerate() {
            e.position = k + 1;
        }
        self.shared.retain(|(v, _)| *v != vehicle);
        Some(gone)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn geom() -> MergeGeometry {
        MergeGeometry {
            control_length: 3.0,
            merge_length: 0.4,
            v_min: 0.1,
            v_max: 0.4,
            v_merge: 0.3,
            ..MergeGeometry::default()
        }
    }

    fn entry(vehicle: usize, road: RoadLabel, t_m: f64) -> QueueEntry {
        QueueEntry {
            vehicle,
            position: 0,
            road,
            t0: 0.0,
            v0: 0.3,
            t_m,
            t_f: t_m + 4.0 / 3.0,
        }
    }

    #[test]
    fn predecessor_subset() {
        assert_eq!(classify_predecessor(&[], 1), None);
        let q = [entry(0, 1, 10.0)];
        assert_eq!(classify_predecessor(&q, 1), Some(Subset::SameLane));
        assert_eq!(classify_predecessor(&q, 2), Some(Subset::Conflicting));
    }

    #[test]
    fn first_vehicle_cruises() {
        let t = compute_merge_time(None, 2.0, 0.3, &geom(), 0.3).unwrap();
        assert_abs_diff_eq!(t, 12.0, epsilon = 1e-12);
        let g = MergeGeometry { first_travel_time: Some(9.0), ..geom() };
        assert_abs_diff_eq!(compute_merge_time(None, 2.0, 0.3, &g, 0.3).unwrap(), 11.0, epsilon = 1e-12);
    }

    #[test]
    fn conflicting_backlog_dominates() {
        let g = geom();
        let t = compute_merge_time(Some((20.0, Subset::Conflicting)), 0.0, 0.3, &g, 0.3).unwrap();
        assert_abs_diff_eq!(t, 20.0 + 0.4 / 0.3, epsilon = 1e-12);
    }

    #[test]
    fn case_tree_arithmetic() {
        // t_prev + S / v_srz = 8 -> max{min{8, 30}, 10, 7.5} = 10.
        let g = geom();
        let t_prev = 8.0 - 0.4 / 0.3;
        let t = compute_merge_time(Some((t_prev, Subset::Conflicting)), 0.0, 0.3, &g, 0.3).unwrap();
        assert_abs_diff_eq!(t, 10.0, epsilon = 1e-12);
    }

    #[test]
    fn same_lane_uses_safety_distance() {
        let g = geom();
        let t = compute_merge_time(Some((20.0, Subset::SameLane)), 0.0, 0.3, &g, 0.2).unwrap();
        assert_abs_diff_eq!(t, 20.0 + g.safe_distance(0.2) / 0.3, epsilon = 1e-12);
    }

    #[test]
    fn slow_limit_caps_the_wait() {
        let g = geom();
        let t = compute_merge_time(Some((100.0, Subset::Conflicting)), 0.0, 0.3, &g, 0.3).unwrap();
        assert_abs_diff_eq!(t, 30.0, epsilon = 1e-12);
        let g0 = MergeGeometry { v_min: 0.0, ..g };
        let t = compute_merge_time(Some((100.0, Subset::Conflicting)), 0.0, 0.3, &g0, 0.3).unwrap();
        assert_abs_diff_eq!(t, 100.0 + 0.4 / 0.3, epsilon = 1e-12);
    }

    #[test]
    fn bad_speeds_are_errors() {
        assert!(compute_merge_time(None, 0.0, 0.0, &geom(), 0.3).is_err());
        assert!(compute_merge_time(None, 0.0, 0.3, &geom(), 0.0).is_err());
    }

    #[test]
    fn insertion_keeps_order() {
        let mut q = Vec::new();
        for (k, t) in [10.0, 11.0, 12.5].into_iter().enumerate() {
            assert_eq!(insert_into_queue(&mut q, entry(k, 1, t)), k);
        }
        let at = insert_into_queue(&mut q, entry(9, 2, 11.5));
        assert_eq!(at, 2);
        let times: Vec<f64> = q.iter().map(|e| e.t_m).collect();
        assert_eq!(times, vec![10.0, 11.0, 11.5, 12.5]);
        assert_eq!(q.iter().map(|e| e.position).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
    }

    #[test]
    fn occupancy() {
        let g = MergeGeometry { merge_length: 0.4, v_merge: 0.3, ..geom() };
        let (a, b) = occupancy_interval(&entry(0, 1, 10.0), &g);
        assert_eq!(a, 10.0);
        assert_abs_diff_eq!(b, 11.333_333_333_333, epsilon = 1e-9);
    }

    #[test]
    fn simultaneous_arrivals_are_shuffled_deterministically() {
        let arrivals: Vec<Arrival> = (0..6)
            .map(|k| Arrival { vehicle: k, road: 1 + (k % 2) as u8, t0: 1.0, v0: 0.3, v_ave: 0.3 })
            .collect();
        let order = |seed| {
            let mut c = Coordinator::new(geom(), seed);
            c.arrive(arrivals.clone()).unwrap().iter().map(|a| a.entry.vehicle).collect::<Vec<_>>()
        };
        assert_eq!(order(3), order(3));
        let distinct: std::collections::BTreeSet<_> = (0..20).map(order).collect();
        assert!(distinct.len() > 1, "seed never changes the order");
    }

    #[test]
    fn departures_renumber() {
        let mut c = Coordinator::new(geom(), 0);
        let arrivals = (0..3).map(|k| Arrival { vehicle: k, road: 1, t0: k as f64, v0: 0.3, v_ave: 0.3 }).collect();
        let out = c.arrive(arrivals).unwrap();
        assert!(out.iter().all(|a| !a.reordered));
        assert_eq!(c.queue()[2].position, 3);
        c.depart(0).unwrap();
        assert_eq!(c.queue()[0].vehicle, 1);
        assert_eq!(c.queue()[0].position, 1);
        assert!(c.shared_info(0).is_none());
        assert!(c.depart(0).is_none());
    }
}
