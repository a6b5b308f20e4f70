#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cavsim::coordination::{
    eval_plan, solve_unconstrained, Arrival, Coordinator, MergeGeometry, MergePlan,
};
use cavsim::metrics::MetricsReport;
use cavsim::road::{arc_field, line_field, ArcSegment, LineSegment, Rotation};
use cavsim::scenario::ControlMode;
use cavsim::vehicle::Fidelity;
use cavsim::{
    detect_collisions, export_trace, load_scenario, run, travel_metrics, Engine, Format, SafetyEvent, Scenario,
    Vec2,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

const REFERENCE: &str = include_str!("../../../scenarios/merge_5x5.toml");

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn reference() -> Scenario {
    load_scenario(REFERENCE).expect("reference scenario loads")
}

/// Random plan inputs with a window of 2 to 30 s.
fn random_plan(rng: &mut ChaCha8Rng) -> MergePlan {
    let t0 = rng.gen_range(0.0..500.0);
    let t_m = t0 + rng.gen_range(2.0..30.0);
    let v0 = rng.gen_range(0.05..1.0);
    let l = rng.gen_range(0.5..10.0);
    let v_srz = rng.gen_range(0.05..1.0);
    solve_unconstrained(t0, t_m, v0, l, v_srz).expect("non-singular window")
}

fn boundary_conditions() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let plan = random_plan(&mut rng);
        let s0 = eval_plan(&plan, plan.t0).unwrap();
        let s1 = eval_plan(&plan, plan.t_m).unwrap();
        for err in [s0.p, s1.p - plan.distance, s0.v - plan.v0, s1.v - plan.v_final] {
            worst = worst.max(err.abs());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-9 && elapsed < Duration::from_secs(1),
        format!("max boundary error {worst:.2e}, {elapsed:.2?}"),
    )
}

/// Composite Simpson rule with `n` (even) intervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + k as f64 * h);
    }
    sum * h / 3.0
}

/// Second derivative of a perturbation vanishing with its slope at both ends.
fn perturbation_accel(family: usize, k: f64, t: f64, tau: f64) -> f64 {
    match family {
        // eta = sin^2(w tau) sin(k w tau), w = pi / T
        0 => {
            let w = PI / t;
            let (s, c) = (w * tau).sin_cos();
            let (sk, ck) = (k * w * tau).sin_cos();
            let s2 = s * s;
            let ds2 = 2.0 * w * s * c;
            let dds2 = 2.0 * w * w * (c * c - s * s);
            dds2 * sk + 2.0 * ds2 * k * w * ck - s2 * k * k * w * w * sk
        }
        // eta = tau^2 (T - tau)^2 / T^4
        _ => (2.0 * t * t - 12.0 * t * tau + 12.0 * tau * tau) / t.powi(4),
    }
}

fn optimality() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = 0;
    let mut min_gap = f64::INFINITY;
    let mut cost_err: f64 = 0.0;
    const N: usize = 2000;
    for _ in 0..100 {
        let plan = random_plan(&mut rng);
        let t = plan.duration();
        let u = |tau: f64| plan.a * tau + plan.b;
        let base = 0.5 * simpson(|tau| u(tau).powi(2), 0.0, t, N);
        cost_err = cost_err.max((base - plan.cost()).abs() / plan.cost().max(1e-12));
        for _ in 0..100 {
            let family = rng.gen_range(0..2);
            let k = rng.gen_range(1..6) as f64;
            let eps = 10f64.powf(rng.gen_range(-3.0..-1.0)) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let perturbed =
                0.5 * simpson(|tau| (u(tau) + eps * perturbation_accel(family, k, t, tau)).powi(2), 0.0, t, N);
            let gap = perturbed - base;
            // The cross term integrates to zero for the optimum.
            let expected = 0.5 * eps * eps * simpson(|tau| perturbation_accel(family, k, t, tau).powi(2), 0.0, t, N);
            min_gap = min_gap.min(gap);
            // Roundoff in the two quadratures scales with the base cost.
            if !(gap > 0.0) || (gap - expected).abs() > 1e-6 * expected + 1e-12 * base {
                failures += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && cost_err < 1e-9 && elapsed < Duration::from_secs(10),
        format!(
            "{failures} of 10000 perturbations fail to raise the cost by the second-order term, min cost increase {min_gap:.3e}, \
             closed-form cost error {cost_err:.1e}, {elapsed:.2?}"
        ),
    )
}

fn fifo_lateral() -> Outcome {
    let start = Instant::now();
    let geom = MergeGeometry::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bad_order = 0;
    let mut bad_lateral = 0;
    let mut worst_overlap: f64 = f64::NEG_INFINITY;
    for stream in 0..1000u64 {
        let mut arrivals = Vec::new();
        let mut id = 0;
        for road in [1u8, 2] {
            let rate = rng.gen_range(0.15..0.45);
            let exp = Exp::new(rate).unwrap();
            let mut t = 0.0;
            for _ in 0..rng.gen_range(5..25) {
                t += exp.sample(&mut rng);
                arrivals.push(Arrival {
                    vehicle: id,
                    road,
                    t0: t,
                    v0: rng.gen_range(0.25..0.35),
                    v_ave: rng.gen_range(0.25..0.35),
                });
                id += 1;
            }
        }
        arrivals.sort_by(|a, b| a.t0.total_cmp(&b.t0));
        let mut coord = Coordinator::new(geom, stream);
        for a in arrivals {
            coord.arrive(vec![a]).unwrap();
        }
        let q = coord.queue();
        if q.windows(2).any(|w| w[1].t_m < w[0].t_m) {
            bad_order += 1;
        }
        let mut stream_bad = false;
        for (i, a) in q.iter().enumerate() {
            for b in &q[i + 1..] {
                if a.road != b.road {
                    let overlap = a.t_f.min(b.t_f) - a.t_m.max(b.t_m);
                    worst_overlap = worst_overlap.max(overlap);
                    if overlap > 1e-9 {
                        stream_bad = true;
                    }
                }
            }
        }
        bad_lateral += stream_bad as usize;
    }
    let elapsed = start.elapsed();
    outcome(
        bad_order == 0 && bad_lateral == 0 && elapsed < Duration::from_secs(5),
        format!(
            "{bad_order} unordered queues, {bad_lateral} streams with overlapping conflicting occupancy \
             (largest overlap {worst_overlap:.2e} s), {elapsed:.2?}"
        ),
    )
}

struct Paired {
    optimal: MetricsReport,
    baseline: MetricsReport,
    optimal_safety: Vec<SafetyEvent>,
    elapsed: Duration,
}

fn paired_runs() -> Paired {
    let start = Instant::now();
    let s = reference();
    let opt_trace = run(&s.clone().with_mode(ControlMode::Optimal)).expect("optimal run");
    let base_trace = run(&s.clone().with_mode(ControlMode::Baseline)).expect("baseline run");
    Paired {
        optimal: travel_metrics(&opt_trace).expect("optimal metrics"),
        baseline: travel_metrics(&base_trace).expect("baseline metrics"),
        optimal_safety: detect_collisions(&opt_trace, &s.merge),
        elapsed: start.elapsed(),
    }
}

fn scenario_reproduction(p: &Paired) -> Outcome {
    let (o, b) = (&p.optimal, &p.baseline);
    let savings = 100.0 * (b.makespan - o.makespan) / b.makespan;
    let pass = o.vehicle_count == 10
        && b.vehicle_count == 10
        && o.total_stops == 0
        && p.optimal_safety.is_empty()
        && b.secondary_stops >= 1
        && b.max_secondary_queue >= 2
        && o.makespan < b.makespan
        && (10.0..=30.0).contains(&savings)
        && p.elapsed < Duration::from_secs(30);
    outcome(
        pass,
        format!(
            "optimal {:.2} s with {} stops and {} safety events; baseline {:.2} s with {} secondary stops \
             and a queue of {}; savings {savings:.1}%; {:.2?}",
            o.makespan,
            o.total_stops,
            p.optimal_safety.len(),
            b.makespan,
            b.secondary_stops,
            b.max_secondary_queue,
            p.elapsed
        ),
    )
}

fn energy_direction(p: &Paired) -> Outcome {
    let (o, b) = (&p.optimal, &p.baseline);
    outcome(
        o.total_effort < b.total_effort && o.total_traction < b.total_traction,
        format!(
            "effort {:.4} vs {:.4}, traction {:.4} vs {:.4} (optimal vs baseline)",
            o.total_effort, b.total_effort, o.total_traction, b.total_traction
        ),
    )
}

/// Worst per-vehicle RMS distance between vehicle and reference, ignoring
/// the first `transient` seconds after each spawn, and the top reference speed.
fn tracking_rms(s: &Scenario, transient: f64) -> (f64, f64) {
    let mut engine = Engine::new(s);
    let mut acc: Vec<(f64, usize)> = vec![(0.0, 0); s.vehicles.len()];
    let mut top_speed: f64 = 0.0;
    while !engine.finished() && engine.time() <= s.duration {
        engine.step().expect("step");
        let t = engine.time();
        for v in engine.vehicles() {
            top_speed = top_speed.max(v.reference.v);
            let spawn = s.vehicles.iter().find(|c| c.id == v.id).unwrap().spawn_time;
            if t - spawn >= transient {
                let e = v.pose.position().distance(v.reference.position());
                acc[v.id].0 += e * e;
                acc[v.id].1 += 1;
            }
        }
    }
    let worst = acc
        .iter()
        .filter(|(_, n)| *n > 0)
        .map(|(sq, n)| (sq / *n as f64).sqrt())
        .fold(0.0, f64::max);
    (worst, top_speed)
}

fn tracking_fidelity() -> Outcome {
    let ideal = reference();
    let mut actuated = ideal.clone();
    for v in &mut actuated.vehicles {
        v.fidelity = Fidelity::Actuated;
    }
    let (ideal_rms, ideal_top) = tracking_rms(&ideal, 3.0);
    let (act_rms, act_top) = tracking_rms(&actuated, 3.0);
    let gains_ok = ideal.tracking.zeta == 0.8 && ideal.tracking.b == 70.0;
    outcome(
        gains_ok && ideal_rms < 5e-3 && act_rms < 15e-3 && ideal_top <= 0.4 && act_top <= 0.4,
        format!(
            "worst RMS ideal {:.3} mm, actuated {:.3} mm; top reference speed {:.3} m/s",
            ideal_rms * 1e3,
            act_rms * 1e3,
            ideal_top.max(act_top)
        ),
    )
}

/// Grid check of a field: `lateral(q)` is the signed offset from the
/// centerline, `normal(q)` the unit direction of increasing offset and
/// `tangent(q)` the unit direction of travel.
fn check_field(
    samples: impl Iterator<Item = Vec2>,
    field: impl Fn(Vec2) -> Vec2,
    lateral: impl Fn(Vec2) -> f64,
    normal: impl Fn(Vec2) -> Vec2,
    tangent: impl Fn(Vec2) -> Vec2,
) -> usize {
    let mut bad = 0;
    for q in samples {
        let f = field(q);
        let off = lateral(q);
        let toward = f.dot(normal(q));
        let forward = f.dot(tangent(q));
        let ok = if off.abs() < 1e-12 {
            toward.abs() <= 1e-9 * f.norm() && forward > 0.0
        } else {
            toward * off < 0.0 && forward > 0.0
        };
        bad += !ok as usize;
    }
    bad
}

fn field_correctness() -> Outcome {
    const N: usize = 50;
    let grid = |k: usize| k as f64 / (N - 1) as f64;
    let mut bad = 0;
    let mut checked = 0;
    for p in [0.2, 2.0] {
        let dir = Vec2::new(0.6, -0.8);
        let line = LineSegment::new(Vec2::new(1.0, 2.0), dir, 3.0, 0.2, p).unwrap();
        let n = Vec2::new(-dir.y, dir.x);
        let pts: Vec<Vec2> = (0..N)
            .flat_map(|i| (0..N).map(move |j| (i, j)))
            .map(|(i, j)| line.origin + dir * (3.0 * grid(i)) + n * (-0.1 + 0.2 * grid(j)))
            .collect();
        let centre: Vec<Vec2> = (0..N).map(|i| line.origin + dir * (3.0 * grid(i))).collect();
        for set in [&pts, &centre] {
            checked += set.len();
            bad += check_field(
                set.iter().copied(),
                |q| line_field(q, &line).unwrap(),
                |q| (q - line.origin).dot(n),
                |_| n,
                |_| dir,
            );
        }
        for rotation in [Rotation::Clockwise, Rotation::CounterClockwise] {
            let sign = match rotation {
                Rotation::Clockwise => -1.0,
                Rotation::CounterClockwise => 1.0,
            };
            let arc = ArcSegment {
                center: Vec2::new(-1.0, 0.5),
                radius: 0.5,
                rotation,
                start_angle: 0.3,
                end_angle: 0.3 + sign * 2.0,
                width: 0.2,
                p,
            };
            let c = arc.center;
            let polar = |rho: f64, phi: f64| c + Vec2::new(rho * phi.cos(), rho * phi.sin());
            let pts: Vec<Vec2> = (0..N)
                .flat_map(|i| (0..N).map(move |j| (i, j)))
                .map(|(i, j)| polar(0.4 + 0.2 * grid(j), 0.3 + sign * 2.0 * grid(i)))
                .collect();
            let centre: Vec<Vec2> = (0..N).map(|i| polar(0.5, 0.3 + sign * 2.0 * grid(i))).collect();
            for set in [&pts, &centre] {
                checked += set.len();
                bad += check_field(
                    set.iter().copied(),
                    |q| arc_field(q, &arc).unwrap(),
                    |q| (q - c).norm() - 0.5,
                    |q| {
                        let r = q - c;
                        r * (1.0 / r.norm())
                    },
                    |q| {
                        let r = q - c;
                        Vec2::new(-r.y, r.x) * (sign / r.norm())
                    },
                );
            }
        }
    }
    outcome(bad == 0, format!("{bad} of {checked} samples violate tangency or convergence"))
}

fn determinism() -> Outcome {
    let base = reference();
    let mut actuated = base.clone();
    for v in &mut actuated.vehicles {
        v.fidelity = Fidelity::Actuated;
    }
    let cases = [
        ("optimal", base.clone()),
        ("baseline", base.with_mode(ControlMode::Baseline)),
        ("actuated", actuated),
    ];
    let mut mismatches = Vec::new();
    for (name, s) in cases {
        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        for d in &dirs {
            export_trace(&run(&s).unwrap(), Format::Csv, d.path()).unwrap();
        }
        for file in ["trace.csv", "events.csv"] {
            let a = std::fs::read(dirs[0].path().join(file)).unwrap();
            let b = std::fs::read(dirs[1].path().join(file)).unwrap();
            if a != b {
                mismatches.push(format!("{name}/{file}"));
            }
        }
    }
    outcome(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "repeated runs give byte-identical exports".to_string()
        } else {
            format!("differing exports: {}", mismatches.join(", "))
        },
    )
}

fn rear_end_audit(p: &Paired) -> Outcome {
    let rear: Vec<_> = p
        .optimal_safety
        .iter()
        .filter(|e| matches!(e, SafetyEvent::RearEnd(_)))
        .collect();
    outcome(rear.is_empty(), format!("{} rear-end violations in the optimal run", rear.len()))
}

fn main() -> ExitCode {
    let paired = paired_runs();
    let results = [
        ("1 boundary conditions", boundary_conditions()),
        ("2 optimality", optimality()),
        ("3 fifo and lateral safety", fifo_lateral()),
        ("4 scenario reproduction", scenario_reproduction(&paired)),
        ("5 energy proxy direction", energy_direction(&paired)),
        ("6 tracking fidelity", tracking_fidelity()),
        ("7 field correctness", field_correctness()),
        ("8 determinism", determinism()),
        ("9 rear-end audit", rear_end_audit(&paired)),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += !o.pass as usize;
    }
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
