//! Lane geometry: straight and circular segments carrying analytic guidance
//! fields, chained into routes through half-plane transitions.
//!
//! A segment's field points along its centerline and pulls nearby points back
//! onto it. Field magnitudes are left unnormalized; callers that need a unit
//! heading normalize the returned vector themselves.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::geometry::{wrap_angle, Vec2};

/// Slack applied to region boundaries so that points produced by rounding at
/// a junction are still accepted by the segment that owns them.
const REGION_EPS: f64 = 1e-9;

/// Junction continuity tolerances.
const JUNCTION_POS_TOL: f64 = 1e-6;
const JUNCTION_ANGLE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineSegment {
    pub origin: Vec2,
    /// Unit vector along the direction of travel.
    pub direction: Vec2,
    pub length: f64,
    pub width: f64,
    /// Convergence gain of the field.
    pub p: f64,
}

/// Rotational sense of an arc. `Clockwise` corresponds to `cw = 1` in the
/// field equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rotation {
    Clockwise,
    CounterClockwise,
}

impl Rotation {
    pub fn cw(self) -> f64 {
        match self {
            Rotation::Clockwise => 1.0,
            Rotation::CounterClockwise => -1.0,
        }
    }

    /// Sign of the polar-angle rate while travelling along the arc.
    fn angle_sign(self) -> f64 {
        -self.cw()
    }

    pub fn from_cw(cw: i64) -> Option<Self> {
        match cw {
            1 => Some(Rotation::Clockwise),
            -1 => Some(Rotation::CounterClockwise),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcSegment {
    pub center: Vec2,
    pub radius: f64,
    pub rotation: Rotation,
    /// Polar angle (about `center`) where travel along the arc begins.
    pub start_angle: f64,
    /// Polar angle where it ends. Travel runs from start to end in the
    /// direction given by `rotation`.
    pub end_angle: f64,
    pub width: f64,
    pub p: f64,
}

impl LineSegment {
    pub fn new(origin: Vec2, direction: Vec2, length: f64, width: f64, p: f64) -> Result<Self> {
        let seg = Self {
            origin,
            direction,
            length,
            width,
            p,
        };
        seg.validate()?;
        Ok(seg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.origin.is_finite() && self.direction.is_finite()) {
            return Err(SimError::NonFinite("line segment"));
        }
        if (self.direction.dot(self.direction) - 1.0).abs() > 1e-9 {
            return Err(SimError::Geometry(format!(
                "line direction ({}, {}) is not a unit vector",
                self.direction.x, self.direction.y
            )));
        }
        check_positive("line length", self.length)?;
        check_positive("line width", self.width)?;
        check_positive("line field gain p", self.p)
    }

    /// Raw field evaluation without the region check.
    pub fn field_at(&self, point: Vec2) -> Vec2 {
        let (xo, yo) = (self.origin.x, self.origin.y);
        let (dx, dy) = (self.direction.x, self.direction.y);
        let (x, y) = (point.x, point.y);
        let along = (xo - x) * dx + (yo - y) * dy;
        Vec2::new(
            dx + self.p * (xo - x - along * dx),
            dy + self.p * (yo - y - along * dy),
        )
    }

    /// (arc-length offset, signed lateral offset; left of travel positive).
    pub fn project(&self, point: Vec2) -> (f64, f64) {
        let rel = point - self.origin;
        (rel.dot(self.direction), rel.dot(self.direction.perp()))
    }

    pub fn contains(&self, point: Vec2) -> bool {
        let (s, lat) = self.project(point);
        s >= -REGION_EPS
            && s <= self.length + REGION_EPS
            && lat.abs() <= 0.5 * self.width + REGION_EPS
    }

    pub fn end_point(&self) -> Vec2 {
        self.origin + self.direction * self.length
    }
}

impl ArcSegment {
    pub fn validate(&self) -> Result<()> {
        if !(self.center.is_finite() && self.start_angle.is_finite() && self.end_angle.is_finite())
        {
            return Err(SimError::NonFinite("arc segment"));
        }
        check_positive("arc radius", self.radius)?;
        check_positive("arc width", self.width)?;
        check_positive("arc field gain p", self.p)?;
        let span = self.span();
        if !(span > 0.0 && span <= 2.0 * PI + 1e-12) {
            return Err(SimError::Geometry(format!(
                "arc angular span {span} is outside (0, 2pi] for the given rotation"
            )));
        }
        if self.width >= 2.0 * self.radius {
            return Err(SimError::Geometry(
                "arc width must be smaller than its diameter".into(),
            ));
        }
        Ok(())
    }

    /// Angular span travelled, in radians.
    pub fn span(&self) -> f64 {
        (self.end_angle - self.start_angle) * self.rotation.angle_sign()
    }

    pub fn length(&self) -> f64 {
        self.radius * self.span()
    }

    /// Raw field evaluation without the region check.
    pub fn field_at(&self, point: Vec2) -> Vec2 {
        let (xc, yc, r) = (self.center.x, self.center.y, self.radius);
        let cw = self.rotation.cw();
        let (dx, dy) = (point.x - xc, point.y - yc);
        let shell = dx * dx + dy * dy - r * r;
        Vec2::new(
            r * dy * cw - 4.0 * self.p * dx * shell,
            -r * dx * cw - 4.0 * self.p * dy * shell,
        )
    }

    /// Angle travelled from the start to the polar angle of `point`, mapped
    /// into a window centred on the arc so slightly-outside points give
    /// slightly negative or slightly over-span values.
    fn angular_offset(&self, point: Vec2) -> f64 {
        let sign = self.rotation.angle_sign();
        let span = self.span();
        let mid = self.start_angle + sign * 0.5 * span;
        let phi = (point - self.center).angle();
        wrap_angle(phi - mid) * sign + 0.5 * span
    }

    /// (arc-length offset, signed lateral offset; left of travel positive).
    pub fn project(&self, point: Vec2) -> (f64, f64) {
        let rho = (point - self.center).norm();
        let offset = self.radius * self.angular_offset(point);
        // Travelling counter-clockwise the center is on the left.
        let lat = match self.rotation {
            Rotation::CounterClockwise => self.radius - rho,
            Rotation::Clockwise => rho - self.radius,
        };
        (offset, lat)
    }

    pub fn contains(&self, point: Vec2) -> bool {
        let rho = (point - self.center).norm();
        if (rho - self.radius).abs() > 0.5 * self.width + REGION_EPS {
            return false;
        }
        let delta = self.angular_offset(point);
        let eps = REGION_EPS / self.radius;
        delta >= -eps && delta <= self.span() + eps
    }

    fn point_at_angle(&self, phi: f64) -> Vec2 {
        self.center + Vec2::from_angle(phi) * self.radius
    }

    fn tangent_at_angle(&self, phi: f64) -> Vec2 {
        let radial = Vec2::from_angle(phi);
        match self.rotation {
            Rotation::CounterClockwise => radial.perp(),
            Rotation::Clockwise => -radial.perp(),
        }
    }
}

/// One piece of a route.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Segment {
    Line(LineSegment),
    Arc(ArcSegment),
}

impl Segment {
    pub fn validate(&self) -> Result<()> {
        match self {
            Segment::Line(l) => l.validate(),
            Segment::Arc(a) => a.validate(),
        }
    }

    pub fn length(&self) -> f64 {
        match self {
            Segment::Line(l) => l.length,
            Segment::Arc(a) => a.length(),
        }
    }

    pub fn width(&self) -> f64 {
        match self {
            Segment::Line(l) => l.width,
            Segment::Arc(a) => a.width,
        }
    }

    pub fn contains(&self, point: Vec2) -> bool {
        match self {
            Segment::Line(l) => l.contains(point),
            Segment::Arc(a) => a.contains(point),
        }
    }

    pub fn field_at(&self, point: Vec2) -> Vec2 {
        match self {
            Segment::Line(l) => l.field_at(point),
            Segment::Arc(a) => a.field_at(point),
        }
    }

    pub fn project(&self, point: Vec2) -> (f64, f64) {
        match self {
            Segment::Line(l) => l.project(point),
            Segment::Arc(a) => a.project(point),
        }
    }

    /// Distance from `point` to the centerline (ignores segment ends).
    pub fn centerline_distance(&self, point: Vec2) -> f64 {
        self.project(point).1.abs()
    }

    /// Centerline point and unit tangent at arc-length offset `s`.
    pub fn pose_at(&self, s: f64) -> (Vec2, Vec2) {
        match self {
            Segment::Line(l) => (l.origin + l.direction * s, l.direction),
            Segment::Arc(a) => {
                let phi = a.start_angle + a.rotation.angle_sign() * s / a.radius;
                (a.point_at_angle(phi), a.tangent_at_angle(phi))
            }
        }
    }

    pub fn start(&self) -> (Vec2, Vec2) {
        self.pose_at(0.0)
    }

    pub fn end(&self) -> (Vec2, Vec2) {
        self.pose_at(self.length())
    }
}

/// Field of a straight segment at `point`.
pub fn line_field(point: Vec2, seg: &LineSegment) -> Result<Vec2> {
    if !seg.contains(point) {
        return Err(out_of_region(point));
    }
    Ok(seg.field_at(point))
}

/// Field of an arc segment at `point`.
pub fn arc_field(point: Vec2, seg: &ArcSegment) -> Result<Vec2> {
    if !seg.contains(point) {
        return Err(out_of_region(point));
    }
    Ok(seg.field_at(point))
}

fn out_of_region(point: Vec2) -> SimError {
    SimError::OutOfRegion {
        x: point.x,
        y: point.y,
    }
}

fn check_positive(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(SimError::Geometry(format!("{what} must be positive, got {v}")))
    }
}

/// A boundary through `point`; it is crossed once `(q - point) . normal > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub point: Vec2,
    pub normal: Vec2,
}

impl HalfPlane {
    pub fn crossed(&self, q: Vec2) -> bool {
        (q - self.point).dot(self.normal) > 0.0
    }

    pub fn contains_boundary_point(&self, q: Vec2) -> bool {
        (q - self.point).dot(self.normal).abs() <= JUNCTION_POS_TOL
    }
}

/// Arc-length position along a route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoutePosition {
    pub segment: usize,
    /// Offset along the active segment, clamped to `[0, length]`.
    pub offset: f64,
    /// Arc length from the start of the route.
    pub cumulative: f64,
    /// Signed distance from the centerline, left positive.
    pub lateral: f64,
}

/// An ordered chain of G1-continuous segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route {
    segments: Vec<Segment>,
    exits: Vec<HalfPlane>,
    starts: Vec<f64>,
    looped: bool,
}

impl Route {
    pub fn new(segments: Vec<Segment>, looped: bool) -> Result<Self> {
        if segments.is_empty() {
            return Err(SimError::Geometry("route has no segments".into()));
        }
        for seg in &segments {
            seg.validate()?;
        }
        let n = segments.len();
        let junctions = if looped { n } else { n - 1 };
        for k in 0..junctions {
            let (end, t_end) = segments[k].end();
            let (start, t_start) = segments[(k + 1) % n].start();
            if end.distance(start) > JUNCTION_POS_TOL {
                return Err(SimError::Geometry(format!(
                    "segments {k} and {} do not meet: gap {:.3e} m",
                    (k + 1) % n,
                    end.distance(start)
                )));
            }
            let turn = wrap_angle(t_start.angle() - t_end.angle()).abs();
            if turn > JUNCTION_ANGLE_TOL {
                return Err(SimError::Geometry(format!(
                    "segments {k} and {} are not tangent: heading jump {turn:.3e} rad",
                    (k + 1) % n
                )));
            }
        }
        let exits = segments
            .iter()
            .map(|seg| {
                let (point, tangent) = seg.end();
                HalfPlane {
                    point,
                    normal: tangent,
                }
            })
            .collect();
        let mut starts = Vec::with_capacity(n);
        let mut acc = 0.0;
        for seg in &segments {
            starts.push(acc);
            acc += seg.length();
        }
        Ok(Self {
            segments,
            exits,
            starts,
            looped,
        })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn exits(&self) -> &[HalfPlane] {
        &self.exits
    }

    pub fn is_loop(&self) -> bool {
        self.looped
    }

    pub fn length(&self) -> f64 {
        let last = self.segments.len() - 1;
        self.starts[last] + self.segments[last].length()
    }

    /// Arc length at which segment `index` begins.
    pub fn segment_start(&self, index: usize) -> f64 {
        self.starts[index]
    }

    /// Index following `index`, wrapping on loops; `None` past the end.
    pub fn next_index(&self, index: usize) -> Option<usize> {
        if index + 1 < self.segments.len() {
            Some(index + 1)
        } else if self.looped {
            Some(0)
        } else {
            None
        }
    }

    /// Segment index containing cumulative arc length `s` (clamped).
    pub fn index_at(&self, s: f64) -> usize {
        match self.starts.partition_point(|&start| start <= s) {
            0 => 0,
            k => k - 1,
        }
    }

    /// Centerline point, unit tangent and segment index at cumulative `s`.
    pub fn pose_at(&self, s: f64) -> (Vec2, Vec2, usize) {
        let s = s.clamp(0.0, self.length());
        let idx = self.index_at(s);
        let (p, t) = self.segments[idx].pose_at(s - self.starts[idx]);
        (p, t, idx)
    }

    /// Advances `index` across every exit half-plane `point` has crossed.
    /// Returns `None` if the point left a non-looping route.
    pub fn track_index(&self, point: Vec2, mut index: usize) -> Option<usize> {
        for _ in 0..self.segments.len() {
            if !transition_check(point, self, index) {
                return Some(index);
            }
            index = self.next_index(index)?;
        }
        Some(index)
    }
}

/// True once `point` has crossed the exit half-plane of segment `active`.
pub fn transition_check(point: Vec2, route: &Route, active: usize) -> bool {
    route.exits[active].crossed(point)
}

/// Field at `point`, moving to the successor segment if the exit of the
/// active one has been crossed. Returns the field and the (possibly new)
/// active index.
pub fn evaluate_route_field(point: Vec2, route: &Route, active: usize) -> Result<(Vec2, usize)> {
    let off_road = || SimError::OffRoad {
        x: point.x,
        y: point.y,
    };
    let index = if transition_check(point, route, active) {
        route.next_index(active).ok_or_else(off_road)?
    } else {
        active
    };
    let seg = &route.segments[index];
    if !seg.contains(point) {
        return Err(off_road());
    }
    Ok((seg.field_at(point), index))
}

/// Projects `point` onto the centerline of segment `active`.
pub fn route_position(point: Vec2, route: &Route, active: usize) -> Result<RoutePosition> {
    let seg = &route.segments[active];
    if !seg.contains(point) {
        return Err(SimError::OffRoad {
            x: point.x,
            y: point.y,
        });
    }
    let (s, lateral) = seg.project(point);
    let offset = s.clamp(0.0, seg.length());
    Ok(RoutePosition {
        segment: active,
        offset,
        cumulative: route.starts[active] + offset,
        lateral,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn x_line(p: f64) -> LineSegment {
        LineSegment::new(Vec2::ZERO, Vec2::new(1.0, 0.0), 2.0, 0.2, p).unwrap()
    }

    fn quarter_arc() -> ArcSegment {
        // Starts at (0.3, 0) heading +y, turns left to (0, 0.3).
        ArcSegment {
            center: Vec2::ZERO,
            radius: 0.3,
            rotation: Rotation::CounterClockwise,
            start_angle: 0.0,
            end_angle: PI / 2.0,
            width: 0.2,
            p: 0.2,
        }
    }

    /// Line into a quarter arc into a line.
    fn l_route() -> Route {
        let a = LineSegment::new(Vec2::new(-2.0, -0.3), Vec2::new(1.0, 0.0), 2.0, 0.2, 2.0).unwrap();
        let b = ArcSegment {
            center: Vec2::ZERO,
            radius: 0.3,
            rotation: Rotation::CounterClockwise,
            start_angle: -PI / 2.0,
            end_angle: 0.0,
            width: 0.2,
            p: 0.2,
        };
        let c = LineSegment::new(Vec2::new(0.3, 0.0), Vec2::new(0.0, 1.0), 1.0, 0.2, 2.0).unwrap();
        Route::new(vec![Segment::Line(a), Segment::Arc(b), Segment::Line(c)], false).unwrap()
    }

    #[test]
    fn line_field_on_centerline_is_direction() {
        let f = line_field(Vec2::new(1.0, 0.0), &x_line(2.0)).unwrap();
        assert_eq!(f, Vec2::new(1.0, 0.0));
    }

    #[test]
    fn line_field_with_offset() {
        let w = 0.05;
        let f = line_field(Vec2::new(0.7, w), &x_line(2.0)).unwrap();
        assert_abs_diff_eq!(f.x, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.y, -2.0 * w, epsilon = 1e-15);
    }

    #[test]
    fn line_gain_scales_perpendicular_component() {
        let q = Vec2::new(0.7, 0.04);
        let hi = line_field(q, &x_line(2.0)).unwrap();
        let lo = line_field(q, &x_line(0.2)).unwrap();
        assert_abs_diff_eq!(hi.y / lo.y, 10.0, epsilon = 1e-12);
    }

    #[test]
    fn line_field_rejects_outside_points() {
        let seg = x_line(2.0);
        assert!(matches!(
            line_field(Vec2::new(2.5, 0.0), &seg),
            Err(SimError::OutOfRegion { .. })
        ));
        assert!(line_field(Vec2::new(1.0, 0.11), &seg).is_err());
        assert!(line_field(Vec2::new(-0.01, 0.0), &seg).is_err());
    }

    #[test]
    fn arc_field_tangent_on_circle() {
        let seg = quarter_arc();
        for k in 1..10 {
            let phi = PI / 2.0 * k as f64 / 10.0;
            let q = Vec2::from_angle(phi) * 0.3;
            let f = arc_field(q, &seg).unwrap();
            assert!(f.dot(Vec2::from_angle(phi)).abs() < 1e-9);
            // counter-clockwise circulation
            assert!(q.cross(f) > 0.0);
        }
    }

    #[test]
    fn arc_field_pulls_toward_circle() {
        let seg = quarter_arc();
        for delta in [-0.05, -0.01, 0.01, 0.05] {
            let radial = Vec2::from_angle(0.6);
            let q = radial * (0.3 + delta);
            let f = arc_field(q, &seg).unwrap();
            assert_eq!(f.dot(radial).signum(), -delta.signum());
        }
    }

    #[test]
    fn arc_field_hand_evaluated() {
        // center (0,0), r=0.3, cw=+1, p=0.2 at (0.25, 0.1):
        // shell = 0.0625 + 0.01 - 0.09 = -0.0175
        // xdot = 0.3*0.1*1 - 4*0.2*0.25*(-0.0175) = 0.03 + 0.0035 = 0.0335
        // ydot = -0.3*0.25*1 - 4*0.2*0.1*(-0.0175) = -0.075 + 0.0014 = -0.0736
        let seg = ArcSegment {
            center: Vec2::ZERO,
            radius: 0.3,
            rotation: Rotation::Clockwise,
            start_angle: PI / 2.0,
            end_angle: -PI / 2.0,
            width: 0.2,
            p: 0.2,
        };
        let f = arc_field(Vec2::new(0.25, 0.1), &seg).unwrap();
        assert_abs_diff_eq!(f.x, 0.0335, epsilon = 1e-15);
        assert_abs_diff_eq!(f.y, -0.0736, epsilon = 1e-15);
    }

    #[test]
    fn arc_outside_span_is_rejected() {
        let seg = quarter_arc();
        assert!(arc_field(Vec2::from_angle(-0.2) * 0.3, &seg).is_err());
        assert!(arc_field(Vec2::from_angle(0.2) * 0.45, &seg).is_err());
    }

    #[test]
    fn transitions() {
        let route = l_route();
        assert!(!transition_check(Vec2::new(-1.0, -0.3), &route, 0));
        assert!(transition_check(Vec2::new(0.001, -0.3), &route, 0));
        let (f, idx) = evaluate_route_field(Vec2::new(-1.0, -0.3), &route, 0).unwrap();
        assert_eq!(idx, 0);
        assert_eq!(f, Vec2::new(1.0, 0.0));
        let (_, idx) = evaluate_route_field(Vec2::new(0.001, -0.3), &route, 0).unwrap();
        assert_eq!(idx, 1);
        assert!(matches!(
            evaluate_route_field(Vec2::new(-1.0, 0.5), &route, 0),
            Err(SimError::OffRoad { .. })
        ));
        // Past the end of a non-looping route.
        assert!(evaluate_route_field(Vec2::new(0.3, 1.01), &route, 2).is_err());
    }

    #[test]
    fn loop_wraps_to_first_segment() {
        let r = 0.5;
        let mut segs = Vec::new();
        for k in 0..4 {
            let a0 = -PI / 2.0 + k as f64 * PI / 2.0;
            segs.push(Segment::Arc(ArcSegment {
                center: Vec2::ZERO,
                radius: r,
                rotation: Rotation::CounterClockwise,
                start_angle: a0,
                end_angle: a0 + PI / 2.0,
                width: 0.2,
                p: 0.2,
            }));
        }
        let route = Route::new(segs, true).unwrap();
        let q = Vec2::from_angle(-PI / 2.0 + 0.01) * r;
        assert!(transition_check(q, &route, 3));
        let (_, idx) = evaluate_route_field(q, &route, 3).unwrap();
        assert_eq!(idx, 0);
        assert_abs_diff_eq!(route.length(), 2.0 * PI * r, epsilon = 1e-12);
    }

    #[test]
    fn positions_along_route() {
        let route = l_route();
        let start = route_position(Vec2::new(-2.0, -0.3), &route, 0).unwrap();
        assert_eq!(start.cumulative, 0.0);
        let end = route_position(Vec2::new(0.0, -0.3), &route, 0).unwrap();
        assert_abs_diff_eq!(end.cumulative, 2.0, epsilon = 1e-15);
        let quarter = route_position(Vec2::new(0.3, 0.0), &route, 1).unwrap();
        assert_abs_diff_eq!(quarter.offset, PI * 0.3 / 2.0, epsilon = 1e-12);
        assert!(route_position(Vec2::new(-1.0, 0.3), &route, 0).is_err());
    }

    #[test]
    fn non_tangent_junction_is_rejected() {
        let a = LineSegment::new(Vec2::ZERO, Vec2::new(1.0, 0.0), 1.0, 0.2, 1.0).unwrap();
        let b = LineSegment::new(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), 1.0, 0.2, 1.0).unwrap();
        assert!(Route::new(vec![Segment::Line(a.clone()), Segment::Line(b)], false).is_err());
        let gap = LineSegment::new(Vec2::new(1.1, 0.0), Vec2::new(1.0, 0.0), 1.0, 0.2, 1.0).unwrap();
        assert!(Route::new(vec![Segment::Line(a), Segment::Line(gap)], false).is_err());
    }

    #[test]
    fn junction_field_direction_agrees() {
        let route = l_route();
        for k in 0..2 {
            let (p, _) = route.segments()[k].end();
            let f0 = route.segments()[k].field_at(p).normalized().unwrap();
            let f1 = route.segments()[k + 1].field_at(p).normalized().unwrap();
            assert!(wrap_angle(f0.angle() - f1.angle()).abs() < 1e-6);
        }
    }

    #[test]
    fn invalid_segments() {
        assert!(LineSegment::new(Vec2::ZERO, Vec2::new(1.0, 1.0), 1.0, 0.2, 1.0).is_err());
        assert!(LineSegment::new(Vec2::ZERO, Vec2::new(1.0, 0.0), 0.0, 0.2, 1.0).is_err());
        let mut arc = quarter_arc();
        arc.rotation = Rotation::Clockwise;
        assert!(arc.validate().is_err());
    }
}
