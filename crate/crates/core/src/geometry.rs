//! Complex-plane primitives: Möbius maps, the disk automorphisms `T_q`,
//! generalized circles and their intersections.
//!
//! Everything here is a plain value type. The extended plane is modelled by
//! [`ExtPoint`], so a Möbius map sending a point to infinity returns
//! [`ExtPoint::Infinity`] rather than an overflowing float.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{domain, GearError, Result};

/// Relative tolerance used to classify two circles as tangent.
pub const TANGENCY_TOL: f64 = 1e-9;

/// Normalized curvature below which three points are treated as collinear.
pub const COLLINEAR_CURVATURE: f64 = 1e-8;

/// A point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtPoint {
    Finite(Complex64),
    Infinity,
}

impl ExtPoint {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            ExtPoint::Finite(z) => Some(z),
            ExtPoint::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtPoint::Infinity)
    }
}

impl From<Complex64> for ExtPoint {
    fn from(z: Complex64) -> Self {
        ExtPoint::Finite(z)
    }
}

/// `w ↦ (a w + b) / (c w + d)` with `ad − bc ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl Mobius {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if !(det.norm() > 1e-14 * scale * scale) {
            return Err(GearError::DegenerateMobius);
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    /// `w ↦ (w − p) / (w − q)`, sending `p` to 0 and `q` to ∞.
    pub fn zero_pole(p: Complex64, q: Complex64) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        Self::new(one, -p, one, -q)
    }

    /// Affine map `w ↦ s w + t`.
    pub fn affine(s: Complex64, t: Complex64) -> Result<Self> {
        Self::new(s, t, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn apply(&self, w: ExtPoint) -> ExtPoint {
        match w {
            ExtPoint::Infinity => {
                if self.c == Complex64::new(0.0, 0.0) {
                    ExtPoint::Infinity
                } else {
                    ExtPoint::Finite(self.a / self.c)
                }
            }
            ExtPoint::Finite(w) => {
                let den = self.c * w + self.d;
                if den == Complex64::new(0.0, 0.0) {
                    ExtPoint::Infinity
                } else {
                    ExtPoint::Finite((self.a * w + self.b) / den)
                }
            }
        }
    }

    /// Applies the map to a finite point, returning `None` at the pole.
    pub fn apply_finite(&self, w: Complex64) -> Option<Complex64> {
        self.apply(ExtPoint::Finite(w)).finite()
    }

    /// First and second derivatives at a finite, non-pole point.
    pub fn derivatives(&self, w: Complex64) -> (Complex64, Complex64) {
        let det = self.a * self.d - self.b * self.c;
        let den = self.c * w + self.d;
        let d1 = det / (den * den);
        let d2 = -2.0 * self.c * det / (den * den * den);
        (d1, d2)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> Mobius {
        Mobius {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Image of a generalized circle, computed through three of its points.
    pub fn apply_circle(&self, circle: &GeneralizedCircle) -> Result<GeneralizedCircle> {
        let pts = circle.three_points();
        let mut img = Vec::with_capacity(3);
        for p in pts {
            img.push(self.apply(ExtPoint::Finite(p)));
        }
        // A point sent to infinity makes the image a line through the other two.
        match (img[0], img[1], img[2]) {
            (ExtPoint::Finite(a), ExtPoint::Finite(b), ExtPoint::Finite(c)) => {
                circle_through_three_points(a, b, c)
            }
            _ => {
                let finite: Vec<Complex64> = img.iter().filter_map(|p| p.finite()).collect();
                if finite.len() < 2 {
                    return Err(GearError::CoincidentPoints);
                }
                GeneralizedCircle::line_through(finite[0], finite[1])
            }
        }
    }
}

/// The disk automorphism `T_q(z) = (z − q)/(−q z + 1)` for real `|q| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskAutomorphism {
    q: f64,
}

impl DiskAutomorphism {
    pub fn new(q: f64) -> Result<Self> {
        if !(q.abs() < 1.0) {
            return Err(domain("q", q, "disk automorphism requires |q| < 1"));
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (z - self.q) / (1.0 - self.q * z)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let den = 1.0 - self.q * z;
        (1.0 - self.q * self.q) / (den * den)
    }

    pub fn inverse(&self) -> DiskAutomorphism {
        DiskAutomorphism { q: -self.q }
    }

    pub fn as_mobius(&self) -> Mobius {
        Mobius {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(-self.q, 0.0),
            c: Complex64::new(-self.q, 0.0),
            d: Complex64::new(1.0, 0.0),
        }
    }
}

/// A circle or a straight line in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneralizedCircle {
    Circle { center: Complex64, radius: f64 },
    Line { point: Complex64, direction: Complex64 },
}

impl GeneralizedCircle {
    pub fn circle(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(domain("radius", radius, "circle radius must be positive"));
        }
        Ok(Self::Circle { center, radius })
    }

    pub fn line(point: Complex64, direction: Complex64) -> Result<Self> {
        let n = direction.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(domain("direction", n, "line direction must be nonzero"));
        }
        Ok(Self::Line {
            point,
            direction: direction / n,
        })
    }

    pub fn line_through(a: Complex64, b: Complex64) -> Result<Self> {
        if a == b {
            return Err(GearError::CoincidentPoints);
        }
        Self::line(a, b - a)
    }

    /// Unsigned curvature, 0 for a line.
    pub fn curvature(&self) -> f64 {
        match self {
            Self::Circle { radius, .. } => 1.0 / radius,
            Self::Line { .. } => 0.0,
        }
    }

    pub fn is_line(&self) -> bool {
        matches!(self, Self::Line { .. })
    }

    /// Euclidean distance from `p` to the carrier.
    pub fn distance(&self, p: Complex64) -> f64 {
        match *self {
            Self::Circle { center, radius } => ((p - center).norm() - radius).abs(),
            Self::Line { point, direction } => (direction.conj() * (p - point)).im.abs(),
        }
    }

    pub fn contains(&self, p: Complex64, tol: f64) -> bool {
        self.distance(p) <= tol
    }

    /// Orthogonal projection of `p` onto the carrier.
    pub fn project(&self, p: Complex64) -> Complex64 {
        match *self {
            Self::Circle { center, radius } => {
                let v = p - center;
                if v.norm() == 0.0 {
                    center + radius
                } else {
                    center + v * (radius / v.norm())
                }
            }
            Self::Line { point, direction } => {
                point + direction * (direction.conj() * (p - point)).re
            }
        }
    }

    /// Unit tangent at a point of the carrier (counterclockwise for circles).
    pub fn tangent_at(&self, p: Complex64) -> Complex64 {
        match *self {
            Self::Circle { center, .. } => {
                let v = p - center;
                Complex64::new(0.0, 1.0) * v / v.norm()
            }
            Self::Line { direction, .. } => direction,
        }
    }

    pub fn conj(&self) -> Self {
        match *self {
            Self::Circle { center, radius } => Self::Circle {
                center: center.conj(),
                radius,
            },
            Self::Line { point, direction } => Self::Line {
                point: point.conj(),
                direction: direction.conj(),
            },
        }
    }

    fn three_points(&self) -> [Complex64; 3] {
        match *self {
            Self::Circle { center, radius } => [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0]
                .map(|a| center + Complex64::from_polar(radius, a)),
            Self::Line { point, direction } => {
                [point - direction, point, point + direction]
            }
        }
    }

    /// Carrier-level distance used for symmetry checks: for two circles the
    /// larger of the center offset and radius difference, for two lines the
    /// direction mismatch plus the offset of one point from the other line.
    pub fn carrier_distance(&self, other: &Self) -> f64 {
        match (*self, *other) {
            (
                Self::Circle {
                    center: c1,
                    radius: r1,
                },
                Self::Circle {
                    center: c2,
                    radius: r2,
                },
            ) => (c1 - c2).norm().max((r1 - r2).abs()),
            (Self::Line { point, direction }, Self::Line { direction: d2, .. }) => {
                let dir = (direction.conj() * d2).im.abs();
                dir + other.distance(point)
            }
            _ => f64::INFINITY,
        }
    }
}

/// Unique circle (or line) through three distinct points.
pub fn circle_through_three_points(
    p1: Complex64,
    p2: Complex64,
    p3: Complex64,
) -> Result<GeneralizedCircle> {
    let d12 = (p2 - p1).norm();
    let d13 = (p3 - p1).norm();
    let d23 = (p3 - p2).norm();
    let diameter = d12.max(d13).max(d23);
    if !diameter.is_finite() {
        return Err(domain("point", diameter, "points must be finite"));
    }
    if d12.min(d13).min(d23) <= 1e-14 * diameter || diameter == 0.0 {
        return Err(GearError::CoincidentPoints);
    }
    // Scaled to unit diameter and translated to p1.
    let b = (p2 - p1) / diameter;
    let c = (p3 - p1) / diameter;
    let cross = (b.conj() * c).im;
    let kappa = 2.0 * cross.abs() / ((b.norm() * c.norm() * (c - b).norm()).max(f64::MIN_POSITIVE));
    if kappa < COLLINEAR_CURVATURE {
        let (a, z) = if d12 >= d13 && d12 >= d23 {
            (p1, p2)
        } else if d13 >= d23 {
            (p1, p3)
        } else {
            (p2, p3)
        };
        return GeneralizedCircle::line(a, z - a);
    }
    let center = (b.norm_sqr() * c - c.norm_sqr() * b) / Complex64::new(0.0, 2.0 * cross);
    let radius = center.norm() * diameter;
    GeneralizedCircle::circle(p1 + center * diameter, radius)
}

/// How two generalized circles meet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircleIntersection {
    TwoPoints(ExtPoint, ExtPoint),
    Tangent(ExtPoint),
    Disjoint,
    Coincident,
}

pub fn circle_intersection(c1: &GeneralizedCircle, c2: &GeneralizedCircle) -> CircleIntersection {
    circle_intersection_with_tol(c1, c2, TANGENCY_TOL)
}

/// Intersection with a caller-chosen relative tangency tolerance.
pub fn circle_intersection_with_tol(
    c1: &GeneralizedCircle,
    c2: &GeneralizedCircle,
    tol: f64,
) -> CircleIntersection {
    use GeneralizedCircle::*;
    match (*c1, *c2) {
        (
            Circle {
                center: o1,
                radius: r1,
            },
            Circle {
                center: o2,
                radius: r2,
            },
        ) => {
            let scale = r1.max(r2);
            let d = (o2 - o1).norm();
            if d <= tol * scale {
                return if (r1 - r2).abs() <= tol * scale {
                    CircleIntersection::Coincident
                } else {
                    CircleIntersection::Disjoint
                };
            }
            let u = (o2 - o1) / d;
            if (d - (r1 + r2)).abs() < tol * scale {
                return CircleIntersection::Tangent(ExtPoint::Finite(o1 + u * r1));
            }
            if (d - (r1 - r2).abs()).abs() < tol * scale {
                let p = if r1 >= r2 { o1 + u * r1 } else { o1 - u * r1 };
                return CircleIntersection::Tangent(ExtPoint::Finite(p));
            }
            if d > r1 + r2 || d < (r1 - r2).abs() {
                return CircleIntersection::Disjoint;
            }
            let a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
            let h = (r1 * r1 - a * a).max(0.0).sqrt();
            let base = o1 + u * a;
            let off = Complex64::new(0.0, 1.0) * u * h;
            CircleIntersection::TwoPoints(
                ExtPoint::Finite(base - off),
                ExtPoint::Finite(base + off),
            )
        }
        (Circle { center, radius }, Line { point, direction })
        | (Line { point, direction }, Circle { center, radius }) => {
            let rel = direction.conj() * (center - point);
            let foot = point + direction * rel.re;
            let dist = rel.im.abs();
            if (dist - radius).abs() < tol * radius {
                return CircleIntersection::Tangent(ExtPoint::Finite(foot));
            }
            if dist > radius {
                return CircleIntersection::Disjoint;
            }
            let h = (radius * radius - dist * dist).sqrt();
            CircleIntersection::TwoPoints(
                ExtPoint::Finite(foot - direction * h),
                ExtPoint::Finite(foot + direction * h),
            )
        }
        (
            Line {
                point: p1,
                direction: d1,
            },
            Line {
                point: p2,
                direction: d2,
            },
        ) => {
            let cross = (d1.conj() * d2).im;
            if cross.abs() < tol {
                if c2.distance(p1) <= tol * (1.0 + p1.norm().max(p2.norm())) {
                    CircleIntersection::Coincident
                } else {
                    CircleIntersection::Tangent(ExtPoint::Infinity)
                }
            } else {
                // p1 + s d1 = p2 + r d2  →  s = Im(conj(d2)(p2 − p1)) / Im(conj(d2) d1)
                let s = (d2.conj() * (p2 - p1)).im / (d2.conj() * d1).im;
                CircleIntersection::TwoPoints(ExtPoint::Finite(p1 + d1 * s), ExtPoint::Infinity)
            }
        }
    }
}

/// Symmetrizing automorphism for prevertices `e^{it1}, e^{it2}`.
///
/// Returns `(q, t)` with `T_q(e^{it1}) = e^{it}` and `T_q(e^{it2}) = e^{i(π−t)}`.
/// The closed form for `q` is rewritten as
/// `cos((t1+t2)/2) / (cos((t2−t1)/2) + √(sin t1 sin t2))`, which avoids the
/// 0/0 of the original expression when `t1 + t2 = π`.
pub fn symmetrize_prevertices(t1: f64, t2: f64) -> Result<(f64, f64)> {
    if !(t1 > 0.0 && t1 < PI) {
        return Err(domain("t1", t1, "requires 0 < t1 < π"));
    }
    if !(t2 > t1 && t2 < PI) {
        return Err(domain("t2", t2, "requires t1 < t2 < π"));
    }
    let q = (0.5 * (t1 + t2)).cos() / ((0.5 * (t2 - t1)).cos() + (t1.sin() * t2.sin()).sqrt());
    let tq = DiskAutomorphism::new(q)?;
    let t = tq.apply(Complex64::from_polar(1.0, t1)).arg();
    Ok((q, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mobius_identity_and_poles() {
        let id = Mobius::identity();
        assert_eq!(id.apply(c(3.0, 4.0).into()), ExtPoint::Finite(c(3.0, 4.0)));

        let bm = c(-0.3, 0.0);
        let bp = c(0.8, 0.0);
        let t = Mobius::zero_pole(bm, bp).unwrap();
        assert_eq!(t.apply(bm.into()), ExtPoint::Finite(c(0.0, 0.0)));
        assert_eq!(t.apply(bp.into()), ExtPoint::Infinity);
        assert_eq!(t.apply(ExtPoint::Infinity), ExtPoint::Finite(c(1.0, 0.0)));
    }

    #[test]
    fn degenerate_mobius_rejected() {
        let one = c(1.0, 0.0);
        assert_eq!(
            Mobius::new(one, one, one, one),
            Err(GearError::DegenerateMobius)
        );
    }

    #[test]
    fn mobius_inverse_and_compose() {
        let m = Mobius::new(c(1.0, 2.0), c(0.5, 0.0), c(0.1, -0.3), c(2.0, 0.0)).unwrap();
        let w = c(0.3, -0.7);
        let back = m.inverse().apply(m.apply(w.into()));
        assert!((back.finite().unwrap() - w).norm() < 1e-14);
        let mm = m.compose(&m);
        let direct = m.apply(m.apply(w.into()));
        assert!((mm.apply(w.into()).finite().unwrap() - direct.finite().unwrap()).norm() < 1e-13);
    }

    #[test]
    fn tq_closed_forms() {
        let t0 = DiskAutomorphism::new(0.0).unwrap();
        let z = c(0.2, 0.3);
        assert_eq!(t0.apply(z), z);
        assert_eq!(t0.derivative(z), c(1.0, 0.0));

        for q in [-0.9, -0.3, 0.5, 0.99] {
            let tq = DiskAutomorphism::new(q).unwrap();
            assert!((tq.apply(c(1.0, 0.0)) - c(1.0, 0.0)).norm() < 1e-15);
            assert!((tq.apply(c(-1.0, 0.0)) - c(-1.0, 0.0)).norm() < 1e-15);
        }
        let half = DiskAutomorphism::new(0.5).unwrap();
        assert_eq!(half.apply(c(0.0, 0.0)), c(-0.5, 0.0));
        assert_eq!(half.derivative(c(0.0, 0.0)), c(0.75, 0.0));
        assert!(DiskAutomorphism::new(1.0).is_err());
    }

    #[test]
    fn three_point_circles() {
        let unit = circle_through_three_points(c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)).unwrap();
        match unit {
            GeneralizedCircle::Circle { center, radius } => {
                assert!(center.norm() < 1e-15);
                assert!((radius - 1.0).abs() < 1e-15);
            }
            _ => panic!("expected circle"),
        }

        let line = circle_through_three_points(c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)).unwrap();
        match line {
            GeneralizedCircle::Line { point, direction } => {
                assert_eq!(point, c(0.0, 0.0));
                assert!((direction - c(1.0, 0.0)).norm() < 1e-15);
            }
            _ => panic!("expected line"),
        }
        assert_eq!(line.curvature(), 0.0);

        // Perpendicular bisectors of (0,1) and (1,1+i): x = 1/2 and y = 1/2.
        let fit = circle_through_three_points(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)).unwrap();
        match fit {
            GeneralizedCircle::Circle { center, radius } => {
                assert!((center - c(0.5, 0.5)).norm() < 1e-15);
                assert!((radius - 0.5f64.sqrt()).abs() < 1e-15);
            }
            _ => panic!("expected circle"),
        }

        assert_eq!(
            circle_through_three_points(c(1.0, 1.0), c(1.0, 1.0), c(0.0, 2.0)),
            Err(GearError::CoincidentPoints)
        );
    }

    #[test]
    fn intersection_cases() {
        let unit = GeneralizedCircle::circle(c(0.0, 0.0), 1.0).unwrap();
        let shifted = GeneralizedCircle::circle(c(1.0, 0.0), 1.0).unwrap();
        // |w|² = 1 and |w − 1|² = 1 give Re w = 1/2, Im w = ±√3/2.
        match circle_intersection(&unit, &shifted) {
            CircleIntersection::TwoPoints(a, b) => {
                let (a, b) = (a.finite().unwrap(), b.finite().unwrap());
                let s = 3f64.sqrt() / 2.0;
                let ok = ((a - c(0.5, -s)).norm() < 1e-15 && (b - c(0.5, s)).norm() < 1e-15)
                    || ((a - c(0.5, s)).norm() < 1e-15 && (b - c(0.5, -s)).norm() < 1e-15);
                assert!(ok, "{a} {b}");
            }
            other => panic!("unexpected {other:?}"),
        }

        let big = GeneralizedCircle::circle(c(0.0, 0.0), 2.0).unwrap();
        assert_eq!(circle_intersection(&unit, &big), CircleIntersection::Disjoint);

        let touching = GeneralizedCircle::circle(c(2.0, 0.0), 1.0).unwrap();
        assert_eq!(
            circle_intersection(&unit, &touching),
            CircleIntersection::Tangent(ExtPoint::Finite(c(1.0, 0.0)))
        );
        assert_eq!(circle_intersection(&unit, &unit), CircleIntersection::Coincident);

        let l1 = GeneralizedCircle::line(c(0.0, 0.0), c(1.0, 1.0)).unwrap();
        let l2 = GeneralizedCircle::line(c(0.0, 0.0), c(1.0, -1.0)).unwrap();
        match circle_intersection(&l1, &l2) {
            CircleIntersection::TwoPoints(p, q) => {
                assert!(p.finite().unwrap().norm() < 1e-15);
                assert!(q.is_infinite());
            }
            other => panic!("unexpected {other:?}"),
        }
        let l3 = GeneralizedCircle::line(c(0.0, 1.0), c(1.0, 1.0)).unwrap();
        assert_eq!(
            circle_intersection(&l1, &l3),
            CircleIntersection::Tangent(ExtPoint::Infinity)
        );
    }

    #[test]
    fn symmetrize_symmetric_input_is_fixed() {
        for t in [0.1, 0.7, 1.3] {
            let (q, ts) = symmetrize_prevertices(t, PI - t).unwrap();
            assert!(q.abs() < 1e-15);
            assert!((ts - t).abs() < 1e-14);
        }
    }

    #[test]
    fn symmetrize_generic_images() {
        let (q, t) = symmetrize_prevertices(0.5, 2.0).unwrap();
        let tq = DiskAutomorphism::new(q).unwrap();
        let w1 = tq.apply(Complex64::from_polar(1.0, 0.5));
        let w2 = tq.apply(Complex64::from_polar(1.0, 2.0));
        assert!((w1.norm() - 1.0).abs() < 1e-14);
        assert!((w2.norm() - 1.0).abs() < 1e-14);
        assert!((w1.arg() - (PI - w2.arg())).abs() < 1e-14);
        assert!(t > 0.0 && t < PI / 2.0);
        assert!(symmetrize_prevertices(2.0, 0.5).is_err());
        assert!(symmetrize_prevertices(0.5, PI).is_err());
    }

    fn disk_point() -> impl Strategy<Value = Complex64> {
        (0.0..1.0f64, 0.0..(2.0 * PI)).prop_map(|(r, a)| Complex64::from_polar(r, a))
    }

    proptest! {
        #[test]
        fn tq_preserves_unit_circle(q in -0.99..0.99f64, a in 0.0..(2.0 * PI)) {
            let tq = DiskAutomorphism::new(q).unwrap();
            let w = tq.apply(Complex64::from_polar(1.0, a));
            prop_assert!((w.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn tq_difference_identity(q in -0.95..0.95f64, a in disk_point(), b in disk_point()) {
            let tq = DiskAutomorphism::new(q).unwrap();
            let lhs = tq.apply(a) - tq.apply(b);
            let rhs = (1.0 - q * q) * (a - b) / ((1.0 - q * a) * (1.0 - q * b));
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn fitted_circle_contains_inputs(
            x in prop::array::uniform6(-5.0..5.0f64)
        ) {
            let (p1, p2, p3) = (c(x[0], x[1]), c(x[2], x[3]), c(x[4], x[5]));
            let m = (p1 - p2).norm().min((p1 - p3).norm()).min((p2 - p3).norm());
            prop_assume!(m > 1e-3);
            // Skip nearly collinear triples, which come back as lines with a
            // residual of order curvature × diameter².
            let area = ((p2 - p1).conj() * (p3 - p1)).im.abs();
            prop_assume!(area > 1e-6);
            let circ = circle_through_three_points(p1, p2, p3).unwrap();
            for p in [p1, p2, p3] {
                prop_assert!(circ.distance(p) < 1e-10 * (1.0 + p.norm()));
            }
        }

        #[test]
        fn intersections_lie_on_both(
            o1 in disk_point(), o2 in disk_point(),
            r1 in 0.2..2.0f64, r2 in 0.2..2.0f64
        ) {
            let c1 = GeneralizedCircle::circle(o1, r1).unwrap();
            let c2 = GeneralizedCircle::circle(o2, r2).unwrap();
            let pts: Vec<Complex64> = match circle_intersection(&c1, &c2) {
                CircleIntersection::TwoPoints(a, b) => vec![a.finite().unwrap(), b.finite().unwrap()],
                CircleIntersection::Tangent(a) => vec![a.finite().unwrap()],
                _ => vec![],
            };
            for p in pts {
                prop_assert!(c1.distance(p) < 1e-10);
                prop_assert!(c2.distance(p) < 1e-10);
            }
        }

        #[test]
        fn resymmetrizing_gives_zero(t1 in 0.05..3.0f64, frac in 0.01..0.99f64) {
            let t2 = t1 + frac * (PI - 0.01 - t1);
            prop_assume!(t2 > t1 + 1e-6 && t2 < PI - 1e-6);
            let (q, t) = symmetrize_prevertices(t1, t2).unwrap();
            prop_assert!(q.abs() < 1.0);
            let tq = DiskAutomorphism::new(q).unwrap();
            let a1 = tq.apply(Complex64::from_polar(1.0, t1)).arg();
            let a2 = tq.apply(Complex64::from_polar(1.0, t2)).arg();
            let (q2, t_again) = symmetrize_prevertices(a1, a2).unwrap();
            prop_assert!(q2.abs() < 1e-10);
            prop_assert!((t_again - t).abs() < 1e-10);
        }
    }
}
