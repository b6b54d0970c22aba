//! Recognizing gears and pregears in a traced boundary and normalizing
//! pregears to the standard gear `G_{β,γ}`.
//!
//! Each of the four boundary arcs is fitted by the circle through its values
//! at 25, 50 and 75 percent of the arc. Vertices are intersections of
//! consecutive carriers; the Richardson estimate at the prevertex ray only
//! picks which intersection point is meant.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{GearError, Result};
use crate::geometry::{
    circle_intersection_with_tol, circle_through_three_points, CircleIntersection, ExtPoint,
    GeneralizedCircle, Mobius,
};
use crate::mapping::{ArcTag, BoundaryRay, MapSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Gear,
    Pregear,
    /// Tooth circles tangent at a point of the A-circle, the image of `z = −1`.
    DegenerateMinus,
    /// Tooth circles tangent at a point of the B-circle, the image of `z = 1`.
    DegeneratePlus,
    Invalid,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Gear => "Gear",
            Classification::Pregear => "Pregear",
            Classification::DegenerateMinus => "DegenerateMinus",
            Classification::DegeneratePlus => "DegeneratePlus",
            Classification::Invalid => "Invalid",
        }
    }

    /// Gear or pregear: a Möbius image of a gear domain.
    pub fn is_pregear(self) -> bool {
        matches!(self, Classification::Gear | Classification::Pregear)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierConfig {
    /// Largest fit residual, relative to the size of the image.
    pub fit_residual: f64,
    pub angle_tol: f64,
    /// Relative tangency tolerance for the tooth circles.
    pub tangency_tol: f64,
    /// Sagitta of a tooth edge, relative to scale, below which it counts as
    /// straight.
    pub straight_tol: f64,
    /// Relative center offset below which the A- and B-circles are concentric.
    pub concentric_tol: f64,
    pub symmetry_tol: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            fit_residual: 1e-6,
            angle_tol: 1e-3,
            tangency_tol: 1e-7,
            straight_tol: 1e-7,
            concentric_tol: 1e-7,
            symmetry_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub tag: ArcTag,
    pub carrier: GeneralizedCircle,
    /// Largest distance of a traced point from the carrier, relative to scale.
    pub residual: f64,
    /// `+1` when the trace runs counterclockwise about the center (or along
    /// the line direction), `−1` otherwise.
    pub orientation: f64,
}

impl Edge {
    /// Unit tangent at `p`, oriented along the trace.
    pub fn tangent(&self, p: Complex64) -> Complex64 {
        self.carrier.tangent_at(p) * self.orientation
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PregearDescription {
    /// In trace order: B-arc, upper tooth, A-arc, lower tooth.
    pub edges: [Edge; 4],
    /// Images of `e^{it1}, e^{it2}, e^{−it2}, e^{−it1}`.
    pub vertices: [Complex64; 4],
    /// Richardson estimates at the prevertex rays.
    pub vertex_estimates: [Complex64; 4],
    pub interior_angles: [f64; 4],
    pub classification: Classification,
    pub tooth_intersection: CircleIntersection,
    /// Relative gap `|d − (r1 + r2)| / (r1 + r2)` of the tooth circles.
    pub tangency_gap: Option<f64>,
    /// Carrier distance between the lower tooth and the conjugate upper tooth.
    pub symmetry_defect: f64,
    pub scale: f64,
    /// `f(1)` and `f(−1)`.
    pub f_plus_one: Complex64,
    pub f_minus_one: Complex64,
    pub notes: Vec<String>,
}

impl PregearDescription {
    pub fn edge(&self, tag: ArcTag) -> &Edge {
        &self.edges[match tag {
            ArcTag::BArc => 0,
            ArcTag::ToothUpper => 1,
            ArcTag::AArc => 2,
            ArcTag::ToothLower => 3,
        }]
    }

    /// Intersection points `b⁻, b⁺` of the tooth circles, ordered by real part.
    pub fn tooth_points(&self) -> Option<(ExtPoint, ExtPoint)> {
        match self.tooth_intersection {
            CircleIntersection::TwoPoints(a, b) => {
                let key = |p: ExtPoint| p.finite().map_or(f64::INFINITY, |z| z.re);
                if key(a) <= key(b) {
                    Some((a, b))
                } else {
                    Some((b, a))
                }
            }
            _ => None,
        }
    }
}

/// `(β, γ)` with `β > 1`, `0 < γ < π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GearParams {
    pub beta: f64,
    pub gamma: f64,
}

impl GearParams {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        if !(beta > 1.0 && beta.is_finite()) {
            return Err(crate::error::domain("beta", beta, "gear ratio must exceed 1"));
        }
        if !(gamma > 0.0 && gamma < PI) {
            return Err(crate::error::domain("gamma", gamma, "gear angle must lie in (0, π)"));
        }
        Ok(Self { beta, gamma })
    }
}

fn nearest_fraction(rays: &[BoundaryRay], start: f64, len: f64, frac: f64) -> Complex64 {
    let target = start + len * frac;
    rays.iter()
        .min_by(|a, b| {
            let da = angle_dist(a.theta, target);
            let db = angle_dist(b.theta, target);
            da.total_cmp(&db)
        })
        .map(|r| r.limit)
        .unwrap()
}

fn angle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

fn fit_edge(m: &MapSolution, tag: ArcTag, scale: f64) -> Result<Edge> {
    let rays = m.arc_ordered(tag);
    if rays.len() < 3 {
        return Err(GearError::TraceTooShort(tag.name()));
    }
    let (t1, t2) = m.prevertices;
    let (a, b) = tag.interval(t1, t2);
    let p = [0.25, 0.5, 0.75].map(|f| nearest_fraction(&rays, a, b - a, f));
    let carrier = circle_through_three_points(p[0], p[1], p[2])?;
    let residual = rays
        .iter()
        .map(|r| carrier.distance(r.limit))
        .fold(0.0, f64::max)
        / scale;
    let orientation = match carrier {
        GeneralizedCircle::Circle { center, .. } => rays
            .windows(2)
            .map(|w| ((w[1].limit - center) / (w[0].limit - center)).arg())
            .sum::<f64>()
            .signum(),
        GeneralizedCircle::Line { direction, .. } => {
            let span = rays[rays.len() - 1].limit - rays[0].limit;
            (direction.conj() * span).re.signum()
        }
    };
    Ok(Edge {
        tag,
        carrier,
        residual,
        orientation,
    })
}

/// Carrier tangent at the vertex `v`, oriented by the chord to the nearest
/// traced point `p` of the edge.
fn local_tangent(e: &Edge, v: Complex64, p: Complex64, incoming: bool) -> Complex64 {
    let t = e.carrier.tangent_at(v);
    let chord = if incoming { v - p } else { p - v };
    if (t.conj() * chord).re < 0.0 {
        -t
    } else {
        t
    }
}

fn pick_point(x: CircleIntersection, near: Complex64) -> Option<Complex64> {
    match x {
        CircleIntersection::TwoPoints(a, b) => {
            let pts: Vec<Complex64> = [a, b].iter().filter_map(|p| p.finite()).collect();
            pts.into_iter()
                .min_by(|p, q| (p - near).norm().total_cmp(&(q - near).norm()))
        }
        CircleIntersection::Tangent(a) => a.finite(),
        _ => None,
    }
}

/// Sagitta of the arc of `e` over a chord of the given length.
fn sagitta(e: &Edge, chord: f64) -> f64 {
    let k = e.carrier.curvature();
    if k == 0.0 {
        return 0.0;
    }
    let r = 1.0 / k;
    let h = 0.5 * chord;
    if h >= r {
        return r;
    }
    h * h / (r + (r * r - h * h).sqrt())
}

/// Winding number of a closed polygon about `p`.
pub fn winding_number(poly: &[Complex64], p: Complex64) -> i64 {
    let mut total = 0.0;
    for i in 0..poly.len() {
        let a = poly[i] - p;
        let b = poly[(i + 1) % poly.len()] - p;
        total += (b / a).arg();
    }
    (total / (2.0 * PI)).round() as i64
}

/// Index pairs of non-adjacent polygon edges that cross.
pub fn self_intersections(poly: &[Complex64]) -> Vec<(usize, usize)> {
    let n = poly.len();
    let cross = |a: Complex64, b: Complex64| (a.conj() * b).im;
    let mut out = Vec::new();
    for i in 0..n {
        let (a0, a1) = (poly[i], poly[(i + 1) % n]);
        for j in i + 2..n {
            if (j + 1) % n == i {
                continue;
            }
            let (b0, b1) = (poly[j], poly[(j + 1) % n]);
            let d1 = cross(a1 - a0, b0 - a0);
            let d2 = cross(a1 - a0, b1 - a0);
            let d3 = cross(b1 - b0, a0 - b0);
            let d4 = cross(b1 - b0, a1 - b0);
            if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
                out.push((i, j));
            }
        }
    }
    out
}

/// Relative tangency gap of two circles; `None` for lines.
fn tangency_gap(c1: &GeneralizedCircle, c2: &GeneralizedCircle) -> Option<f64> {
    match (*c1, *c2) {
        (
            GeneralizedCircle::Circle {
                center: o1,
                radius: r1,
            },
            GeneralizedCircle::Circle {
                center: o2,
                radius: r2,
            },
        ) => {
            let d = (o1 - o2).norm();
            let ext = (d - (r1 + r2)).abs();
            let int = (d - (r1 - r2).abs()).abs();
            Some(ext.min(int) / (r1 + r2))
        }
        _ => None,
    }
}

/// Fits, measures and classifies the traced boundary.
pub fn extract_pregear(m: &MapSolution) -> Result<PregearDescription> {
    extract_pregear_with(m, &ClassifierConfig::default())
}

pub fn extract_pregear_with(m: &MapSolution, cfg: &ClassifierConfig) -> Result<PregearDescription> {
    let poly = m.boundary_polygon();
    if poly.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
        return Err(GearError::NotPregear("boundary trace is not finite".into()));
    }
    let scale = poly.iter().map(|p| p.norm()).fold(0.0, f64::max).max(1e-300);
    let mut edges = Vec::with_capacity(4);
    for tag in ArcTag::ALL {
        edges.push(fit_edge(m, tag, scale)?);
    }
    let edges: [Edge; 4] = edges.try_into().unwrap();
    let mut notes = Vec::new();

    let mut estimates = [Complex64::new(0.0, 0.0); 4];
    let mut vertices = [Complex64::new(0.0, 0.0); 4];
    for k in 0..4 {
        let est = m
            .prevertex_ray(k)
            .map(|r| r.limit)
            .ok_or(GearError::TraceTooShort("prevertex ray"))?;
        estimates[k] = est;
        let x = circle_intersection_with_tol(&edges[k].carrier, &edges[(k + 1) % 4].carrier, 1e-12);
        vertices[k] = match pick_point(x, est) {
            Some(v) => v,
            None => {
                notes.push(format!("vertex {k}: carriers do not meet, using estimate"));
                est
            }
        };
    }
    let ends: Vec<(Complex64, Complex64)> = ArcTag::ALL
        .iter()
        .map(|&tag| {
            let r = m.arc_ordered(tag);
            (r[0].limit, r[r.len() - 1].limit)
        })
        .collect();
    let first_after: Vec<Complex64> = ends.iter().map(|e| e.0).collect();
    let last_before: Vec<Complex64> = ends.iter().map(|e| e.1).collect();
    let mut angles = [0.0; 4];
    for k in 0..4 {
        let v = vertices[k];
        let d_in = local_tangent(&edges[k], v, last_before[k], true);
        let d_out = local_tangent(&edges[(k + 1) % 4], v, first_after[(k + 1) % 4], false);
        angles[k] = PI - (d_out / d_in).arg();
    }

    let f_plus_one = m.boundary_value_near(0.0).unwrap();
    let f_minus_one = m.boundary_value_near(PI).unwrap();
    let symmetry_defect = m
        .arc(ArcTag::ToothLower)
        .map(|r| edges[1].carrier.distance(r.limit.conj()))
        .fold(0.0, f64::max)
        / scale;
    let tooth_intersection =
        circle_intersection_with_tol(&edges[1].carrier, &edges[3].carrier, cfg.tangency_tol);
    let gap = tangency_gap(&edges[1].carrier, &edges[3].carrier);

    let mut classification = Classification::Invalid;
    let fits_ok = edges.iter().all(|e| e.residual <= cfg.fit_residual);
    let expected = [FRAC_PI_2, 1.5 * PI, 1.5 * PI, FRAC_PI_2];
    let angles_ok = angles
        .iter()
        .zip(expected)
        .all(|(a, b)| (a - b).abs() <= cfg.angle_tol);
    if !fits_ok {
        let worst = edges.iter().map(|e| e.residual).fold(0.0, f64::max);
        notes.push(format!("fit residual {worst:e} exceeds {:e}", cfg.fit_residual));
    }
    if !angles_ok {
        notes.push(format!("interior angles {angles:?} off the gear pattern"));
    }
    if m.diagnostics.not_univalent_evidence {
        notes.push("map has a pole in the disk".into());
    }
    let crossings = self_intersections(&poly);
    if !crossings.is_empty() {
        notes.push(format!("boundary trace crosses itself ({} crossings)", crossings.len()));
    }
    // A univalent ℝ-symmetric image meets the real axis only at f(±1).
    let upper_leaves = m
        .boundary
        .iter()
        .filter(|r| r.theta > 0.0 && r.theta < PI)
        .map(|r| r.limit.im)
        .chain([vertices[0].im, vertices[1].im])
        .any(|y| y <= 0.0);
    if upper_leaves {
        notes.push("upper half of the trace leaves the upper half-plane".into());
    }
    if symmetry_defect > cfg.symmetry_tol {
        notes.push(format!("tooth carriers not conjugate (defect {symmetry_defect:e})"));
    }
    let simple = crossings.is_empty() && !upper_leaves;
    if fits_ok && angles_ok && simple && !m.diagnostics.not_univalent_evidence {
        let straight = |k: usize| {
            let chord = (vertices[k] - vertices[(k + 3) % 4]).norm();
            sagitta(&edges[k], chord) < cfg.straight_tol * scale
        };
        let concentric = match (edges[0].carrier, edges[2].carrier) {
            (
                GeneralizedCircle::Circle {
                    center: cb,
                    radius: _,
                },
                GeneralizedCircle::Circle {
                    center: ca,
                    radius: ra,
                },
            ) => (ca - cb).norm() < cfg.concentric_tol * ra,
            _ => false,
        };
        classification = if straight(1) && straight(3) && concentric {
            Classification::Gear
        } else {
            match tooth_intersection {
                CircleIntersection::TwoPoints(..) => Classification::Pregear,
                CircleIntersection::Tangent(p) => match p.finite() {
                    Some(b) => {
                        let da = edges[2].carrier.distance(b);
                        let db = edges[0].carrier.distance(b);
                        if da <= db {
                            Classification::DegenerateMinus
                        } else {
                            Classification::DegeneratePlus
                        }
                    }
                    None => Classification::Invalid,
                },
                _ => Classification::Invalid,
            }
        };
    }
    if classification == Classification::Invalid && notes.is_empty() {
        let kind = match tooth_intersection {
            CircleIntersection::Disjoint => "disjoint",
            CircleIntersection::Coincident => "coincident",
            _ => "tangent at infinity",
        };
        notes.push(format!("tooth circles are {kind}"));
    }
    Ok(PregearDescription {
        edges,
        vertices,
        vertex_estimates: estimates,
        interior_angles: angles,
        classification,
        tooth_intersection,
        tangency_gap: gap,
        symmetry_defect,
        scale,
        f_plus_one,
        f_minus_one,
        notes,
    })
}

/// Result of sending a pregear to the standard gear.
#[derive(Debug, Clone, PartialEq)]
pub struct GearNormalization {
    /// `T⁻¹` in the notation `T⁻¹(w) = (w − b_int)/(w − b_ext)`, rescaled.
    pub transform: Mobius,
    pub params: GearParams,
    /// Tooth intersection point sent to 0.
    pub interior_point: Complex64,
    /// The other intersection point, sent to ∞.
    pub exterior_point: ExtPoint,
    /// Normalized curvature of the image tooth edges.
    pub tooth_curvature: f64,
    /// Offset of the image A- and B-circle centers from 0, relative to A's radius.
    pub center_offset: f64,
}

/// The Möbius map taking a pregear (or gear) to `G_{β,γ}` and the measured
/// `(β, γ)`.
pub fn normalize_to_gear(d: &PregearDescription, m: &MapSolution) -> Result<GearNormalization> {
    if !d.classification.is_pregear() {
        return Err(GearError::NotPregear(format!(
            "classification is {}",
            d.classification.name()
        )));
    }
    let (p, q) = match d.tooth_intersection {
        CircleIntersection::TwoPoints(p, q) => (p, q),
        _ => return Err(GearError::NotPregear("tooth circles do not meet in two points".into())),
    };
    let poly = m.boundary_polygon();
    let inside = |x: ExtPoint| x.finite().is_some_and(|z| winding_number(&poly, z) != 0);
    let (b_int, b_ext) = match (inside(p), inside(q)) {
        (true, false) => (p.finite().unwrap(), q),
        (false, true) => (q.finite().unwrap(), p),
        (a, b) => {
            return Err(GearError::NotPregear(format!(
                "expected exactly one interior tooth intersection, got {a} and {b}"
            )))
        }
    };
    let one = Complex64::new(1.0, 0.0);
    let t0 = match b_ext {
        ExtPoint::Finite(e) => Mobius::zero_pole(b_int, e)?,
        ExtPoint::Infinity => Mobius::affine(one, -b_int)?,
    };
    let img = |t: &Mobius, w: Complex64| t.apply_finite(w).ok_or(GearError::DegenerateMobius);
    let a_img = t0.apply_circle(&d.edge(ArcTag::AArc).carrier)?;
    let ra = match a_img {
        GeneralizedCircle::Circle { radius, .. } => radius,
        _ => return Err(GearError::NotPregear("A-arc image is a line".into())),
    };
    let u = img(&t0, d.f_plus_one)?;
    let phase = u.conj() / u.norm();
    let s = phase / ra;
    let t = Mobius::affine(s, Complex64::new(0.0, 0.0))?.compose(&t0);

    let a_c = t.apply_circle(&d.edge(ArcTag::AArc).carrier)?;
    let b_c = t.apply_circle(&d.edge(ArcTag::BArc).carrier)?;
    let (ca, ra, cb, rb) = match (a_c, b_c) {
        (
            GeneralizedCircle::Circle {
                center: ca,
                radius: ra,
            },
            GeneralizedCircle::Circle {
                center: cb,
                radius: rb,
            },
        ) => (ca, ra, cb, rb),
        _ => return Err(GearError::NotPregear("arc images are not circles".into())),
    };
    let v: Vec<Complex64> = d
        .vertices
        .iter()
        .map(|&w| img(&t, w))
        .collect::<Result<_>>()?;
    // Upper tooth vertices v0, v1 at angle γ; lower v2, v3 at −γ.
    let gamma = 0.25 * (v[0].arg() + v[1].arg() - v[2].arg() - v[3].arg());
    let beta = rb / ra;
    let tooth_curvature = [ArcTag::ToothUpper, ArcTag::ToothLower]
        .iter()
        .map(|&tag| {
            let w = [0.25, 0.5, 0.75].map(|f| {
                let (t1, t2) = m.prevertices;
                let (a, b) = tag.interval(t1, t2);
                img(&t, nearest_fraction(&m.arc_ordered(tag), a, b - a, f)).unwrap_or(one)
            });
            circle_through_three_points(w[0], w[1], w[2])
                .map(|c| c.curvature() * rb)
                .unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max);
    let params = GearParams::new(beta, gamma)?;
    Ok(GearNormalization {
        transform: t,
        params,
        interior_point: b_int,
        exterior_point: b_ext,
        tooth_curvature,
        center_offset: ca.norm().max(cb.norm()) / ra,
    })
}

/// Signed curvatures of the upper and lower tooth carriers: `±1/R` with the
/// sign of the imaginary part of the center, 0 for a straight edge.
pub fn tooth_curvature(m: &MapSolution) -> Result<(f64, f64)> {
    let poly = m.boundary_polygon();
    let scale = poly.iter().map(|p| p.norm()).fold(0.0, f64::max).max(1e-300);
    let signed = |tag| -> Result<f64> {
        let e = fit_edge(m, tag, scale)?;
        Ok(match e.carrier {
            GeneralizedCircle::Circle { center, radius } => center.im.signum() / radius,
            GeneralizedCircle::Line { .. } => 0.0,
        })
    };
    Ok((signed(ArcTag::ToothUpper)?, signed(ArcTag::ToothLower)?))
}
