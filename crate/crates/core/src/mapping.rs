//! Conformal maps of the disk sampled along radial rays.
//!
//! Three constructions are provided:
//!
//! * [`solve_schwarzian_ivp`]: `f = u1/u0` for `u″ + ½R u = 0`, which has
//!   `S_f = R` and the normalization `f(0) = 0, f′(0) = 1, f″(0) = 0`;
//! * [`solve_goodman`]: the direct gear map with `f′/f = (1/z)√(P2/P1)`;
//! * [`sc_integral`]: the degenerate Schwarz–Christoffel integrals.
//!
//! Rays end at `r = 1` except those aimed at a prevertex, which stop at
//! `1 − ε` and report a Richardson estimate of the limit from the radii
//! `1 − 4ε, 1 − 2ε, 1 − ε`.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{domain, GearError, Result};
use crate::geometry::{ExtPoint, Mobius};
use crate::ode::{integrate_to_stops, OdeOptions, OdeStats};
use crate::quadrature::TanhSinh;
use crate::schwarzian::{check_t, PreverticesPair, RationalSchwarzian, SchwarzianKind, Side};

/// Closest approach to the pole `∓1` allowed for a Schwarz–Christoffel path.
pub const SC_POLE_TOL: f64 = 1e-8;

/// Prevertex partition used for `R ≡ 0`, which has no prevertices of its own.
pub const NOMINAL_PARTITION: (f64, f64) = (PI / 4.0, 3.0 * PI / 4.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Boundary offset `ε` of the extrapolation radii.
    pub eps: f64,
    /// Uniform rays over the full circle.
    pub rays: usize,
    pub samples_per_ray: usize,
    /// Geometrically clustered rays on each side of every prevertex.
    pub cluster_per_side: usize,
    pub cluster_ratio: f64,
    /// Count zeros of `u0` by the argument principle on `|z| = 1 − ε`.
    pub winding: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            eps: 1e-4,
            rays: 64,
            samples_per_ray: 8,
            cluster_per_side: 6,
            cluster_ratio: 0.7,
            winding: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("abs_tol", self.abs_tol), ("rel_tol", self.rel_tol)] {
            if !(v > 0.0 && v <= 1e-3) {
                return Err(domain(name, v, "tolerance must lie in (0, 1e-3]"));
            }
        }
        if !(self.eps > 0.0 && self.eps <= 0.01) {
            return Err(domain("eps", self.eps, "boundary offset must lie in (0, 0.01]"));
        }
        if self.rays < 16 {
            return Err(domain("rays", self.rays as f64, "at least 16 rays are required"));
        }
        if self.samples_per_ray < 2 {
            return Err(domain(
                "samples_per_ray",
                self.samples_per_ray as f64,
                "at least 2 samples per ray",
            ));
        }
        if !(self.cluster_ratio > 0.0 && self.cluster_ratio < 1.0) {
            return Err(domain("cluster_ratio", self.cluster_ratio, "must lie in (0, 1)"));
        }
        Ok(())
    }

    fn ode(&self) -> OdeOptions {
        OdeOptions {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            ..Default::default()
        }
    }

    /// The three extrapolation radii `1 − 4ε, 1 − 2ε, 1 − ε`.
    pub fn boundary_radii(&self) -> [f64; 3] {
        [1.0 - 4.0 * self.eps, 1.0 - 2.0 * self.eps, 1.0 - self.eps]
    }
}

/// The four boundary arcs between consecutive prevertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArcTag {
    /// `|θ| < t1`, through `z = 1`.
    BArc,
    /// `t1 < θ < t2`.
    ToothUpper,
    /// `t2 < θ < 2π − t2`, through `z = −1`.
    AArc,
    /// `−t2 < θ < −t1`.
    ToothLower,
}

impl ArcTag {
    pub const ALL: [ArcTag; 4] = [
        ArcTag::BArc,
        ArcTag::ToothUpper,
        ArcTag::AArc,
        ArcTag::ToothLower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ArcTag::BArc => "b_arc",
            ArcTag::ToothUpper => "tooth_upper",
            ArcTag::AArc => "a_arc",
            ArcTag::ToothLower => "tooth_lower",
        }
    }

    fn mirror(self) -> Self {
        match self {
            ArcTag::ToothUpper => ArcTag::ToothLower,
            ArcTag::ToothLower => ArcTag::ToothUpper,
            t => t,
        }
    }

    /// Angular interval `(start, end)` with `start < end`, possibly below 0.
    pub fn interval(self, t1: f64, t2: f64) -> (f64, f64) {
        match self {
            ArcTag::BArc => (-t1, t1),
            ArcTag::ToothUpper => (t1, t2),
            ArcTag::AArc => (t2, TAU - t2),
            ArcTag::ToothLower => (-t2, -t1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RayKind {
    Arc(ArcTag),
    /// Index into `[e^{it1}, e^{it2}, e^{−it2}, e^{−it1}]`.
    Prevertex(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub z: Complex64,
    pub f: Complex64,
    pub df: Complex64,
    pub d2f: Complex64,
}

/// Boundary data of one ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryRay {
    /// Angle in `[0, 2π)`.
    pub theta: f64,
    pub kind: RayKind,
    /// `f` at `1 − 4ε, 1 − 2ε, 1 − ε`.
    pub values: [Complex64; 3],
    /// `f(e^{iθ})` for arc rays; the Richardson estimate for prevertex rays.
    pub limit: Complex64,
    /// `u0(1 − ε)` for Schwarzian maps.
    pub u0_edge: Option<Complex64>,
}

/// Richardson combination cancelling the `h` and `h²` terms of a
/// trace sampled at `h = 4ε, 2ε, ε`.
pub fn richardson(values: &[Complex64; 3]) -> Complex64 {
    (8.0 * values[2] - 6.0 * values[1] + values[0]) / 3.0
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapSource {
    Schwarzian { kind: SchwarzianKind, lambda: f64 },
    Goodman { t1: f64, t2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    /// `max |u0 u1′ − u1 u0′ − 1|` over every accepted step.
    pub max_wronskian_drift: Option<f64>,
    /// Number of zeros of `u0` inside `|z| < 1 − ε`, i.e. poles of `f`.
    pub u0_winding: Option<i64>,
    /// Set when `f` has a pole in the disk, so it cannot be a gear map.
    pub not_univalent_evidence: bool,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rays: usize,
}

/// A sampled conformal map.
#[derive(Debug, Clone, PartialEq)]
pub struct MapSolution {
    pub source: MapSource,
    /// `(t1, t2)` of the prevertex partition.
    pub prevertices: (f64, f64),
    pub eps: f64,
    pub samples: Vec<Sample>,
    /// Sorted by angle.
    pub boundary: Vec<BoundaryRay>,
    pub diagnostics: Diagnostics,
    /// Möbius map applied after the solve; identity for a fresh solution.
    pub transform: Mobius,
}

impl MapSolution {
    pub fn arc(&self, tag: ArcTag) -> impl Iterator<Item = &BoundaryRay> {
        self.boundary
            .iter()
            .filter(move |r| r.kind == RayKind::Arc(tag))
    }

    /// Rays of an arc ordered along the direction of increasing angle.
    pub fn arc_ordered(&self, tag: ArcTag) -> Vec<BoundaryRay> {
        let (t1, t2) = self.prevertices;
        let (start, _) = tag.interval(t1, t2);
        let mut v: Vec<BoundaryRay> = self.arc(tag).copied().collect();
        v.sort_by(|a, b| {
            let pa = (a.theta - start).rem_euclid(TAU);
            let pb = (b.theta - start).rem_euclid(TAU);
            pa.total_cmp(&pb)
        });
        v
    }

    pub fn prevertex_ray(&self, k: usize) -> Option<&BoundaryRay> {
        self.boundary.iter().find(|r| r.kind == RayKind::Prevertex(k))
    }

    /// Boundary value at the ray whose angle is nearest `theta`.
    pub fn boundary_value_near(&self, theta: f64) -> Option<Complex64> {
        self.boundary
            .iter()
            .min_by(|a, b| {
                angle_gap(a.theta, theta).total_cmp(&angle_gap(b.theta, theta))
            })
            .map(|r| r.limit)
    }

    /// The closed boundary polygon through all ray limits.
    pub fn boundary_polygon(&self) -> Vec<Complex64> {
        self.boundary.iter().map(|r| r.limit).collect()
    }

    /// Post-composition with a Möbius map `T`: samples, derivatives and
    /// boundary data of `T ∘ f`.
    pub fn transformed(&self, t: &Mobius) -> MapSolution {
        let inf = Complex64::new(f64::INFINITY, f64::INFINITY);
        let img = |w: Complex64| match t.apply(ExtPoint::Finite(w)) {
            ExtPoint::Finite(v) => v,
            ExtPoint::Infinity => inf,
        };
        let samples = self
            .samples
            .iter()
            .map(|s| {
                let (d1, d2) = t.derivatives(s.f);
                Sample {
                    z: s.z,
                    f: img(s.f),
                    df: d1 * s.df,
                    d2f: d2 * s.df * s.df + d1 * s.d2f,
                }
            })
            .collect();
        let boundary = self
            .boundary
            .iter()
            .map(|r| BoundaryRay {
                values: r.values.map(img),
                limit: img(r.limit),
                ..*r
            })
            .collect();
        MapSolution {
            source: self.source.clone(),
            prevertices: self.prevertices,
            eps: self.eps,
            samples,
            boundary,
            diagnostics: self.diagnostics,
            transform: t.compose(&self.transform),
        }
    }
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

#[derive(Debug, Clone, Copy)]
struct RaySpec {
    theta: f64,
    dir: Complex64,
    kind: RayKind,
}

/// Ray layout for prevertices `(t1, t2)`: a uniform grid, fixed fractions of
/// each arc, the prevertex rays, and geometric clusters around each prevertex.
/// The layout is mirror-symmetric with conjugate directions, so conjugate rays
/// integrate identically.
fn ray_layout(t1: f64, t2: f64, cfg: &SolverConfig) -> Vec<RaySpec> {
    let mut upper: Vec<f64> = Vec::new();
    let n = cfg.rays;
    for j in 0..=n / 2 {
        upper.push(TAU * j as f64 / n as f64);
    }
    for f in [0.25, 0.5, 0.75] {
        upper.push(t1 * (2.0 * f - 1.0));
        upper.push(t1 + (t2 - t1) * f);
        upper.push(t2 + (TAU - 2.0 * t2) * f);
    }
    upper.push(0.0);
    upper.push(PI);
    let base = PI / n as f64;
    let sides = [(t1, t1, t2 - t1), (t2, t2 - t1, PI - t2)];
    for (tk, left, right) in sides {
        for (w, sign) in [(left, -1.0), (right, 1.0)] {
            let delta = base.min(0.45 * w);
            for j in 0..cfg.cluster_per_side {
                upper.push(tk + sign * delta * cfg.cluster_ratio.powi(j as i32));
            }
        }
    }
    let mut upper: Vec<f64> = upper
        .into_iter()
        .filter(|&a| (-1e-15..=PI + 1e-15).contains(&a))
        .filter(|&a| (a - t1).abs() > 1e-9 && (a - t2).abs() > 1e-9)
        .map(|a| a.clamp(0.0, PI))
        .collect();
    upper.sort_by(f64::total_cmp);
    upper.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let tag_of = |a: f64| {
        if a < t1 {
            ArcTag::BArc
        } else if a < t2 {
            ArcTag::ToothUpper
        } else {
            ArcTag::AArc
        }
    };
    let mut specs = Vec::new();
    for &a in &upper {
        let dir = if a == 0.0 {
            Complex64::new(1.0, 0.0)
        } else if a == PI {
            Complex64::new(-1.0, 0.0)
        } else {
            Complex64::from_polar(1.0, a)
        };
        let kind = RayKind::Arc(tag_of(a));
        specs.push(RaySpec { theta: a, dir, kind });
        if a > 0.0 && a < PI {
            specs.push(RaySpec {
                theta: TAU - a,
                dir: dir.conj(),
                kind: RayKind::Arc(tag_of(a).mirror()),
            });
        }
    }
    let p1 = Complex64::from_polar(1.0, t1);
    let p2 = Complex64::from_polar(1.0, t2);
    specs.push(RaySpec { theta: t1, dir: p1, kind: RayKind::Prevertex(0) });
    specs.push(RaySpec { theta: t2, dir: p2, kind: RayKind::Prevertex(1) });
    specs.push(RaySpec { theta: TAU - t2, dir: p2.conj(), kind: RayKind::Prevertex(2) });
    specs.push(RaySpec { theta: TAU - t1, dir: p1.conj(), kind: RayKind::Prevertex(3) });
    specs.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    specs
}

/// Radii at which a ray is evaluated: interior samples, the extrapolation
/// radii and, for arc rays, the unit circle.
fn ray_stops(cfg: &SolverConfig, to_boundary: bool) -> Vec<f64> {
    let rb = cfg.boundary_radii();
    let mut v: Vec<f64> = (1..cfg.samples_per_ray)
        .map(|j| rb[0] * j as f64 / cfg.samples_per_ray as f64)
        .collect();
    v.extend_from_slice(&rb);
    if to_boundary {
        v.push(1.0);
    }
    v
}

struct RayOutput {
    samples: Vec<Sample>,
    boundary: BoundaryRay,
    drift: Option<f64>,
    stats: OdeStats,
}

trait RayModel: Sync {
    /// Integrates along `s ↦ s·dir` to each stop radius.
    fn ray(&self, dir: Complex64, stops: &[f64], opts: &OdeOptions) -> Result<RayResult>;
}

struct RayResult {
    samples: Vec<Sample>,
    u0: Vec<Complex64>,
    drift: Option<f64>,
    stats: OdeStats,
}

struct SchwarzianModel<'a> {
    r: &'a RationalSchwarzian,
}

fn c(y: &[f64], i: usize) -> Complex64 {
    Complex64::new(y[2 * i], y[2 * i + 1])
}

impl RayModel for SchwarzianModel<'_> {
    fn ray(&self, dir: Complex64, stops: &[f64], opts: &OdeOptions) -> Result<RayResult> {
        let r = self.r;
        let rhs = |s: f64, y: &[f64; 8]| -> Result<[f64; 8]> {
            let z = dir * s;
            let q = -0.5 * r.eval(z)?;
            let (u0, v0, u1, v1) = (c(y, 0), c(y, 1), c(y, 2), c(y, 3));
            let d = [dir * v0, dir * q * u0, dir * v1, dir * q * u1];
            Ok([
                d[0].re, d[0].im, d[1].re, d[1].im, d[2].re, d[2].im, d[3].re, d[3].im,
            ])
        };
        let mut drift: f64 = 0.0;
        let y0 = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let (ys, stats) = integrate_to_stops(rhs, 0.0, y0, stops, opts, |_, y| {
            let w = c(y, 0) * c(y, 3) - c(y, 2) * c(y, 1);
            drift = drift.max((w - 1.0).norm());
        })?;
        let mut samples = Vec::with_capacity(ys.len());
        let mut u0s = Vec::with_capacity(ys.len());
        for (y, &s) in ys.iter().zip(stops) {
            let (u0, v0, u1, v1) = (c(y, 0), c(y, 1), c(y, 2), c(y, 3));
            let w = u0 * v1 - u1 * v0;
            samples.push(Sample {
                z: dir * s,
                f: u1 / u0,
                df: w / (u0 * u0),
                d2f: -2.0 * w * v0 / (u0 * u0 * u0),
            });
            u0s.push(u0);
        }
        Ok(RayResult {
            samples,
            u0: u0s,
            drift: Some(drift),
            stats,
        })
    }
}

/// Ingredients of the Goodman map at `z`: `s = √(P2/P1)`, `m = (s − 1)/z`
/// and `σ = s′/s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoodmanParts {
    pub s: Complex64,
    pub m: Complex64,
    pub sigma: Complex64,
    pub p1: Complex64,
    pub p2: Complex64,
}

/// `√P` for `P = (1 − z e^{iφ})(1 − z e^{−iφ})`, continuous on the closed disk.
fn sqrt_quad(e: Complex64, z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    (one - z * e).sqrt() * (one - z * e.conj()).sqrt()
}

pub fn goodman_parts(p: &PreverticesPair, z: Complex64) -> GoodmanParts {
    let (c1, c2) = (p.t1().cos(), p.t2().cos());
    let e1 = Complex64::from_polar(1.0, p.t1());
    let e2 = Complex64::from_polar(1.0, p.t2());
    let p1 = z * z - 2.0 * c1 * z + 1.0;
    let p2 = z * z - 2.0 * c2 * z + 1.0;
    let r1 = sqrt_quad(e1, z);
    let r2 = sqrt_quad(e2, z);
    let s = r2 / r1;
    let m = 2.0 * (c1 - c2) / (p1 * (s + 1.0));
    let sigma = (z - c2) / p2 - (z - c1) / p1;
    GoodmanParts { s, m, sigma, p1, p2 }
}

struct GoodmanModel {
    p: PreverticesPair,
}

impl RayModel for GoodmanModel {
    fn ray(&self, dir: Complex64, stops: &[f64], opts: &OdeOptions) -> Result<RayResult> {
        let p = self.p;
        // L = log(f/z), dL/dz = m.
        let rhs = |s: f64, _y: &[f64; 2]| -> Result<[f64; 2]> {
            let d = dir * goodman_parts(&p, dir * s).m;
            Ok([d.re, d.im])
        };
        let (ys, stats) = integrate_to_stops(rhs, 0.0, [0.0, 0.0], stops, opts, |_, _| {})?;
        let samples = ys
            .iter()
            .zip(stops)
            .map(|(y, &s)| {
                let z = dir * s;
                let el = Complex64::new(y[0], y[1]).exp();
                let g = goodman_parts(&p, z);
                Sample {
                    z,
                    f: z * el,
                    df: el * g.s,
                    d2f: el * g.s * (g.m + g.sigma),
                }
            })
            .collect();
        Ok(RayResult {
            samples,
            u0: Vec::new(),
            drift: None,
            stats,
        })
    }
}

fn run_ray(model: &dyn RayModel, spec: &RaySpec, cfg: &SolverConfig) -> Result<RayOutput> {
    let to_boundary = matches!(spec.kind, RayKind::Arc(_));
    let stops = ray_stops(cfg, to_boundary);
    let res = model.ray(spec.dir, &stops, &cfg.ode()).map_err(|e| match e {
        GearError::StepUnderflow { radius, .. } => GearError::StepUnderflow {
            theta: spec.theta,
            radius,
        },
        other => other,
    })?;
    let nb = cfg.samples_per_ray - 1;
    let values = [
        res.samples[nb].f,
        res.samples[nb + 1].f,
        res.samples[nb + 2].f,
    ];
    let limit = if to_boundary {
        res.samples[nb + 3].f
    } else {
        richardson(&values)
    };
    let u0_edge = res.u0.get(nb + 2).copied();
    let mut samples = res.samples;
    if to_boundary {
        samples.truncate(nb + 3);
    }
    Ok(RayOutput {
        samples,
        boundary: BoundaryRay {
            theta: spec.theta,
            kind: spec.kind,
            values,
            limit,
            u0_edge,
        },
        drift: res.drift,
        stats: res.stats,
    })
}

fn assemble(
    model: &dyn RayModel,
    source: MapSource,
    (t1, t2): (f64, f64),
    cfg: &SolverConfig,
) -> Result<MapSolution> {
    cfg.validate()?;
    let specs = ray_layout(t1, t2, cfg);
    let outs: Vec<Result<RayOutput>> = specs.par_iter().map(|s| run_ray(model, s, cfg)).collect();
    let mut samples = vec![Sample {
        z: Complex64::new(0.0, 0.0),
        f: Complex64::new(0.0, 0.0),
        df: Complex64::new(1.0, 0.0),
        d2f: match &source {
            MapSource::Goodman { t1, t2 } => Complex64::new(2.0 * (t1.cos() - t2.cos()), 0.0),
            MapSource::Schwarzian { .. } => Complex64::new(0.0, 0.0),
        },
    }];
    let mut boundary = Vec::with_capacity(specs.len());
    let mut diag = Diagnostics {
        rays: specs.len(),
        ..Default::default()
    };
    for o in outs {
        let o = o?;
        samples.extend(o.samples);
        boundary.push(o.boundary);
        if let Some(d) = o.drift {
            let cur = diag.max_wronskian_drift.unwrap_or(0.0);
            diag.max_wronskian_drift = Some(cur.max(d));
        }
        diag.accepted_steps += o.stats.accepted;
        diag.rejected_steps += o.stats.rejected;
    }
    if cfg.winding {
        if let MapSource::Schwarzian { .. } = source {
            diag.u0_winding = u0_winding(model, &boundary, cfg);
            diag.not_univalent_evidence = diag.u0_winding.is_some_and(|w| w != 0);
        }
    }
    Ok(MapSolution {
        source,
        prevertices: (t1, t2),
        eps: cfg.eps,
        samples,
        boundary,
        diagnostics: diag,
        transform: Mobius::identity(),
    })
}

/// Winding number of `u0` on `|z| = 1 − ε`, refining the ray grid until
/// consecutive samples differ in argument by less than `π/2`.
fn u0_winding(model: &dyn RayModel, boundary: &[BoundaryRay], cfg: &SolverConfig) -> Option<i64> {
    let r = 1.0 - cfg.eps;
    let opts = cfg.ode();
    let u0_at = |theta: f64| -> Option<Complex64> {
        model
            .ray(Complex64::from_polar(1.0, theta), &[r], &opts)
            .ok()
            .and_then(|res| res.u0.first().copied())
    };
    let pts: Vec<(f64, Complex64)> = boundary
        .iter()
        .filter_map(|b| b.u0_edge.map(|u| (b.theta, u)))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    fn segment(
        a: (f64, Complex64),
        b: (f64, Complex64),
        depth: u32,
        u0_at: &dyn Fn(f64) -> Option<Complex64>,
    ) -> Option<f64> {
        let d = (b.1 / a.1).arg();
        if d.abs() < FRAC_PI_2 {
            return Some(d);
        }
        if depth == 0 {
            return None;
        }
        let mid = 0.5 * (a.0 + b.0);
        let um = u0_at(mid)?;
        Some(segment(a, (mid, um), depth - 1, u0_at)? + segment((mid, um), b, depth - 1, u0_at)?)
    }
    let mut total = 0.0;
    for i in 0..pts.len() {
        let a = pts[i];
        let mut b = pts[(i + 1) % pts.len()];
        if i + 1 == pts.len() {
            b.0 += TAU;
        }
        total += segment(a, b, 12, &u0_at)?;
    }
    Some((total / TAU).round() as i64)
}

/// Solves `S_f = R` with `f(0) = 0, f′(0) = 1, f″(0) = 0` on every ray.
pub fn solve_schwarzian_ivp(r: &RationalSchwarzian, cfg: &SolverConfig) -> Result<MapSolution> {
    let partition = r.prevertex_angles().unwrap_or(NOMINAL_PARTITION);
    let source = MapSource::Schwarzian {
        kind: r.kind(),
        lambda: r.lambda(),
    };
    assemble(&SchwarzianModel { r }, source, partition, cfg)
}

/// The gear map onto the standard gear with center 0: `f′/f = (1/z)√(P2/P1)`,
/// `f(0) = 0`, `f′(0) = 1`.
pub fn solve_goodman(p: &PreverticesPair, cfg: &SolverConfig) -> Result<MapSolution> {
    let source = MapSource::Goodman {
        t1: p.t1(),
        t2: p.t2(),
    };
    assemble(&GoodmanModel { p: *p }, source, (p.t1(), p.t2()), cfg)
}

fn check_point(z: Complex64) -> Result<()> {
    if !(z.norm() < 1.0) {
        return Err(domain("z", z.norm(), "evaluation point must lie in the open disk"));
    }
    Ok(())
}

/// `f`, `f′`, `f″` of the Schwarzian map at one point, along the ray through it.
pub fn evaluate_schwarzian(
    r: &RationalSchwarzian,
    z: Complex64,
    cfg: &SolverConfig,
) -> Result<Sample> {
    check_point(z)?;
    if z.norm() == 0.0 {
        return Ok(Sample {
            z,
            f: z,
            df: Complex64::new(1.0, 0.0),
            d2f: Complex64::new(0.0, 0.0),
        });
    }
    let dir = z / z.norm();
    let res = SchwarzianModel { r }.ray(dir, &[z.norm()], &cfg.ode())?;
    Ok(Sample { z, ..res.samples[0] })
}

/// `f`, `f′`, `f″` of the Goodman map at one point.
pub fn evaluate_goodman(p: &PreverticesPair, z: Complex64, cfg: &SolverConfig) -> Result<Sample> {
    check_point(z)?;
    if z.norm() == 0.0 {
        return Ok(Sample {
            z,
            f: z,
            df: Complex64::new(1.0, 0.0),
            d2f: Complex64::new(2.0 * (p.t1().cos() - p.t2().cos()), 0.0),
        });
    }
    let dir = z / z.norm();
    let res = GoodmanModel { p: *p }.ray(dir, &[z.norm()], &cfg.ode())?;
    Ok(Sample { z, ..res.samples[0] })
}

/// Derivative of the degenerate Schwarz–Christoffel map,
/// `(ζ ∓ 1)^{-2} √((ζ² + 2cζ + 1)/(ζ² − 2cζ + 1))`, with the root equal to 1
/// at the origin.
pub fn sc_derivative(t: f64, side: Side, zeta: Complex64) -> Complex64 {
    let e = Complex64::from_polar(1.0, t);
    let zp = zeta - side.pole();
    sqrt_quad(-e, zeta) / sqrt_quad(e, zeta) / (zp * zp)
}

/// `f̃_t(z) = ∫_0^z f̃′(ζ) dζ` along the segment from the origin.
///
/// `z` may lie on the unit circle, including at a prevertex; the path may not
/// come within [`SC_POLE_TOL`] of the pole.
pub fn sc_integral(t: f64, side: Side, z: Complex64, cfg: &SolverConfig) -> Result<Complex64> {
    check_t(t)?;
    if !(z.norm() <= 1.0 + 1e-15) {
        return Err(domain("z", z.norm(), "point must lie in the closed disk"));
    }
    let pole = Complex64::new(side.pole(), 0.0);
    // Nearest point of the segment [0, z] to the pole.
    let proj = if z.norm_sqr() == 0.0 {
        0.0
    } else {
        ((pole * z.conj()).re / z.norm_sqr()).clamp(0.0, 1.0)
    };
    let dist = (pole - z * proj).norm();
    if dist < SC_POLE_TOL {
        return Err(GearError::PathTooClose {
            re: side.pole(),
            im: 0.0,
            distance: dist,
        });
    }
    if z.norm() == 0.0 {
        return Ok(z);
    }
    let e = Complex64::from_polar(1.0, t);
    let one = Complex64::new(1.0, 0.0);
    let w = [z * e, z * e.conj()];
    // 1 − s w = (1 − s) + s(1 − w) keeps the endpoint distance exact.
    let quad = TanhSinh {
        abs_tol: cfg.abs_tol * 1e-3,
        rel_tol: cfg.rel_tol * 1e-3,
        ..Default::default()
    };
    let res = quad.integrate_complex(0.0, 1.0, |s, _, db| {
        let num = (one + s * w[0]).sqrt() * (one + s * w[1]).sqrt();
        let den = (db + s * (one - w[0])).sqrt() * (db + s * (one - w[1])).sqrt();
        let zp = s * z - pole;
        num / den / (zp * zp) * z
    })?;
    Ok(res.value)
}

/// The four finite vertices `f̃(z_k)` for `z_k = e^{it}, e^{i(π−t)}, e^{−i(π−t)}, e^{−it}`.
pub fn sc_vertices(t: f64, side: Side, cfg: &SolverConfig) -> Result<[Complex64; 4]> {
    let angles = [t, PI - t, -(PI - t), -t];
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (o, a) in out.iter_mut().zip(angles) {
        *o = sc_integral(t, side, Complex64::from_polar(1.0, a), cfg)?;
    }
    Ok(out)
}

/// Interior angles of the image at the four finite vertices, each from the
/// straight edges through the vertex and boundary points `δ` away on either
/// side.
pub fn sc_interior_angles(t: f64, side: Side, cfg: &SolverConfig) -> Result<[f64; 4]> {
    let angles = [t, PI - t, PI + t, TAU - t];
    let verts = sc_vertices(t, side, cfg)?;
    let delta = 0.25 * t.min(FRAC_PI_2 - t);
    let mut out = [0.0; 4];
    for k in 0..4 {
        let before = sc_integral(t, side, Complex64::from_polar(1.0, angles[k] - delta), cfg)?;
        let after = sc_integral(t, side, Complex64::from_polar(1.0, angles[k] + delta), cfg)?;
        let d_in = verts[k] - before;
        let d_out = after - verts[k];
        out[k] = PI - (d_out / d_in).arg();
    }
    Ok(out)
}
