//! Gear parameters from prevertices and back, the conformal module `M(t)`,
//! the region of gearlikeness and the module sweep over `γ`.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::elliptic::agm;
use crate::error::{domain, GearError, Result};
use crate::gear_geometry::{extract_pregear, normalize_to_gear, Classification, GearParams};
use crate::geometry::symmetrize_prevertices;
use crate::mapping::{goodman_parts, solve_schwarzian_ivp, SolverConfig};
use crate::quadrature::TanhSinh;
use crate::schwarzian::{
    build_general, build_symmetric, check_t, lambda_bounds, nehari_bounds, PreverticesPair,
    SymmetricParams,
};

/// `log β` and `γ` with the change between the last two quadrature levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaGammaIntegrals {
    pub log_beta: f64,
    pub gamma: f64,
    pub log_beta_error: f64,
    pub gamma_error: f64,
}

impl BetaGammaIntegrals {
    pub fn params(&self) -> GearParams {
        GearParams {
            beta: self.log_beta.exp(),
            gamma: self.gamma,
        }
    }
}

/// `log β = ∫_{t1}^{t2} √((cos θ − cos t2)/(cos t1 − cos θ)) dθ` and
/// `γ = ∫_0^{t1} √((cos θ − cos t2)/(cos θ − cos t1)) dθ`.
pub fn beta_gamma_integrals(p: &PreverticesPair) -> Result<GearParams> {
    Ok(beta_gamma_integrals_with(p, &TanhSinh::default())?.params())
}

pub fn beta_gamma_integrals_with(p: &PreverticesPair, q: &TanhSinh) -> Result<BetaGammaIntegrals> {
    let (t1, t2) = (p.t1(), p.t2());
    // cos a − cos b = 2 sin((a + b)/2) sin((b − a)/2), with b − a supplied
    // by the quadrature as an endpoint distance.
    let diff = |a: f64, b: f64, gap: f64| 2.0 * (0.5 * (a + b)).sin() * (0.5 * gap).sin();
    let g = q.integrate(0.0, t1, |x, _, to_t1| {
        (diff(x, t2, t2 - x) / diff(x, t1, to_t1)).sqrt()
    })?;
    let lb = q.integrate(t1, t2, |x, from_t1, to_t2| {
        (diff(x, t2, to_t2) / diff(t1, x, from_t1)).sqrt()
    })?;
    Ok(BetaGammaIntegrals {
        log_beta: lb.value,
        gamma: g.value,
        log_beta_error: lb.error,
        gamma_error: g.error,
    })
}

fn log_beta_gamma(t1: f64, t2: f64) -> Result<(f64, f64)> {
    let r = beta_gamma_integrals_with(&PreverticesPair::new(t1, t2)?, &TanhSinh::default())?;
    Ok((r.log_beta, r.gamma))
}

/// Largest accepted residual in `β` and in `γ`.
pub const INVERSION_TOL: f64 = 1e-9;

/// Smallest `t1/t2` tried when bracketing large `β`.
const T1_FLOOR: f64 = 1e-13;

fn inner_t1(t2: f64, target: f64, width: f64) -> Result<f64> {
    let mut lo = T1_FLOOR * t2;
    let mut hi = t2 * (1.0 - 1e-12);
    if log_beta_gamma(lo, t2)?.0 < target {
        return Err(GearError::Inversion(format!(
            "log β = {target} is out of reach for t2 = {t2}"
        )));
    }
    // log β decreases from ∞ to 0 as t1 runs from 0 to t2.
    while hi - lo > width * t2 {
        let mid = 0.5 * (lo + hi);
        if log_beta_gamma(mid, t2)?.0 > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Prevertex angles `(t1, t2)` of the Goodman map onto `G_{β,γ}`.
pub fn invert_beta_gamma(g: GearParams) -> Result<PreverticesPair> {
    let g = GearParams::new(g.beta, g.gamma)?;
    let lb = g.beta.ln();
    // Along the level set of log β, γ increases from 0 to π with t2.
    let (mut lo, mut hi) = (1e-9, PI - 1e-9);
    let gamma_at = |t2: f64| -> Result<(f64, f64)> {
        let t1 = inner_t1(t2, lb, 1e-7)?;
        Ok((t1, log_beta_gamma(t1, t2)?.1))
    };
    if gamma_at(hi)?.1 < g.gamma || gamma_at(lo).is_ok_and(|v| v.1 > g.gamma) {
        return Err(GearError::Inversion(format!(
            "no bracket for γ = {} at β = {}",
            g.gamma, g.beta
        )));
    }
    while hi - lo > 1e-5 {
        let mid = 0.5 * (lo + hi);
        match gamma_at(mid) {
            Ok((_, gm)) if gm < g.gamma => lo = mid,
            Ok(_) => hi = mid,
            Err(_) => lo = mid,
        }
    }
    let t2 = 0.5 * (lo + hi);
    let t1 = inner_t1(t2, lb, 1e-7)?;
    let (t1, t2) = newton_polish(t1, t2, lb, g.gamma)?;
    let r = log_beta_gamma(t1, t2)?;
    let res_beta = (r.0.exp() - g.beta).abs();
    let res_gamma = (r.1 - g.gamma).abs();
    if res_beta > INVERSION_TOL * g.beta.max(1.0) || res_gamma > INVERSION_TOL {
        return Err(GearError::Inversion(format!(
            "residual ({res_beta:e}, {res_gamma:e}) above tolerance"
        )));
    }
    PreverticesPair::new(t1, t2)
}

fn newton_polish(mut t1: f64, mut t2: f64, lb: f64, gamma: f64) -> Result<(f64, f64)> {
    let resid = |a: f64, b: f64| -> Result<[f64; 2]> {
        let (l, g) = log_beta_gamma(a, b)?;
        Ok([l - lb, g - gamma])
    };
    let norm = |r: [f64; 2]| r[0].abs().max(r[1].abs());
    let mut r = resid(t1, t2)?;
    for _ in 0..30 {
        if norm(r) < 1e-14 {
            break;
        }
        let h1 = 1e-7 * t1;
        let h2 = 1e-7 * t2.min(PI - t2).min(t2 - t1).max(1e-12);
        let a = resid(t1 + h1, t2)?;
        let b = resid(t1, t2 + h2)?;
        let j = [
            [(a[0] - r[0]) / h1, (b[0] - r[0]) / h2],
            [(a[1] - r[1]) / h1, (b[1] - r[1]) / h2],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let d1 = (j[1][1] * r[0] - j[0][1] * r[1]) / det;
        let d2 = (j[0][0] * r[1] - j[1][0] * r[0]) / det;
        let mut step = 1.0;
        let mut improved = false;
        while step > 1e-4 {
            let (n1, n2) = (t1 - step * d1, t2 - step * d2);
            if n1 > 0.0 && n1 < n2 && n2 < PI {
                if let Ok(nr) = resid(n1, n2) {
                    if norm(nr) < norm(r) {
                        t1 = n1;
                        t2 = n2;
                        r = nr;
                        improved = true;
                        break;
                    }
                }
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok((t1, t2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModuleMethod {
    Agm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModuleValue {
    pub t: f64,
    pub m: f64,
    pub method: ModuleMethod,
}

/// Conformal module of the disk with vertices `±e^{±it}`: `2K(k)/K(k′)` with
/// `k = tan²(t/2)`.
pub fn conformal_module(t: f64) -> Result<ModuleValue> {
    if !(t > 0.0 && t < FRAC_PI_2) {
        return Err(domain("t", t, "module requires 0 < t < π/2"));
    }
    let h = 0.5 * t;
    let k = h.tan().powi(2);
    let kp = t.cos().sqrt() / h.cos().powi(2);
    // K(k) = π/(2 agm(1, k′)) and K(k′) = π/(2 agm(1, k)).
    Ok(ModuleValue {
        t,
        m: 2.0 * agm(1.0, k) / agm(1.0, kp),
        method: ModuleMethod::Agm,
    })
}

/// Schwarzian of the Goodman map onto the gear with prevertices `p`.
pub fn goodman_schwarzian(p: &PreverticesPair, z: Complex64) -> Complex64 {
    let (c1, c2) = (p.t1().cos(), p.t2().cos());
    let g = goodman_parts(p, z);
    let (m, sigma, s) = (g.m, g.sigma, g.s);
    let dp1 = 2.0 * (z - c1);
    let dp2 = 2.0 * (z - c2);
    let dsigma = (g.p2 - dp2 * (z - c2)) / (g.p2 * g.p2) - (g.p1 - dp1 * (z - c1)) / (g.p1 * g.p1);
    let dm = -m * (dp1 / g.p1 + s * sigma / (s + 1.0));
    let h = m + sigma;
    dm + dsigma - 0.5 * h * h
}

/// Points at which the accessory parameter is recovered.
pub const LAMBDA_PROBES: [Complex64; 4] = [
    Complex64::new(0.0, 0.0),
    Complex64::new(0.3, 0.0),
    Complex64::new(0.0, 0.5),
    Complex64::new(-0.2, -0.4),
];

pub const LAMBDA_SPREAD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaEstimate {
    pub lambda: f64,
    pub values: Vec<Complex64>,
    pub spread: f64,
}

/// The accessory parameter of the Goodman map: `(ψ0 − ½S)/ψ1`, which must
/// not depend on the evaluation point.
pub fn lambda_from_prevertices(p: &PreverticesPair) -> Result<f64> {
    Ok(lambda_estimate(p, &LAMBDA_PROBES)?.lambda)
}

pub fn lambda_estimate(p: &PreverticesPair, points: &[Complex64]) -> Result<LambdaEstimate> {
    let r = build_general(*p, 0.0);
    let values = points
        .iter()
        .map(|&z| Ok((r.psi0(z)? - 0.5 * goodman_schwarzian(p, z)) / r.psi1(z)?))
        .collect::<Result<Vec<_>>>()?;
    let mean = values.iter().sum::<Complex64>() / values.len() as f64;
    let spread = values
        .iter()
        .map(|v| (v - mean).norm())
        .fold(0.0, f64::max);
    if spread > LAMBDA_SPREAD_TOL || mean.im.abs() > LAMBDA_SPREAD_TOL {
        return Err(GearError::Convention(format!(
            "accessory parameter varies by {spread:e} across evaluation points"
        )));
    }
    Ok(LambdaEstimate {
        lambda: mean.re,
        values,
        spread,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeVerdict {
    pub lambda: f64,
    pub classification: Option<Classification>,
    pub not_univalent_evidence: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionRow {
    pub t: f64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    pub nehari_lower: f64,
    pub nehari_upper: f64,
    pub probes: Vec<ProbeVerdict>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionSample {
    pub rows: Vec<RegionRow>,
}

/// Offset of the probes outside and inside each endpoint.
pub const PROBE_OFFSET: f64 = 1e-3;

/// Solves and classifies the map for `R_{t,λ}`.
pub fn probe(t: f64, lambda: f64, cfg: &SolverConfig) -> ProbeVerdict {
    let run = || -> Result<(Classification, bool)> {
        let r = build_symmetric(SymmetricParams::new(t, lambda)?)?;
        let m = solve_schwarzian_ivp(&r, cfg)?;
        let d = extract_pregear(&m)?;
        Ok((d.classification, m.diagnostics.not_univalent_evidence))
    };
    match run() {
        Ok((c, nu)) => ProbeVerdict {
            lambda,
            classification: Some(c),
            not_univalent_evidence: nu,
            error: None,
        },
        Err(e) => ProbeVerdict {
            lambda,
            classification: None,
            not_univalent_evidence: matches!(e, GearError::NearPole { .. }),
            error: Some(e.to_string()),
        },
    }
}

/// Tabulates `λ_t^±` and the Nehari band; with `probes`, also classifies the
/// midpoint and the points [`PROBE_OFFSET`] on either side of each endpoint.
pub fn gearlike_region(tgrid: &[f64], probes: Option<&SolverConfig>) -> Result<RegionSample> {
    let rows = tgrid
        .par_iter()
        .map(|&t| {
            check_t(t)?;
            let (lm, lp) = lambda_bounds(t)?;
            let (nl, nu) = nehari_bounds(t)?;
            let probes = match probes {
                Some(cfg) => [
                    0.5 * (lm + lp),
                    lm - PROBE_OFFSET,
                    lm + PROBE_OFFSET,
                    lp - PROBE_OFFSET,
                    lp + PROBE_OFFSET,
                ]
                .iter()
                .map(|&l| probe(t, l, cfg))
                .collect(),
                None => Vec::new(),
            };
            Ok(RegionRow {
                t,
                lambda_minus: lm,
                lambda_plus: lp,
                nehari_lower: nl,
                nehari_upper: nu,
                probes,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionSample { rows })
}

/// `t_i = (π/2)·i/(n+1)` for `i = 1..=n`.
pub fn region_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| FRAC_PI_2 * i as f64 / (n + 1) as f64).collect()
}

/// Everything determined by a gear `G_{β,γ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GearPipeline {
    pub params: GearParams,
    pub t1: f64,
    pub t2: f64,
    pub q: f64,
    pub t: f64,
    pub lambda: f64,
    pub module: f64,
}

/// `(β, γ) → (t1, t2) → (q, t, λ) → M`.
pub fn gear_pipeline(g: GearParams) -> Result<GearPipeline> {
    let p = invert_beta_gamma(g)?;
    let (q, t) = symmetrize_prevertices(p.t1(), p.t2())?;
    let lambda = lambda_from_prevertices(&p)?;
    let module = conformal_module(t)?.m;
    Ok(GearPipeline {
        params: g,
        t1: p.t1(),
        t2: p.t2(),
        q,
        t,
        lambda,
        module,
    })
}

/// Measures `(β, γ)` of the map for `R_{t,λ}` by solving, classifying and
/// normalizing.
pub fn measure_gear(t: f64, lambda: f64, cfg: &SolverConfig) -> Result<GearParams> {
    let r = build_symmetric(SymmetricParams::new(t, lambda)?)?;
    let m = solve_schwarzian_ivp(&r, cfg)?;
    let d = extract_pregear(&m)?;
    Ok(normalize_to_gear(&d, &m)?.params)
}

/// `γ ↦ M(G_{β,γ})` on the grid.
pub fn module_gamma_sweep(beta: f64, gamma_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    gamma_grid
        .par_iter()
        .map(|&gamma| {
            let p = gear_pipeline(GearParams::new(beta, gamma)?)?;
            Ok((gamma, p.module))
        })
        .collect()
}

/// Index of the largest module in a sweep.
pub fn sweep_argmax(curve: &[(f64, f64)]) -> Option<usize> {
    curve
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gauss_quad::GaussJacobi;
    use std::num::NonZeroUsize;

    /// `∫_a^b (b − x)^α (x − a)^β g(x) dx` by Gauss–Jacobi.
    fn jacobi(a: f64, b: f64, alpha: f64, beta: f64, n: usize, g: impl Fn(f64) -> f64) -> f64 {
        let rule = GaussJacobi::new(
            NonZeroUsize::new(n).unwrap(),
            alpha.try_into().unwrap(),
            beta.try_into().unwrap(),
        );
        let half = 0.5 * (b - a);
        let s: f64 = rule
            .iter()
            .map(|(x, w)| w * g(a + half * (1.0 + x)))
            .sum();
        s * half.powf(alpha + beta + 1.0)
    }

    fn jacobi_oracle(t1: f64, t2: f64) -> (f64, f64) {
        let (c1, c2) = (t1.cos(), t2.cos());
        let n = 80;
        let gamma = jacobi(0.0, t1, -0.5, 0.0, n, |x| {
            ((x.cos() - c2) * (t1 - x) / (x.cos() - c1)).sqrt()
        });
        let log_beta = jacobi(t1, t2, 0.5, -0.5, n, |x| {
            ((x.cos() - c2) / (t2 - x) * (x - t1) / (c1 - x.cos())).sqrt()
        });
        (log_beta, gamma)
    }

    #[test]
    fn two_quadratures_agree() {
        for (t1, t2) in [(0.5, 1.0), (0.2, 2.5), (1.0, 1.3), (0.05, 0.6)] {
            let p = PreverticesPair::new(t1, t2).unwrap();
            let r = beta_gamma_integrals_with(&p, &TanhSinh::default()).unwrap();
            let (lb, g) = jacobi_oracle(t1, t2);
            assert!((r.log_beta - lb).abs() < 1e-10, "{t1} {t2} {}", r.log_beta - lb);
            assert!((r.gamma - g).abs() < 1e-10, "{t1} {t2} {}", r.gamma - g);
            assert!(r.log_beta_error < 1e-11 && r.gamma_error < 1e-11);
        }
    }

    #[test]
    fn integral_limits() {
        let t1 = 0.7;
        let p = PreverticesPair::new(t1, PI - 1e-6).unwrap();
        let g = beta_gamma_integrals(&p).unwrap();
        assert!((g.gamma - PI).abs() < 1e-9, "{}", g.gamma - PI);
        let want = 2.0 * (1.0 / (0.5 * t1).sin()).acosh();
        assert!((g.beta.ln() - want).abs() < 1e-9);

        let p = PreverticesPair::new(t1, t1 + 1e-9).unwrap();
        let g = beta_gamma_integrals(&p).unwrap();
        assert!((g.beta - 1.0).abs() < 1e-6);
        assert!((g.gamma - t1).abs() < 1e-6);
    }

    #[test]
    fn inversion_round_trip() {
        let p = PreverticesPair::new(0.5, 1.0).unwrap();
        let g = beta_gamma_integrals(&p).unwrap();
        let back = invert_beta_gamma(g).unwrap();
        assert!((back.t1() - 0.5).abs() < 1e-8);
        assert!((back.t2() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn inversion_limits() {
        let near_pi = invert_beta_gamma(GearParams::new(2.0, PI - 1e-3).unwrap()).unwrap();
        let mid = invert_beta_gamma(GearParams::new(2.0, 1.5).unwrap()).unwrap();
        assert!(near_pi.t2() > mid.t2() && near_pi.t2() > 3.0);
        let thin = invert_beta_gamma(GearParams::new(1.0 + 1e-4, 1.0).unwrap()).unwrap();
        assert!(thin.t2() - thin.t1() < 1e-2);
        assert!(GearParams::new(0.5, 1.0).is_err());
    }

    #[test]
    fn module_values() {
        let ts = 2.0 * 2f64.powf(-0.25).atan();
        assert!((conformal_module(ts).unwrap().m - 2.0).abs() < 1e-12);
        let mut prev = 0.0;
        for i in 1..=100 {
            let m = conformal_module(FRAC_PI_2 * i as f64 / 101.0).unwrap().m;
            assert!(m > prev);
            prev = m;
        }
        assert!(conformal_module(0.0).is_err() && conformal_module(FRAC_PI_2).is_err());
    }

    #[test]
    fn goodman_lambda_is_constant() {
        let p = PreverticesPair::new(0.5, 2.0).unwrap();
        let est = lambda_estimate(&p, &LAMBDA_PROBES).unwrap();
        assert!(est.spread < 1e-9);
        // The pullback to symmetric prevertices keeps λ.
        let (q, t) = symmetrize_prevertices(0.5, 2.0).unwrap();
        let r = build_general(p, est.lambda).pullback(q).unwrap();
        let sym = build_symmetric(SymmetricParams::new(t, est.lambda).unwrap()).unwrap();
        for z in [Complex64::new(0.1, 0.2), Complex64::new(-0.3, 0.0)] {
            let a = r.eval(z).unwrap();
            let b = sym.eval(z).unwrap();
            assert!((a - b).norm() < 1e-9 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn region_rows() {
        let s = gearlike_region(&region_grid(10), None).unwrap();
        assert_eq!(s.rows.len(), 10);
        for r in &s.rows {
            assert!(r.nehari_lower < r.lambda_minus && r.lambda_plus < r.nehari_upper);
            assert!((r.lambda_plus - r.lambda_minus - 0.5).abs() < 1e-15);
        }
    }
}
