//! The rational Schwarzians `R_{t1,t2,λ}` and `R_{t,λ}` of one-tooth gear maps.
//!
//! Convention throughout: `½R = ψ0 − λψ1`, where
//!
//! ```text
//! ψ1 = 4(cos t2 − cos t1) / (P1 P2),   ψ0 = N0(z) / (P1 P2)²,
//! P_k = z² − 2 cos t_k z + 1.
//! ```
//!
//! The representation is fully expanded with real coefficients, so conjugate
//! symmetry holds by construction and Horner evaluation stays well behaved
//! near `z = ±1`.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, GearError, Result};
use crate::geometry::{symmetrize_prevertices, DiskAutomorphism};
use crate::poly::Poly;

/// Distance below which an evaluation point is rejected as a pole.
pub const POLE_TOL: f64 = 1e-12;

/// Prevertex angles `0 < t1 < t2 < π` of `e^{±it1}` (angle π/2) and
/// `e^{±it2}` (angle 3π/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreverticesPair {
    t1: f64,
    t2: f64,
}

impl PreverticesPair {
    pub fn new(t1: f64, t2: f64) -> Result<Self> {
        if !(t1 > 0.0 && t1 < PI) {
            return Err(domain("t1", t1, "requires 0 < t1 < π"));
        }
        if !(t2 > t1 && t2 < PI) {
            return Err(domain("t2", t2, "requires t1 < t2 < π"));
        }
        Ok(Self { t1, t2 })
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    /// `[e^{it1}, e^{it2}, e^{−it2}, e^{−it1}]`.
    pub fn prevertices(&self) -> [Complex64; 4] {
        [
            Complex64::from_polar(1.0, self.t1),
            Complex64::from_polar(1.0, self.t2),
            Complex64::from_polar(1.0, -self.t2),
            Complex64::from_polar(1.0, -self.t1),
        ]
    }
}

/// Symmetric accessory parameters: prevertices `±e^{±it}`, `0 < t < π/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricParams {
    t: f64,
    lambda: f64,
}

impl SymmetricParams {
    pub fn new(t: f64, lambda: f64) -> Result<Self> {
        check_t(t)?;
        if !lambda.is_finite() {
            return Err(domain("lambda", lambda, "must be finite"));
        }
        Ok(Self { t, lambda })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn prevertices(&self) -> PreverticesPair {
        PreverticesPair {
            t1: self.t,
            t2: PI - self.t,
        }
    }
}

pub(crate) fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t < FRAC_PI_2) {
        return Err(domain("t", t, "requires 0 < t < π/2"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchwarzianKind {
    General { t1: f64, t2: f64 },
    Symmetric { t: f64 },
    Zero,
}

/// `R(z) = N(z) / Q(z)²` together with its split into `ψ0` and `ψ1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalSchwarzian {
    kind: SchwarzianKind,
    lambda: f64,
    psi0_num: Poly,
    psi1_num: Poly,
    q: Poly,
    num: Poly,
    den: Poly,
    poles: Vec<Complex64>,
}

/// The two accessory residues of the general form with four prevertices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccessoryResidues {
    pub r1: f64,
    pub r2: f64,
}

impl RationalSchwarzian {
    /// The Schwarzian of a Möbius map, `R ≡ 0`.
    pub fn zero() -> Self {
        let zero = Poly::constant(0.0);
        let one = Poly::constant(1.0);
        Self {
            kind: SchwarzianKind::Zero,
            lambda: 0.0,
            psi0_num: zero.clone(),
            psi1_num: zero.clone(),
            q: one.clone(),
            num: zero,
            den: one,
            poles: Vec::new(),
        }
    }

    fn assemble(
        kind: SchwarzianKind,
        lambda: f64,
        psi0_num: Poly,
        psi1_num: Poly,
        q: Poly,
        poles: Vec<Complex64>,
    ) -> Self {
        let num = &psi0_num.scale(2.0) - &(&psi1_num * &q).scale(2.0 * lambda);
        let den = &q * &q;
        Self {
            kind,
            lambda,
            psi0_num,
            psi1_num,
            q,
            num,
            den,
            poles,
        }
    }

    pub fn kind(&self) -> SchwarzianKind {
        self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    /// Same `ψ0`, `ψ1` with a different `λ`.
    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self::assemble(
            self.kind,
            lambda,
            self.psi0_num.clone(),
            self.psi1_num.clone(),
            self.q.clone(),
            self.poles.clone(),
        )
    }

    /// Numerator of `ψ0` (ascending powers).
    pub fn psi0_numerator(&self) -> &[f64] {
        self.psi0_num.coeffs()
    }

    /// Numerator of `ψ1`, a constant.
    pub fn psi1_numerator(&self) -> &[f64] {
        self.psi1_num.coeffs()
    }

    /// Denominator of `ψ1`; the denominator of `ψ0` is its square.
    pub fn psi1_denominator(&self) -> &[f64] {
        self.q.coeffs()
    }

    /// Numerator `N` of `R = N / Q²`.
    pub fn numerator(&self) -> &[f64] {
        self.num.coeffs()
    }

    pub fn denominator(&self) -> &[f64] {
        self.den.coeffs()
    }

    /// `R(0)` read off the constant coefficients.
    pub fn value_at_zero(&self) -> f64 {
        self.num.coeffs()[0] / self.den.coeffs()[0]
    }

    fn check_pole(&self, z: Complex64) -> Result<()> {
        for &p in &self.poles {
            let d = (z - p).norm();
            if d < POLE_TOL {
                return Err(GearError::NearPole {
                    re: z.re,
                    im: z.im,
                    distance: d,
                });
            }
        }
        Ok(())
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        Ok(self.num.eval(z) / self.den.eval(z))
    }

    /// `(R, R′, R″)` at `z`.
    pub fn eval_with_derivatives(&self, z: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
        self.check_pole(z)?;
        let (n0, n1, n2) = self.num.eval3(z);
        let (d0, d1, d2) = self.den.eval3(z);
        let r = n0 / d0;
        let r1 = (n1 - r * d1) / d0;
        let r2 = (n2 - 2.0 * r1 * d1 - r * d2) / d0;
        Ok((r, r1, r2))
    }

    pub fn psi0(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        let q = self.q.eval(z);
        Ok(self.psi0_num.eval(z) / (q * q))
    }

    pub fn psi1(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        Ok(self.psi1_num.eval(z) / self.q.eval(z))
    }

    /// Prevertex angles `(t1, t2)` underlying this Schwarzian, if any.
    pub fn prevertex_angles(&self) -> Option<(f64, f64)> {
        match self.kind {
            SchwarzianKind::General { t1, t2 } => Some((t1, t2)),
            SchwarzianKind::Symmetric { t } => Some((t, PI - t)),
            SchwarzianKind::Zero => None,
        }
    }

    /// Pullback through `T_q`: the Schwarzian `R*` with `R(z) = R*(T_q z) T_q′(z)²`.
    ///
    /// The prevertices move to `T_q(e^{±it_k})` and `λ` is unchanged. When the
    /// moved prevertices are symmetric the symmetric form is returned.
    pub fn pullback(&self, q: f64) -> Result<RationalSchwarzian> {
        let tq = DiskAutomorphism::new(q)?;
        let (t1, t2) = match self.prevertex_angles() {
            Some(p) => p,
            None => return Ok(self.clone()),
        };
        if q == 0.0 {
            return Ok(self.clone());
        }
        let s1 = tq.apply(Complex64::from_polar(1.0, t1)).arg();
        let s2 = tq.apply(Complex64::from_polar(1.0, t2)).arg();
        if (s1 + s2 - PI).abs() < 1e-13 && s1 < FRAC_PI_2 {
            build_symmetric(SymmetricParams::new(s1, self.lambda)?)
        } else {
            Ok(build_general(PreverticesPair::new(s1, s2)?, self.lambda))
        }
    }

    /// Pullback to the symmetric form through the automorphism of
    /// [`symmetrize_prevertices`]. Returns `(q, R_{t,λ})`.
    pub fn symmetrize(&self) -> Result<(f64, RationalSchwarzian)> {
        match self.kind {
            SchwarzianKind::General { t1, t2 } => {
                let (q, t) = symmetrize_prevertices(t1, t2)?;
                Ok((q, build_symmetric(SymmetricParams::new(t, self.lambda)?)?))
            }
            _ => Ok((0.0, self.clone())),
        }
    }

    /// The residues `r1 = −r4`, `r2 = −r3` of the general four-prevertex form
    ///
    /// `z² S(z) = Σ a_k z_k z/(z − z_k)² + i r_k (z + z_k)/(z − z_k)`,
    ///
    /// returned only after that form is confirmed to reproduce `R` at a set
    /// of test points.
    pub fn accessory_residues(&self) -> Result<AccessoryResidues> {
        let (t1, t2) = self
            .prevertex_angles()
            .ok_or_else(|| GearError::Convention("R ≡ 0 has no prevertices".into()))?;
        let (s1, s2, c1, c2) = (t1.sin(), t2.sin(), t1.cos(), t2.cos());
        let lam = self.lambda;
        let res = AccessoryResidues {
            r1: (0.375 * c1 - 2.0 * lam) / (2.0 * s1),
            r2: (2.0 * lam - 0.625 * c2) / (2.0 * s2),
        };
        let zs = [
            Complex64::from_polar(1.0, t1),
            Complex64::from_polar(1.0, t2),
            Complex64::from_polar(1.0, -t2),
            Complex64::from_polar(1.0, -t1),
        ];
        let a = [0.375, -0.625, -0.625, 0.375];
        let r = [res.r1, res.r2, -res.r2, -res.r1];
        let i = Complex64::new(0.0, 1.0);
        let probes = [
            Complex64::new(0.31, 0.0),
            Complex64::new(0.2, 0.5),
            Complex64::new(-0.6, -0.1),
            Complex64::new(0.1, -0.7),
        ];
        for z in probes {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..4 {
                s += a[k] * zs[k] * z / ((z - zs[k]) * (z - zs[k]))
                    + i * r[k] * (z + zs[k]) / (z - zs[k]);
            }
            s /= z * z;
            let want = self.eval(z)?;
            if (s - want).norm() > 1e-9 * (1.0 + want.norm()) {
                return Err(GearError::Convention(format!(
                    "accessory residues do not reproduce R at {z}: {s} vs {want}"
                )));
            }
        }
        Ok(res)
    }
}

fn quad_factor(c: f64) -> Poly {
    Poly::new(vec![1.0, -2.0 * c, 1.0])
}

/// `R_{t1,t2,λ}` from the closed-form c-coefficients.
pub fn build_general(p: PreverticesPair, lambda: f64) -> RationalSchwarzian {
    let (t1, t2) = (p.t1, p.t2);
    let (c1, c2) = (t1.cos(), t2.cos());
    let (s1, s2) = (t1.sin(), t2.sin());
    let (d1, d2) = ((2.0 * t1).cos(), (2.0 * t2).cos());
    let c00 = (3.0 * d1 - 5.0 * d2 + 2.0) / 8.0;
    let c10 = 3.0 * s1 * s1 * c2 - 5.0 * c1 * s2 * s2;
    let c20 = (d1 * (11.0 - 2.0 * d2) - 13.0 * d2 + 4.0) / 4.0;
    let psi0 = Poly::new(vec![c00, c10, c20, c10, c00]);
    let psi1 = Poly::constant(4.0 * (c2 - c1));
    let q = &quad_factor(c1) * &quad_factor(c2);
    let poles = p.prevertices().to_vec();
    RationalSchwarzian::assemble(
        SchwarzianKind::General { t1, t2 },
        lambda,
        psi0,
        psi1,
        q,
        poles,
    )
}

/// `R_{t,λ}`, the symmetric specialization `t2 = π − t`.
pub fn build_symmetric(s: SymmetricParams) -> Result<RationalSchwarzian> {
    let t = s.t;
    let c = t.cos();
    let c2t = (2.0 * t).cos();
    let h = 0.5 * t.sin().powi(2);
    let psi0 = Poly::new(vec![
        h,
        -16.0 * c * h,
        (4.0 + 2.0 * c2t) * h,
        -16.0 * c * h,
        h,
    ]);
    let psi1 = Poly::constant(-8.0 * c);
    let q = Poly::new(vec![1.0, 0.0, -2.0 * c2t, 0.0, 1.0]);
    let e = Complex64::from_polar(1.0, t);
    let poles = vec![e, e.conj(), -e, -e.conj()];
    Ok(RationalSchwarzian::assemble(
        SchwarzianKind::Symmetric { t },
        s.lambda,
        psi0,
        psi1,
        q,
        poles,
    ))
}

/// `(λ⁻, λ⁺) = (∓¼ − (cos t + 1/cos t)/16)`, the exact range of `λ` for which
/// `R_{t,λ}` is the Schwarzian of a gear map.
pub fn lambda_bounds(t: f64) -> Result<(f64, f64)> {
    check_t(t)?;
    let c = t.cos();
    let m = (c + 1.0 / c) / 16.0;
    Ok((-0.25 - m, 0.25 - m))
}

/// The necessary band `|16λ cos t + sin²t| < 6` from Nehari's criterion at 0.
pub fn nehari_bounds(t: f64) -> Result<(f64, f64)> {
    check_t(t)?;
    let c = t.cos();
    let c2t = (2.0 * t).cos();
    Ok((-(13.0 - c2t) / (32.0 * c), (11.0 + c2t) / (32.0 * c)))
}

/// Which degenerate Schwarz–Christoffel map: pole at `−1` or at `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    /// Location of the pole of the map on the real axis.
    pub fn pole(self) -> f64 {
        match self {
            Side::Minus => -1.0,
            Side::Plus => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Minus => "minus",
            Side::Plus => "plus",
        }
    }
}

/// Which end of the interval `(λ⁻, λ⁺)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Endpoint {
    Lower,
    Upper,
}

/// `(h, h′)` with `h = f″/f′` for `f′ = (z ∓ 1)^{-2} √((z² + 2cz + 1)/(z² − 2cz + 1))`.
pub fn degenerate_log_derivative(t: f64, side: Side, z: Complex64) -> (Complex64, Complex64) {
    let c = t.cos();
    let a = z * z + 2.0 * c * z + 1.0;
    let b = z * z - 2.0 * c * z + 1.0;
    let zp = z - side.pole();
    let h = -2.0 / zp + (z + c) / a - (z - c) / b;
    let dh = 2.0 / (zp * zp) + (a - 2.0 * (z + c) * (z + c)) / (a * a)
        - (b - 2.0 * (z - c) * (z - c)) / (b * b);
    (h, dh)
}

/// Exact Schwarzian of the degenerate Schwarz–Christoffel map.
pub fn degenerate_map_schwarzian(t: f64, side: Side, z: Complex64) -> Complex64 {
    let (h, dh) = degenerate_log_derivative(t, side, z);
    dh - 0.5 * h * h
}

/// The endpoint of `(λ⁻, λ⁺)` realized by the degenerate map on `side`,
/// found by matching `S(0) = 16λ cos t + sin²t`.
pub fn degenerate_endpoint(t: f64, side: Side) -> Result<(Endpoint, f64)> {
    let (lm, lp) = lambda_bounds(t)?;
    let s0 = degenerate_map_schwarzian(t, side, Complex64::new(0.0, 0.0)).re;
    let lam = (s0 - t.sin().powi(2)) / (16.0 * t.cos());
    let (ep, target) = if (lam - lm).abs() <= (lam - lp).abs() {
        (Endpoint::Lower, lm)
    } else {
        (Endpoint::Upper, lp)
    };
    if (lam - target).abs() > 1e-12 * (1.0 + target.abs()) {
        return Err(GearError::Convention(format!(
            "degenerate map S(0) gives λ = {lam}, not an endpoint of ({lm}, {lp})"
        )));
    }
    Ok((ep, target))
}

/// `R_{t,λ}` at the endpoint realized by the degenerate map on `side`,
/// checked against the exact Schwarzian of that map.
pub fn degenerate_schwarzian(t: f64, side: Side) -> Result<RationalSchwarzian> {
    let (_, lam) = degenerate_endpoint(t, side)?;
    let r = build_symmetric(SymmetricParams::new(t, lam)?)?;
    for z in [
        Complex64::new(0.37, 0.0),
        Complex64::new(0.1, 0.6),
        Complex64::new(-0.5, -0.2),
    ] {
        let exact = degenerate_map_schwarzian(t, side, z);
        let rv = r.eval(z)?;
        if (exact - rv).norm() > 1e-10 * (1.0 + rv.norm()) {
            return Err(GearError::Convention(format!(
                "degenerate Schwarzian mismatch at {z}: {exact} vs {rv}"
            )));
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid(n: usize, rmax: f64) -> Vec<Complex64> {
        (0..n)
            .map(|k| {
                let r = rmax * ((k % 5) as f64 + 1.0) / 5.0;
                let a = 2.0 * PI * (k as f64 * 0.618_033_988_75).fract();
                Complex64::from_polar(r, a)
            })
            .collect()
    }

    #[test]
    fn general_psi1_numerator() {
        let p = PreverticesPair::new(PI / 3.0, 2.0 * PI / 3.0).unwrap();
        let r = build_general(p, 0.3);
        assert!((r.psi1_numerator()[0] + 4.0).abs() < 1e-15);
    }

    #[test]
    fn coalescing_prevertices_kill_lambda() {
        let p = PreverticesPair::new(0.8, 0.8 + 1e-12).unwrap();
        let a = build_general(p, 0.0);
        let b = build_general(p, 10.0);
        let z = c(0.2, 0.3);
        let (va, vb) = (a.eval(z).unwrap(), b.eval(z).unwrap());
        assert!((va - vb).norm() < 1e-9 * va.norm(), "{va} {vb}");
    }

    #[test]
    fn general_specializes_to_symmetric_coefficients() {
        for t in [0.2, 0.7, 1.1, 1.5] {
            let g = build_general(PreverticesPair::new(t, PI - t).unwrap(), 0.1);
            let s = build_symmetric(SymmetricParams::new(t, 0.1).unwrap()).unwrap();
            for (a, b) in g.psi0_numerator().iter().zip(s.psi0_numerator()) {
                assert!((a - b).abs() < 1e-14, "{a} {b}");
            }
            let sn = t.sin().powi(2);
            assert!((g.psi0_numerator()[0] - sn / 2.0).abs() < 1e-15);
            assert!((g.psi0_numerator()[1] + 8.0 * sn * t.cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn symmetric_values() {
        let r = build_symmetric(SymmetricParams::new(PI / 3.0, 0.0).unwrap()).unwrap();
        assert!((r.eval(c(0.0, 0.0)).unwrap().re - 0.75).abs() < 1e-15);
        let t = 0.9;
        let lam = -0.17;
        let r = build_symmetric(SymmetricParams::new(t, lam).unwrap()).unwrap();
        let want = t.sin().powi(2) + 16.0 * lam * t.cos();
        assert!((r.value_at_zero() - want).abs() < 1e-15);
        let e = Complex64::from_polar(1.0, t);
        for p in [e, e.conj(), -e, -e.conj()] {
            assert!(r.poles().iter().any(|q| (q - p).norm() < 1e-15));
            let den: Complex64 = Poly::new(r.denominator().to_vec()).eval(p);
            assert!(den.norm() < 1e-13);
            assert!(matches!(r.eval(p), Err(GearError::NearPole { .. })));
        }
    }

    #[test]
    fn zero_schwarzian() {
        let z = RationalSchwarzian::zero();
        let (a, b, d) = z.eval_with_derivatives(c(0.3, 0.1)).unwrap();
        assert_eq!((a, b, d), (c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let r = build_general(PreverticesPair::new(0.5, 2.0).unwrap(), 0.01);
        let h = 1e-5;
        for z in [c(0.0, 0.0), c(0.3, -0.2), c(-0.5, 0.4)] {
            let (_, d1, d2) = r.eval_with_derivatives(z).unwrap();
            let fp = r.eval(z + h).unwrap();
            let fm = r.eval(z - h).unwrap();
            let f0 = r.eval(z).unwrap();
            let fd1 = (fp - fm) / (2.0 * h);
            let fd2 = (fp - 2.0 * f0 + fm) / (h * h);
            assert!((d1 - fd1).norm() < 1e-8 * (1.0 + d1.norm()), "{d1} {fd1}");
            assert!((d2 - fd2).norm() < 1e-4 * (1.0 + d2.norm()), "{d2} {fd2}");
        }
    }

    #[test]
    fn pullback_identity_example() {
        let (t1, t2, lam) = (0.5, 2.0, 0.01);
        let r = build_general(PreverticesPair::new(t1, t2).unwrap(), lam);
        let (q, t) = symmetrize_prevertices(t1, t2).unwrap();
        let rs = r.pullback(q).unwrap();
        assert!(matches!(rs.kind(), SchwarzianKind::Symmetric { .. }));
        assert_eq!(rs.lambda(), lam);
        match rs.kind() {
            SchwarzianKind::Symmetric { t: ts } => assert!((ts - t).abs() < 1e-14),
            _ => unreachable!(),
        }
        let tq = DiskAutomorphism::new(q).unwrap();
        for z in grid(20, 0.9) {
            let lhs = r.eval(z).unwrap();
            let d = tq.derivative(z);
            let rhs = rs.eval(tq.apply(z)).unwrap() * d * d;
            assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()));
            // ψ0 and ψ1 separately.
            let p0 = rs.psi0(tq.apply(z)).unwrap() * d * d;
            let p1 = rs.psi1(tq.apply(z)).unwrap() * d * d;
            assert!((r.psi0(z).unwrap() - p0).norm() < 1e-10 * (1.0 + p0.norm()));
            assert!((r.psi1(z).unwrap() - p1).norm() < 1e-10 * (1.0 + p1.norm()));
        }
        assert_eq!(r.pullback(0.0).unwrap(), r);
    }

    #[test]
    fn bounds_spot_values() {
        let (lm, lp) = lambda_bounds(PI / 3.0).unwrap();
        assert!((lm + 13.0 / 32.0).abs() < 1e-16);
        assert!((lp - 3.0 / 32.0).abs() < 1e-16);
        let (nl, nu) = nehari_bounds(PI / 3.0).unwrap();
        assert!((nl + 27.0 / 32.0).abs() < 1e-15);
        assert!((nu - 21.0 / 32.0).abs() < 1e-15);
        let (lm, lp) = lambda_bounds(1e-9).unwrap();
        assert!((lm + 0.375).abs() < 1e-12 && (lp - 0.125).abs() < 1e-12);
        assert!(lambda_bounds(0.0).is_err());
        assert!(nehari_bounds(FRAC_PI_2).is_err());
    }

    #[test]
    fn nehari_endpoints_give_six() {
        for t in [0.3, 0.9, 1.4] {
            let (nl, nu) = nehari_bounds(t).unwrap();
            for (lam, want) in [(nl, -6.0), (nu, 6.0)] {
                let r = build_symmetric(SymmetricParams::new(t, lam).unwrap()).unwrap();
                assert!((r.value_at_zero() - want).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn degenerate_values_at_zero() {
        for t in [0.3f64, 1.0, 1.4] {
            let cc = t.cos();
            let sm = degenerate_map_schwarzian(t, Side::Minus, c(0.0, 0.0));
            let sp = degenerate_map_schwarzian(t, Side::Plus, c(0.0, 0.0));
            assert!((sm.re - (4.0 * cc - 2.0 * cc * cc)).abs() < 1e-14);
            assert!((sp.re - (-4.0 * cc - 2.0 * cc * cc)).abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_association() {
        for t in [0.2f64, 0.8, 1.3] {
            let (lm, lp) = lambda_bounds(t).unwrap();
            assert_eq!(degenerate_endpoint(t, Side::Minus).unwrap(), (Endpoint::Upper, lp));
            assert_eq!(degenerate_endpoint(t, Side::Plus).unwrap(), (Endpoint::Lower, lm));
            assert_eq!(degenerate_schwarzian(t, Side::Minus).unwrap().lambda(), lp);
            assert_eq!(degenerate_schwarzian(t, Side::Plus).unwrap().lambda(), lm);
        }
    }

    #[test]
    fn residues_consistent() {
        let r = build_general(PreverticesPair::new(0.5, 2.0).unwrap(), 0.01);
        let res = r.accessory_residues().unwrap();
        let (s1, s2, c1, c2) = (0.5f64.sin(), 2.0f64.sin(), 0.5f64.cos(), 2.0f64.cos());
        let lhs = 4.0 * res.r1 * s1 + 4.0 * res.r2 * s2;
        assert!((lhs - (3.0 * c1 - 5.0 * c2) / 4.0).abs() < 1e-14);
        assert!(RationalSchwarzian::zero().accessory_residues().is_err());
    }

    /// Running-error scale `Σ|n_k||z|^k / |D(z)|` for evaluation in floating point.
    fn cond_scale(r: &RationalSchwarzian, z: Complex64) -> f64 {
        let n: f64 = r
            .numerator()
            .iter()
            .enumerate()
            .map(|(k, c)| c.abs() * z.norm().powi(k as i32))
            .sum();
        let d = Poly::new(r.denominator().to_vec()).eval(z).norm();
        let dabs: f64 = r
            .denominator()
            .iter()
            .enumerate()
            .map(|(k, c)| c.abs() * z.norm().powi(k as i32))
            .sum();
        (n + dabs * r.eval(z).unwrap().norm()) / d
    }

    fn pair() -> impl Strategy<Value = (f64, f64)> {
        (0.05..3.0f64, 0.02..0.98f64).prop_map(|(t1, f)| (t1, t1 + f * (PI - 0.02 - t1)))
    }

    proptest! {
        #[test]
        fn conjugate_symmetry((t1, t2) in pair(), lam in -1.0..1.0f64,
                              r in 0.0..0.95f64, a in 0.0..(2.0 * PI)) {
            let rr = build_general(PreverticesPair::new(t1, t2).unwrap(), lam);
            let z = Complex64::from_polar(r, a);
            let v = rr.eval(z).unwrap();
            let w = rr.eval(z.conj()).unwrap();
            prop_assert!((v.conj() - w).norm() <= 1e-12 * (1.0 + v.norm()));
        }

        #[test]
        fn specialization_identity(t in 0.05..1.52f64, lam in -1.0..1.0f64) {
            let g = build_general(PreverticesPair::new(t, PI - t).unwrap(), lam);
            let s = build_symmetric(SymmetricParams::new(t, lam).unwrap()).unwrap();
            for z in grid(50, 0.95) {
                let (a, b) = (g.eval(z).unwrap(), s.eval(z).unwrap());
                let scale = 1.0 + a.norm() + cond_scale(&g, z);
                prop_assert!((a - b).norm() < 1e-12 * scale, "{} {}", a, b);
            }
        }

        #[test]
        fn pullback_identity((t1, t2) in pair(), lam in -1.0..1.0f64,
                             r in 0.0..0.9f64, a in 0.0..(2.0 * PI)) {
            let rr = build_general(PreverticesPair::new(t1, t2).unwrap(), lam);
            let (q, rs) = rr.symmetrize().unwrap();
            prop_assert_eq!(rs.lambda(), lam);
            let tq = DiskAutomorphism::new(q).unwrap();
            let z = Complex64::from_polar(r, a);
            let d = tq.derivative(z);
            let lhs = rr.eval(z).unwrap();
            let rhs = rs.eval(tq.apply(z)).unwrap() * d * d;
            let scale = 1.0 + cond_scale(&rr, z) + cond_scale(&rs, tq.apply(z)) * d.norm_sqr();
            prop_assert!((lhs - rhs).norm() < 1e-10 * scale, "{} {}", lhs, rhs);
        }

        #[test]
        fn general_pullback_any_q((t1, t2) in pair(), lam in -1.0..1.0f64,
                                  q in -0.8..0.8f64, r in 0.0..0.9f64, a in 0.0..(2.0 * PI)) {
            let rr = build_general(PreverticesPair::new(t1, t2).unwrap(), lam);
            let rs = rr.pullback(q).unwrap();
            let tq = DiskAutomorphism::new(q).unwrap();
            let z = Complex64::from_polar(r, a);
            let d = tq.derivative(z);
            let lhs = rr.eval(z).unwrap();
            let rhs = rs.eval(tq.apply(z)).unwrap() * d * d;
            let scale = 1.0 + cond_scale(&rr, z) + cond_scale(&rs, tq.apply(z)) * d.norm_sqr();
            prop_assert!((lhs - rhs).norm() < 1e-10 * scale, "{} {}", lhs, rhs);
        }

        #[test]
        fn bounds_nested(t in 0.001..1.57f64) {
            let (lm, lp) = lambda_bounds(t).unwrap();
            let (nl, nu) = nehari_bounds(t).unwrap();
            prop_assert!((lp - lm - 0.5).abs() < 1e-15);
            prop_assert!(nl < lm && lp < nu);
            let c = t.cos();
            prop_assert!(((nu - lp) - (c * c - 2.0 * c + 3.0) / (8.0 * c)).abs() < 1e-12 * (1.0 + nu.abs()));
        }
    }
}
