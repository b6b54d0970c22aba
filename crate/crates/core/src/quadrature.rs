//! Double-exponential (tanh-sinh) quadrature on a finite interval.
//!
//! The integrand receives the abscissa together with its distances to both
//! endpoints, so integrands with `(x − a)^{−1/2}` type singularities can be
//! written without cancellation.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use crate::error::{GearError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TanhSinh {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_level: u32,
    /// Truncation of the transformed variable, `|u| ≤ u_max`.
    pub u_max: f64,
}

impl Default for TanhSinh {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-14,
            max_level: 10,
            u_max: 4.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
    pub level: u32,
}

impl TanhSinh {
    /// Complex-valued integral of `f(x, x − a, b − x)` over `[a, b]`.
    pub fn integrate_complex<F>(&self, a: f64, b: f64, mut f: F) -> Result<QuadResult<Complex64>>
    where
        F: FnMut(f64, f64, f64) -> Complex64,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut evals = 1;
        // Node at u = 0.
        let mut sum = f(mid, half, half) * FRAC_PI_2;
        let mut h = 1.0;
        let node = |u: f64, f: &mut F, evals: &mut usize| -> Complex64 {
            let sh = u.sinh();
            let ch = u.cosh();
            let v = FRAC_PI_2 * sh;
            let e = (-2.0 * v.abs()).exp();
            // distance from the nearer endpoint in units of `2 half`.
            let near = e / (1.0 + e);
            let w = FRAC_PI_2 * ch * 4.0 * e / ((1.0 + e) * (1.0 + e));
            let d_near = 2.0 * half * near;
            if d_near <= 0.0 || !w.is_finite() {
                return Complex64::new(0.0, 0.0);
            }
            let d_far = 2.0 * half - d_near;
            *evals += 2;
            let left = f(a + d_near, d_near, d_far);
            let right = f(b - d_near, d_far, d_near);
            (left + right) * w
        };
        let mut k = 1;
        while k as f64 * h <= self.u_max {
            sum += node(k as f64 * h, &mut f, &mut evals);
            k += 1;
        }
        let mut prev = sum * h * half;
        for level in 1..=self.max_level {
            h *= 0.5;
            let mut k = 1;
            while k as f64 * h <= self.u_max {
                sum += node(k as f64 * h, &mut f, &mut evals);
                k += 2;
            }
            let cur = sum * h * half;
            let err = (cur - prev).norm();
            if !cur.re.is_finite() || !cur.im.is_finite() {
                return Err(GearError::Quadrature { residual: f64::NAN });
            }
            if level >= 3 && err <= self.abs_tol.max(self.rel_tol * cur.norm()) {
                return Ok(QuadResult {
                    value: cur,
                    error: err,
                    evaluations: evals,
                    level,
                });
            }
            prev = cur;
        }
        Err(GearError::Quadrature {
            residual: (sum * h * half - prev).norm().max(f64::MIN_POSITIVE),
        })
    }

    /// Real-valued integral of `f(x, x − a, b − x)` over `[a, b]`.
    pub fn integrate<F>(&self, a: f64, b: f64, mut f: F) -> Result<QuadResult<f64>>
    where
        F: FnMut(f64, f64, f64) -> f64,
    {
        let r = self.integrate_complex(a, b, |x, da, db| Complex64::new(f(x, da, db), 0.0))?;
        Ok(QuadResult {
            value: r.value.re,
            error: r.error,
            evaluations: r.evaluations,
            level: r.level,
        })
    }
}
