//! Adaptive Dormand–Prince 5(4) integration of real systems `y′ = F(s, y)`.
//!
//! Complex systems are integrated as coupled real components. The error norm
//! is the RMS over components of `err_i / (atol + rtol·max(|y_i|, |ŷ_i|))`.

use crate::error::{GearError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: usize,
    /// Initial step as a fraction of the first interval.
    pub initial_fraction: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_steps: 200_000,
            initial_fraction: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates from `s0` through each of the increasing `stops`, returning the
/// state at every stop. `on_step` sees each accepted `(s, y)`.
pub fn integrate_to_stops<const N: usize, F, G>(
    mut rhs: F,
    s0: f64,
    y0: [f64; N],
    stops: &[f64],
    opts: &OdeOptions,
    mut on_step: G,
) -> Result<(Vec<[f64; N]>, OdeStats)>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    G: FnMut(f64, &[f64; N]),
{
    let mut stats = OdeStats::default();
    let mut out = Vec::with_capacity(stops.len());
    let mut s = s0;
    let mut y = y0;
    let mut k1 = rhs(s, &y)?;
    stats.evaluations += 1;
    let first = stops.first().copied().unwrap_or(s0);
    let mut h = opts.initial_fraction * (first - s0).abs().max(1e-3);

    for &stop in stops {
        if stop < s {
            return Err(GearError::Domain {
                name: "stop",
                value: stop,
                reason: "stops must be increasing",
            });
        }
        while s < stop {
            if stats.accepted + stats.rejected >= opts.max_steps {
                return Err(GearError::TooManySteps(opts.max_steps));
            }
            let last = s + h >= stop;
            let hs = if last { stop - s } else { h };
            if hs <= 1e-15 * s.abs().max(1.0) {
                if last {
                    s = stop;
                    break;
                }
                return Err(GearError::StepUnderflow {
                    theta: f64::NAN,
                    radius: s,
                });
            }
            let mut k = [[0.0; N]; 7];
            k[0] = k1;
            for i in 1..7 {
                let mut yi = y;
                for (j, kj) in k.iter().enumerate().take(i) {
                    let a = A[i][j];
                    if a != 0.0 {
                        for n in 0..N {
                            yi[n] += hs * a * kj[n];
                        }
                    }
                }
                k[i] = rhs(s + C[i] * hs, &yi)?;
                stats.evaluations += 1;
                if i == 6 {
                    // Stage 7 is evaluated at the 5th-order solution (FSAL).
                    let mut err = 0.0;
                    for n in 0..N {
                        let mut e = 0.0;
                        for (m, km) in k.iter().enumerate() {
                            e += E[m] * km[n];
                        }
                        e *= hs;
                        let sc = opts.abs_tol + opts.rel_tol * y[n].abs().max(yi[n].abs());
                        err += (e / sc) * (e / sc);
                    }
                    let err = (err / N as f64).sqrt();
                    if !err.is_finite() {
                        stats.rejected += 1;
                        h = 0.25 * hs;
                        break;
                    }
                    if err <= 1.0 {
                        stats.accepted += 1;
                        s = if last { stop } else { s + hs };
                        y = yi;
                        k1 = k[6];
                        on_step(s, &y);
                        let fac = if err == 0.0 {
                            5.0
                        } else {
                            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                        };
                        h = if last { h.max(hs) } else { hs * fac };
                    } else {
                        stats.rejected += 1;
                        h = hs * (0.9 * err.powf(-0.2)).max(0.1);
                    }
                }
            }
            if h < 1e-15 * s.abs().max(1.0) {
                return Err(GearError::StepUnderflow {
                    theta: f64::NAN,
                    radius: s,
                });
            }
        }
        out.push(y);
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let opts = OdeOptions::default();
        let (ys, stats) = integrate_to_stops(
            |_, y: &[f64; 1]| Ok([-y[0]]),
            0.0,
            [1.0],
            &[0.5, 1.0, 3.0],
            &opts,
            |_, _| {},
        )
        .unwrap();
        for (y, s) in ys.iter().zip([0.5f64, 1.0, 3.0]) {
            assert!((y[0] - (-s).exp()).abs() < 1e-9);
        }
        assert!(stats.accepted > 0);
    }

    #[test]
    fn harmonic_oscillator_energy() {
        let opts = OdeOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            ..Default::default()
        };
        let mut worst: f64 = 0.0;
        let (ys, _) = integrate_to_stops(
            |_, y: &[f64; 2]| Ok([y[1], -y[0]]),
            0.0,
            [1.0, 0.0],
            &[10.0],
            &opts,
            |_, y| worst = worst.max((y[0] * y[0] + y[1] * y[1] - 1.0).abs()),
        )
        .unwrap();
        assert!((ys[0][0] - 10f64.cos()).abs() < 1e-10);
        assert!(worst < 1e-10);
    }

    #[test]
    fn fifth_order_convergence() {
        // y' = cos(s) y, y = exp(sin s); exact at every stop.
        let opts = OdeOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            ..Default::default()
        };
        let (ys, _) = integrate_to_stops(
            |s, y: &[f64; 1]| Ok([s.cos() * y[0]]),
            0.0,
            [1.0],
            &[2.0],
            &opts,
            |_, _| {},
        )
        .unwrap();
        assert!((ys[0][0] - 2f64.sin().exp()).abs() < 1e-11);
    }

    #[test]
    fn blow_up_reports_failure() {
        // y' = y², y(0)=1 blows up at s=1.
        let opts = OdeOptions {
            max_steps: 5000,
            ..Default::default()
        };
        let r = integrate_to_stops(
            |_, y: &[f64; 1]| Ok([y[0] * y[0]]),
            0.0,
            [1.0],
            &[2.0],
            &opts,
            |_, _| {},
        );
        assert!(r.is_err());
    }
}
