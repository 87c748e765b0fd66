//! Adaptive Dormand–Prince 5(4) integrator for complex-valued systems.
//!
//! Steps are clipped so that every requested output time is hit exactly;
//! there is no interpolation between outputs.

use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_step: f64::INFINITY,
            min_step: 1e-14,
            max_steps: 5_000_000,
        }
    }
}

impl OdeOptions {
    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
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
// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate `dy/dt = f(t, y)` from `t0` and return `y` at each of `outputs`
/// (non-decreasing, all `>= t0`). `observer` sees every accepted step as
/// `(t, y, dy/dt)`.
pub fn integrate<F, O>(
    mut f: F,
    t0: f64,
    y0: &[C64],
    outputs: &[f64],
    opts: &OdeOptions,
    mut observer: O,
) -> Result<Vec<Vec<C64>>>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    O: FnMut(f64, &[C64], &[C64]),
{
    if outputs.windows(2).any(|w| w[1] < w[0]) || outputs.first().is_some_and(|&t| t < t0) {
        return Err(Error::invalid(
            "output times must be non-decreasing and >= t0",
        ));
    }
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut k: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); n]; 7];
    let mut stage = vec![C64::new(0.0, 0.0); n];
    let mut y_new = vec![C64::new(0.0, 0.0); n];

    f(t, &y, &mut k[0]);
    observer(t, &y, &k[0]);

    let span = outputs.last().map_or(0.0, |&te| te - t0);
    let mut h = initial_step(&y, &k[0], span, opts);
    let mut result = Vec::with_capacity(outputs.len());
    let mut steps = 0usize;

    for &target in outputs {
        while t < target {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::Integrator {
                    t,
                    reason: format!("exceeded {} steps", opts.max_steps),
                });
            }
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };

            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for (j, kj) in k.iter().enumerate().take(s) {
                        let a = A[s][j];
                        if a != 0.0 {
                            acc += kj[i] * (a * step);
                        }
                    }
                    stage[i] = acc;
                }
                let (head, tail) = k.split_at_mut(s);
                let _ = head;
                f(t + C[s] * step, &stage, &mut tail[0]);
            }
            // Stage 7 was evaluated at the fifth-order solution (FSAL).
            y_new.copy_from_slice(&stage);

            let mut err_sq = 0.0;
            for i in 0..n {
                let mut e = C64::new(0.0, 0.0);
                for (kj, &ej) in k.iter().zip(E.iter()) {
                    if ej != 0.0 {
                        e += kj[i] * ej;
                    }
                }
                let scale = opts.abs_tol + opts.rel_tol * y[i].norm().max(y_new[i].norm());
                let r = (e * step).norm() / scale;
                err_sq += r * r;
            }
            let err = (err_sq / n.max(1) as f64).sqrt();

            if err.is_finite() && err <= 1.0 {
                t = if last { target } else { t + step };
                std::mem::swap(&mut y, &mut y_new);
                let (first, rest) = k.split_at_mut(1);
                first[0].copy_from_slice(&rest[5]);
                observer(t, &y, &k[0]);
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                if !last || factor < 1.0 {
                    h = (step * factor).min(opts.max_step);
                }
            } else if step <= opts.min_step {
                return Err(Error::Integrator {
                    t,
                    reason: format!("step size underflow (h = {step:e}, error ratio {err:.3})"),
                });
            } else {
                let factor = if err.is_finite() {
                    (0.9 * err.powf(-0.2)).clamp(0.1, 1.0)
                } else {
                    0.1
                };
                h = (step * factor).max(opts.min_step);
            }
        }
        result.push(y.clone());
    }
    Ok(result)
}

fn initial_step(y: &[C64], dy: &[C64], span: f64, opts: &OdeOptions) -> f64 {
    let scale = |i: usize| opts.abs_tol + opts.rel_tol * y[i].norm();
    let n = y.len().max(1) as f64;
    let d0 = (y
        .iter()
        .enumerate()
        .map(|(i, v)| (v.norm() / scale(i)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let d1 = (dy
        .iter()
        .enumerate()
        .map(|(i, v)| (v.norm() / scale(i)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let cap = if span > 0.0 { span } else { 1.0 };
    h.min(cap).min(opts.max_step).max(opts.min_step)
}
