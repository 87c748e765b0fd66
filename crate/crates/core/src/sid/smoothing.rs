//! Smoothing of singular functionals into square-summable coefficient
//! vectors.
//!
//! A functional `F` is known through its values `F[e_i]` on an orthonormal
//! basis. Its Riesz representative has coefficients `f_i = conj(F[e_i])`,
//! so that `F[g] = Σ conj(f_i) g_i`. Singular functionals (a delta, say)
//! give `Σ|f_i|² = ∞`; a cutoff makes the sum finite.

use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub enum Cutoff {
    /// Keep the first `K` basis functions.
    Count(usize),
    /// Keep basis functions whose label (an energy, say) is at most `max`.
    Energy { labels: Vec<f64>, max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Taper {
    /// Hard truncation. Applying it twice is the same as once.
    #[default]
    Hard,
    /// Raised-cosine roll-off over the kept range: weight
    /// `(1 + cos(π i/K))/2` at the `i`-th kept index. Smoother
    /// reconstructions, but not idempotent.
    RaisedCosine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedFunction {
    pub coeffs: Vec<C64>,
    /// Number of leading finite samples that were used.
    pub finite_prefix: usize,
}

impl SmoothedFunction {
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `f(x) = Σ f_i e_i(x)`.
    pub fn reconstruct(&self, basis: &FourierBasis, x: f64) -> C64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .map(|(i, c)| c * basis.eval(i, x))
            .sum()
    }

    /// The functional values this representative reproduces.
    pub fn as_samples(&self) -> Vec<C64> {
        self.coeffs.iter().map(|c| c.conj()).collect()
    }
}

/// Smooths functional samples `F[e_i]` with a cutoff. Samples after the
/// first non-finite value are dropped (with a warning); an input whose very
/// first sample is non-finite is rejected.
pub fn smooth_functional(
    samples: &[C64],
    cutoff: &Cutoff,
    taper: Taper,
) -> Result<SmoothedFunction> {
    let finite_prefix = samples
        .iter()
        .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        .unwrap_or(samples.len());
    if finite_prefix == 0 {
        return Err(Error::invalid("functional has no finite samples to smooth"));
    }
    if finite_prefix < samples.len() {
        log::warn!("functional diverges at index {finite_prefix}; keeping the finite prefix only");
    }
    let keep: Vec<bool> = match cutoff {
        Cutoff::Count(k) => {
            if *k == 0 {
                return Err(Error::invalid("cutoff count must be positive"));
            }
            (0..samples.len()).map(|i| i < *k).collect()
        }
        Cutoff::Energy { labels, max } => {
            if labels.len() < samples.len() {
                return Err(Error::DimensionMismatch {
                    expected: samples.len(),
                    found: labels.len(),
                });
            }
            labels[..samples.len()].iter().map(|l| l <= max).collect()
        }
    };
    let kept = keep[..finite_prefix].iter().filter(|&&k| k).count();
    let mut rank = 0usize;
    let coeffs = samples
        .iter()
        .enumerate()
        .map(|(i, z)| {
            if i >= finite_prefix || !keep[i] {
                return C64::new(0.0, 0.0);
            }
            let w = match taper {
                Taper::Hard => 1.0,
                Taper::RaisedCosine => {
                    0.5 * (1.0 + (std::f64::consts::PI * rank as f64 / kept as f64).cos())
                }
            };
            rank += 1;
            z.conj() * w
        })
        .collect();
    Ok(SmoothedFunction {
        coeffs,
        finite_prefix,
    })
}

/// Orthonormal Fourier basis on `[0, period)`, ordered by frequency
/// `0, 1, −1, 2, −2, …`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierBasis {
    pub period: f64,
}

impl FourierBasis {
    pub fn frequency(i: usize) -> i64 {
        let k = i.div_ceil(2) as i64;
        if i % 2 == 1 {
            k
        } else {
            -k
        }
    }

    pub fn eval(&self, i: usize, x: f64) -> C64 {
        let k = Self::frequency(i) as f64;
        C64::from_polar(
            1.0 / self.period.sqrt(),
            2.0 * std::f64::consts::PI * k * x / self.period,
        )
    }

    /// `F[e_i] = e_i(x0)`: point evaluation at `x0`.
    pub fn delta_samples(&self, x0: f64, count: usize) -> Vec<C64> {
        (0..count).map(|i| self.eval(i, x0)).collect()
    }
}
