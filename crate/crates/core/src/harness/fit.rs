//! Least-squares fits for characteristic times.

use serde::Serialize;

use super::series::TimeSeries;
use crate::error::{Error, Result};

/// Ordinary least squares `y = slope·x + intercept`. Returns
/// `(slope, intercept, r2)`; `r2` is 1 for a perfect fit and for constant `y`.
pub fn linear_regression(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for &(x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 {
        let ss_res: f64 = points
            .iter()
            .map(|&(x, y)| (y - slope * x - intercept).powi(2))
            .sum();
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    (slope, intercept, r2)
}

/// Settings shared by the decay fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Samples are used from the start until the envelope drops below
    /// `floor × amplitude`.
    pub floor: f64,
    /// Samples after this time are ignored (discrete recurrences).
    pub recurrence_window: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            floor: (-2.0f64).exp(),
            recurrence_window: None,
        }
    }
}

/// `A·exp(−(t/τ)^p)` fitted to an envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    /// `τ`, the `e⁻¹` point of the fitted curve.
    pub time: f64,
    pub exponent: u32,
    pub amplitude: f64,
    pub r2: f64,
    pub points: usize,
    pub window_end: f64,
}

impl DecayFit {
    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * (-(t / self.time).powi(self.exponent as i32)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelaxationFit {
    Fitted(DecayFit),
    /// The monitored channel is constant: nothing relaxes.
    NotApplicable,
}

/// Upper envelope of `|y|`: the samples that are at least as large as every
/// later sample, joined by straight lines. For a monotone decay this is the
/// signal itself; for an oscillating one it follows the peaks.
pub fn envelope(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut records = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for i in (0..n).rev() {
        let a = y[i].abs();
        if a >= best {
            best = a;
            records.push(i);
        }
    }
    records.reverse();
    let mut env = vec![0.0; n];
    for w in records.windows(2) {
        let (i, j) = (w[0], w[1]);
        let (a, b) = (y[i].abs(), y[j].abs());
        for k in i..=j {
            let f = if j == i {
                0.0
            } else {
                (t[k] - t[i]) / (t[j] - t[i])
            };
            env[k] = a + (b - a) * f;
        }
    }
    if let Some(&last) = records.last() {
        env[last] = y[last].abs();
    }
    env
}

fn fit_power(points: &[(f64, f64)], p: u32) -> Option<DecayFit> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|&(t, v)| (t.powi(p as i32), v.ln()))
        .collect();
    let (slope, intercept, r2) = linear_regression(&xy);
    if !(slope < 0.0) {
        return None;
    }
    Some(DecayFit {
        time: (-1.0 / slope).powf(1.0 / p as f64),
        exponent: p,
        amplitude: intercept.exp(),
        r2,
        points: points.len(),
        window_end: points.last().map_or(0.0, |p| p.0),
    })
}

fn decay_fit(
    t: &[f64],
    y: &[f64],
    exponents: &[u32],
    opts: &FitOptions,
    what: &str,
) -> Result<DecayFit> {
    let limit = opts.recurrence_window.unwrap_or(f64::INFINITY);
    let env = envelope(t, y);
    let amp = env.first().copied().unwrap_or(0.0);
    if !(amp > 0.0) {
        return Err(Error::NoFit(format!("{what}: channel starts at zero")));
    }
    let in_window: Vec<usize> = (0..t.len()).filter(|&i| t[i] <= limit).collect();
    let min_env = in_window
        .iter()
        .map(|&i| env[i])
        .fold(f64::INFINITY, f64::min);
    if min_env > amp / std::f64::consts::E {
        return Err(Error::NoFit(format!(
            "{what}: envelope falls only to {:.3} of its start inside the window; needs a drop by e",
            min_env / amp
        )));
    }
    let t0 = t[0];
    let mut points = Vec::new();
    for &i in &in_window {
        if env[i] < opts.floor * amp || env[i] <= 0.0 {
            break;
        }
        points.push((t[i] - t0, env[i]));
    }
    if points.len() < 3 {
        return Err(Error::NoFit(format!(
            "{what}: only {} samples above the fit floor; sample more densely",
            points.len()
        )));
    }
    exponents
        .iter()
        .filter_map(|&p| fit_power(&points, p))
        .max_by(|a, b| a.r2.total_cmp(&b.r2))
        .map(|mut f| {
            f.window_end += t0;
            f
        })
        .ok_or_else(|| Error::NoFit(format!("{what}: envelope is not decreasing")))
}

/// Fits the envelope of `|channel|` with `A·exp(−(t/t_D)^p)`, `p ∈ {1, 2}`,
/// keeping the exponent with the better `R²`.
pub fn fit_decoherence_time(
    series: &TimeSeries,
    channel: &str,
    opts: &FitOptions,
) -> Result<DecayFit> {
    decay_fit(series.t(), series.require(channel)?, &[1, 2], opts, channel)
}

/// Exponential fit of the distance `|channel − equilibrium|` (or `|channel|`
/// when `equilibrium` is `None`). A constant channel reports
/// [`RelaxationFit::NotApplicable`].
pub fn fit_relaxation_time(
    series: &TimeSeries,
    channel: &str,
    equilibrium: Option<f64>,
    opts: &FitOptions,
) -> Result<RelaxationFit> {
    let v = series.require(channel)?;
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    if hi - lo <= 1e-12 * scale {
        return Ok(RelaxationFit::NotApplicable);
    }
    let d: Vec<f64> = v
        .iter()
        .map(|x| (x - equilibrium.unwrap_or(0.0)).abs())
        .collect();
    decay_fit(series.t(), &d, &[1], opts, channel).map(RelaxationFit::Fitted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(f: impl Fn(f64) -> f64, t_max: f64, n: usize) -> TimeSeries {
        let t: Vec<f64> = (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect();
        let y = t.iter().map(|&x| f(x)).collect();
        let mut s = TimeSeries::new(t).unwrap();
        s.push_channel("c", y).unwrap();
        s
    }

    #[test]
    fn exponential_round_trip() {
        let s = series(|t| 3.0 * (-t / 2.0).exp(), 20.0, 401);
        let f = fit_decoherence_time(&s, "c", &FitOptions::default()).unwrap();
        assert_eq!(f.exponent, 1);
        assert!((f.time - 2.0).abs() < 1e-6);
        assert!((f.amplitude - 3.0).abs() < 1e-6);
        let s = series(|t| (-t / 5.0).exp(), 50.0, 501);
        match fit_relaxation_time(&s, "c", None, &FitOptions::default()).unwrap() {
            RelaxationFit::Fitted(f) => assert!((f.time - 5.0).abs() < 1e-6),
            RelaxationFit::NotApplicable => panic!(),
        }
    }

    #[test]
    fn gaussian_round_trip_picks_exponent_two() {
        let s = series(|t| 0.7 * (-(t / 1.3).powi(2)).exp(), 6.0, 301);
        let f = fit_decoherence_time(&s, "c", &FitOptions::default()).unwrap();
        assert_eq!(f.exponent, 2);
        assert!((f.time - 1.3).abs() < 1e-6);
        let again = series(|t| f.eval(t), 6.0, 301);
        let g = fit_decoherence_time(&again, "c", &FitOptions::default()).unwrap();
        assert!((g.time - f.time).abs() < 1e-6 && (g.amplitude - f.amplitude).abs() < 1e-6);
    }

    #[test]
    fn oscillating_signal_uses_peaks() {
        let s = series(|t| (-t / 4.0).exp() * (3.0 * t).cos(), 30.0, 3001);
        let f = fit_decoherence_time(&s, "c", &FitOptions::default()).unwrap();
        assert!((f.time - 4.0).abs() < 0.05 * 4.0, "{f:?}");
    }

    #[test]
    fn non_decaying_channels_do_not_fit() {
        let s = series(|t| 1.0 + 0.1 * t.sin(), 10.0, 101);
        assert!(matches!(
            fit_decoherence_time(&s, "c", &FitOptions::default()),
            Err(Error::NoFit(_))
        ));
        let s = series(|_| 2.5, 10.0, 101);
        assert_eq!(
            fit_relaxation_time(&s, "c", None, &FitOptions::default()).unwrap(),
            RelaxationFit::NotApplicable
        );
        let opts = FitOptions {
            recurrence_window: Some(0.5),
            ..FitOptions::default()
        };
        let s = series(|t| (-t).exp(), 10.0, 101);
        assert!(fit_decoherence_time(&s, "c", &opts).is_err());
    }

    #[test]
    fn envelope_of_monotone_signal_is_itself() {
        let t: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let y: Vec<f64> = t.iter().map(|x| -(-x).exp()).collect();
        let e = envelope(&t, &y);
        for (a, b) in e.iter().zip(&y) {
            assert_eq!(*a, b.abs());
        }
    }
}
