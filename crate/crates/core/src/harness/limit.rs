//! Weak-limit detection on sampled pairings.

use serde::Serialize;

use super::series::TimeSeries;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakLimitReport {
    /// Earliest sample after which every monitored channel stays within
    /// `epsilon` of its tail mean; `None` if that never happens in the window.
    pub t_star: Option<f64>,
    /// Tail mean per channel, in the order requested.
    pub equilibrium: Vec<(String, f64)>,
    pub epsilon: f64,
    /// Last sample time that was considered.
    pub window_end: f64,
    pub flags: Vec<String>,
}

/// Finds the weak-limit onset. The tail mean is taken over the last quarter
/// of the samples inside the recurrence window.
pub fn detect_weak_limit(
    series: &TimeSeries,
    channels: &[&str],
    epsilon: f64,
    recurrence_window: Option<f64>,
) -> Result<WeakLimitReport> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    if channels.is_empty() {
        return Err(Error::invalid("no channels to monitor"));
    }
    let data: Vec<&[f64]> = channels
        .iter()
        .map(|c| series.require(c))
        .collect::<Result<_>>()?;
    let t = series.t();
    let mut flags = Vec::new();
    let n = match recurrence_window {
        Some(w) => {
            let n = t.partition_point(|&x| x <= w);
            if n < t.len() {
                flags.push(format!(
                    "series runs past the recurrence window {w:.4}; later samples ignored"
                ));
            }
            n
        }
        None => {
            flags.push("recurrence window unknown; all samples used".to_string());
            t.len()
        }
    };
    if n < 4 {
        return Err(Error::invalid(
            "fewer than 4 samples inside the recurrence window",
        ));
    }
    let tail_start = n - (n / 4).max(1);
    let equilibrium: Vec<(String, f64)> = channels
        .iter()
        .zip(&data)
        .map(|(c, v)| {
            let tail = &v[tail_start..n];
            (c.to_string(), tail.iter().sum::<f64>() / tail.len() as f64)
        })
        .collect();

    // Walk backwards while every channel stays inside the band.
    let mut first_ok = n;
    for i in (0..n).rev() {
        let inside = data
            .iter()
            .zip(&equilibrium)
            .all(|(v, (_, m))| (v[i] - m).abs() <= epsilon);
        if !inside {
            break;
        }
        first_ok = i;
    }
    let t_star = if first_ok < n && first_ok <= tail_start {
        Some(t[first_ok])
    } else {
        flags.push("no convergence in window".to_string());
        None
    };
    if let Some(ts) = t_star {
        if ts > 0.0 && t[n - 1] - t[0] < 4.0 * (ts - t[0]) {
            flags.push("series covers less than 4x the detected decay scale".to_string());
        }
    }
    Ok(WeakLimitReport {
        t_star,
        equilibrium,
        epsilon,
        window_end: t[n - 1],
        flags,
    })
}
