//! Fit summaries and the decoherence/relaxation ordering table.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A fitted characteristic time, or why there is none.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeValue {
    Value(f64),
    /// The channel does not move, so there is nothing to fit. Written `"n/a"`.
    NotApplicable,
    /// The fit was attempted and failed. Written `null`.
    Missing,
}

impl TimeValue {
    pub fn value(self) -> Option<f64> {
        match self {
            TimeValue::Value(v) => Some(v),
            _ => None,
        }
    }
}

impl Serialize for TimeValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TimeValue::Value(v) => s.serialize_f64(*v),
            TimeValue::NotApplicable => s.serialize_str("n/a"),
            TimeValue::Missing => s.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for TimeValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Option::<Repr>::deserialize(d)? {
            None => Ok(TimeValue::Missing),
            Some(Repr::Num(v)) => Ok(TimeValue::Value(v)),
            Some(Repr::Text(t)) if t == "n/a" => Ok(TimeValue::NotApplicable),
            Some(Repr::Text(t)) => Err(serde::de::Error::custom(format!("unexpected time `{t}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FitQuality {
    #[serde(rename = "t_D")]
    pub t_d: Option<f64>,
    #[serde(rename = "t_R")]
    pub t_r: Option<f64>,
}

/// JSON summary written next to each run's CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub scenario: String,
    pub kind: String,
    /// Decoherence time: `e⁻¹` point of the fitted off-diagonal envelope.
    #[serde(rename = "t_D")]
    pub t_d: TimeValue,
    /// Relaxation time: `e⁻¹` point of the fitted distance to equilibrium.
    #[serde(rename = "t_R")]
    pub t_r: TimeValue,
    /// Units of `t_D` and `t_R`.
    pub units: String,
    pub equilibrium_value: Option<f64>,
    pub fit_r2: FitQuality,
    /// Exponent `p` of the selected `exp(−(t/t_D)^p)` fit.
    pub decay_exponent: Option<u32>,
    /// Time after which the discrete model recurs; `null` if it never does.
    pub recurrence_window: Option<f64>,
    /// Earliest time the monitored pairings stay within epsilon of equilibrium.
    pub weak_limit_time: Option<f64>,
    pub flags: Vec<String>,
}

pub const TIME_UNITS: &str = "1/energy (hbar = 1)";

impl FitReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "n/a")]
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingRow {
    pub scenario: String,
    pub kind: String,
    #[serde(rename = "t_D")]
    pub t_d: TimeValue,
    #[serde(rename = "t_R")]
    pub t_r: TimeValue,
    /// `t_R / t_D` when both exist.
    pub ratio: Option<f64>,
    /// Whether `t_D < t_R`.
    pub verdict: Verdict,
    pub recurrence_window: Option<f64>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub units: String,
    pub rows: Vec<OrderingRow>,
}

/// Tabulates `t_D` against `t_R` for each run and checks `t_D < t_R` where
/// both are defined.
pub fn ordering_report(fits: &[FitReport]) -> Result<OrderingReport> {
    if fits.is_empty() {
        return Err(Error::invalid("ordering report needs at least one fit"));
    }
    let rows = fits
        .iter()
        .map(|f| {
            let (ratio, verdict) = match (f.t_d.value(), f.t_r.value()) {
                (Some(d), Some(r)) => (
                    Some(r / d),
                    if d < r { Verdict::Pass } else { Verdict::Fail },
                ),
                _ => (None, Verdict::NotApplicable),
            };
            OrderingRow {
                scenario: f.scenario.clone(),
                kind: f.kind.clone(),
                t_d: f.t_d,
                t_r: f.t_r,
                ratio,
                verdict,
                recurrence_window: f.recurrence_window,
                flags: f.flags.clone(),
            }
        })
        .collect();
    Ok(OrderingReport {
        units: TIME_UNITS.to_string(),
        rows,
    })
}

fn cell(v: TimeValue) -> String {
    match v {
        TimeValue::Value(x) => format!("{x:.6}"),
        TimeValue::NotApplicable => "n/a".to_string(),
        TimeValue::Missing => "no fit".to_string(),
    }
}

impl OrderingReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("times in {}\n", self.units);
        writeln!(
            out,
            "{:<24} {:<14} {:>12} {:>12} {:>10} {:>8}  recurrence",
            "scenario", "kind", "t_D", "t_R", "t_R/t_D", "t_D<t_R"
        )
        .unwrap();
        for r in &self.rows {
            let ratio = r.ratio.map_or("-".to_string(), |x| format!("{x:.3}"));
            let verdict = match r.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::NotApplicable => "n/a",
            };
            let rec = r
                .recurrence_window
                .map_or("none".to_string(), |x| format!("{x:.4}"));
            writeln!(
                out,
                "{:<24} {:<14} {:>12} {:>12} {:>10} {:>8}  {}",
                r.scenario,
                r.kind,
                cell(r.t_d),
                cell(r.t_r),
                ratio,
                verdict,
                rec
            )
            .unwrap();
            for f in &r.flags {
                writeln!(out, "    flag: {f}").unwrap();
            }
        }
        out
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.verdict != Verdict::Fail)
    }
}
