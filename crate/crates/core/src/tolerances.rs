use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances. Every check in the crate reads its threshold from
/// here so that callers (and the CLI `--tol-override` flag) can tune them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub hermitian: f64,
    pub trace: f64,
    pub positivity: f64,
    pub biorthogonality: f64,
    pub idempotence: f64,
    pub degeneracy: f64,
    pub sid_normalization: f64,
    pub ode_abs: f64,
    pub ode_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-12,
            trace: 1e-12,
            positivity: 1e-10,
            biorthogonality: 1e-10,
            idempotence: 1e-10,
            degeneracy: 1e-9,
            sid_normalization: 1e-8,
            ode_abs: 1e-10,
            ode_rel: 1e-8,
        }
    }
}

impl Tolerances {
    /// Apply a `key=value` override, as accepted by the CLI.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::invalid(format!(
                "tolerance {key} must be positive and finite, got {value}"
            )));
        }
        let slot = match key {
            "hermitian" => &mut self.hermitian,
            "trace" => &mut self.trace,
            "positivity" => &mut self.positivity,
            "biorthogonality" => &mut self.biorthogonality,
            "idempotence" => &mut self.idempotence,
            "degeneracy" => &mut self.degeneracy,
            "sid_normalization" => &mut self.sid_normalization,
            "ode_abs" => &mut self.ode_abs,
            "ode_rel" => &mut self.ode_rel,
            _ => return Err(Error::invalid(format!("unknown tolerance key `{key}`"))),
        };
        *slot = value;
        Ok(())
    }

    /// Parse and apply `key=value`.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (key, value) = spec
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("expected key=value, got `{spec}`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad tolerance value in `{spec}`")))?;
        self.set(key.trim(), value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_parses() {
        let mut t = Tolerances::default();
        t.apply_override("ode_rel=1e-6").unwrap();
        assert_eq!(t.ode_rel, 1e-6);
        assert!(t.apply_override("bogus=1").is_err());
        assert!(t.apply_override("trace=-1").is_err());
        assert!(t.apply_override("trace").is_err());
    }
}
