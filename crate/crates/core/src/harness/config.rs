//! Scenario configuration files.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! kind = "sid-kernel"          # eid-spin-bath | sid-kernel | master-eq-toy
//! seed = 7
//!
//! [times]
//! t_max = 20.0
//! samples = 401                # or: dt = 0.05
//!
//! [tolerances]                 # optional, any subset
//! ode_rel = 1e-9
//!
//! [analysis]                   # optional
//! epsilon = 1e-3
//!
//! [sid]                        # read when kind = "sid-kernel"
//! grid = { lo = 0.0, hi = 10.0, n = 400 }
//! state_kernel = { type = "gaussian", amp = 0.1, center = 5.0, width = 0.5, sigma = 0.5 }
//! ```
//!
//! Every section except `kind` and `times` has defaults; unknown keys are
//! rejected with the line they appear on.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::eid::{BlochAngles, DEFAULT_MAX_SPINS};
use crate::error::{Error, Result};
use crate::master_eq::DissipativeToy;
use crate::sid::{DiagProfile, KernelFamily};
use crate::tolerances::Tolerances;

/// Largest SID grid a config may request; the double sum stores `N²` complex samples.
pub const SID_GRID_CAP: usize = 2048;
pub const MIN_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    EidSpinBath,
    SidKernel,
    MasterEqToy,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::EidSpinBath => "eid-spin-bath",
            ScenarioKind::SidKernel => "sid-kernel",
            ScenarioKind::MasterEqToy => "master-eq-toy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Times {
    pub t_max: f64,
    pub samples: Option<usize>,
    pub dt: Option<f64>,
}

impl Times {
    pub fn sample_count(&self) -> usize {
        match (self.samples, self.dt) {
            (Some(n), _) => n,
            (None, Some(dt)) => (self.t_max / dt).round() as usize + 1,
            (None, None) => 0,
        }
    }

    pub fn sample_times(&self) -> Vec<f64> {
        let n = self.sample_count();
        match (self.samples, self.dt) {
            (None, Some(dt)) => (0..n).map(|k| k as f64 * dt).collect(),
            _ => (0..n)
                .map(|k| self.t_max * k as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Analysis {
    /// Band for weak-limit detection.
    pub epsilon: f64,
    /// Relative envelope level where decay fits stop.
    pub fit_floor: f64,
}

impl Default for Analysis {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            fit_floor: (-2.0f64).exp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            lo: 0.0,
            hi: 10.0,
            n: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SidConfig {
    pub grid: GridConfig,
    pub state_diag: DiagProfile,
    pub state_kernel: KernelFamily,
    pub observable_diag: DiagProfile,
    pub observable_kernel: KernelFamily,
}

impl Default for SidConfig {
    fn default() -> Self {
        let bump = |amp| KernelFamily::Gaussian {
            amp,
            center: 5.0,
            width: 0.5,
            sigma: 0.5,
        };
        Self {
            grid: GridConfig::default(),
            state_diag: DiagProfile::Gaussian {
                center: 5.0,
                width: 1.0,
            },
            state_kernel: bump(0.1),
            observable_diag: DiagProfile::Energy,
            observable_kernel: bump(1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BathPreparation {
    /// Every bath spin in `|+⟩`.
    Plus,
    /// Every bath spin in `|0⟩`.
    Up,
    /// Bloch angles drawn uniformly from the seed.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpinBathConfig {
    pub n_spins: usize,
    /// Couplings are drawn uniformly from `[coupling_min, coupling_max)`
    /// unless `couplings` lists them explicitly.
    pub coupling_min: f64,
    pub coupling_max: f64,
    pub couplings: Option<Vec<f64>>,
    pub bath: BathPreparation,
    pub qubit: BlochAngles,
    pub max_spins: usize,
}

impl Default for SpinBathConfig {
    fn default() -> Self {
        Self {
            n_spins: 8,
            coupling_min: 0.5,
            coupling_max: 1.5,
            couplings: None,
            bath: BathPreparation::Plus,
            qubit: BlochAngles::PLUS,
            max_spins: DEFAULT_MAX_SPINS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Label used in reports; defaults to the kind.
    #[serde(default)]
    pub name: Option<String>,
    pub kind: ScenarioKind,
    #[serde(default)]
    pub seed: u64,
    pub times: Times,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub analysis: Analysis,
    #[serde(default)]
    pub sid: SidConfig,
    #[serde(default)]
    pub spin_bath: SpinBathConfig,
    #[serde(default)]
    pub toy: DissipativeToy,
    /// Directory that relative paths (table kernels) resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn config_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        location: location.into(),
        message: message.into(),
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| {
            let location = match e.span() {
                Some(span) => {
                    let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
                    format!("line {line}")
                }
                None => "document".to_string(),
            };
            config_err(location, e.message().trim().to_string())
        })?;
        s.validate()?;
        Ok(s)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut s = Self::parse(&text).map_err(|e| match e {
            Error::Config { location, message } => {
                config_err(format!("{}:{location}", path.display()), message)
            }
            other => other,
        })?;
        s.base_dir = path.parent().map(Path::to_path_buf);
        Ok(s)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn label(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| self.kind.as_str().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.times;
        if !(t.t_max > 0.0 && t.t_max.is_finite()) {
            return Err(config_err("times.t_max", "must be positive and finite"));
        }
        match (t.samples, t.dt) {
            (Some(_), Some(_)) => {
                return Err(config_err(
                    "times",
                    "give either `samples` or `dt`, not both",
                ))
            }
            (None, None) => return Err(config_err("times", "missing `samples` or `dt`")),
            (None, Some(dt)) if !(dt > 0.0) => {
                return Err(config_err("times.dt", "must be positive"))
            }
            _ => {}
        }
        if t.sample_count() < MIN_SAMPLES {
            return Err(config_err(
                "times",
                format!(
                    "needs at least {MIN_SAMPLES} samples, got {}",
                    t.sample_count()
                ),
            ));
        }
        let a = &self.analysis;
        if !(a.epsilon > 0.0) {
            return Err(config_err("analysis.epsilon", "must be positive"));
        }
        if !(a.fit_floor > 0.0 && a.fit_floor < 1.0 / std::f64::consts::E) {
            return Err(config_err("analysis.fit_floor", "must lie in (0, 1/e)"));
        }
        match self.kind {
            ScenarioKind::SidKernel => {
                let g = &self.sid.grid;
                if g.n > SID_GRID_CAP {
                    return Err(Error::ResourceCap(format!(
                        "sid.grid.n = {} exceeds the cap of {SID_GRID_CAP}",
                        g.n
                    )));
                }
                if g.n < 2 || !(g.hi > g.lo) || g.lo < 0.0 {
                    return Err(config_err("sid.grid", "needs n >= 2 and 0 <= lo < hi"));
                }
            }
            ScenarioKind::EidSpinBath => {
                let b = &self.spin_bath;
                let n = b.couplings.as_ref().map_or(b.n_spins, Vec::len);
                if n == 0 {
                    return Err(config_err("spin_bath.n_spins", "must be at least 1"));
                }
                if n > b.max_spins {
                    return Err(Error::ResourceCap(format!(
                        "spin bath of {n} spins needs a 2^{} state vector; the cap is {} spins",
                        n + 1,
                        b.max_spins
                    )));
                }
                if b.couplings.is_none() && !(b.coupling_max > b.coupling_min) {
                    return Err(config_err(
                        "spin_bath",
                        "coupling_max must exceed coupling_min",
                    ));
                }
            }
            ScenarioKind::MasterEqToy => {
                self.toy
                    .validate()
                    .map_err(|e| config_err("toy", e.to_string()))?;
            }
        }
        Ok(())
    }

    /// Resolves a possibly relative path against the config's directory.
    pub fn resolve(&self, p: &str) -> PathBuf {
        let path = Path::new(p);
        match &self.base_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let s = Scenario::parse("kind = \"sid-kernel\"\n[times]\nt_max = 10.0\nsamples = 101\n")
            .unwrap();
        assert_eq!(s.sid, SidConfig::default());
        assert_eq!(s.times.sample_times()[100], 10.0);
        assert_eq!(s.label(), "sid-kernel");
        let back = Scenario::parse(&s.to_toml()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn dt_sampling() {
        let s =
            Scenario::parse("kind = \"master-eq-toy\"\n[times]\nt_max = 2.0\ndt = 0.1\n").unwrap();
        let t = s.times.sample_times();
        assert_eq!(t.len(), 21);
        assert!((t[20] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn diagnostics_name_the_line_or_field() {
        let bad = "kind = \"sid-kernel\"\n[times]\nt_max = 10.0\nsamples = 101\nbogus = 1\n";
        match Scenario::parse(bad) {
            Err(Error::Config { location, .. }) => assert_eq!(location, "line 5"),
            other => panic!("{other:?}"),
        }
        let few = "kind = \"sid-kernel\"\n[times]\nt_max = 10.0\nsamples = 5\n";
        assert!(
            matches!(Scenario::parse(few), Err(Error::Config { location, .. }) if location == "times")
        );
        let neg = "kind = \"sid-kernel\"\n[times]\nt_max = -1.0\nsamples = 50\n";
        assert!(
            matches!(Scenario::parse(neg), Err(Error::Config { location, .. }) if location == "times.t_max")
        );
        let kind = "kind = \"nope\"\n[times]\nt_max = 1.0\nsamples = 50\n";
        assert!(matches!(Scenario::parse(kind), Err(Error::Config { .. })));
        let kern = "kind = \"sid-kernel\"\n[times]\nt_max = 1.0\nsamples = 50\n[sid]\nstate_kernel = { type = \"gaussian\", amp = 1.0 }\n";
        assert!(
            matches!(Scenario::parse(kern), Err(Error::Config { location, .. }) if location == "line 6")
        );
    }

    #[test]
    fn resource_caps_are_refused() {
        let big = "kind = \"eid-spin-bath\"\n[times]\nt_max = 1.0\nsamples = 50\n[spin_bath]\nn_spins = 30\n";
        assert!(matches!(Scenario::parse(big), Err(Error::ResourceCap(_))));
        let grid = "kind = \"sid-kernel\"\n[times]\nt_max = 1.0\nsamples = 50\n[sid]\ngrid = { n = 100000 }\n";
        assert!(matches!(Scenario::parse(grid), Err(Error::ResourceCap(_))));
    }
}
