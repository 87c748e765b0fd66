//! Named kernel families used to build SID scenarios.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EnergyGrid;
use crate::error::{Error, Result};
use crate::{CMatrix, C64};

/// Diagonal profiles `ρ(ω)` or `O(ω)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum DiagProfile {
    /// `exp(−(ω−center)²/(2 width²))`, normalized by quadrature.
    Gaussian {
        center: f64,
        width: f64,
    },
    /// Constant, normalized by quadrature.
    Uniform,
    /// `O(ω) = ω`.
    Energy,
    /// `O(ω) = value`.
    Constant {
        value: f64,
    },
    Zero,
}

impl DiagProfile {
    /// Raw samples, not normalized.
    pub fn sample(&self, grid: &EnergyGrid) -> Vec<f64> {
        grid.omega()
            .iter()
            .map(|&w| match *self {
                DiagProfile::Gaussian { center, width } => {
                    (-(w - center).powi(2) / (2.0 * width * width)).exp()
                }
                DiagProfile::Uniform => 1.0,
                DiagProfile::Energy => w,
                DiagProfile::Constant { value } => value,
                DiagProfile::Zero => 0.0,
            })
            .collect()
    }

    /// Samples rescaled so the quadrature integrates to one.
    pub fn sample_normalized(&self, grid: &EnergyGrid) -> Result<Vec<f64>> {
        let mut v = self.sample(grid);
        let total = grid.integrate(&v);
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::invalid(format!(
                "profile {self:?} has no positive mass on the grid"
            )));
        }
        v.iter_mut().for_each(|x| *x /= total);
        Ok(v)
    }
}

/// Off-diagonal kernels. The analytic families factor into a Gaussian
/// bump in the mean energy `(ω+ω′)/2` times a profile in the difference
/// `ω−ω′`, so the product of two kernels from the same family has a known
/// Fourier transform along `ω−ω′`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum KernelFamily {
    /// `amp · exp(−(ω̄−center)²/(2 width²)) · exp(−ν²/(4 sigma²))`.
    /// A product of two of these decays as `exp(−sigma² t²/2)`.
    Gaussian {
        amp: f64,
        center: f64,
        width: f64,
        sigma: f64,
    },
    /// `amp · exp(−(ω̄−center)²/(2 width²)) · gamma/√(ν²+gamma²)`.
    /// A product of two of these decays as `exp(−gamma t)`.
    Lorentzian {
        amp: f64,
        center: f64,
        width: f64,
        gamma: f64,
    },
    /// Samples loaded from a `(ω, ω′, re, im)` table, bilinearly interpolated.
    Table {
        path: String,
    },
    Zero,
}

impl KernelFamily {
    pub fn sample(&self, grid: &EnergyGrid) -> Result<CMatrix> {
        match self {
            KernelFamily::Table { path } => LatticeKernel::load_csv(path)?.sample(grid),
            KernelFamily::Zero => Ok(CMatrix::zeros(grid.len(), grid.len())),
            _ => {
                let om = grid.omega();
                let n = om.len();
                Ok(CMatrix::from_fn(n, n, |a, b| {
                    C64::new(self.eval(om[a], om[b]), 0.0)
                }))
            }
        }
    }

    fn eval(&self, w: f64, wp: f64) -> f64 {
        let mean = 0.5 * (w + wp);
        let nu = w - wp;
        match *self {
            KernelFamily::Gaussian {
                amp,
                center,
                width,
                sigma,
            } => {
                amp * (-(mean - center).powi(2) / (2.0 * width * width)).exp()
                    * (-nu * nu / (4.0 * sigma * sigma)).exp()
            }
            KernelFamily::Lorentzian {
                amp,
                center,
                width,
                gamma,
            } => {
                amp * (-(mean - center).powi(2) / (2.0 * width * width)).exp() * gamma
                    / (nu * nu + gamma * gamma).sqrt()
            }
            _ => 0.0,
        }
    }
}

/// Complex kernel samples on a rectangular `(ω, ω′)` lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeKernel {
    rows: Vec<f64>,
    cols: Vec<f64>,
    /// `values[(i, j)] = K(rows[i], cols[j])`.
    values: CMatrix,
}

impl LatticeKernel {
    pub fn new(rows: Vec<f64>, cols: Vec<f64>, values: CMatrix) -> Result<Self> {
        if rows.len() < 2 || cols.len() < 2 {
            return Err(Error::invalid("lattice needs at least 2 nodes per axis"));
        }
        if values.nrows() != rows.len() || values.ncols() != cols.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len() * cols.len(),
                found: values.len(),
            });
        }
        for axis in [&rows, &cols] {
            if axis.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::invalid("lattice nodes must be strictly increasing"));
            }
        }
        Ok(Self { rows, cols, values })
    }

    /// Parses `omega,omega_prime,re,im` lines. Lines starting with `#` and a
    /// non-numeric header line are skipped. Every lattice point must appear
    /// exactly once.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected 4 fields, found {}", fields.len()),
                });
            }
            let parsed: std::result::Result<Vec<f64>, _> =
                fields.iter().map(|f| f.parse::<f64>()).collect();
            match parsed {
                Ok(v) => entries.push((idx + 1, v)),
                Err(e) if entries.is_empty() && fields[0].parse::<f64>().is_err() => {
                    log::debug!("skipping header line {}: {e}", idx + 1);
                }
                Err(e) => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        message: e.to_string(),
                    })
                }
            }
        }
        let axis = |k: usize| {
            let mut v: Vec<f64> = entries.iter().map(|(_, e)| e[k]).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        };
        let rows = axis(0);
        let cols = axis(1);
        if rows.len() * cols.len() != entries.len() {
            return Err(Error::invalid(format!(
                "table is not a complete lattice: {} rows x {} cols but {} entries",
                rows.len(),
                cols.len(),
                entries.len()
            )));
        }
        let mut values = CMatrix::zeros(rows.len(), cols.len());
        let mut seen = vec![false; entries.len()];
        for (line, e) in &entries {
            let i = rows.binary_search_by(|x| x.total_cmp(&e[0])).unwrap();
            let j = cols.binary_search_by(|x| x.total_cmp(&e[1])).unwrap();
            let k = i * cols.len() + j;
            if seen[k] {
                return Err(Error::Parse {
                    line: *line,
                    message: format!("duplicate lattice point ({}, {})", e[0], e[1]),
                });
            }
            seen[k] = true;
            values[(i, j)] = C64::new(e[2], e[3]);
        }
        Self::new(rows, cols, values)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_csv(&std::fs::read_to_string(path)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega,omega_prime,re,im\n");
        for (i, w) in self.rows.iter().enumerate() {
            for (j, wp) in self.cols.iter().enumerate() {
                let z = self.values[(i, j)];
                out.push_str(&format!("{w},{wp},{},{}\n", z.re, z.im));
            }
        }
        out
    }

    pub fn rows(&self) -> &[f64] {
        &self.rows
    }

    pub fn cols(&self) -> &[f64] {
        &self.cols
    }

    pub fn values(&self) -> &CMatrix {
        &self.values
    }

    /// Bilinear interpolation; exact at lattice nodes, zero outside the lattice.
    pub fn interpolate(&self, w: f64, wp: f64) -> C64 {
        let (Some((i, fx)), Some((j, fy))) = (locate(&self.rows, w), locate(&self.cols, wp)) else {
            return C64::new(0.0, 0.0);
        };
        let v = &self.values;
        let a = v[(i, j)] * (1.0 - fx) + v[(i + 1, j)] * fx;
        let b = v[(i, j + 1)] * (1.0 - fx) + v[(i + 1, j + 1)] * fx;
        a * (1.0 - fy) + b * fy
    }

    /// Interpolated kernel on `grid × grid`, made exactly Hermitian from its
    /// upper triangle.
    pub fn sample(&self, grid: &EnergyGrid) -> Result<CMatrix> {
        let om = grid.omega();
        let n = om.len();
        let mut k = CMatrix::zeros(n, n);
        let mut worst: f64 = 0.0;
        for b in 0..n {
            for a in 0..=b {
                let z = self.interpolate(om[a], om[b]);
                let zt = self.interpolate(om[b], om[a]);
                worst = worst.max((z - zt.conj()).norm());
                k[(a, b)] = z;
                k[(b, a)] = z.conj();
            }
            k[(b, b)].im = 0.0;
        }
        if worst > 1e-9 {
            return Err(Error::NotHermitian {
                deviation: worst,
                tolerance: 1e-9,
            });
        }
        Ok(k)
    }
}

/// Cell index and fractional offset of `x` along `axis`; `None` outside.
pub(crate) fn locate(axis: &[f64], x: f64) -> Option<(usize, f64)> {
    let n = axis.len();
    let (lo, hi) = (axis[0], axis[n - 1]);
    let slack = 1e-12 * (hi - lo).abs().max(1.0);
    if !(x >= lo - slack && x <= hi + slack) {
        return None;
    }
    let x = x.clamp(lo, hi);
    let i = match axis.partition_point(|&a| a <= x) {
        0 => 0,
        p => (p - 1).min(n - 2),
    };
    let f = (x - axis[i]) / (axis[i + 1] - axis[i]);
    Some((i, f))
}
