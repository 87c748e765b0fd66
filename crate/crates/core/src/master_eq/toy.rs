//! Three-level dissipative fixture with separated time scales.
//!
//! Coherences `ρ_ij` (i ≠ j) rotate at the Bohr frequencies and decay at
//! rate `γ_D`; populations relax to `p_eq` at rate `γ_R`:
//!
//! `dρ_ij/dt = −i(ω_i − ω_j)ρ_ij − γ_D ρ_ij`, `dp/dt = γ_R (p_eq 1ᵀ − I) p`.
//!
//! Both have closed forms, so the fixture is its own oracle. With
//! `γ_D > γ_R` off-diagonal pairings settle before the populations do.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liouville::DensityOperator;
use crate::{CMatrix, CVector, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DissipativeToy {
    pub energies: Vec<f64>,
    pub gamma_d: f64,
    pub gamma_r: f64,
    pub equilibrium: Vec<f64>,
}

impl Default for DissipativeToy {
    fn default() -> Self {
        Self {
            energies: vec![0.0, 1.0, 2.3],
            gamma_d: 1.0,
            gamma_r: 0.2,
            equilibrium: vec![0.5, 0.3, 0.2],
        }
    }
}

impl DissipativeToy {
    pub fn validate(&self) -> Result<()> {
        let d = self.energies.len();
        if d < 2 || self.equilibrium.len() != d {
            return Err(Error::invalid(
                "fixture needs >= 2 levels and one equilibrium population per level",
            ));
        }
        if !(self.gamma_d > 0.0 && self.gamma_r > 0.0) {
            return Err(Error::invalid("rates must be positive"));
        }
        let total: f64 = self.equilibrium.iter().sum();
        if self.equilibrium.iter().any(|&p| p < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(
                "equilibrium populations must be a probability vector",
            ));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn decoherence_time(&self) -> f64 {
        1.0 / self.gamma_d
    }

    pub fn relaxation_time(&self) -> f64 {
        1.0 / self.gamma_r
    }

    /// Uniform superposition `|ψ⟩ = Σ|i⟩/√d`.
    pub fn initial_state(&self) -> DensityOperator {
        let d = self.dim();
        let psi = CVector::from_element(d, C64::new(1.0 / (d as f64).sqrt(), 0.0));
        DensityOperator::from_pure(&psi).expect("normalized by construction")
    }

    pub fn equilibrium_state(&self) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(
            self.dim(),
            self.equilibrium.iter().map(|&p| C64::new(p, 0.0)),
        ))
    }

    /// Closed-form `ρ(t)`.
    pub fn state_at(&self, rho0: &CMatrix, t: f64) -> CMatrix {
        let d = self.dim();
        let relax = (-self.gamma_r * t).exp();
        let dephase = (-self.gamma_d * t).exp();
        CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(
                    self.equilibrium[i] + relax * (rho0[(i, i)].re - self.equilibrium[i]),
                    0.0,
                )
            } else {
                rho0[(i, j)]
                    * dephase
                    * C64::from_polar(1.0, -(self.energies[i] - self.energies[j]) * t)
            }
        })
    }

    /// Generator `G` with `d vec(ρ)/dt = G vec(ρ)`.
    pub fn generator(&self) -> CMatrix {
        let d = self.dim();
        let mut g = CMatrix::zeros(d * d, d * d);
        for j in 0..d {
            for i in 0..d {
                let k = i + j * d;
                if i == j {
                    for m in 0..d {
                        let km = m + m * d;
                        g[(k, km)] += C64::new(self.gamma_r * self.equilibrium[i], 0.0);
                    }
                    g[(k, k)] -= C64::new(self.gamma_r, 0.0);
                } else {
                    g[(k, k)] = C64::new(-self.gamma_d, -(self.energies[i] - self.energies[j]));
                }
            }
        }
        g
    }

    /// `‖Qρ‖_F` (off-diagonal part) and `‖Pρ − ρ_eq‖_F` (population distance).
    pub fn channels(&self, rho: &CMatrix) -> (f64, f64) {
        let d = self.dim();
        let mut off = 0.0;
        let mut diag = 0.0;
        for j in 0..d {
            for i in 0..d {
                if i == j {
                    diag += (rho[(i, i)].re - self.equilibrium[i]).powi(2);
                } else {
                    off += rho[(i, j)].norm_sqr();
                }
            }
        }
        (off.sqrt(), diag.sqrt())
    }
}
