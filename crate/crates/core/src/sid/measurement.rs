//! Building a van Hove observable from finite-resolution measurements.
//!
//! An instrument with resolution `Δω` only sees the kernel at lattice points
//! `ω_min + kΔω`. The van Hove surrogate interpolates those samples; any
//! observable that agrees on the lattice is indistinguishable from it.

use super::kernels::{locate, LatticeKernel};
use super::projector::{ComponentClass, ComponentKernel, GeneralKernelObservable};
use super::{EnergyGrid, VanHoveObservable, VanHoveState};
use crate::error::{Error, Result};
use crate::{CMatrix, C64};

/// Pointwise access to an observable kernel `Z(ω)δ(ω−ω′) + Z(ω, ω′)`.
pub trait KernelSource {
    fn diag(&self, omega: f64) -> f64;
    fn offdiag(&self, omega: f64, omega_prime: f64) -> C64;
}

/// `|z⟩⟨z|` for a normalized Gaussian packet
/// `z(ω) = (2πσ²)^{-1/4} exp(−(ω−ω₀)²/(4σ²))`. Its kernel is purely regular.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePacketProjector {
    pub center: f64,
    pub sigma: f64,
}

impl WavePacketProjector {
    pub fn amplitude(&self, omega: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        (2.0 * std::f64::consts::PI * s2).powf(-0.25)
            * (-(omega - self.center).powi(2) / (4.0 * s2)).exp()
    }
}

impl KernelSource for WavePacketProjector {
    fn diag(&self, _omega: f64) -> f64 {
        0.0
    }

    fn offdiag(&self, omega: f64, omega_prime: f64) -> C64 {
        C64::new(self.amplitude(omega) * self.amplitude(omega_prime), 0.0)
    }
}

/// A grid-sampled observable viewed as a continuous kernel by linear
/// (diagonal) and bilinear (regular part) interpolation. Singular components
/// carry no regular mean values and are ignored.
#[derive(Debug, Clone)]
pub struct GridKernelSource {
    omega: Vec<f64>,
    diag: Vec<f64>,
    regular: CMatrix,
}

impl GridKernelSource {
    pub fn new(grid: &EnergyGrid, obs: &GeneralKernelObservable) -> Result<Self> {
        let n = grid.len();
        if obs.diag.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: obs.diag.len(),
            });
        }
        let mut regular = CMatrix::zeros(n, n);
        for c in &obs.components {
            match (c.class, &c.kernel) {
                (Some(ComponentClass::Regular), ComponentKernel::Sampled(k)) => {
                    if k.nrows() != n || k.ncols() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            found: k.nrows(),
                        });
                    }
                    regular += k;
                }
                (Some(ComponentClass::Singular), _) => {}
                _ => return Err(Error::invalid(
                    "measurement source needs every component tagged, with regular parts sampled",
                )),
            }
        }
        Ok(Self {
            omega: grid.omega().to_vec(),
            diag: obs.diag.clone(),
            regular,
        })
    }
}

impl KernelSource for GridKernelSource {
    fn diag(&self, omega: f64) -> f64 {
        match locate(&self.omega, omega) {
            Some((i, f)) => self.diag[i] * (1.0 - f) + self.diag[i + 1] * f,
            None => 0.0,
        }
    }

    fn offdiag(&self, omega: f64, omega_prime: f64) -> C64 {
        let (Some((i, fx)), Some((j, fy))) =
            (locate(&self.omega, omega), locate(&self.omega, omega_prime))
        else {
            return C64::new(0.0, 0.0);
        };
        let r = &self.regular;
        let a = r[(i, j)] * (1.0 - fx) + r[(i + 1, j)] * fx;
        let b = r[(i, j + 1)] * (1.0 - fx) + r[(i + 1, j + 1)] * fx;
        a * (1.0 - fy) + b * fy
    }
}

/// Result of the lattice construction.
#[derive(Debug, Clone)]
pub struct VanHoveMeasurement {
    pub observable: VanHoveObservable,
    /// The measured mean values.
    pub lattice: LatticeKernel,
    pub delta_omega: f64,
    /// Largest `|∂_ω Z| + |∂_ω′ Z|` seen in finite differences between
    /// neighbouring lattice samples.
    pub gradient_bound: f64,
}

impl VanHoveMeasurement {
    /// `C` in `|⟨Z⟩_ρ − ⟨Z_VH⟩_ρ| ≤ C·Δω`, using the measured gradient bound
    /// and the weighted `L¹` norm of the state kernel.
    pub fn error_constant(&self, state: &VanHoveState, grid: &EnergyGrid) -> f64 {
        let w = grid.weights();
        let k = state.offdiag();
        let mut l1 = 0.0;
        for b in 0..w.len() {
            for a in 0..w.len() {
                l1 += w[a] * w[b] * k[(a, b)].norm();
            }
        }
        self.gradient_bound * l1
    }

    pub fn error_bound(&self, state: &VanHoveState, grid: &EnergyGrid) -> f64 {
        self.error_constant(state, grid) * self.delta_omega
    }
}

/// Samples `Z` on a `Δω` lattice covering the grid and interpolates back to
/// the grid (linear on the diagonal, bilinear off it).
pub fn build_vanhove_from_measurements(
    source: &dyn KernelSource,
    grid: &EnergyGrid,
    delta_omega: f64,
) -> Result<VanHoveMeasurement> {
    let span = grid.span();
    if !(delta_omega > 0.0) || !delta_omega.is_finite() {
        return Err(Error::invalid("resolution must be positive and finite"));
    }
    if delta_omega > span {
        return Err(Error::invalid(format!(
            "resolution {delta_omega} exceeds the grid span {span}"
        )));
    }
    let lo = grid.omega()[0];
    let cells = (span / delta_omega - 1e-9).ceil().max(1.0) as usize;
    let nodes: Vec<f64> = (0..=cells).map(|k| lo + delta_omega * k as f64).collect();
    let m = nodes.len();

    let values = CMatrix::from_fn(m, m, |i, j| source.offdiag(nodes[i], nodes[j]));
    let diag_nodes: Vec<f64> = nodes.iter().map(|&w| source.diag(w)).collect();

    let mut gradient_bound: f64 = 0.0;
    for i in 0..m - 1 {
        for j in 0..m - 1 {
            let gx = (values[(i + 1, j)] - values[(i, j)]).norm() / delta_omega;
            let gy = (values[(i, j + 1)] - values[(i, j)]).norm() / delta_omega;
            gradient_bound = gradient_bound.max(gx + gy);
        }
    }

    let lattice = LatticeKernel::new(nodes.clone(), nodes.clone(), values)?;
    let offdiag = lattice.sample(grid)?;
    let diag: Vec<f64> = grid
        .omega()
        .iter()
        .map(|&w| match locate(&nodes, w) {
            Some((i, f)) => diag_nodes[i] * (1.0 - f) + diag_nodes[i + 1] * f,
            None => 0.0,
        })
        .collect();
    log::info!("lattice resolution {delta_omega}: {m} nodes, gradient bound {gradient_bound:.4e}");
    Ok(VanHoveMeasurement {
        observable: VanHoveObservable::new(grid, diag, offdiag)?,
        lattice,
        delta_omega,
        gradient_bound,
    })
}
