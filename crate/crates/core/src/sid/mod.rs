//! Self-induced decoherence on a discretized energy continuum.
//!
//! Kernels are sampled on an [`EnergyGrid`]. An off-diagonal kernel entry
//! `k[(a, b)]` holds `K(ω_a, ω_b)`; for states this is the matrix element
//! `⟨ω_a|ρ|ω_b⟩`, so unitary evolution multiplies it by `e^{-i(ω_a − ω_b)t}`.
//! The diagonal ("singular") parts are kept as separate profiles and are
//! never touched by the evolution.

mod kernels;
mod measurement;
mod oracle;
mod projector;
mod smoothing;

pub use kernels::{DiagProfile, KernelFamily, LatticeKernel};
pub use measurement::{
    build_vanhove_from_measurements, GridKernelSource, KernelSource, VanHoveMeasurement,
    WavePacketProjector,
};
pub use oracle::{discretized_unitary_oracle, DEFAULT_ORACLE_CAP};
pub use projector::{
    sid_projector, ComponentClass, ComponentKernel, GeneralKernelObservable, KernelComponent,
};
pub use smoothing::{smooth_functional, Cutoff, FourierBasis, SmoothedFunction, Taper};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_deviation, CompensatedSum};
use crate::{CMatrix, C64};

/// Strictly increasing energies with positive quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyGrid {
    omega: Vec<f64>,
    weights: Vec<f64>,
}

impl EnergyGrid {
    /// `n` equally spaced points on `[lo, hi]` with trapezoid weights.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid(format!(
                "uniform grid needs n >= 2 and lo < hi (got n={n}, [{lo}, {hi}])"
            )));
        }
        if lo < 0.0 {
            return Err(Error::invalid("energies must be non-negative"));
        }
        let h = (hi - lo) / (n - 1) as f64;
        let omega = (0..n).map(|i| lo + h * i as f64).collect();
        Self::trapezoid(omega)
    }

    /// Arbitrary strictly increasing points with trapezoid weights.
    pub fn trapezoid(omega: Vec<f64>) -> Result<Self> {
        let n = omega.len();
        if n < 2 {
            return Err(Error::invalid("energy grid needs at least 2 points"));
        }
        let mut weights = vec![0.0; n];
        for i in 0..n - 1 {
            let h = omega[i + 1] - omega[i];
            weights[i] += 0.5 * h;
            weights[i + 1] += 0.5 * h;
        }
        Self::new(omega, weights)
    }

    pub fn new(omega: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if omega.len() < 2 || omega.len() != weights.len() {
            return Err(Error::invalid(
                "energy grid needs >= 2 points and one weight per point",
            ));
        }
        if omega.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("energies must be finite and non-negative"));
        }
        if omega.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("energies must be strictly increasing"));
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::invalid("quadrature weights must be positive"));
        }
        Ok(Self { omega, weights })
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn span(&self) -> f64 {
        self.omega[self.omega.len() - 1] - self.omega[0]
    }

    pub fn min_gap(&self) -> f64 {
        self.omega
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// `2π / min gap`: past this the sampled phases realign and the discrete
    /// sums stop being a faithful stand-in for the continuum.
    pub fn recurrence_time(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.min_gap()
    }

    /// `Σ w_i f_i`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        let mut s = CompensatedSum::new();
        for (w, v) in self.weights.iter().zip(f) {
            s.add(C64::new(w * v, 0.0));
        }
        s.value().re
    }
}

fn check_kernel(n: usize, diag: &[f64], offdiag: &CMatrix, herm_tol: f64) -> Result<()> {
    if diag.len() != n || offdiag.nrows() != n || offdiag.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: diag.len().max(offdiag.nrows()),
        });
    }
    if diag.iter().any(|v| !v.is_finite())
        || offdiag
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::invalid("kernel samples must be finite"));
    }
    let dev = hermitian_deviation(offdiag);
    if dev > herm_tol {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance: herm_tol,
        });
    }
    Ok(())
}

/// Van Hove observable `O(ω)δ(ω−ω′) + O(ω, ω′)` with a regular kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct VanHoveObservable {
    diag: Vec<f64>,
    offdiag: CMatrix,
}

impl VanHoveObservable {
    pub fn new(grid: &EnergyGrid, diag: Vec<f64>, offdiag: CMatrix) -> Result<Self> {
        check_kernel(grid.len(), &diag, &offdiag, 1e-12)?;
        Ok(Self { diag, offdiag })
    }

    /// `H = ∫ ω |ω) dω`: diagonal weight `ω`, no off-diagonal part.
    pub fn hamiltonian(grid: &EnergyGrid) -> Self {
        let n = grid.len();
        Self {
            diag: grid.omega().to_vec(),
            offdiag: CMatrix::zeros(n, n),
        }
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &CMatrix {
        &self.offdiag
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }
}

/// Van Hove state: non-negative normalized diagonal profile plus a regular
/// Hermitian off-diagonal kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct VanHoveState {
    diag: Vec<f64>,
    offdiag: CMatrix,
}

impl VanHoveState {
    pub fn new(grid: &EnergyGrid, diag: Vec<f64>, offdiag: CMatrix, norm_tol: f64) -> Result<Self> {
        check_kernel(grid.len(), &diag, &offdiag, 1e-12)?;
        if let Some(v) = diag.iter().find(|&&v| v < -1e-12) {
            return Err(Error::invalid(format!(
                "diagonal profile is negative ({v:e})"
            )));
        }
        let total = grid.integrate(&diag);
        if (total - 1.0).abs() > norm_tol {
            return Err(Error::NotUnitTrace {
                trace: total,
                tolerance: norm_tol,
            });
        }
        Ok(Self { diag, offdiag })
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &CMatrix {
        &self.offdiag
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Unitary evolution: the diagonal profile is copied untouched and every
    /// off-diagonal entry picks up `e^{-i(ω_a − ω_b)t}`. The lower triangle is
    /// the exact conjugate of the upper one.
    pub fn evolve(&self, grid: &EnergyGrid, t: f64) -> Result<VanHoveState> {
        check_grid(grid, self.len())?;
        let n = self.len();
        let w = grid.omega();
        let mut off = CMatrix::zeros(n, n);
        for b in 0..n {
            for a in 0..=b {
                let v = self.offdiag[(a, b)] * C64::from_polar(1.0, -(w[a] - w[b]) * t);
                off[(a, b)] = v;
                off[(b, a)] = v.conj();
            }
            off[(b, b)].im = 0.0;
            off[(b, b)].re = self.offdiag[(b, b)].re;
        }
        Ok(VanHoveState {
            diag: self.diag.clone(),
            offdiag: off,
        })
    }
}

fn check_grid(grid: &EnergyGrid, n: usize) -> Result<()> {
    if grid.len() != n {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: n,
        });
    }
    Ok(())
}

/// Split of `⟨O⟩_ρ(t)` into its diagonal and off-diagonal contributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidExpectation {
    /// Real part of the total.
    pub value: f64,
    pub diagonal: f64,
    pub offdiagonal: C64,
    /// `|Im|` of the total; round-off only for Hermitian kernels.
    pub imag_residue: f64,
}

/// `⟨O⟩_ρ(t) = ∫ρ(ω)O(ω)dω + ∫∫ ρ(ω′,ω) O(ω,ω′) e^{-i(ω′−ω)t} dω dω′`,
/// evaluated by quadrature with compensated, fixed-order summation.
pub fn expectation_sid(
    state: &VanHoveState,
    obs: &VanHoveObservable,
    grid: &EnergyGrid,
    t: f64,
) -> Result<SidExpectation> {
    check_grid(grid, state.len())?;
    check_grid(grid, obs.len())?;
    let n = grid.len();
    let w = grid.weights();
    let om = grid.omega();
    let phases: Vec<C64> = om.iter().map(|&x| C64::from_polar(1.0, -x * t)).collect();

    let diagonal = {
        let mut s = CompensatedSum::new();
        for i in 0..n {
            s.add(C64::new(w[i] * state.diag[i] * obs.diag[i], 0.0));
        }
        s.value().re
    };

    let mut total = CompensatedSum::new();
    for b in 0..n {
        // Row sum over a of ρ(ω_b, ω_a) O(ω_a, ω_b) e^{-i(ω_b − ω_a)t}.
        let mut row = CompensatedSum::new();
        for a in 0..n {
            row.add(state.offdiag[(b, a)] * obs.offdiag[(a, b)] * phases[a].conj() * w[a]);
        }
        total.add(row.value() * phases[b] * w[b]);
    }
    let offdiagonal = total.value();
    Ok(SidExpectation {
        value: diagonal + offdiagonal.re,
        diagonal,
        offdiagonal,
        imag_residue: offdiagonal.im.abs(),
    })
}

/// A state/observable pair on a grid, built from named families.
#[derive(Debug, Clone)]
pub struct SidScenario {
    pub grid: EnergyGrid,
    pub state: VanHoveState,
    pub observable: VanHoveObservable,
}

impl SidScenario {
    pub fn build(
        grid: EnergyGrid,
        state_diag: &DiagProfile,
        state_kernel: &KernelFamily,
        obs_diag: &DiagProfile,
        obs_kernel: &KernelFamily,
    ) -> Result<Self> {
        let state = VanHoveState::new(
            &grid,
            state_diag.sample_normalized(&grid)?,
            state_kernel.sample(&grid)?,
            1e-8,
        )?;
        let observable =
            VanHoveObservable::new(&grid, obs_diag.sample(&grid), obs_kernel.sample(&grid)?)?;
        if let Some(p) = kernel_decay_profile(state.offdiag(), &grid) {
            log::debug!("state kernel decay {p:?}");
        }
        Ok(Self {
            grid,
            state,
            observable,
        })
    }

    /// `n` points on `[0, 10]`, everything centred at 5. The state and
    /// observable kernels are Gaussian in `ω−ω′` with width chosen so their
    /// product is `∝ exp(−(ω−ω′)²/(2σ²))`; the off-diagonal contribution
    /// then decays exactly as `exp(−σ²t²/2)`. The observable's diagonal
    /// weight is `ω`.
    pub fn gaussian(sigma: f64, n: usize) -> Result<Self> {
        let grid = EnergyGrid::uniform(0.0, 10.0, n)?;
        let bump = |amp| KernelFamily::Gaussian {
            amp,
            center: 5.0,
            width: 0.5,
            sigma,
        };
        Self::build(
            grid,
            &DiagProfile::Gaussian {
                center: 5.0,
                width: 1.0,
            },
            &bump(0.1),
            &DiagProfile::Energy,
            &bump(1.0),
        )
    }

    pub fn expectation(&self, t: f64) -> Result<SidExpectation> {
        expectation_sid(&self.state, &self.observable, &self.grid, t)
    }

    pub fn limit(&self) -> Result<f64> {
        sid_limit(&self.state, &self.observable, &self.grid)
    }
}

/// Weak-limit value `∫ρ(ω)O(ω)dω`.
pub fn sid_limit(state: &VanHoveState, obs: &VanHoveObservable, grid: &EnergyGrid) -> Result<f64> {
    check_grid(grid, state.len())?;
    check_grid(grid, obs.len())?;
    let prod: Vec<f64> = state
        .diag
        .iter()
        .zip(&obs.diag)
        .map(|(r, o)| r * o)
        .collect();
    Ok(grid.integrate(&prod))
}

/// `⟨H⟩ = ∫ρ(ω) ω dω`.
pub fn energy_expectation(state: &VanHoveState, grid: &EnergyGrid) -> Result<f64> {
    check_grid(grid, state.len())?;
    let prod: Vec<f64> = state
        .diag
        .iter()
        .zip(grid.omega())
        .map(|(r, w)| r * w)
        .collect();
    Ok(grid.integrate(&prod))
}

/// How fast a kernel decays away from the diagonal, as a logged diagnostic of
/// its integrability. Not enforced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayProfile {
    pub exponential_rate: f64,
    pub exponential_r2: f64,
    pub power_exponent: f64,
    pub power_r2: f64,
}

/// Fits `max_{|ω−ω′|≈ν} |K|` against `ν` with an exponential and a power law.
/// Returns `None` if there are too few non-zero bands to fit.
pub fn kernel_decay_profile(kernel: &CMatrix, grid: &EnergyGrid) -> Option<DecayProfile> {
    let n = kernel.nrows();
    let om = grid.omega();
    let mut pts = Vec::new();
    for k in 1..n {
        let mut m: f64 = 0.0;
        let mut nu = 0.0;
        for a in 0..n - k {
            m = m.max(kernel[(a, a + k)].norm());
            nu += om[a + k] - om[a];
        }
        nu /= (n - k) as f64;
        if m > 1e-300 {
            pts.push((nu, m.ln()));
        }
    }
    if pts.len() < 3 {
        return None;
    }
    let (slope_e, _, r2_e) = crate::harness::fit::linear_regression(&pts);
    let log_pts: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x.ln(), y)).collect();
    let (slope_p, _, r2_p) = crate::harness::fit::linear_regression(&log_pts);
    let profile = DecayProfile {
        exponential_rate: -slope_e,
        exponential_r2: r2_e,
        power_exponent: -slope_p,
        power_r2: r2_p,
    };
    log::info!(
        "kernel decay: exp rate {:.4} (R2 {:.4}), power {:.4} (R2 {:.4})",
        profile.exponential_rate,
        profile.exponential_r2,
        profile.power_exponent,
        profile.power_r2
    );
    Some(profile)
}
