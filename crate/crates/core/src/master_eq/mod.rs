//! The master equation as a projected Liouville equation.
//!
//! States are evolved as column-stacked vectors with `i dρ/dt = Lρ`,
//! `L = I⊗H − Hᵀ⊗I`. A coarse-graining [`SuperOp`] `π` acts on states
//! through its bra action, which on `vec(ρ)` is the matrix `π†`. For the
//! orthogonal projectors used here (EID, diagonal-keeping) `π† = π`.

mod toy;

pub use toy::DissipativeToy;

use std::cell::RefCell;

use crate::eid::Propagator;
use crate::error::{Error, Result};
use crate::linalg::{frobenius, hermitian_deviation, hermitian_eigen, unvectorize, vectorize};
use crate::liouville::{CoarseState, DensityOperator, ObservableOperator, StateBra, SuperOp};
use crate::ode::{integrate, OdeOptions};
use crate::{CMatrix, CVector, C64};

const PROJECTOR_TOL: f64 = 1e-10;

/// `L|ρ) = |[H, ρ])`.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    hamiltonian: ObservableOperator,
    superop: SuperOp,
}

pub fn build_liouvillian(h: &ObservableOperator) -> Liouvillian {
    let d = h.dim();
    let id = CMatrix::identity(d, d);
    let m =
        crate::linalg::kron(&id, h.matrix()) - crate::linalg::kron(&h.matrix().transpose(), &id);
    Liouvillian {
        hamiltonian: h.clone(),
        superop: SuperOp::new(d, m).expect("kron dimensions are consistent"),
    }
}

impl Liouvillian {
    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &ObservableOperator {
        &self.hamiltonian
    }

    pub fn superop(&self) -> &SuperOp {
        &self.superop
    }

    pub fn matrix(&self) -> &CMatrix {
        self.superop.matrix()
    }

    /// `[H, ρ]` through the superoperator.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        self.superop.apply(rho)
    }

    /// Eigenvalues of `L` (the Bohr frequencies `E_i − E_j`), ascending.
    /// `L` is Hermitian, so `−iL` generates a unitary group.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(self.matrix()).0
    }

    /// Deviation of `L` from Hermiticity; round-off only.
    pub fn hermitian_defect(&self) -> f64 {
        hermitian_deviation(self.matrix())
    }
}

/// `N = πL − Lπ`.
#[derive(Debug, Clone)]
pub struct DefectSuperOp {
    superop: SuperOp,
}

impl DefectSuperOp {
    pub fn superop(&self) -> &SuperOp {
        &self.superop
    }

    pub fn matrix(&self) -> &CMatrix {
        self.superop.matrix()
    }

    pub fn norm(&self) -> f64 {
        frobenius(self.matrix())
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.norm() <= tol
    }
}

pub fn defect(pi: &SuperOp, l: &Liouvillian) -> Result<DefectSuperOp> {
    check_pair(pi, l)?;
    pi.check_projector(PROJECTOR_TOL)?;
    let p = pi.matrix();
    let lm = l.matrix();
    let n = p * lm - lm * p;
    Ok(DefectSuperOp {
        superop: SuperOp::new(pi.dim(), n)?,
    })
}

fn check_pair(pi: &SuperOp, l: &Liouvillian) -> Result<()> {
    if pi.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: l.dim(),
            found: pi.dim(),
        });
    }
    Ok(())
}

fn coarse(v: &CVector, d: usize) -> CoarseState {
    StateBra::from_functional_matrix(&unvectorize(v.as_slice(), d))
}

/// Integrates `i dρ_G/dt = Lρ_G + Nρ(t)` with `ρ(t)` from exact unitary
/// evolution and `N` the defect of the state-space projector. At every
/// output this agrees with `π` applied to `ρ(t)` up to integrator error.
pub fn evolve_master_exact(
    rho0: &DensityOperator,
    pi: &SuperOp,
    l: &Liouvillian,
    times: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<CoarseState>> {
    check_pair(pi, l)?;
    if rho0.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: l.dim(),
            found: rho0.dim(),
        });
    }
    pi.check_projector(PROJECTOR_TOL)?;
    let d = l.dim();
    let ps = pi.matrix().adjoint();
    let lm = l.matrix();
    let n = &ps * lm - lm * &ps;
    let prop = Propagator::from_observable(l.hamiltonian())?;
    let y0 = &ps * vectorize(rho0.matrix());
    let minus_i = C64::new(0.0, -1.0);

    let f = |t: f64, y: &[C64], dy: &mut [C64]| {
        let rho_t = vectorize(&prop.evolve_density(rho0.matrix(), t));
        let yv = CVector::from_column_slice(y);
        let rhs = lm * yv + &n * rho_t;
        for (o, r) in dy.iter_mut().zip(rhs.iter()) {
            *o = minus_i * r;
        }
    };
    let ys = integrate(f, 0.0, y0.as_slice(), times, opts, |_, _, _| {})?;
    Ok(ys
        .iter()
        .map(|y| coarse(&CVector::from_column_slice(y), d))
        .collect())
}

/// Spectral data of the memory kernel on `range(Q)`.
struct NzModes {
    /// Orthonormal basis of `range(P)`, `d² × r`.
    v: CMatrix,
    /// `V†LV`, the memoryless generator on `range(P)`.
    a_pp: CMatrix,
    /// Eigenvalues `λ_k` of `QLQ` on `range(Q)`.
    lambdas: Vec<f64>,
    /// Columns `a_k = V†L v_k`, `r × m`.
    a: CMatrix,
    /// Rows `b_k = v_k† L V`, `m × r`.
    b: CMatrix,
    /// Eigenvectors `v_k` of `QLQ` as columns, `d² × m`.
    w: CMatrix,
}

impl NzModes {
    fn new(pi: &SuperOp, l: &Liouvillian) -> Result<Self> {
        check_pair(pi, l)?;
        pi.check_projector(PROJECTOR_TOL)?;
        let p = pi.matrix().adjoint();
        if hermitian_deviation(&p) > PROJECTOR_TOL {
            return Err(Error::Unsupported(
                "the memory-kernel solution needs an orthogonal (self-adjoint) projector".into(),
            ));
        }
        let (vals, vecs) = hermitian_eigen(&p);
        let take = |keep: bool| {
            let cols: Vec<CVector> = vals
                .iter()
                .enumerate()
                .filter(|(_, &x)| (x > 0.5) == keep)
                .map(|(i, _)| vecs.column(i).into_owned())
                .collect();
            if cols.is_empty() {
                CMatrix::zeros(p.nrows(), 0)
            } else {
                CMatrix::from_columns(&cols)
            }
        };
        let v = take(true);
        let q_basis = take(false);
        let lm = l.matrix();
        let a_pp = v.adjoint() * lm * &v;
        let (lambdas, w) = if q_basis.ncols() == 0 {
            (Vec::new(), q_basis)
        } else {
            let qlq = q_basis.adjoint() * lm * &q_basis;
            let (lam, u) = hermitian_eigen(&qlq);
            (lam, &q_basis * u)
        };
        let a = v.adjoint() * lm * &w;
        let b = w.adjoint() * lm * &v;
        Ok(Self {
            v,
            a_pp,
            lambdas,
            a,
            b,
            w,
        })
    }

    fn kernel(&self, tau: f64) -> CMatrix {
        let r = self.v.ncols();
        let mut k = CMatrix::zeros(r, r);
        for (idx, &lam) in self.lambdas.iter().enumerate() {
            let ph = C64::from_polar(1.0, -lam * tau);
            k += self.a.column(idx) * self.b.row(idx) * ph;
        }
        k
    }

    /// `Σ_k ‖a_k‖‖b_k‖`, a bound on `‖K(τ)‖` for every `τ`.
    fn kernel_bound(&self) -> f64 {
        (0..self.lambdas.len())
            .map(|k| self.a.column(k).norm() * self.b.row(k).norm())
            .sum()
    }
}

/// `K(τ) = V†LQ e^{−iQLQτ} QLV` sampled on a `τ`-grid, in the coordinates of
/// an orthonormal basis `V` of `range(P)`.
#[derive(Debug, Clone)]
pub struct MemoryKernel {
    pub taus: Vec<f64>,
    pub samples: Vec<CMatrix>,
    /// The basis `V`, `d² × rank(P)`.
    pub basis: CMatrix,
}

pub fn memory_kernel(pi: &SuperOp, l: &Liouvillian, taus: &[f64]) -> Result<MemoryKernel> {
    let modes = NzModes::new(pi, l)?;
    Ok(MemoryKernel {
        taus: taus.to_vec(),
        samples: taus.iter().map(|&t| modes.kernel(t)).collect(),
        basis: modes.v,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct NzOptions {
    pub ode: OdeOptions,
    /// Memory kept in the convolution; `None` keeps all of it.
    pub kernel_window: Option<f64>,
}

impl Default for NzOptions {
    fn default() -> Self {
        Self {
            ode: OdeOptions::with_tolerances(1e-12, 1e-10),
            kernel_window: None,
        }
    }
}

/// Emitted when the kernel window is shorter than the horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationWarning {
    pub window: f64,
    pub horizon: f64,
    /// `(horizon − window) · sup‖K‖ · ‖(Pρ)(0)‖`; the dropped memory cannot
    /// move `d(Pρ)/dt` by more than this.
    pub bound: f64,
}

#[derive(Debug, Clone)]
pub struct NzSolution {
    pub states: Vec<CoarseState>,
    /// `‖Qρ0‖_F`; when non-zero the inhomogeneous term was included.
    pub initial_correlation: f64,
    pub truncation: Option<TruncationWarning>,
}

/// Cubic Hermite history of the convolution variables, for windowed memory.
#[derive(Default)]
struct History {
    t: Vec<f64>,
    y: Vec<Vec<C64>>,
    dy: Vec<Vec<C64>>,
}

impl History {
    fn at(&self, s: f64, out: &mut [C64]) {
        if s <= 0.0 || self.t.is_empty() {
            out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
            return;
        }
        let i = match self.t.partition_point(|&x| x <= s) {
            0 => 0,
            p => (p - 1).min(self.t.len().saturating_sub(2)),
        };
        if self.t.len() == 1 {
            out.copy_from_slice(&self.y[0]);
            return;
        }
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let h = t1 - t0;
        let u = ((s - t0) / h).clamp(0.0, 1.0);
        let h00 = 2.0 * u * u * u - 3.0 * u * u + 1.0;
        let h10 = u * u * u - 2.0 * u * u + u;
        let h01 = -2.0 * u * u * u + 3.0 * u * u;
        let h11 = u * u * u - u * u;
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.y[i][k] * h00
                + self.dy[i][k] * (h10 * h)
                + self.y[i + 1][k] * h01
                + self.dy[i + 1][k] * (h11 * h);
        }
    }
}

/// Solves `i d(Pρ)/dt = PLP(Pρ) − i∫₀ᵗ PLQ e^{−iQLQ(t−s)} QLP (Pρ)(s) ds`
/// plus `PLQ e^{−iQLQt} Qρ0` when `Qρ0 ≠ 0`.
///
/// The kernel is a finite sum of exponentials `Σ_k e^{−iλ_kτ} a_k b_k`, so
/// the convolution is carried by auxiliary variables
/// `c_k(t) = ∫₀ᵗ e^{−iλ_k(t−s)} b_k x(s) ds` with `dc_k/dt = −iλ_k c_k + b_k x`.
/// With a finite window `w` the memory term uses `c_k(t) − e^{−iλ_k w} c_k(t−w)`.
pub fn evolve_nakajima_zwanzig(
    rho0: &DensityOperator,
    pi: &SuperOp,
    l: &Liouvillian,
    times: &[f64],
    opts: &NzOptions,
) -> Result<NzSolution> {
    if rho0.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: l.dim(),
            found: rho0.dim(),
        });
    }
    let modes = NzModes::new(pi, l)?;
    let d = l.dim();
    let r = modes.v.ncols();
    let m = modes.lambdas.len();
    let rho_vec = vectorize(rho0.matrix());
    let x0 = modes.v.adjoint() * &rho_vec;
    let q0 = modes.w.adjoint() * &rho_vec;
    let initial_correlation = q0.norm();
    if initial_correlation > 1e-12 {
        log::info!("initial state has irrelevant part ‖Qρ0‖ = {initial_correlation:.3e}; including the inhomogeneous term");
    }

    let horizon = times.last().copied().unwrap_or(0.0);
    let window = opts.kernel_window.filter(|&w| w < horizon);
    if let Some(w) = opts.kernel_window {
        if !(w > 0.0) {
            return Err(Error::invalid("kernel window must be positive"));
        }
    }
    let truncation = window.map(|w| {
        let warn = TruncationWarning {
            window: w,
            horizon,
            bound: (horizon - w) * modes.kernel_bound() * x0.norm(),
        };
        log::warn!(
            "kernel window {w} is shorter than the horizon {horizon}; memory beyond the window is dropped (bound {:.3e})",
            warn.bound
        );
        warn
    });

    let mut ode = opts.ode;
    if let Some(w) = window {
        ode.max_step = ode.max_step.min(0.5 * w);
    }
    let minus_i = C64::new(0.0, -1.0);
    let history = RefCell::new(History::default());
    let decay: Vec<C64> = window
        .map(|w| {
            modes
                .lambdas
                .iter()
                .map(|&lam| C64::from_polar(1.0, -lam * w))
                .collect()
        })
        .unwrap_or_default();

    let mut y0 = Vec::with_capacity(r + m);
    y0.extend(x0.iter().copied());
    y0.extend(std::iter::repeat_n(C64::new(0.0, 0.0), m));

    let f = |t: f64, y: &[C64], dy: &mut [C64]| {
        let x = CVector::from_column_slice(&y[..r]);
        let c = &y[r..];
        let mut mem = CVector::zeros(m);
        for k in 0..m {
            mem[k] = c[k] + C64::i() * C64::from_polar(1.0, -modes.lambdas[k] * t) * q0[k];
        }
        if let Some(w) = window {
            if t > w {
                let mut past = vec![C64::new(0.0, 0.0); m];
                history.borrow().at(t - w, &mut past);
                for k in 0..m {
                    mem[k] -= decay[k] * past[k];
                }
            }
        }
        let dx = &modes.a_pp * &x * minus_i - &modes.a * mem;
        let bx = &modes.b * &x;
        for k in 0..r {
            dy[k] = dx[k];
        }
        for k in 0..m {
            dy[r + k] = minus_i * modes.lambdas[k] * c[k] + bx[k];
        }
    };
    let observer = |t: f64, y: &[C64], dy: &[C64]| {
        if window.is_some() {
            let mut h = history.borrow_mut();
            h.t.push(t);
            h.y.push(y[r..].to_vec());
            h.dy.push(dy[r..].to_vec());
        }
    };
    let ys = integrate(f, 0.0, &y0, times, &ode, observer)?;
    let states = ys
        .iter()
        .map(|y| coarse(&(&modes.v * CVector::from_column_slice(&y[..r])), d))
        .collect();
    Ok(NzSolution {
        states,
        initial_correlation,
        truncation,
    })
}
