//! Environment-induced decoherence on a composite system `U = S ∪ E`.
//!
//! The product basis `|i, α⟩` is ordered with the system index major:
//! `index = i · dim_E + α`, so `O_S ⊗ I_E` is the ordinary Kronecker product.

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_deviation, hermitian_eigen, symmetrize};
use crate::liouville::{build_projector, BiorthogonalPairBasis, SuperOp};
use crate::tolerances::Tolerances;
use crate::{CMatrix, CVector, DensityOperator, ObservableOperator, C64};

/// Default cap on the number of bath spins (state dimension `2^(n+1)`).
pub const DEFAULT_MAX_SPINS: usize = 14;

/// Hamiltonian of a composite system. Large pure-dephasing models are
/// diagonal in the product basis and are kept that way.
#[derive(Debug, Clone)]
pub enum Hamiltonian {
    Dense(ObservableOperator),
    Diagonal(Vec<f64>),
}

impl Hamiltonian {
    pub fn dim(&self) -> usize {
        match self {
            Hamiltonian::Dense(h) => h.dim(),
            Hamiltonian::Diagonal(e) => e.len(),
        }
    }

    pub fn to_dense(&self) -> ObservableOperator {
        match self {
            Hamiltonian::Dense(h) => h.clone(),
            Hamiltonian::Diagonal(e) => ObservableOperator::diagonal(e),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompositeSystem {
    dim_s: usize,
    dim_e: usize,
    hamiltonian: Hamiltonian,
}

impl CompositeSystem {
    pub fn new(dim_s: usize, dim_e: usize, hamiltonian: Hamiltonian) -> Result<Self> {
        if dim_s == 0 || dim_e == 0 {
            return Err(Error::invalid("subsystem dimensions must be positive"));
        }
        if hamiltonian.dim() != dim_s * dim_e {
            return Err(Error::DimensionMismatch {
                expected: dim_s * dim_e,
                found: hamiltonian.dim(),
            });
        }
        Ok(Self {
            dim_s,
            dim_e,
            hamiltonian,
        })
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    pub fn total_dim(&self) -> usize {
        self.dim_s * self.dim_e
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }
}

/// `ρ_S = Tr_E ρ`, a valid density operator on the system factor.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState(DensityOperator);

impl ReducedState {
    pub fn new(rho: DensityOperator) -> Self {
        Self(rho)
    }

    pub fn density(&self) -> &DensityOperator {
        &self.0
    }

    pub fn matrix(&self) -> &CMatrix {
        self.0.matrix()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// `O_S ⊗ I_E`.
pub fn lift_observable(o_s: &ObservableOperator, dim_e: usize) -> ObservableOperator {
    ObservableOperator::from_trusted(linalg::kron(o_s.matrix(), &CMatrix::identity(dim_e, dim_e)))
}

fn check_factorization(total: usize, dim_s: usize, dim_e: usize) -> Result<()> {
    if dim_s == 0 || dim_e == 0 || dim_s * dim_e != total {
        return Err(Error::invalid(format!(
            "state dimension {total} does not factor as {dim_s} x {dim_e}"
        )));
    }
    Ok(())
}

/// `(ρ_S)_ij = Σ_α ρ_{iα, jα}`.
pub fn partial_trace(rho_u: &DensityOperator, dim_s: usize, dim_e: usize) -> Result<ReducedState> {
    check_factorization(rho_u.dim(), dim_s, dim_e)?;
    let m = rho_u.matrix();
    let mut out = CMatrix::zeros(dim_s, dim_s);
    for i in 0..dim_s {
        for j in 0..dim_s {
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..dim_e {
                acc += m[(i * dim_e + a, j * dim_e + a)];
            }
            out[(i, j)] = acc;
        }
    }
    symmetrize(&mut out);
    Ok(ReducedState(DensityOperator::from_trusted(out)))
}

/// Partial trace of `|ψ⟩⟨ψ|` without forming the full density matrix.
pub fn partial_trace_pure(psi: &CVector, dim_s: usize, dim_e: usize) -> Result<ReducedState> {
    check_factorization(psi.len(), dim_s, dim_e)?;
    let mut out = CMatrix::zeros(dim_s, dim_s);
    for i in 0..dim_s {
        for j in i..dim_s {
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..dim_e {
                acc += psi[i * dim_e + a] * psi[j * dim_e + a].conj();
            }
            out[(i, j)] = acc;
            out[(j, i)] = acc.conj();
        }
        out[(i, i)].im = 0.0;
    }
    Ok(ReducedState(DensityOperator::from_trusted(out)))
}

/// The EID projector `P_S`.
///
/// Acting on kets, `P_S|O) = (Tr_E O / n) ⊗ I_E`; acting on bras,
/// `(ρ|P_S` is the functional of `ρ_S ⊗ I_E / n` with `n = dim_E`. It is built
/// from the biorthogonal pairs `|i⟩⟨j| ⊗ I_E` and `(|i⟩⟨j| ⊗ I_E) / n`; the
/// `1/n` normalization is the one that makes `P_S` idempotent.
pub fn eid_projector(dim_s: usize, dim_e: usize) -> Result<SuperOp> {
    if dim_s == 0 || dim_e == 0 {
        return Err(Error::invalid("subsystem dimensions must be positive"));
    }
    let id_e = CMatrix::identity(dim_e, dim_e);
    let mut observables = Vec::with_capacity(dim_s * dim_s);
    for j in 0..dim_s {
        for i in 0..dim_s {
            let mut e = CMatrix::zeros(dim_s, dim_s);
            e[(i, j)] = C64::new(1.0, 0.0);
            observables.push(linalg::kron(&e, &id_e));
        }
    }
    let functionals = observables
        .iter()
        .map(|o| o.unscale(dim_e as f64))
        .collect();
    let basis = BiorthogonalPairBasis::new(dim_s * dim_e, observables, functionals, 1e-12)?;
    build_projector(&basis, &Tolerances::default())
}

/// `ρ_G = (ρ_S ⊗ I_E) / Tr(I_E)`.
pub fn coarse_state_eid(rho_s: &ReducedState, dim_e: usize) -> DensityOperator {
    let m = linalg::kron(rho_s.matrix(), &CMatrix::identity(dim_e, dim_e)).unscale(dim_e as f64);
    DensityOperator::from_trusted(m)
}

/// Precomputed spectral data for `e^{-iHt}`.
#[derive(Debug, Clone)]
pub struct Propagator {
    kind: PropagatorKind,
}

#[derive(Debug, Clone)]
enum PropagatorKind {
    Diagonal(Vec<f64>),
    Eigen { values: Vec<f64>, vectors: CMatrix },
}

impl Propagator {
    pub fn new(h: &Hamiltonian, hermitian_tol: f64) -> Result<Self> {
        let kind = match h {
            Hamiltonian::Diagonal(e) => PropagatorKind::Diagonal(e.clone()),
            Hamiltonian::Dense(op) => {
                let dev = hermitian_deviation(op.matrix());
                if dev > hermitian_tol {
                    return Err(Error::NotHermitian {
                        deviation: dev,
                        tolerance: hermitian_tol,
                    });
                }
                let (values, vectors) = hermitian_eigen(op.matrix());
                PropagatorKind::Eigen { values, vectors }
            }
        };
        Ok(Self { kind })
    }

    pub fn from_observable(h: &ObservableOperator) -> Result<Self> {
        Self::new(
            &Hamiltonian::Dense(h.clone()),
            Tolerances::default().hermitian,
        )
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            PropagatorKind::Diagonal(e) => e.len(),
            PropagatorKind::Eigen { values, .. } => values.len(),
        }
    }

    /// `e^{-iHt}` as a dense matrix.
    pub fn unitary(&self, t: f64) -> CMatrix {
        match &self.kind {
            PropagatorKind::Diagonal(e) => CMatrix::from_diagonal(&CVector::from_iterator(
                e.len(),
                e.iter().map(|&w| C64::from_polar(1.0, -w * t)),
            )),
            PropagatorKind::Eigen { values, vectors } => {
                linalg::unitary_from_eigen(values, vectors, t)
            }
        }
    }

    /// `ρ(t) = e^{-iHt} ρ e^{iHt}`.
    pub fn evolve_density(&self, rho0: &CMatrix, t: f64) -> CMatrix {
        let mut out = match &self.kind {
            PropagatorKind::Diagonal(e) => CMatrix::from_fn(rho0.nrows(), rho0.ncols(), |i, j| {
                rho0[(i, j)] * C64::from_polar(1.0, -(e[i] - e[j]) * t)
            }),
            PropagatorKind::Eigen { values, vectors } => {
                let r = vectors.adjoint() * rho0 * vectors;
                let rt = CMatrix::from_fn(r.nrows(), r.ncols(), |i, j| {
                    r[(i, j)] * C64::from_polar(1.0, -(values[i] - values[j]) * t)
                });
                vectors * rt * vectors.adjoint()
            }
        };
        symmetrize(&mut out);
        out
    }

    /// `ψ(t) = e^{-iHt} ψ`.
    pub fn evolve_pure(&self, psi0: &CVector, t: f64) -> CVector {
        match &self.kind {
            PropagatorKind::Diagonal(e) => CVector::from_iterator(
                psi0.len(),
                psi0.iter()
                    .zip(e)
                    .map(|(a, &w)| a * C64::from_polar(1.0, -w * t)),
            ),
            PropagatorKind::Eigen { values, vectors } => {
                let mut c = vectors.adjoint() * psi0;
                for (ci, &w) in c.iter_mut().zip(values) {
                    *ci *= C64::from_polar(1.0, -w * t);
                }
                vectors * c
            }
        }
    }
}

/// Exact unitary evolution sampled at `times`.
pub fn evolve_unitary(
    rho0: &DensityOperator,
    h: &ObservableOperator,
    times: &[f64],
) -> Result<Vec<DensityOperator>> {
    if rho0.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: rho0.dim(),
        });
    }
    let prop = Propagator::from_observable(h)?;
    Ok(times
        .iter()
        .map(|&t| DensityOperator::from_trusted(prop.evolve_density(rho0.matrix(), t)))
        .collect())
}

/// Bloch-sphere angles of a bath spin: `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BlochAngles {
    pub theta: f64,
    pub phi: f64,
}

impl BlochAngles {
    /// `|+⟩`.
    pub const PLUS: Self = Self {
        theta: std::f64::consts::FRAC_PI_2,
        phi: 0.0,
    };
    /// `|0⟩`, the `σ_z = +1` eigenstate.
    pub const UP: Self = Self {
        theta: 0.0,
        phi: 0.0,
    };

    pub fn amplitudes(self) -> [C64; 2] {
        [
            C64::new((self.theta / 2.0).cos(), 0.0),
            C64::from_polar((self.theta / 2.0).sin(), self.phi),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct SpinBathParams {
    pub couplings: Vec<f64>,
    /// Initial qubit amplitudes `(a, b)` of `a|0⟩ + b|1⟩`.
    pub qubit: (C64, C64),
    pub bath_angles: Vec<BlochAngles>,
    pub max_spins: usize,
}

impl SpinBathParams {
    pub fn new(couplings: Vec<f64>, qubit: (C64, C64), bath_angles: Vec<BlochAngles>) -> Self {
        Self {
            couplings,
            qubit,
            bath_angles,
            max_spins: DEFAULT_MAX_SPINS,
        }
    }

    pub fn n_spins(&self) -> usize {
        self.couplings.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.couplings.len();
        if n == 0 {
            return Err(Error::invalid("spin bath needs at least one spin"));
        }
        if n != self.bath_angles.len() {
            return Err(Error::invalid(format!(
                "{n} couplings but {} bath angles",
                self.bath_angles.len()
            )));
        }
        if n > self.max_spins {
            return Err(Error::ResourceCap(format!(
                "{n} bath spins requested; the dense state has dimension 2^{} = {} and the cap is {} spins",
                n + 1,
                1usize << (n + 1).min(63),
                self.max_spins
            )));
        }
        let (a, b) = self.qubit;
        let norm = a.norm_sqr() + b.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "qubit amplitudes must satisfy |a|^2 + |b|^2 = 1, got {norm}"
            )));
        }
        if self.couplings.iter().any(|g| !g.is_finite()) {
            return Err(Error::invalid("couplings must be finite"));
        }
        Ok(())
    }
}

/// Pure-dephasing qubit + spin bath, `H = Σ_k (g_k/2) σ_z^(S) ⊗ σ_z^(k)`,
/// started in a product pure state.
#[derive(Debug, Clone)]
pub struct SpinBath {
    params: SpinBathParams,
    system: CompositeSystem,
    initial: CVector,
    propagator: Propagator,
}

/// Builds the spin-bath scenario: the composite system (diagonal Hamiltonian)
/// and the initial product state vector.
pub fn spin_bath_scenario(params: SpinBathParams) -> Result<SpinBath> {
    params.validate()?;
    let n = params.n_spins();
    let dim_e = 1usize << n;
    let total = 2 * dim_e;

    let energies: Vec<f64> = (0..total)
        .map(|idx| {
            let s = idx / dim_e;
            let bits = idx % dim_e;
            let zs = if s == 0 { 1.0 } else { -1.0 };
            params
                .couplings
                .iter()
                .enumerate()
                .map(|(k, g)| {
                    // Spin k is bit (n-1-k) so that spin 0 is the most significant factor.
                    let bit = (bits >> (n - 1 - k)) & 1;
                    let zk = if bit == 0 { 1.0 } else { -1.0 };
                    0.5 * g * zs * zk
                })
                .sum()
        })
        .collect();

    let mut bath = CVector::from_element(1, C64::new(1.0, 0.0));
    for angles in &params.bath_angles {
        let [u, d] = angles.amplitudes();
        let spin = CVector::from_vec(vec![u, d]);
        bath = bath.kronecker(&spin);
    }
    let qubit = CVector::from_vec(vec![params.qubit.0, params.qubit.1]);
    let initial = qubit.kronecker(&bath);

    let hamiltonian = Hamiltonian::Diagonal(energies);
    let propagator = Propagator::new(&hamiltonian, 0.0)?;
    let system = CompositeSystem::new(2, dim_e, hamiltonian)?;
    Ok(SpinBath {
        params,
        system,
        initial,
        propagator,
    })
}

impl SpinBath {
    pub fn system(&self) -> &CompositeSystem {
        &self.system
    }

    pub fn params(&self) -> &SpinBathParams {
        &self.params
    }

    pub fn initial_state(&self) -> &CVector {
        &self.initial
    }

    /// Dense `|ψ0⟩⟨ψ0|`; only sensible for small baths.
    pub fn initial_density(&self) -> DensityOperator {
        DensityOperator::from_trusted(&self.initial * self.initial.adjoint())
    }

    pub fn state_at(&self, t: f64) -> CVector {
        self.propagator.evolve_pure(&self.initial, t)
    }

    /// Full simulation: evolve the `2^(n+1)` state vector, then trace out the bath.
    pub fn reduced_state(&self, t: f64) -> ReducedState {
        partial_trace_pure(&self.state_at(t), 2, self.system.dim_e())
            .expect("spin-bath dimensions factor by construction")
    }

    /// `c_k` in `ρ_S,01(t) = a b̄ Π_k [cos(g_k t) + i c_k sin(g_k t)]`;
    /// `c_k = −⟨σ_z⟩_k` of the initial bath spin.
    pub fn phase_coefficients(&self) -> Vec<f64> {
        self.params
            .bath_angles
            .iter()
            .map(|a| -a.theta.cos())
            .collect()
    }

    /// Closed-form reduced coherence `ρ_S,01(t)`.
    pub fn offdiag_closed_form(&self, t: f64) -> C64 {
        let (a, b) = self.params.qubit;
        let mut acc = a * b.conj();
        for (g, c) in self.params.couplings.iter().zip(self.phase_coefficients()) {
            acc *= C64::new((g * t).cos(), c * (g * t).sin());
        }
        acc
    }

    /// Closed-form decoherence factor `|Π_k [cos(g_k t) + i c_k sin(g_k t)]|`.
    pub fn decoherence_factor(&self, t: f64) -> f64 {
        self.params
            .couplings
            .iter()
            .zip(self.phase_coefficients())
            .map(|(g, c)| C64::new((g * t).cos(), c * (g * t).sin()).norm())
            .product()
    }

    /// First time the closed-form decoherence factor falls to `level`, found by
    /// scanning with step `dt` and bisecting the bracket. `None` if it never does
    /// before `t_max`.
    pub fn first_crossing(&self, level: f64, dt: f64, t_max: f64) -> Option<f64> {
        let f = |t: f64| self.decoherence_factor(t) - level;
        let mut t0 = 0.0;
        let mut f0 = f(t0);
        if f0 <= 0.0 {
            return Some(0.0);
        }
        while t0 < t_max {
            let t1 = t0 + dt;
            let f1 = f(t1);
            if f1 <= 0.0 {
                let (mut lo, mut hi) = (t0, t1);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if f(mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Some(0.5 * (lo + hi));
            }
            t0 = t1;
            f0 = f1;
        }
        let _ = f0;
        None
    }

    /// Recurrence estimate: the first time after the `e⁻¹` decay that the
    /// decoherence factor climbs back to `1/2`. Returns `t_max` if no revival
    /// is seen before then.
    pub fn recurrence_time(&self, t_max: f64) -> f64 {
        let g_max = self
            .params
            .couplings
            .iter()
            .fold(0.0_f64, |m, g| m.max(g.abs()));
        if g_max == 0.0 {
            return t_max;
        }
        let dt = 0.02 / g_max;
        let Some(start) = self.first_crossing((-1.0_f64).exp(), dt, t_max) else {
            return t_max;
        };
        let mut t = start;
        while t < t_max {
            if self.decoherence_factor(t) >= 0.5 {
                return t;
            }
            t += dt;
        }
        t_max
    }
}

/// Instantaneous eigenbasis of a reduced state.
#[derive(Debug, Clone)]
pub struct PreferredBasis {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Columns ordered like `eigenvalues`.
    pub eigenvectors: CMatrix,
    /// Set when two eigenvalues coincide within tolerance: the eigenvectors in
    /// that subspace are one arbitrary orthonormal choice.
    pub degenerate: bool,
}

pub fn preferred_basis(rho: &ReducedState, degeneracy_tol: f64) -> PreferredBasis {
    let (values, vectors) = hermitian_eigen(rho.matrix());
    let n = values.len();
    let eigenvalues: Vec<f64> = values.iter().rev().copied().collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, j| vectors[(i, n - 1 - j)]);
    let degenerate = eigenvalues
        .windows(2)
        .any(|w| (w[0] - w[1]).abs() <= degeneracy_tol);
    PreferredBasis {
        eigenvalues,
        eigenvectors,
        degenerate,
    }
}
