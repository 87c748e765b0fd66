//! Operators as Liouville-space kets, states as bras, and projector
//! superoperators built from biorthogonal pairs.
//!
//! A bra `(F|` is stored by its coefficient row `b` with `(F|O) = Σ_k b_k vec(O)_k`.
//! For a functional given as a matrix `F` the coefficients are `conj(vec(F))`,
//! so `(F|O) = Tr(F† O)`, which equals `Tr(ρ O)` for Hermitian `ρ`.

use crate::error::{Error, Result};
use crate::linalg::{self, frobenius, hermitian_deviation, hermitian_eigen, vectorize};
use crate::tolerances::Tolerances;
use crate::{CMatrix, CVector, C64};

/// Dimension of the system Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HilbertDim(usize);

impl HilbertDim {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("Hilbert dimension must be at least 1"));
        }
        Ok(Self(d))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Dimension of the operator (Liouville) space, `d²`.
    pub fn liouville(self) -> usize {
        self.0 * self.0
    }
}

fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::invalid(format!(
            "operator must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Err(Error::invalid("operator must have dimension >= 1"));
    }
    Ok(m.nrows())
}

fn check_hermitian(m: &CMatrix, tol: f64) -> Result<()> {
    let deviation = hermitian_deviation(m);
    if deviation > tol {
        return Err(Error::NotHermitian {
            deviation,
            tolerance: tol,
        });
    }
    Ok(())
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: CMatrix, tol: &Tolerances) -> Result<Self> {
        check_square(&matrix)?;
        check_hermitian(&matrix, tol.hermitian)?;
        let trace = linalg::trace(&matrix).re;
        if (trace - 1.0).abs() > tol.trace {
            return Err(Error::NotUnitTrace {
                trace,
                tolerance: tol.trace,
            });
        }
        let (values, _) = hermitian_eigen(&matrix);
        if let Some(&lowest) = values.first() {
            if lowest < -tol.positivity {
                return Err(Error::NotPositive {
                    eigenvalue: lowest,
                    tolerance: tol.positivity,
                });
            }
        }
        Ok(Self { matrix })
    }

    /// Skips validation; used for states produced by trusted evolutions.
    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector.
    pub fn from_pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "state vector must be normalized, |psi| = {norm}"
            )));
        }
        Ok(Self {
            matrix: psi * psi.adjoint(),
        })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: CMatrix::identity(d, d).unscale(d as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).0
    }

    pub fn as_bra(&self) -> StateBra {
        StateBra::from_functional_matrix(&self.matrix)
    }
}

/// Hermitian matrix: an element of the observable space.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableOperator {
    matrix: CMatrix,
}

impl ObservableOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, Tolerances::default().hermitian)
    }

    pub fn with_tolerance(matrix: CMatrix, hermitian_tol: f64) -> Result<Self> {
        check_square(&matrix)?;
        check_hermitian(&matrix, hermitian_tol)?;
        Ok(Self { matrix })
    }

    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            matrix: CMatrix::identity(d, d),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let d = values.len();
        let mut m = CMatrix::zeros(d, d);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        Self { matrix: m }
    }

    pub fn pauli_x() -> Self {
        Self::from_trusted(pauli(0))
    }

    pub fn pauli_y() -> Self {
        Self::from_trusted(pauli(1))
    }

    pub fn pauli_z() -> Self {
        Self::from_trusted(pauli(2))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

fn pauli(axis: usize) -> CMatrix {
    let (z, o, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0));
    match axis {
        0 => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        1 => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        _ => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// `(ρ|O) = Tr(ρ O)`. For Hermitian arguments the imaginary part is
/// round-off only; the real part is the expectation value.
pub fn pairing(rho: &DensityOperator, observable: &ObservableOperator) -> Result<C64> {
    rho.as_bra().pair(observable.matrix())
}

/// A Liouville-space bra: a linear functional on operators.
#[derive(Debug, Clone, PartialEq)]
pub struct StateBra {
    dim: usize,
    coeffs: CVector,
}

/// Coarse-grained state `(ρ_G| = (ρ|π`. It is a functional and need not be a
/// valid density operator.
pub type CoarseState = StateBra;

impl StateBra {
    /// Functional `O ↦ Tr(F† O)`.
    pub fn from_functional_matrix(f: &CMatrix) -> Self {
        assert_eq!(f.nrows(), f.ncols(), "functional must be square");
        Self {
            dim: f.nrows(),
            coeffs: vectorize(f).conjugate(),
        }
    }

    pub fn from_coefficients(dim: usize, coeffs: CVector) -> Result<Self> {
        if coeffs.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: coeffs.len(),
            });
        }
        Ok(Self { dim, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coefficients(&self) -> &CVector {
        &self.coeffs
    }

    /// Matrix `F` with `(self|O) = Tr(F† O)`.
    pub fn to_matrix(&self) -> CMatrix {
        linalg::unvectorize(self.coeffs.conjugate().as_slice(), self.dim)
    }

    pub fn pair(&self, observable: &CMatrix) -> Result<C64> {
        if observable.nrows() != self.dim || observable.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: observable.nrows(),
            });
        }
        Ok(self
            .coeffs
            .iter()
            .zip(observable.as_slice())
            .map(|(b, o)| b * o)
            .sum())
    }

    /// `Σ c_k (b_k|` over bras of equal dimension.
    pub fn linear_combination(terms: &[(C64, &StateBra)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::invalid("empty linear combination"))?;
        let dim = first.1.dim;
        let mut coeffs = CVector::zeros(dim * dim);
        for (c, bra) in terms {
            if bra.dim != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: bra.dim,
                });
            }
            coeffs += &bra.coeffs * *c;
        }
        Ok(Self { dim, coeffs })
    }
}

/// Linear map on the `d²`-dimensional operator space.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOp {
    dim: usize,
    matrix: CMatrix,
}

impl SuperOp {
    pub fn new(dim: usize, matrix: CMatrix) -> Result<Self> {
        let n = dim * dim;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows(),
            });
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: CMatrix::identity(dim * dim, dim * dim),
        }
    }

    /// `X ↦ A X B`, i.e. `Bᵀ ⊗ A` under column stacking.
    pub fn sandwich(a: &CMatrix, b: &CMatrix) -> Self {
        Self {
            dim: a.nrows(),
            matrix: linalg::kron(&b.transpose(), a),
        }
    }

    /// Keeps the diagonal of an operator and drops every off-diagonal entry.
    pub fn diagonal_projector(dim: usize) -> Self {
        let mut m = CMatrix::zeros(dim * dim, dim * dim);
        for i in 0..dim {
            let k = i + i * dim;
            m[(k, k)] = C64::new(1.0, 0.0);
        }
        Self { dim, matrix: m }
    }

    /// Hilbert-space dimension `d`; the matrix is `d² × d²`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Ket action `|O) ↦ M|O)`.
    pub fn apply(&self, op: &CMatrix) -> Result<CMatrix> {
        if op.nrows() != self.dim || op.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: op.nrows(),
            });
        }
        let v = &self.matrix * vectorize(op);
        Ok(linalg::unvectorize(v.as_slice(), self.dim))
    }

    /// Bra action `(F| ↦ (F|M`.
    pub fn apply_bra(&self, bra: &StateBra) -> Result<StateBra> {
        if bra.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: bra.dim,
            });
        }
        Ok(StateBra {
            dim: self.dim,
            coeffs: self.matrix.tr_mul(&bra.coeffs),
        })
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SuperOp) -> Result<SuperOp> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(SuperOp {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// `‖M² − M‖_F`.
    pub fn idempotence_defect(&self) -> f64 {
        frobenius(&(&self.matrix * &self.matrix - &self.matrix))
    }

    pub fn check_projector(&self, tol: f64) -> Result<()> {
        let defect = self.idempotence_defect();
        if defect > tol {
            return Err(Error::NotIdempotent { defect });
        }
        Ok(())
    }

    /// True when the matrix is Hermitian, i.e. an orthogonal projector if idempotent.
    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        hermitian_deviation(&self.matrix) <= tol
    }

    /// Rank of a projector, read off its trace.
    pub fn projector_rank(&self) -> usize {
        linalg::trace(&self.matrix).re.round().max(0.0) as usize
    }

    /// `I − M`.
    pub fn complement(&self) -> SuperOp {
        let n = self.dim * self.dim;
        SuperOp {
            dim: self.dim,
            matrix: CMatrix::identity(n, n) - &self.matrix,
        }
    }
}

/// Pairs `{|O_R^α), (ρ^α|}` with `(ρ^α|O_R^β) = δ_αβ`.
#[derive(Debug, Clone)]
pub struct BiorthogonalPairBasis {
    dim: usize,
    observables: Vec<CMatrix>,
    functionals: Vec<CMatrix>,
}

impl BiorthogonalPairBasis {
    /// Validates biorthogonality; the error names the worst `(α, β)` pair.
    pub fn new(
        dim: usize,
        observables: Vec<CMatrix>,
        functionals: Vec<CMatrix>,
        tol: f64,
    ) -> Result<Self> {
        let basis = Self::unchecked(dim, observables, functionals)?;
        let gram = basis.gram();
        let mut worst = (0, 0, 0.0_f64);
        for a in 0..gram.nrows() {
            for b in 0..gram.ncols() {
                let target = if a == b { 1.0 } else { 0.0 };
                let dev = (gram[(a, b)] - C64::new(target, 0.0)).norm();
                if dev > worst.2 {
                    worst = (a, b, dev);
                }
            }
        }
        if worst.2 > tol {
            return Err(Error::BiorthogonalityViolated {
                alpha: worst.0,
                beta: worst.1,
                deviation: worst.2,
            });
        }
        Ok(basis)
    }

    fn unchecked(dim: usize, observables: Vec<CMatrix>, functionals: Vec<CMatrix>) -> Result<Self> {
        if observables.len() != functionals.len() {
            return Err(Error::invalid(format!(
                "{} observables but {} functionals",
                observables.len(),
                functionals.len()
            )));
        }
        if observables.is_empty() {
            return Err(Error::invalid("basis must contain at least one pair"));
        }
        for m in observables.iter().chain(functionals.iter()) {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.nrows(),
                });
            }
        }
        Ok(Self {
            dim,
            observables,
            functionals,
        })
    }

    /// Repairs a non-biorthogonal family by Gram-matrix inversion: the
    /// functionals are replaced by combinations `ρ'^α = Σ_γ c_αγ ρ^γ` with
    /// `(ρ'^α|O^β) = δ_αβ`. Fails if the Gram matrix is singular.
    pub fn biorthogonalize(
        dim: usize,
        observables: Vec<CMatrix>,
        functionals: Vec<CMatrix>,
        tol: f64,
    ) -> Result<Self> {
        let raw = Self::unchecked(dim, observables, functionals)?;
        let gram = raw.gram();
        let inv = gram
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::invalid("Gram matrix of the pair family is singular"))?;
        // The pairing is antilinear in the functional, hence conj(G^{-1}).
        let coeffs = inv.map(|z| z.conj());
        let n = raw.len();
        let functionals = (0..n)
            .map(|a| {
                let mut f = CMatrix::zeros(dim, dim);
                for g in 0..n {
                    f += &raw.functionals[g] * coeffs[(a, g)];
                }
                f
            })
            .collect();
        Self::new(dim, raw.observables, functionals, tol)
    }

    /// Matrix units `|i⟩⟨j|` paired with themselves: a complete basis.
    pub fn matrix_units(dim: usize) -> Self {
        let mut obs = Vec::with_capacity(dim * dim);
        for j in 0..dim {
            for i in 0..dim {
                let mut e = CMatrix::zeros(dim, dim);
                e[(i, j)] = C64::new(1.0, 0.0);
                obs.push(e);
            }
        }
        Self {
            dim,
            functionals: obs.clone(),
            observables: obs,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn observables(&self) -> &[CMatrix] {
        &self.observables
    }

    pub fn functionals(&self) -> &[CMatrix] {
        &self.functionals
    }

    /// `G_αβ = (ρ^α|O^β) = Tr(ρ^α† O^β)`.
    pub fn gram(&self) -> CMatrix {
        let n = self.len();
        CMatrix::from_fn(n, n, |a, b| {
            self.functionals[a]
                .iter()
                .zip(self.observables[b].iter())
                .map(|(f, o)| f.conj() * o)
                .sum()
        })
    }
}

/// `π = Σ_α |O_R^α)(ρ^α|`, re-verified to be idempotent.
pub fn build_projector(basis: &BiorthogonalPairBasis, tol: &Tolerances) -> Result<SuperOp> {
    let d = basis.dim;
    let n = d * d;
    let mut m = CMatrix::zeros(n, n);
    for (o, f) in basis.observables.iter().zip(&basis.functionals) {
        let ket = vectorize(o);
        let bra = vectorize(f).conjugate();
        m += &ket * bra.transpose();
    }
    let pi = SuperOp { dim: d, matrix: m };
    pi.check_projector(tol.idempotence)?;
    Ok(pi)
}

/// `(ρ_G| = (ρ|π`.
pub fn coarse_grain(rho: &StateBra, pi: &SuperOp) -> Result<CoarseState> {
    pi.apply_bra(rho)
}

/// Projection of an equilibrium state, `(ρ_G*| = (ρ_*|π`.
pub fn project_final_state(rho_star: &DensityOperator, pi: &SuperOp) -> Result<CoarseState> {
    coarse_grain(&rho_star.as_bra(), pi)
}
