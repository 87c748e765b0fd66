//! Decoherence laboratory: coarse-graining projectors in Liouville space,
//! environment-induced (EID) and self-induced (SID) decoherence, the
//! projected Liouville master equation, and characteristic-time fits.
//!
//! Conventions used throughout the crate:
//!
//! * `ħ = 1`; times are in units of inverse energy.
//! * Operators on a `d`-dimensional Hilbert space are vectorized by
//!   **column stacking**: `vec(A)[i + j·d] = A[i, j]`. Superoperators are
//!   `d² × d²` matrices acting on these vectors, so `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.
//! * The Liouville pairing between a bra `(F|` and a ket `|O)` is
//!   `(F|O) = Tr(F† O)`. For a Hermitian density operator this is `Tr(ρ O)`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eid;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod liouville;
pub mod master_eq;
pub mod matrix_io;
pub mod ode;
pub mod sid;
pub mod tolerances;

pub use error::{Error, Result};
pub use liouville::{
    BiorthogonalPairBasis, CoarseState, DensityOperator, HilbertDim, ObservableOperator, StateBra,
    SuperOp,
};
pub use tolerances::Tolerances;

pub use num_complex::Complex64 as C64;

/// Dense complex matrix used for operators and superoperators.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;
