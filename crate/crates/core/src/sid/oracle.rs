//! Brute-force cross-check for [`super::expectation_sid`].

use super::{EnergyGrid, VanHoveObservable, VanHoveState};
use crate::error::{Error, Result};
use crate::{CMatrix, C64};

/// Largest grid the dense oracle accepts by default.
pub const DEFAULT_ORACLE_CAP: usize = 512;

/// Treats the grid as an `N`-level system: folds the quadrature weights into
/// `√w_a K_ab √w_b`, evolves with `U = diag(e^{-iω t})` and returns
/// `Tr(ρ(t) O)` plus the diagonal term. No compensated summation, no shared
/// code with the production path beyond the data types.
pub fn discretized_unitary_oracle(
    state: &VanHoveState,
    obs: &VanHoveObservable,
    grid: &EnergyGrid,
    t: f64,
    cap: usize,
) -> Result<f64> {
    let n = grid.len();
    if n > cap {
        return Err(Error::ResourceCap(format!(
            "oracle grid of {n} points exceeds the cap of {cap}"
        )));
    }
    if state.len() != n || obs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: state.len().max(obs.len()),
        });
    }
    let sw: Vec<f64> = grid.weights().iter().map(|w| w.sqrt()).collect();
    let fold = |k: &CMatrix| CMatrix::from_fn(n, n, |a, b| k[(a, b)] * sw[a] * sw[b]);
    let rho = fold(state.offdiag());
    let o = fold(obs.offdiag());
    let u = CMatrix::from_diagonal(&crate::CVector::from_iterator(
        n,
        grid.omega().iter().map(|&w| C64::from_polar(1.0, -w * t)),
    ));
    let rho_t = &u * rho * u.adjoint();
    let off = (rho_t * o).trace();
    let diag: f64 = (0..n)
        .map(|i| grid.weights()[i] * state.diag()[i] * obs.diag()[i])
        .sum();
    Ok(diag + off.re)
}
