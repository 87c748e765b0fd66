//! Projection of a general kernel observable onto its van Hove part.

use super::{EnergyGrid, VanHoveObservable};
use crate::error::{Error, Result};
use crate::CMatrix;

/// Whether an off-diagonal component is a regular function or a singular,
/// delta-like piece. Samples alone cannot tell these apart, so the tag is
/// declared by whoever builds the observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentClass {
    Regular,
    Singular,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ComponentKernel {
    /// Full `grid × grid` samples.
    Sampled(CMatrix),
    /// Weight concentrated on the line `ω − ω′ = offset`, sampled at the
    /// grid energies `ω`.
    Ridge { offset: f64, weights: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelComponent {
    pub class: Option<ComponentClass>,
    pub kernel: ComponentKernel,
}

impl KernelComponent {
    pub fn regular(k: CMatrix) -> Self {
        Self {
            class: Some(ComponentClass::Regular),
            kernel: ComponentKernel::Sampled(k),
        }
    }

    pub fn singular(kernel: ComponentKernel) -> Self {
        Self {
            class: Some(ComponentClass::Singular),
            kernel,
        }
    }
}

/// Observable kernel before the van Hove choice: a diagonal weight and a list
/// of tagged off-diagonal components.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralKernelObservable {
    pub diag: Vec<f64>,
    pub components: Vec<KernelComponent>,
}

impl From<&VanHoveObservable> for GeneralKernelObservable {
    fn from(o: &VanHoveObservable) -> Self {
        Self {
            diag: o.diag().to_vec(),
            components: vec![KernelComponent::regular(o.offdiag().clone())],
        }
    }
}

/// Keeps the diagonal weight and the regular components, drops the singular
/// ones. Untagged components and ridges tagged regular are rejected.
pub fn sid_projector(
    obs: &GeneralKernelObservable,
    grid: &EnergyGrid,
) -> Result<VanHoveObservable> {
    let n = grid.len();
    let mut off = CMatrix::zeros(n, n);
    for (idx, c) in obs.components.iter().enumerate() {
        match (c.class, &c.kernel) {
            (None, _) => {
                return Err(Error::invalid(format!(
                    "component {idx} is untagged; regular and singular parts cannot be \
                     told apart from samples and must be declared"
                )))
            }
            (Some(ComponentClass::Singular), _) => {}
            (Some(ComponentClass::Regular), ComponentKernel::Ridge { .. }) => {
                return Err(Error::invalid(format!(
                    "component {idx} is a ridge on a line but tagged regular; a ridge is a \
                     delta-like piece and has no regular sampled form"
                )))
            }
            (Some(ComponentClass::Regular), ComponentKernel::Sampled(k)) => {
                if k.nrows() != n || k.ncols() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: k.nrows(),
                    });
                }
                off += k;
            }
        }
    }
    VanHoveObservable::new(grid, obs.diag.clone(), off)
}
