use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{Operator, State};

use super::CollapseChannel;

/// Largest Hilbert dimension accepted by the dense superoperator oracle.
pub const SUPEROP_MAX_DIM: usize = 64;

/// A linear map on density matrices acting on column-major vec(ρ).
#[derive(Clone, Debug)]
pub struct Superoperator {
    matrix: DMatrix<C64>,
    dims: Vec<usize>,
}

impl Superoperator {
    pub fn identity(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self {
            matrix: DMatrix::identity(d * d, d * d),
            dims,
        }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn apply(&self, rho: &State) -> Result<State> {
        if rho.dims() != self.dims.as_slice() {
            return Err(Error::DimensionMismatch {
                expected: format!("{:?}", self.dims),
                found: format!("{:?}", rho.dims()),
            });
        }
        let d = rho.dim();
        let m = rho.density_matrix();
        let v = &self.matrix * nalgebra::DVector::from_column_slice(m.as_slice());
        Ok(State::density_unchecked(
            DMatrix::from_column_slice(d, d, v.as_slice()),
            self.dims.clone(),
        ))
    }

    /// The map `next ∘ self`.
    pub fn then(&self, next: &Superoperator) -> Result<Superoperator> {
        if self.dims != next.dims {
            return Err(Error::DimensionMismatch {
                expected: format!("{:?}", self.dims),
                found: format!("{:?}", next.dims),
            });
        }
        Ok(Self {
            matrix: &next.matrix * &self.matrix,
            dims: self.dims.clone(),
        })
    }
}

/// Liouvillian of a constant Hamiltonian with collapse channels in the
/// column-major vectorization `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.
pub fn liouvillian(h: &Operator, channels: &[CollapseChannel]) -> DMatrix<C64> {
    let d = h.dim();
    let id = DMatrix::<C64>::identity(d, d);
    let hm = h.to_dense();
    let mi = C64::new(0.0, -1.0);
    let mut l = (id.kronecker(&hm) - hm.transpose().kronecker(&id)) * mi;
    for ch in channels.iter().filter(|c| c.rate > 0.0) {
        let a = ch.operator.to_dense();
        let ada = a.adjoint() * &a;
        let r = C64::from(ch.rate);
        l += (a.conjugate().kronecker(&a) - (id.kronecker(&ada) + ada.transpose().kronecker(&id)) * C64::from(0.5)) * r;
    }
    l
}

/// Exact propagator exp(𝓛 T) for a constant Hamiltonian.
pub fn superop_propagator(h: &Operator, channels: &[CollapseChannel], duration: f64) -> Result<Superoperator> {
    let d = h.dim();
    if d > SUPEROP_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: d,
            limit: SUPEROP_MAX_DIM,
        });
    }
    for ch in channels {
        if ch.operator.dims() != h.dims() {
            return Err(Error::DimensionMismatch {
                expected: format!("{:?}", h.dims()),
                found: format!("{:?}", ch.operator.dims()),
            });
        }
    }
    let l = liouvillian(h, channels) * C64::from(duration);
    Ok(Superoperator {
        matrix: l.exp(),
        dims: h.dims().to_vec(),
    })
}
