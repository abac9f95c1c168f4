use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

use super::state::{State, StateData};

/// A square operator on a tensor-product space, stored sparse.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: CsrMatrix,
    dims: Vec<usize>,
    label: String,
}

impl Operator {
    pub fn new(matrix: CsrMatrix, dims: Vec<usize>, label: impl Into<String>) -> Result<Self> {
        let d: usize = dims.iter().product();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: format!("{d}x{d} for dims {dims:?}"),
                found: format!("{}x{}", matrix.nrows(), matrix.ncols()),
            });
        }
        Ok(Self {
            matrix,
            dims,
            label: label.into(),
        })
    }

    pub fn from_dense(m: &DMatrix<C64>, dims: Vec<usize>, label: impl Into<String>) -> Result<Self> {
        Self::new(CsrMatrix::from_dense(m), dims, label)
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let d = dims.iter().product();
        Self {
            matrix: CsrMatrix::identity(d),
            dims,
            label: "1".into(),
        }
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let d = dims.iter().product();
        Self {
            matrix: CsrMatrix::zeros(d, d),
            dims,
            label: "0".into(),
        }
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        self.matrix.to_dense()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            dims: self.dims.clone(),
            label: format!("({})†", self.label),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: format!("{:?}", self.dims),
                found: format!("{:?}", other.dims),
            });
        }
        Ok(())
    }

    /// Operator product `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            matrix: self.matrix.matmul(&other.matrix),
            dims: self.dims.clone(),
            label: format!("{}·{}", self.label, other.label),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            matrix: self.matrix.add(&other.matrix),
            dims: self.dims.clone(),
            label: format!("{} + {}", self.label, other.label),
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            matrix: self.matrix.scale(s),
            dims: self.dims.clone(),
            label: format!("{s}·{}", self.label),
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.matrix.is_hermitian(tol)
    }

    /// Largest entry of |U†U − 1|.
    pub fn unitarity_error(&self) -> f64 {
        let u = self.to_dense();
        let d = u.nrows();
        (u.adjoint() * &u - DMatrix::<C64>::identity(d, d)).camax()
    }

    pub fn apply_ket(&self, v: &DVector<C64>) -> DVector<C64> {
        self.matrix.mul_vec(v)
    }

    /// `A ρ A†` for a density matrix or `A|ψ⟩` for a ket.
    pub fn apply(&self, state: &State) -> Result<State> {
        if state.dims() != self.dims.as_slice() {
            return Err(Error::DimensionMismatch {
                expected: format!("{:?}", self.dims),
                found: format!("{:?}", state.dims()),
            });
        }
        Ok(match state.data() {
            StateData::Ket(v) => State::ket_unchecked(self.apply_ket(v), self.dims.clone()),
            StateData::Density(m) => {
                let left = self.matrix.mul_dense(m);
                State::density_unchecked(self.matrix.dense_mul_adjoint(&left), self.dims.clone())
            }
        })
    }
}
