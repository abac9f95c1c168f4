use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

use super::operator::Operator;

pub const KET_NORM_TOL: f64 = 1e-10;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-8;
pub const POSITIVITY_TOL: f64 = 1e-8;

/// Largest dimension for which the positivity check diagonalizes the
/// density matrix on construction.
const POSITIVITY_CHECK_MAX_DIM: usize = 512;

#[derive(Clone, Debug, PartialEq)]
pub enum StateData {
    Ket(DVector<C64>),
    Density(DMatrix<C64>),
}

/// A pure or mixed state on a tensor-product space.
///
/// `dims` lists subsystem dimensions with the first subsystem varying
/// fastest in the flat index: for `[n_fock, n_transmon]` the basis state
/// `|n⟩⊗|j⟩` sits at `n + n_fock * j`, so all ground-state Fock levels come
/// before the excited ones.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    data: StateData,
    dims: Vec<usize>,
}

fn check_dims(dims: &[usize], len: usize) -> Result<()> {
    let prod: usize = dims.iter().product();
    if dims.is_empty() || prod != len {
        return Err(Error::DimensionMismatch {
            expected: format!("product of dims {dims:?}"),
            found: len.to_string(),
        });
    }
    Ok(())
}

impl State {
    /// A normalized ket. Fails when the norm deviates from one.
    pub fn ket(v: DVector<C64>, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, v.len())?;
        let norm = v.norm();
        if (norm - 1.0).abs() > KET_NORM_TOL {
            return Err(Error::InvalidState(format!("ket norm {norm} is not 1")));
        }
        Ok(Self {
            data: StateData::Ket(v),
            dims,
        })
    }

    /// Normalizes `v` before wrapping it.
    pub fn ket_normalized(v: DVector<C64>, dims: Vec<usize>) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::ket(v / C64::from(norm), dims)
    }

    /// A validated density matrix: Hermitian, unit trace and (for moderate
    /// dimensions) positive semidefinite.
    pub fn density(m: DMatrix<C64>, dims: Vec<usize>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidState("density matrix must be square".into()));
        }
        check_dims(&dims, m.nrows())?;
        let herm = (&m - m.adjoint()).camax();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix not Hermitian ({herm:.3e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("density matrix trace {tr} is not 1")));
        }
        if m.nrows() <= POSITIVITY_CHECK_MAX_DIM {
            let min = min_eigenvalue(&m);
            if min < -POSITIVITY_TOL {
                return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
            }
        }
        Ok(Self {
            data: StateData::Density(m),
            dims,
        })
    }

    /// Wraps a density matrix produced by the library without re-validating.
    pub(crate) fn density_unchecked(m: DMatrix<C64>, dims: Vec<usize>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), m.nrows());
        Self {
            data: StateData::Density(m),
            dims,
        }
    }

    pub(crate) fn ket_unchecked(v: DVector<C64>, dims: Vec<usize>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), v.len());
        Self {
            data: StateData::Ket(v),
            dims,
        }
    }

    pub fn data(&self) -> &StateData {
        &self.data
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_ket(&self) -> bool {
        matches!(self.data, StateData::Ket(_))
    }

    pub fn as_ket(&self) -> Option<&DVector<C64>> {
        match &self.data {
            StateData::Ket(v) => Some(v),
            StateData::Density(_) => None,
        }
    }

    pub fn density_matrix(&self) -> DMatrix<C64> {
        match &self.data {
            StateData::Ket(v) => v * v.adjoint(),
            StateData::Density(m) => m.clone(),
        }
    }

    pub fn into_density(self) -> Self {
        match self.data {
            StateData::Ket(ref v) => Self::density_unchecked(v * v.adjoint(), self.dims),
            StateData::Density(_) => self,
        }
    }

    pub fn trace(&self) -> C64 {
        match &self.data {
            StateData::Ket(v) => C64::from(v.norm_squared()),
            StateData::Density(m) => m.trace(),
        }
    }

    pub fn purity(&self) -> f64 {
        match &self.data {
            StateData::Ket(v) => v.norm_squared().powi(2),
            StateData::Density(m) => (m * m).trace().re,
        }
    }

    /// ⟨ψ|ρ|ψ⟩ for a (not necessarily normalized) ket `psi`.
    pub fn overlap_with(&self, psi: &DVector<C64>) -> f64 {
        match &self.data {
            StateData::Ket(v) => psi.dotc(v).norm_sqr(),
            StateData::Density(m) => psi.dotc(&(m * psi)).re,
        }
    }

    /// Expectation value tr[Aρ].
    pub fn expect(&self, op: &Operator) -> C64 {
        let a = op.matrix();
        match &self.data {
            StateData::Ket(v) => v.dotc(&a.mul_vec(v)),
            StateData::Density(m) => {
                let mut tr = C64::new(0.0, 0.0);
                for (i, j, val) in a.iter() {
                    tr += val * m[(j, i)];
                }
                tr
            }
        }
    }

    /// Trace over every subsystem not listed in `keep` (kept in the given
    /// order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<State> {
        let n_sub = self.dims.len();
        for &k in keep {
            if k >= n_sub {
                return Err(Error::IndexOutOfRange { index: k, len: n_sub });
            }
        }
        if keep.is_empty() {
            return Err(Error::InvalidParameter(
                "partial trace must keep at least one subsystem".into(),
            ));
        }
        let rho = self.density_matrix();
        let dims = &self.dims;
        let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
        let traced: Vec<usize> = (0..n_sub).filter(|k| !keep.contains(k)).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
        let d_keep: usize = kept_dims.iter().product();
        let d_trace: usize = traced_dims.iter().product();

        // Strides of each subsystem in the flat index (first subsystem fastest).
        let mut strides = vec![1usize; n_sub];
        for k in 1..n_sub {
            strides[k] = strides[k - 1] * dims[k - 1];
        }
        let flat = |multi_keep: usize, multi_trace: usize| -> usize {
            let mut idx = 0;
            let mut r = multi_keep;
            for (pos, &k) in keep.iter().enumerate() {
                idx += (r % kept_dims[pos]) * strides[k];
                r /= kept_dims[pos];
            }
            let mut r = multi_trace;
            for (pos, &k) in traced.iter().enumerate() {
                idx += (r % traced_dims[pos]) * strides[k];
                r /= traced_dims[pos];
            }
            idx
        };

        let mut out = DMatrix::zeros(d_keep, d_keep);
        for i in 0..d_keep {
            for j in 0..d_keep {
                let mut s = C64::new(0.0, 0.0);
                for t in 0..d_trace {
                    s += rho[(flat(i, t), flat(j, t))];
                }
                out[(i, j)] = s;
            }
        }
        Ok(State::density_unchecked(out, kept_dims))
    }

    /// Trace distance ½‖ρ − σ‖₁ via a Hermitian eigendecomposition.
    pub fn trace_distance(&self, other: &State) -> Result<f64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: format!("{:?}", self.dims),
                found: format!("{:?}", other.dims),
            });
        }
        let diff = self.density_matrix() - other.density_matrix();
        let eig = SymmetricEigen::new(hermitian_part(&diff));
        Ok(0.5 * eig.eigenvalues.iter().map(|x| x.abs()).sum::<f64>())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        match &self.data {
            StateData::Ket(_) => 0.0,
            StateData::Density(m) => min_eigenvalue(m),
        }
    }
}

pub(crate) fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::from(0.5)
}

pub(crate) fn min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    let eig = SymmetricEigen::new(hermitian_part(m));
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}
