use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{cat_state, check_truncation, coherent_state, Parity, State, SystemParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    /// |0⟩_L = |0⟩, |1⟩_L = |α⟩.
    Computational,
    /// |0⟩_L = |C⁺_{iα}⟩, |1⟩_L = |C⁺_α⟩.
    Memory,
}

/// cos(θ/2)|0⟩_L + e^{iφ} sin(θ/2)|1⟩_L.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicalState {
    pub theta: f64,
    pub phi: f64,
    pub alpha: f64,
    pub encoding: Encoding,
}

impl LogicalState {
    pub fn new(theta: f64, phi: f64, alpha: f64, encoding: Encoding) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in [0, pi], got {theta}"
            )));
        }
        if !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::InvalidParameter(format!("phi must lie in [0, 2pi), got {phi}")));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha must be finite, got {alpha}")));
        }
        Ok(Self {
            theta,
            phi,
            alpha,
            encoding,
        })
    }

    /// Like [`LogicalState::new`] with φ reduced modulo 2π.
    pub fn wrapped(theta: f64, phi: f64, alpha: f64, encoding: Encoding) -> Result<Self> {
        let mut p = phi.rem_euclid(2.0 * PI);
        if p >= 2.0 * PI {
            p = 0.0;
        }
        Self::new(theta, p, alpha, encoding)
    }

    pub fn zero(alpha: f64, encoding: Encoding) -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
            alpha,
            encoding,
        }
    }

    pub fn one(alpha: f64, encoding: Encoding) -> Self {
        Self {
            theta: PI,
            phi: 0.0,
            alpha,
            encoding,
        }
    }

    /// (|0⟩_L + |1⟩_L)/√2.
    pub fn plus(alpha: f64, encoding: Encoding) -> Self {
        Self {
            theta: PI / 2.0,
            phi: 0.0,
            alpha,
            encoding,
        }
    }

    pub fn coefficients(&self) -> [C64; 2] {
        [
            C64::from((self.theta / 2.0).cos()),
            C64::from_polar((self.theta / 2.0).sin(), self.phi),
        ]
    }

    /// Normalized cavity kets of |0⟩_L and |1⟩_L.
    pub fn basis(alpha: f64, encoding: Encoding, n_fock: usize) -> Result<[DVector<C64>; 2]> {
        check_truncation(alpha.abs(), n_fock)?;
        let ket = |s: State| s.as_ket().cloned().expect("constructor returns a ket");
        Ok(match encoding {
            Encoding::Computational => [
                ket(coherent_state(C64::new(0.0, 0.0), n_fock)?),
                ket(coherent_state(C64::from(alpha), n_fock)?),
            ],
            Encoding::Memory => [
                ket(cat_state(C64::new(0.0, alpha), Parity::Even, n_fock)?),
                ket(cat_state(C64::from(alpha), Parity::Even, n_fock)?),
            ],
        })
    }

    /// The cavity ket, normalized after superposing the (non-orthogonal)
    /// basis states.
    pub fn cavity_ket(&self, n_fock: usize) -> Result<DVector<C64>> {
        let [b0, b1] = Self::basis(self.alpha, self.encoding, n_fock)?;
        let [c0, c1] = self.coefficients();
        let v = b0 * c0 + b1 * c1;
        let norm = v.norm();
        if norm < 1e-12 {
            return Err(Error::InvalidState(
                "logical superposition cancels in the truncated space".into(),
            ));
        }
        Ok(v / C64::from(norm))
    }

    /// Cavity state times the transmon ground state on the space of `params`.
    pub fn physical(&self, params: &SystemParams) -> Result<State> {
        let cav = self.cavity_ket(params.n_fock)?;
        let mut v = DVector::zeros(params.dim());
        v.rows_mut(0, params.n_fock).copy_from(&cav);
        State::ket(v, params.dims())
    }
}
