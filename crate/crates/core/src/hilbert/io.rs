use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{State, StateData};

pub const STATE_FORMAT: &str = "catqubit-state";
pub const STATE_FORMAT_VERSION: u32 = 1;

/// Trace and Hermiticity slack accepted when loading a density matrix that
/// came out of a lossy run.
const LOAD_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Ket,
    Density,
}

/// On-disk JSON container: dims, row-major `[re, im]` entries and a label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub format: String,
    pub version: u32,
    pub label: String,
    pub dims: Vec<usize>,
    pub kind: StateKind,
    pub entries: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_state(state: &State, label: impl Into<String>) -> Self {
        let (kind, entries) = match state.data() {
            StateData::Ket(v) => (StateKind::Ket, v.iter().map(|z| [z.re, z.im]).collect()),
            StateData::Density(m) => {
                let n = m.nrows();
                let mut out = Vec::with_capacity(n * n);
                for r in 0..n {
                    for c in 0..n {
                        let z = m[(r, c)];
                        out.push([z.re, z.im]);
                    }
                }
                (StateKind::Density, out)
            }
        };
        Self {
            format: STATE_FORMAT.into(),
            version: STATE_FORMAT_VERSION,
            label: label.into(),
            dims: state.dims().to_vec(),
            kind,
            entries,
        }
    }

    pub fn to_state(&self) -> Result<State> {
        if self.format != STATE_FORMAT {
            return Err(Error::Serialization(format!(
                "unknown container format {:?}",
                self.format
            )));
        }
        if self.version != STATE_FORMAT_VERSION {
            return Err(Error::Serialization(format!(
                "unsupported container version {}",
                self.version
            )));
        }
        let dim: usize = self.dims.iter().product();
        let values: Vec<C64> = self.entries.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        match self.kind {
            StateKind::Ket => {
                if values.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim.to_string(),
                        found: values.len().to_string(),
                    });
                }
                State::ket(DVector::from_vec(values), self.dims.clone())
            }
            StateKind::Density => {
                if values.len() != dim * dim {
                    return Err(Error::DimensionMismatch {
                        expected: (dim * dim).to_string(),
                        found: values.len().to_string(),
                    });
                }
                let m = DMatrix::from_row_slice(dim, dim, &values);
                let herm = (&m - m.adjoint()).camax();
                let tr = m.trace();
                if herm > LOAD_TOL || (tr.re - 1.0).abs() > LOAD_TOL || tr.im.abs() > LOAD_TOL {
                    return Err(Error::InvalidState(format!(
                        "stored density matrix has trace {tr} and Hermiticity error {herm:.3e}"
                    )));
                }
                Ok(State::density_unchecked(m, self.dims.clone()))
            }
        }
    }
}

pub fn save_state(state: &State, label: &str, path: &Path) -> Result<()> {
    let json =
        serde_json::to_string(&StateFile::from_state(state, label)).map_err(|e| Error::Serialization(e.to_string()))?;
    fs::write(path, json)?;
    Ok(())
}

pub fn load_state(path: &Path) -> Result<(State, String)> {
    let text = fs::read_to_string(path)?;
    let file: StateFile = serde_json::from_str(&text).map_err(|e| Error::Serialization(e.to_string()))?;
    Ok((file.to_state()?, file.label))
}
