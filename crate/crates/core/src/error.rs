use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "truncation too small: amplitude |alpha| = {amplitude:.4} leaves Poisson tail {tail:.3e} \
         beyond n_fock = {n_fock}; requires n_fock >= {required}"
    )]
    TruncationTooSmall {
        amplitude: f64,
        n_fock: usize,
        tail: f64,
        required: usize,
    },

    #[error("photon number {n_bar:.3} exceeds the dispersive limit n_crit = {n_crit:.3}")]
    DispersiveLimit { n_bar: f64, n_crit: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("trace drift {drift:.3e} exceeded tolerance {tolerance:.1e} at t = {time:.6e} s (time step too large?)")]
    TraceDriftExceeded { drift: f64, tolerance: f64, time: f64 },

    #[error("dimension {dim} too large for the superoperator oracle (limit {limit})")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("unsupported transmon level count {0} (expected 2 or 3)")]
    UnsupportedTransmonLevels(usize),

    #[error("index {index} out of range for {len} subsystems")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("mean photon number {n_bar:.3} too small for the hopping phase gate (needs > pi^2/4)")]
    PhotonNumberTooSmall { n_bar: f64 },

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("serialization: {0}")]
    Serialization(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a numerical invariant during a run, as opposed
    /// to problems with the requested parameters.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::TraceDriftExceeded { .. } | Error::InvalidState(_) | Error::Calibration(_)
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
