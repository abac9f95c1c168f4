use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest Poisson probability mass allowed beyond the Fock truncation.
pub const TRUNCATION_TAIL: f64 = 1e-8;

/// Default detuning ratio Δ/χ used to derive the Purcell rate γ = (χ/Δ)κ.
pub const DEFAULT_DELTA_OVER_CHI: f64 = 100.0;

/// Physical rates and truncation settings. All frequencies are angular
/// (rad/s) in the frame rotating with the bare transmon transition and the
/// ground-state-dressed cavity frequency; rates are in 1/s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Dispersive shift χ.
    pub chi: f64,
    /// Cavity single-photon loss rate κ.
    pub kappa: f64,
    /// Transmon relaxation rate γ. `None` derives γ = (χ/Δ)κ.
    pub gamma: Option<f64>,
    /// Transmon pure dephasing rate.
    pub gamma_phi: f64,
    /// Qubit-cavity detuning Δ, used for γ and the dispersive photon limit.
    pub delta: Option<f64>,
    /// Self-Kerr strength K of the cavity.
    pub kerr: f64,
    /// Inter-cavity hopping ξ (two-cavity runs).
    pub xi: f64,
    /// Second-transition dispersive shift χ′ (three-level runs).
    pub chi_prime: f64,
    /// Transmon anharmonicity ω_fe − ω_eg (three-level runs).
    pub anharmonicity: f64,
    pub n_fock: usize,
    pub n_transmon: usize,
    /// Absolute frequencies, metadata only.
    pub omega_c: Option<f64>,
    pub omega_eg: Option<f64>,
}

impl SystemParams {
    /// Two-level transmon, no loss, Δ = 100χ, anharmonicity −4χ.
    pub fn new(chi: f64, n_fock: usize) -> Self {
        Self {
            chi,
            kappa: 0.0,
            gamma: None,
            gamma_phi: 0.0,
            delta: Some(DEFAULT_DELTA_OVER_CHI * chi),
            kerr: 0.0,
            xi: 0.0,
            chi_prime: chi,
            anharmonicity: -4.0 * chi,
            n_fock,
            n_transmon: 2,
            omega_c: None,
            omega_eg: None,
        }
    }

    /// χ/2π given in MHz.
    pub fn from_chi_mhz(chi_mhz: f64, n_fock: usize) -> Self {
        Self::new(2.0 * PI * chi_mhz * 1e6, n_fock)
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn with_kerr(mut self, kerr: f64) -> Self {
        self.kerr = kerr;
        self
    }

    pub fn with_n_fock(mut self, n_fock: usize) -> Self {
        self.n_fock = n_fock;
        self
    }

    pub fn with_n_transmon(mut self, n_transmon: usize) -> Self {
        self.n_transmon = n_transmon;
        self
    }

    /// Parameters with every dissipative rate set to zero.
    pub fn lossless(&self) -> Self {
        Self {
            kappa: 0.0,
            gamma: Some(0.0),
            gamma_phi: 0.0,
            ..self.clone()
        }
    }

    /// Effective transmon relaxation rate.
    pub fn gamma_rate(&self) -> f64 {
        match (self.gamma, self.delta) {
            (Some(g), _) => g,
            (None, Some(delta)) => self.chi / delta * self.kappa,
            (None, None) => 0.0,
        }
    }

    /// Critical photon number Δ/χ of the dispersive approximation.
    pub fn n_crit(&self) -> Option<f64> {
        self.delta.map(|d| d / self.chi)
    }

    /// Hilbert-space dimension of the cavity ⊗ transmon system.
    pub fn dim(&self) -> usize {
        self.n_fock * self.n_transmon
    }

    pub fn dims(&self) -> Vec<usize> {
        vec![self.n_fock, self.n_transmon]
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.chi > 0.0 && self.chi.is_finite()) {
            return bad("chi must be positive");
        }
        if !(self.kappa >= 0.0) {
            return bad("kappa must be non-negative");
        }
        if !(self.gamma_rate() >= 0.0) {
            return bad("gamma must be non-negative");
        }
        if !(self.gamma_phi >= 0.0) {
            return bad("gamma_phi must be non-negative");
        }
        if let Some(d) = self.delta {
            if !(d > 0.0) {
                return bad("delta must be positive");
            }
        }
        if self.n_fock < 2 {
            return bad("n_fock must be at least 2");
        }
        if self.n_transmon != 2 && self.n_transmon != 3 {
            return Err(Error::UnsupportedTransmonLevels(self.n_transmon));
        }
        Ok(())
    }

    /// Checks the dispersive photon limit and truncation adequacy for a
    /// coherent amplitude that occurs during a run.
    pub fn check_amplitude(&self, amplitude: f64) -> Result<()> {
        let n_bar = amplitude * amplitude;
        if let Some(n_crit) = self.n_crit() {
            if n_bar >= n_crit {
                return Err(Error::DispersiveLimit { n_bar, n_crit });
            }
        }
        check_truncation(amplitude, self.n_fock)
    }
}

/// Probability that a Poisson variable of the given mean is `>= n_fock`.
pub fn poisson_tail(mean: f64, n_fock: usize) -> f64 {
    if mean == 0.0 {
        return if n_fock == 0 { 1.0 } else { 0.0 };
    }
    // Sum the tail directly; terms are evaluated in log space.
    let ln_mean = mean.ln();
    let ln_term = |n: usize| -> f64 { -mean + n as f64 * ln_mean - ln_factorial(n) };
    let start = n_fock;
    if (start as f64) < mean {
        // Tail is large; use the complement.
        let head: f64 = (0..start).map(|n| ln_term(n).exp()).sum();
        return (1.0 - head).max(0.0);
    }
    let mut total = 0.0;
    let mut n = start;
    loop {
        let t = ln_term(n).exp();
        total += t;
        if t < total * 1e-17 || t == 0.0 {
            break;
        }
        n += 1;
    }
    total
}

pub fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Default truncation ceil(|α|² + 6|α| + 10) for the largest amplitude of a run.
pub fn default_n_fock(max_amplitude: f64) -> usize {
    let a = max_amplitude.abs();
    (a * a + 6.0 * a + 10.0).ceil() as usize
}

/// Smallest truncation whose Poisson tail for `amplitude` is within
/// [`TRUNCATION_TAIL`].
pub fn min_adequate_n_fock(amplitude: f64) -> usize {
    let mean = amplitude * amplitude;
    let mut n = mean.floor() as usize + 1;
    while poisson_tail(mean, n) > TRUNCATION_TAIL {
        n += 1;
    }
    n.max(2)
}

pub fn check_truncation(amplitude: f64, n_fock: usize) -> Result<()> {
    let tail = poisson_tail(amplitude * amplitude, n_fock);
    if tail > TRUNCATION_TAIL {
        return Err(Error::TruncationTooSmall {
            amplitude: amplitude.abs(),
            n_fock,
            tail,
            required: min_adequate_n_fock(amplitude),
        });
    }
    Ok(())
}
