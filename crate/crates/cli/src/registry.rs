//! Named experiments.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{InputState, Resolved};
use crate::error::{CliError, CliResult};
use crate::experiments;
use crate::output::Outputs;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    ParityPulseSweep,
    ParityPulseSaturation,
    GaussianVsSquare,
    HadamardSingle,
    HadamardBloch,
    KerrDisplacement,
    KerrHadamard,
    CzGate,
    PhaseGate,
    EncodingSwitch,
    NotGate,
}

/// Experiment-specific defaults.
#[derive(Clone, Debug)]
pub struct Defaults {
    pub alpha: f64,
    pub beta: f64,
    pub alphas: Vec<f64>,
    pub kappa_over_chi: f64,
    pub kerr_over_chi: f64,
    pub kerr_correction: bool,
    pub input: InputState,
}

impl Experiment {
    pub const ALL: [Experiment; 11] = [
        Experiment::ParityPulseSweep,
        Experiment::ParityPulseSaturation,
        Experiment::GaussianVsSquare,
        Experiment::HadamardSingle,
        Experiment::HadamardBloch,
        Experiment::KerrDisplacement,
        Experiment::KerrHadamard,
        Experiment::CzGate,
        Experiment::PhaseGate,
        Experiment::EncodingSwitch,
        Experiment::NotGate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::ParityPulseSweep => "parity_pulse_sweep",
            Experiment::ParityPulseSaturation => "parity_pulse_saturation",
            Experiment::GaussianVsSquare => "gaussian_vs_square",
            Experiment::HadamardSingle => "hadamard_single",
            Experiment::HadamardBloch => "hadamard_bloch",
            Experiment::KerrDisplacement => "kerr_displacement",
            Experiment::KerrHadamard => "kerr_hadamard",
            Experiment::CzGate => "cz_gate",
            Experiment::PhaseGate => "phase_gate",
            Experiment::EncodingSwitch => "encoding_switch",
            Experiment::NotGate => "not_gate",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::ParityPulseSweep => {
                "parity-entangler fidelity against pulse length k for each alpha, with the loss envelope"
            }
            Experiment::ParityPulseSaturation => "parity-entangler fidelity against the number of comb tones",
            Experiment::GaussianVsSquare => "parity-entangler fidelity against k for square and Gaussian envelopes",
            Experiment::HadamardSingle => {
                "Hadamard on one logical input: Wigner function after every item and a fidelity record"
            }
            Experiment::HadamardBloch => "Hadamard fidelity over the logical Bloch sphere",
            Experiment::KerrDisplacement => {
                "direction of a calibrated displacement under self-Kerr, simulated and predicted"
            }
            Experiment::KerrHadamard => "Hadamard with self-Kerr, with and without the Kerr corrections",
            Experiment::CzGate => "two-cavity controlled phase: basis fidelity matrices, ideal and lossy",
            Experiment::PhaseGate => "Berry-phase logical Z rotation for each angle",
            Experiment::EncodingSwitch => "computational/memory encoding switch on both logical basis states",
            Experiment::NotGate => "logical NOT on both logical basis states",
        }
    }

    pub fn defaults(self) -> Defaults {
        let base = Defaults {
            alpha: 3.0,
            beta: 4.0,
            alphas: vec![2.0, 3.0, 4.0],
            kappa_over_chi: crate::config::DEFAULT_KAPPA_OVER_CHI,
            kerr_over_chi: 0.0,
            kerr_correction: false,
            input: InputState::Zero,
        };
        match self {
            Experiment::ParityPulseSaturation | Experiment::GaussianVsSquare => Defaults { alpha: 2.0, ..base },
            Experiment::KerrDisplacement => Defaults {
                kappa_over_chi: 0.0,
                ..base
            },
            Experiment::KerrHadamard => Defaults {
                alpha: 4.0,
                kerr_over_chi: 0.5e-4,
                kerr_correction: true,
                input: InputState::Plus,
                ..base
            },
            Experiment::CzGate => Defaults {
                alphas: vec![3.0, 4.0],
                ..base
            },
            Experiment::PhaseGate => Defaults {
                input: InputState::Plus,
                ..base
            },
            Experiment::EncodingSwitch => Defaults { alpha: 3.5, ..base },
            _ => base,
        }
    }

    /// Largest coherent amplitude reached by any run of the experiment.
    pub fn peak_amplitude(self, alpha: f64, beta: f64, alphas: &[f64], thetas: &[f64]) -> f64 {
        let max_alpha = alphas.iter().copied().fold(0.0, f64::max);
        match self {
            Experiment::ParityPulseSweep | Experiment::CzGate => max_alpha,
            Experiment::KerrDisplacement => beta,
            Experiment::PhaseGate => {
                let theta = thetas.iter().copied().fold(0.0, f64::max);
                alpha + std::f64::consts::SQRT_2 * (theta / 2.0).sqrt()
            }
            Experiment::EncodingSwitch => 2.0 * alpha,
            _ => alpha,
        }
    }

    pub fn run(self, r: &Resolved) -> CliResult<Outputs> {
        match self {
            Experiment::ParityPulseSweep => experiments::entangler::parity_pulse_sweep(r),
            Experiment::ParityPulseSaturation => experiments::entangler::parity_pulse_saturation(r),
            Experiment::GaussianVsSquare => experiments::entangler::gaussian_vs_square(r),
            Experiment::HadamardSingle => experiments::logical::hadamard_single(r),
            Experiment::HadamardBloch => experiments::logical::hadamard_bloch(r),
            Experiment::KerrDisplacement => experiments::kerr::kerr_displacement(r),
            Experiment::KerrHadamard => experiments::kerr::kerr_hadamard(r),
            Experiment::CzGate => experiments::cz::run_cz(r),
            Experiment::PhaseGate => experiments::logical::phase_gate(r),
            Experiment::EncodingSwitch => experiments::logical::encoding_switch(r),
            Experiment::NotGate => experiments::logical::not_gate(r),
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Experiment::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
            CliError::Config(format!(
                "unknown experiment {s:?}; expected one of {}",
                names.join(", ")
            ))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip_and_are_unique() {
        let mut names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
            let json = serde_json::to_string(&e).unwrap();
            assert_eq!(json, format!("\"{}\"", e.name()));
        }
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), Experiment::ALL.len());
        let err = "hadamard".parse::<Experiment>().unwrap_err();
        assert!(err.to_string().contains("hadamard_single"));
    }

    #[test]
    fn peak_amplitudes_follow_the_sequences() {
        let thetas = [std::f64::consts::PI];
        let pa = |e: Experiment| e.peak_amplitude(3.0, 4.0, &[2.0, 5.0], &thetas);
        assert_eq!(pa(Experiment::EncodingSwitch), 6.0);
        assert_eq!(pa(Experiment::KerrDisplacement), 4.0);
        assert_eq!(pa(Experiment::ParityPulseSweep), 5.0);
        assert_eq!(pa(Experiment::HadamardSingle), 3.0);
        let phase = 3.0 + std::f64::consts::SQRT_2 * (std::f64::consts::PI / 2.0).sqrt();
        assert!((pa(Experiment::PhaseGate) - phase).abs() < 1e-15);
    }
}
