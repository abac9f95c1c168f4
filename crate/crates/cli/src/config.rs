//! Experiment configuration files.
//!
//! Units at this boundary: frequencies are χ/2π-style values in MHz, rates
//! and energies are ratios to χ, durations (pulse lengths and the step
//! override) are in units of π/χ. Everything is converted to rad/s and
//! seconds during resolution.

use std::f64::consts::PI;
use std::path::PathBuf;

use catqubit::analysis::default_n_omega;
use catqubit::gates::{Encoding, LogicalState, PulseSettings, SwitchDirection};
use catqubit::hilbert::{check_truncation, default_n_fock, min_adequate_n_fock};
use catqubit::pulses::Envelope;
use catqubit::SystemParams;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::registry::Experiment;

/// Top-level keys without a default.
pub const REQUIRED_KEYS: [&str; 2] = ["experiment", "output_dir"];

pub const DEFAULT_CHI_MHZ: f64 = 50.0;
pub const DEFAULT_KAPPA_OVER_CHI: f64 = 1e-4;
pub const DEFAULT_XI_MHZ: f64 = 25.0;
/// Cavity loss of the two-cavity gate as a ratio to ξ.
pub const DEFAULT_CZ_KAPPA_OVER_XI: f64 = 2e-4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    Ideal,
    #[default]
    Realized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputState {
    Zero,
    One,
    Plus,
    Minus,
}

impl InputState {
    pub fn logical(self, alpha: f64, encoding: Encoding) -> LogicalState {
        match self {
            InputState::Zero => LogicalState::zero(alpha, encoding),
            InputState::One => LogicalState::one(alpha, encoding),
            InputState::Plus => LogicalState::plus(alpha, encoding),
            InputState::Minus => LogicalState {
                phi: PI,
                ..LogicalState::plus(alpha, encoding)
            },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InputState::Zero => "zero",
            InputState::One => "one",
            InputState::Plus => "plus",
            InputState::Minus => "minus",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub output_dir: PathBuf,
    pub mode: Option<RunMode>,
    /// Integration step override in units of π/χ.
    pub dt: Option<f64>,
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub pulse: PulseSection,
    #[serde(default)]
    pub sequence: SequenceSection,
    #[serde(default)]
    pub sweep: SweepSection,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub chi_mhz: Option<f64>,
    pub kappa_over_chi: Option<f64>,
    /// Omitted: the Purcell rate (χ/Δ)κ.
    pub gamma_over_chi: Option<f64>,
    pub gamma_phi_over_chi: Option<f64>,
    pub delta_over_chi: Option<f64>,
    pub kerr_over_chi: Option<f64>,
    pub chi_prime_over_chi: Option<f64>,
    pub anharmonicity_over_chi: Option<f64>,
    pub n_fock: Option<usize>,
    pub n_transmon: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSection {
    /// Qubit pulse length in π/χ.
    pub k: Option<f64>,
    pub k_displacement: Option<f64>,
    pub k_conditional: Option<f64>,
    pub envelope: Option<Envelope>,
    pub n_omega: Option<usize>,
    pub kerr_correction: Option<bool>,
    pub support_tail: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSection {
    pub alpha: Option<f64>,
    pub theta: Option<f64>,
    pub beta: Option<f64>,
    pub xi_mhz: Option<f64>,
    pub direction: Option<SwitchDirection>,
    pub input: Option<InputState>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub alphas: Option<Vec<f64>>,
    pub ks: Option<Vec<f64>>,
    pub n_omegas: Option<Vec<usize>>,
    pub thetas: Option<Vec<f64>>,
    pub kerr_over_chi: Option<Vec<f64>>,
    pub n_theta: Option<usize>,
    pub n_phi: Option<usize>,
}

/// A configuration with every default filled in, in config units, plus the
/// SI quantities handed to the simulator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Resolved {
    pub experiment: Experiment,
    pub output_dir: PathBuf,
    pub mode: RunMode,
    pub chi_mhz: f64,
    pub kappa_over_chi: f64,
    pub gamma_over_chi: f64,
    pub kerr_over_chi: f64,
    pub n_fock: usize,
    pub n_transmon: usize,
    /// Integration step override in seconds.
    pub dt_s: Option<f64>,
    pub pulse: PulseSettings,
    pub n_omega: Option<usize>,
    pub alpha: f64,
    pub theta: f64,
    pub beta: f64,
    pub xi_mhz: f64,
    pub direction: SwitchDirection,
    pub input: InputState,
    pub alphas: Vec<f64>,
    pub ks: Vec<f64>,
    pub n_omegas: Vec<usize>,
    pub thetas: Vec<f64>,
    pub kerrs_over_chi: Vec<f64>,
    pub n_theta: usize,
    pub n_phi: usize,
    /// Largest coherent amplitude any run of the experiment passes through.
    pub peak_amplitude: f64,
    pub min_n_fock: usize,
    pub params: SystemParams,
}

impl Resolved {
    pub fn chi(&self) -> f64 {
        self.params.chi
    }

    /// Angular hopping rate ξ.
    pub fn xi(&self) -> f64 {
        2.0 * PI * self.xi_mhz * 1e6
    }

    /// Parameters with a different self-Kerr, in units of χ.
    pub fn with_kerr(&self, kerr_over_chi: f64) -> SystemParams {
        self.params.clone().with_kerr(kerr_over_chi * self.chi())
    }
}

/// Parses a TOML configuration. Missing required keys are all reported
/// together; unknown keys are rejected.
pub fn parse_config(text: &str) -> CliResult<ExperimentConfig> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
    let missing: Vec<&str> = REQUIRED_KEYS
        .iter()
        .copied()
        .filter(|k| !table.contains_key(*k))
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Config(format!(
            "missing required fields: {}",
            missing.join(", ")
        )));
    }
    toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> CliResult<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!(
            "{name} must be non-negative and finite, got {v}"
        )))
    }
}

fn non_empty<T>(name: &str, v: Vec<T>) -> CliResult<Vec<T>> {
    if v.is_empty() {
        Err(CliError::Config(format!("{name} must not be empty")))
    } else {
        Ok(v)
    }
}

/// Applies defaults and checks every precondition that can be checked
/// without running anything.
pub fn resolve(cfg: &ExperimentConfig) -> CliResult<Resolved> {
    let experiment: Experiment = cfg.experiment.parse()?;
    let d = experiment.defaults();
    let s = &cfg.system;

    let chi_mhz = positive("system.chi_mhz", s.chi_mhz.unwrap_or(DEFAULT_CHI_MHZ))?;
    let chi = 2.0 * PI * chi_mhz * 1e6;
    let xi_mhz = positive("sequence.xi_mhz", cfg.sequence.xi_mhz.unwrap_or(DEFAULT_XI_MHZ))?;
    let default_kappa = if experiment == Experiment::CzGate {
        DEFAULT_CZ_KAPPA_OVER_XI * xi_mhz / chi_mhz
    } else {
        d.kappa_over_chi
    };
    let kappa_over_chi = non_negative("system.kappa_over_chi", s.kappa_over_chi.unwrap_or(default_kappa))?;
    let kerr_over_chi = s.kerr_over_chi.unwrap_or(d.kerr_over_chi);
    if !kerr_over_chi.is_finite() {
        return Err(CliError::Config("system.kerr_over_chi must be finite".into()));
    }

    let alpha = positive("sequence.alpha", cfg.sequence.alpha.unwrap_or(d.alpha))?;
    let beta = positive("sequence.beta", cfg.sequence.beta.unwrap_or(d.beta))?;
    let theta = cfg.sequence.theta.unwrap_or(PI / 2.0);
    let sw = &cfg.sweep;
    let alphas = non_empty("sweep.alphas", sw.alphas.clone().unwrap_or_else(|| d.alphas.clone()))?;
    for &a in &alphas {
        positive("sweep.alphas", a)?;
    }
    let ks = non_empty(
        "sweep.ks",
        sw.ks.clone().unwrap_or_else(|| (1..=20).map(f64::from).collect()),
    )?;
    for &k in &ks {
        positive("sweep.ks", k)?;
    }
    let n_omegas = non_empty(
        "sweep.n_omegas",
        sw.n_omegas
            .clone()
            .unwrap_or_else(|| (1..=2 * default_n_omega(alpha)).collect()),
    )?;
    if n_omegas.contains(&0) {
        return Err(CliError::Config("sweep.n_omegas entries must be at least 1".into()));
    }
    let thetas = non_empty("sweep.thetas", sw.thetas.clone().unwrap_or_else(|| vec![theta]))?;
    for &t in &thetas {
        if !(0.0..=2.0 * PI).contains(&t) {
            return Err(CliError::Config(format!("phase angles must lie in [0, 2pi], got {t}")));
        }
    }
    let kerrs_over_chi = non_empty(
        "sweep.kerr_over_chi",
        sw.kerr_over_chi
            .clone()
            .unwrap_or_else(|| vec![0.5e-4, 1e-4, 2e-4, 5e-4]),
    )?;
    let n_theta = sw.n_theta.unwrap_or(13);
    let n_phi = sw.n_phi.unwrap_or(24);
    if n_theta == 0 || n_phi == 0 {
        return Err(CliError::Config(
            "sweep.n_theta and sweep.n_phi must be at least 1".into(),
        ));
    }

    let p = &cfg.pulse;
    let defaults = PulseSettings::default();
    let pulse = PulseSettings {
        k_rotation: positive("pulse.k", p.k.unwrap_or(defaults.k_rotation))?,
        k_displacement: positive(
            "pulse.k_displacement",
            p.k_displacement.unwrap_or(defaults.k_displacement),
        )?,
        k_conditional_displacement: p
            .k_conditional
            .map(|k| positive("pulse.k_conditional", k))
            .transpose()?,
        envelope: p.envelope.unwrap_or(defaults.envelope),
        kerr_correction: p.kerr_correction.unwrap_or(d.kerr_correction),
        support_tail: positive("pulse.support_tail", p.support_tail.unwrap_or(defaults.support_tail))?,
    };
    if p.n_omega == Some(0) {
        return Err(CliError::Config("pulse.n_omega must be at least 1".into()));
    }

    let peak_amplitude = experiment.peak_amplitude(alpha, beta, &alphas, &thetas);
    let min_n_fock = min_adequate_n_fock(peak_amplitude);
    let n_fock = match s.n_fock {
        Some(n) => {
            check_truncation(peak_amplitude, n).map_err(|e| CliError::Config(format!("system.n_fock: {e}")))?;
            n
        }
        None => default_n_fock(peak_amplitude),
    };

    let mut params = SystemParams::new(chi, n_fock)
        .with_kappa(kappa_over_chi * chi)
        .with_kerr(kerr_over_chi * chi);
    if let Some(g) = s.gamma_over_chi {
        params.gamma = Some(non_negative("system.gamma_over_chi", g)? * chi);
    }
    if let Some(g) = s.gamma_phi_over_chi {
        params.gamma_phi = non_negative("system.gamma_phi_over_chi", g)? * chi;
    }
    if let Some(x) = s.delta_over_chi {
        params.delta = Some(positive("system.delta_over_chi", x)? * chi);
    }
    if let Some(x) = s.chi_prime_over_chi {
        params.chi_prime = x * chi;
    }
    if let Some(x) = s.anharmonicity_over_chi {
        params.anharmonicity = x * chi;
    }
    if let Some(n) = s.n_transmon {
        params.n_transmon = n;
    }
    if experiment == Experiment::CzGate {
        params.xi = 2.0 * PI * xi_mhz * 1e6;
    }
    params.validate()?;
    params.check_amplitude(peak_amplitude)?;

    let dt_s = cfg.dt.map(|x| positive("dt", x).map(|x| x * PI / chi)).transpose()?;

    Ok(Resolved {
        experiment,
        output_dir: cfg.output_dir.clone(),
        mode: cfg.mode.unwrap_or_default(),
        chi_mhz,
        kappa_over_chi,
        gamma_over_chi: params.gamma_rate() / chi,
        kerr_over_chi,
        n_fock,
        n_transmon: params.n_transmon,
        dt_s,
        pulse,
        n_omega: p.n_omega,
        alpha,
        theta,
        beta,
        xi_mhz,
        direction: cfg.sequence.direction.unwrap_or(SwitchDirection::ComputationalToMemory),
        input: cfg.sequence.input.unwrap_or(d.input),
        alphas,
        ks,
        n_omegas,
        thetas,
        kerrs_over_chi,
        n_theta,
        n_phi,
        peak_amplitude,
        min_n_fock,
        params,
    })
}
