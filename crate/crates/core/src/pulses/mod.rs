//! Multi-tone qubit and cavity drives in the dispersive rotating frame.
//!
//! A qubit component contributes `Ω/2 · g(t) (e^{i(Δt+δ)} σ⁻ + h.c.)`, a
//! cavity component `ε · g(t) (e^{i(Δt+μ)} a + h.c.)`, with `t` measured from
//! the start of the pulse and `g` the envelope shape. Both envelopes have
//! unit mean over `[0, T]`, so a resonant qubit component of amplitude
//! `Ω = θ/T` rotates by exactly θ.
//!
//! Qubit transitions for photon number n sit at detuning −2nχ; the cavity
//! resonances conditioned on g and e sit at 0 and −2χ.

mod calibration;

pub use calibration::{
    calibrate_displacement, clear_calibration_cache, displacement_pulse, magnus_block_phase, DisplacementCalibration,
    DisplacementKind, CALIBRATION_FIDELITY,
};

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Coefficient, TimeDependentHamiltonian};
use crate::error::{Error, Result};
use crate::hilbert::{
    annihilation, build_static_hamiltonian, on_cavity, on_transmon, transmon_lowering, Operator, SystemParams,
};

/// Gaussian width in units of 1/T.
pub const GAUSSIAN_SIGMA_T: f64 = 6.0;

/// Default pulse length T_p in units of π/χ for unconditional operations.
pub const DEFAULT_K: f64 = 10.0;

/// Poisson mass left outside a comb's photon window.
pub const WINDOW_TAIL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseTarget {
    Qubit,
    Cavity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Envelope {
    Square,
    Gaussian,
}

impl Envelope {
    /// Mean of the unnormalized Gaussian over its window, `√(2π) erf(3/√2) / 6`.
    fn gaussian_mean() -> f64 {
        let half = GAUSSIAN_SIGMA_T / 2.0;
        (2.0 * PI).sqrt() * libm::erf(half / 2f64.sqrt()) / GAUSSIAN_SIGMA_T
    }

    /// Unit-mean envelope shape on `[0, duration]`, zero outside.
    pub fn shape(self, t: f64, duration: f64) -> f64 {
        let slack = 1e-12 * duration;
        if t < -slack || t > duration + slack {
            return 0.0;
        }
        match self {
            Envelope::Square => 1.0,
            Envelope::Gaussian => {
                let sigma = GAUSSIAN_SIGMA_T / duration;
                let x = sigma * (t - duration / 2.0);
                (-x * x / 2.0).exp() / Self::gaussian_mean()
            }
        }
    }

    /// `∫_0^T g(t) e^{iωt} dt`.
    pub fn fourier(self, omega: f64, duration: f64) -> C64 {
        match self {
            Envelope::Square => {
                if omega == 0.0 {
                    C64::from(duration)
                } else {
                    (C64::new(0.0, omega * duration).exp() - 1.0) / C64::new(0.0, omega)
                }
            }
            Envelope::Gaussian => {
                let cycles = (omega.abs() * duration / (2.0 * PI)).ceil() as usize;
                let n = 2 * (512 + 32 * cycles);
                let h = duration / n as f64;
                let f = |t: f64| C64::from_polar(self.shape(t, duration), omega * t);
                let mut s = f(0.0) + f(duration);
                for i in 1..n {
                    s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
                }
                s * (h / 3.0)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseComponent {
    /// Detuning from the bare transition in rad/s.
    pub detuning: f64,
    /// Ω (qubit) or ε (cavity) in rad/s.
    pub amplitude: f64,
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub target: PulseTarget,
    pub envelope: Envelope,
    /// T_p in seconds.
    pub duration: f64,
    pub components: Vec<PulseComponent>,
    pub label: String,
}

/// Dimensionless record of a pulse in units of χ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseRecord {
    pub label: String,
    pub target: PulseTarget,
    pub envelope: Envelope,
    pub duration_s: f64,
    pub duration_over_pi_per_chi: f64,
    pub gaussian_sigma: Option<f64>,
    /// `(detuning_over_chi, amplitude_over_chi, phase_rad)`.
    pub components: Vec<(f64, f64, f64)>,
}

impl PulseSpec {
    pub fn new(
        target: PulseTarget,
        envelope: Envelope,
        duration: f64,
        components: Vec<PulseComponent>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "pulse duration must be positive, got {duration}"
            )));
        }
        if let Some(c) = components
            .iter()
            .find(|c| !(c.amplitude >= 0.0) || !c.detuning.is_finite())
        {
            return Err(Error::InvalidParameter(format!("invalid pulse component {c:?}")));
        }
        Ok(Self {
            target,
            envelope,
            duration,
            components,
            label: label.into(),
        })
    }

    pub fn gaussian_sigma(&self) -> Option<f64> {
        match self.envelope {
            Envelope::Gaussian => Some(GAUSSIAN_SIGMA_T / self.duration),
            Envelope::Square => None,
        }
    }

    pub fn shape(&self, t: f64) -> f64 {
        self.envelope.shape(t, self.duration)
    }

    pub fn max_amplitude(&self) -> f64 {
        self.components.iter().map(|c| c.amplitude).fold(0.0, f64::max)
    }

    /// Upper bound on |c(t)| of [`Self::coefficient`].
    pub fn coefficient_bound(&self) -> f64 {
        let scale = match self.target {
            PulseTarget::Qubit => 0.5,
            PulseTarget::Cavity => 1.0,
        };
        scale * self.components.iter().map(|c| c.amplitude).sum::<f64>()
    }

    pub fn detunings(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.detuning).collect()
    }

    /// Coefficient multiplying σ⁻ (qubit) or a (cavity) at local time `t`.
    pub fn coefficient(&self) -> Coefficient {
        let scale = match self.target {
            PulseTarget::Qubit => 0.5,
            PulseTarget::Cavity => 1.0,
        };
        let tones: Vec<(C64, f64)> = self
            .components
            .iter()
            .filter(|c| c.amplitude != 0.0)
            .map(|c| (C64::from_polar(scale * c.amplitude, c.phase), c.detuning))
            .collect();
        let (envelope, duration) = (self.envelope, self.duration);
        Arc::new(move |t: f64| {
            let g = envelope.shape(t, duration);
            if g == 0.0 {
                return C64::new(0.0, 0.0);
            }
            let s: C64 = tones.iter().map(|&(z, d)| z * C64::from_polar(1.0, d * t)).sum();
            s * g
        })
    }

    /// Shifts every component phase by `dphi` (a frame change of the drive).
    pub fn phase_shifted(&self, dphi: f64) -> Self {
        let mut out = self.clone();
        for c in &mut out.components {
            c.phase += dphi;
        }
        out
    }

    pub fn record(&self, chi: f64) -> PulseRecord {
        PulseRecord {
            label: self.label.clone(),
            target: self.target,
            envelope: self.envelope,
            duration_s: self.duration,
            duration_over_pi_per_chi: self.duration * chi / PI,
            gaussian_sigma: self.gaussian_sigma(),
            components: self
                .components
                .iter()
                .map(|c| (c.detuning / chi, c.amplitude / chi, c.phase))
                .collect(),
        }
    }
}

/// Pulse length T_p = kπ/χ.
pub fn pulse_duration(k: f64, chi: f64) -> f64 {
    k * PI / chi
}

/// Qubit detuning of the transition conditioned on n photons.
pub fn qubit_resonance(n: usize, chi: f64) -> f64 {
    -2.0 * n as f64 * chi
}

fn wrap_phase(x: f64) -> f64 {
    x.rem_euclid(2.0 * PI)
}

/// Drive phase realizing exp(+iθ/2 n̂_φ·σ) with amplitude |θ|/T.
fn rotation_phase(theta: f64, phi: f64) -> f64 {
    wrap_phase(phi + PI + if theta < 0.0 { PI } else { 0.0 })
}

/// Rotation X^S_{θ,φ} = exp(iθ/2 n̂_φ·σ) on every photon number in `subset`,
/// as a comb with one tone per photon number. The pulse lasts T_p = kπ/χ,
/// so for θ = π the Rabi rate is Ω = χ/k.
pub fn subset_rotation_pulse(
    subset: &[usize],
    theta: f64,
    phi: f64,
    params: &SystemParams,
    k: f64,
    envelope: Envelope,
) -> Result<PulseSpec> {
    if subset.is_empty() {
        return Err(Error::InvalidParameter(
            "subset rotation needs at least one photon number".into(),
        ));
    }
    if !(k > 0.0) {
        return Err(Error::InvalidParameter(format!("k must be positive, got {k}")));
    }
    if envelope == Envelope::Square && (k - k.round()).abs() > 1e-12 {
        log::warn!("square comb with non-integer k = {k}: sinc zeros miss the neighbouring resonances");
    }
    let duration = pulse_duration(k, params.chi);
    let amplitude = theta.abs() / duration;
    let phase = rotation_phase(theta, phi);
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let components = sorted
        .iter()
        .map(|&n| PulseComponent {
            detuning: qubit_resonance(n, params.chi),
            amplitude,
            phase,
        })
        .collect();
    let label = format!("X^S({theta:.4},{phi:.4})");
    PulseSpec::new(PulseTarget::Qubit, envelope, duration, components, label)
}

/// The `count` odd photon numbers closest to `n_bar` (ties to the smaller).
pub fn nearest_odd(n_bar: f64, count: usize) -> Vec<usize> {
    let mut odds: Vec<usize> = (0..(n_bar.ceil() as usize + 2 * count + 2))
        .filter(|n| n % 2 == 1)
        .collect();
    odds.sort_by(|a, b| {
        let (da, db) = ((*a as f64 - n_bar).abs(), (*b as f64 - n_bar).abs());
        da.partial_cmp(&db).unwrap().then(a.cmp(b))
    });
    odds.truncate(count);
    odds.sort_unstable();
    odds
}

/// Parity-entangling rotation Y^{odd}_π over the `n_omega` odd photon numbers
/// nearest |α|².
pub fn parity_pi_pulse(
    alpha: C64,
    n_omega: usize,
    k: f64,
    params: &SystemParams,
    envelope: Envelope,
) -> Result<PulseSpec> {
    if n_omega == 0 {
        return Err(Error::InvalidParameter("N_omega must be at least 1".into()));
    }
    let subset = nearest_odd(alpha.norm_sqr(), n_omega);
    let mut p = subset_rotation_pulse(&subset, PI, PI / 2.0, params, k, envelope)?;
    p.label = format!("Y^odd_pi[N={n_omega}]");
    Ok(p)
}

/// Photon numbers `[lo, hi]` holding all but `tail` of the Poisson mass of
/// mean `n_bar` on each side.
pub fn photon_window(n_bar: f64, tail: f64) -> (usize, usize) {
    if n_bar <= 0.0 {
        return (0, 0);
    }
    let ln_p = |n: usize| -n_bar + n as f64 * n_bar.ln() - crate::hilbert::ln_factorial(n);
    let mut lo = n_bar.floor() as usize;
    let mut below: f64 = (0..lo).map(|n| ln_p(n).exp()).sum();
    while lo > 0 && below > tail {
        lo -= 1;
        below -= ln_p(lo).exp();
    }
    let hi = {
        let mut n = n_bar.ceil() as usize;
        while crate::hilbert::poisson_tail(n_bar, n + 1) > tail {
            n += 1;
        }
        n
    };
    (lo, hi)
}

/// Photon numbers addressed by an unconditional comb for a run whose
/// states are superpositions of vacuum and amplitude `alpha_context`.
pub fn unconditional_window(alpha_context: f64, tail: f64) -> Vec<usize> {
    let (_, hi) = photon_window(alpha_context * alpha_context, tail);
    (0..=hi).collect()
}

/// Unconditional rotation X_{θ,φ} as a narrow-band comb over every photon
/// number up to the window of `alpha_context`.
pub fn unconditional_rotation_pulse(
    theta: f64,
    phi: f64,
    alpha_context: f64,
    params: &SystemParams,
    k: f64,
    envelope: Envelope,
) -> Result<PulseSpec> {
    let window: Vec<usize> = unconditional_window(alpha_context, WINDOW_TAIL)
        .into_iter()
        .filter(|&n| n < params.n_fock)
        .collect();
    let mut p = subset_rotation_pulse(&window, theta, phi, params, k, envelope)?;
    p.label = format!("X({theta:.4},{phi:.4})");
    Ok(p)
}

/// Unconditional displacement D(β) as a calibrated two-tone cavity drive.
pub fn unconditional_displacement_pulse(
    beta: C64,
    params: &SystemParams,
    k: f64,
    envelope: Envelope,
) -> Result<PulseSpec> {
    Ok(
        displacement_pulse(DisplacementKind::Unconditional, beta, params, k, envelope)?
            .pulse
            .clone(),
    )
}

/// Drive operator and coefficient of a pulse on the system of `params`.
/// Qubit pulses couple through the transmon lowering operator (including
/// √2|e⟩⟨f| for three levels), cavity pulses through `a`.
pub fn pulse_drive(pulse: &PulseSpec, params: &SystemParams) -> Result<(Operator, Coefficient)> {
    let dims = params.dims();
    let op = match pulse.target {
        PulseTarget::Qubit => Operator::new(
            on_transmon(&transmon_lowering(params.n_transmon), params.n_fock),
            dims,
            "σ⁻",
        )?,
        PulseTarget::Cavity => Operator::new(on_cavity(&annihilation(params.n_fock), params.n_transmon), dims, "a")?,
    };
    Ok((op, pulse.coefficient()))
}

/// Static Hamiltonian of `params` plus the drive of `pulse`.
pub fn pulse_to_hamiltonian(pulse: &PulseSpec, params: &SystemParams) -> Result<TimeDependentHamiltonian> {
    let (op, coeff) = pulse_drive(pulse, params)?;
    TimeDependentHamiltonian::new(build_static_hamiltonian(params)?).with_drive(op, coeff)
}

/// First-order response of a pulse.
#[derive(Clone, Debug, PartialEq)]
pub struct LeakageReport {
    /// Qubit pulses: rotation amplitude |Σ_j (Ω_j/2) ∫ g e^{i(Δ_j+2nχ)t} dt|
    /// for each photon number n. Cavity pulses: displacement amplitude
    /// |Σ_j ε_j ∫ g e^{i(Δ_j−ω_r)t} dt| for each transmon level r.
    pub amplitudes: Vec<f64>,
    /// False when max Ω/χ exceeds 1/2 and the expansion is unreliable.
    pub perturbative: bool,
}

/// `∫_0^T g e^{iωt} dt`, exactly zero for a square envelope whenever ωT is a
/// nonzero multiple of 2π.
pub(crate) fn envelope_integral(envelope: Envelope, omega: f64, duration: f64) -> C64 {
    if envelope == Envelope::Square {
        let turns = omega * duration / (2.0 * PI);
        if turns.round() != 0.0 && (turns - turns.round()).abs() < 1e-9 {
            return C64::new(0.0, 0.0);
        }
    }
    envelope.fourier(omega, duration)
}

pub fn first_order_leakage(pulse: &PulseSpec, params: &SystemParams) -> LeakageReport {
    let chi = params.chi;
    let resonances: Vec<f64> = match pulse.target {
        PulseTarget::Qubit => (0..params.n_fock).map(|n| qubit_resonance(n, chi)).collect(),
        PulseTarget::Cavity => vec![0.0, -2.0 * chi],
    };
    let scale = if pulse.target == PulseTarget::Qubit { 0.5 } else { 1.0 };
    let amplitudes = resonances
        .iter()
        .map(|&w| {
            pulse
                .components
                .iter()
                .filter(|c| c.amplitude != 0.0)
                .map(|c| {
                    C64::from_polar(scale * c.amplitude, c.phase)
                        * envelope_integral(pulse.envelope, c.detuning - w, pulse.duration)
                })
                .sum::<C64>()
                .norm()
        })
        .collect();
    let peak = pulse.max_amplitude() * pulse.envelope.shape(pulse.duration / 2.0, pulse.duration);
    LeakageReport {
        amplitudes,
        perturbative: pulse.target == PulseTarget::Cavity || peak / chi <= 0.5,
    }
}

#[cfg(test)]
mod tests;
