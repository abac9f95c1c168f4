//! Wigner functions, logical fidelities, Bloch-sphere sweeps and the
//! parity-entangler figure of merit.

mod fidelity;
mod wigner;

pub use fidelity::*;
pub use wigner::*;

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{default_dt, lindblad_evolve_labeled, omega_max, standard_channels};
use crate::error::Result;
use crate::gates::{ideal_conditional_rotation, PhotonSubset};
use crate::hilbert::{coherent_amplitudes, State, SystemParams};
use crate::pulses::{parity_pi_pulse, pulse_to_hamiltonian, Envelope};

/// exp[−n̄κkπ/(2χ)]: the loss-limited ceiling of the parity entangler.
pub fn entangler_envelope(alpha: f64, k: f64, params: &SystemParams) -> f64 {
    (-alpha * alpha * params.kappa * k * PI / (2.0 * params.chi)).exp()
}

/// ceil(3√n̄) comb tones.
pub fn default_n_omega(alpha: f64) -> usize {
    (3.0 * alpha.abs()).ceil().max(1.0) as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglerPoint {
    pub alpha: f64,
    pub k: f64,
    pub n_omega: usize,
    pub envelope: Envelope,
    pub fidelity: f64,
    pub envelope_bound: f64,
    pub trace_drift: f64,
    /// Pulse length in seconds.
    pub duration: f64,
    pub dt: f64,
    pub steps: usize,
}

/// Realized parity π pulse on |α⟩⊗|g⟩ with the loss of `params`, scored
/// against the ideal odd-photon rotation Y^{odd}_π over all photon numbers.
pub fn parity_entangler_fidelity(
    alpha: f64,
    n_omega: usize,
    k: f64,
    envelope: Envelope,
    params: &SystemParams,
    dt: Option<f64>,
) -> Result<EntanglerPoint> {
    params.check_amplitude(alpha)?;
    let nf = params.n_fock;
    let mut v = nalgebra::DVector::zeros(params.dim());
    v.rows_mut(0, nf).copy_from(&coherent_amplitudes(C64::from(alpha), nf));
    let psi = State::ket_normalized(v, params.dims())?;
    let ideal = ideal_conditional_rotation(&PhotonSubset::Odd, PI, PI / 2.0, nf, params.n_transmon)?;
    let target = ideal.apply_ket(psi.as_ket().expect("constructed as a ket"));

    let pulse = parity_pi_pulse(C64::from(alpha), n_omega, k, params, envelope)?;
    let h = pulse_to_hamiltonian(&pulse, params)?;
    let dt = dt.unwrap_or_else(|| default_dt(omega_max(params, &pulse.detunings())));
    let run = lindblad_evolve_labeled(&psi, &h, &standard_channels(params)?, pulse.duration, dt, &pulse.label)?;
    Ok(EntanglerPoint {
        alpha,
        k,
        n_omega,
        envelope,
        fidelity: run.rho_final.overlap_with(&target),
        envelope_bound: entangler_envelope(alpha, k, params),
        trace_drift: run.trace_drift,
        duration: pulse.duration,
        dt: run.diagnostics[0].dt,
        steps: run.total_steps(),
    })
}

#[cfg(test)]
mod tests;
