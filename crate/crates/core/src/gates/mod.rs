//! Ideal conditional operations and the logical gate sequences built from
//! them, compiled either to exact unitaries or to pulse schedules.
//!
//! Sequences are written as operator products read right to left; the
//! `items` of a [`GateSequence`] are stored in execution order.

mod ideal;
mod logical;
mod sequence;

pub use ideal::{
    ideal_conditional_displacement, ideal_conditional_rotation, ideal_displacement, ideal_parity_e, rotation_block,
    transmon_phase, PhotonSubset,
};
pub use logical::{Encoding, LogicalState};
pub use sequence::{
    apply_sequence, ideal_operator, Action, ActionRecord, ApplyOptions, Compile, Gate, GateSequence, Intermediate,
    ItemRecord, Mode, PulseSettings, ScheduleItem, SequenceMetadata, SequenceRecord, SequenceRun, SUPPORT_TAIL,
};

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::SystemParams;
use crate::pulses::DisplacementKind;

use sequence::{compile, Plan};

/// Validity bound on (εT)²KT for the self-Kerr displacement correction.
pub const KERR_CORRECTION_LIMIT: f64 = 0.1;

fn rot(subset: PhotonSubset, theta: f64) -> Gate {
    Gate::Rotation {
        subset,
        theta,
        phi: FRAC_PI_2,
    }
}

fn disp(kind: DisplacementKind, beta: C64) -> Gate {
    Gate::Displacement { kind, beta }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn imag(x: f64) -> C64 {
    C64::new(0.0, x)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

fn computational(recipe: &str, alpha: f64, peak: f64) -> SequenceMetadata {
    SequenceMetadata {
        recipe: recipe.into(),
        alpha: Some(alpha),
        encoding: Some(Encoding::Computational),
        peak_amplitude: peak,
        ..Default::default()
    }
}

/// H_L = D_{α/2} Y^{odd}_{−π} D_{α/2} Y⁰_{−π} Π^e D^g_{−α} Y_{π/2}.
pub fn hadamard_sequence(alpha: f64, params: &SystemParams, how: &Compile) -> Result<GateSequence> {
    check_alpha(alpha)?;
    params.check_amplitude(alpha)?;
    let gates = vec![
        rot(PhotonSubset::All, FRAC_PI_2),
        disp(DisplacementKind::Ground, real(-alpha)),
        Gate::Parity { n_bar: alpha * alpha },
        rot(PhotonSubset::Number(0), -PI),
        disp(DisplacementKind::Unconditional, real(alpha / 2.0)),
        rot(PhotonSubset::Odd, -PI),
        disp(DisplacementKind::Unconditional, real(alpha / 2.0)),
    ];
    let plan = Plan {
        gates,
        metadata: computational("hadamard", alpha, alpha),
        global_phase: 0.0,
        k_conditional: how_k(how),
    };
    compile(plan, params, how)
}

/// Logical Z rotation by θ through the Berry phase 2β² of a closed
/// g-conditional displacement loop, β = √(θ/2):
/// Y⁰_{−π} D^g_β D^g_{−iβ} D^g_{−β} D^g_{iβ} Y⁰_π.
///
/// The closing vacuum rotation is Y⁰_{−π}: with Y⁰_π at both ends the
/// vacuum picks up (Y⁰_π)² = −1 and the relative phase becomes θ + π.
pub fn phase_gate_sequence(theta: f64, alpha: f64, params: &SystemParams, how: &Compile) -> Result<GateSequence> {
    check_alpha(alpha)?;
    if !(0.0..=2.0 * PI).contains(&theta) {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in [0, 2pi], got {theta}"
        )));
    }
    let beta = (theta / 2.0).sqrt();
    let g = DisplacementKind::Ground;
    let gates = vec![
        rot(PhotonSubset::Number(0), PI),
        disp(g, imag(beta)),
        disp(g, real(-beta)),
        disp(g, imag(-beta)),
        disp(g, real(beta)),
        rot(PhotonSubset::Number(0), -PI),
    ];
    let peak = alpha + std::f64::consts::SQRT_2 * beta;
    params.check_amplitude(peak)?;
    let mut metadata = computational("phase_gate", alpha, peak);
    metadata.theta = Some(theta);
    metadata.beta = Some(beta);
    let plan = Plan {
        gates,
        metadata,
        global_phase: 0.0,
        k_conditional: how_k(how),
    };
    compile(plan, params, how)
}

/// X_L = D_{α/2} Y_π Π^e Y_π D_{−α/2}, up to the global sign it carries.
pub fn not_sequence(alpha: f64, params: &SystemParams, how: &Compile) -> Result<GateSequence> {
    check_alpha(alpha)?;
    params.check_amplitude(alpha)?;
    let u = DisplacementKind::Unconditional;
    let gates = vec![
        disp(u, real(-alpha / 2.0)),
        rot(PhotonSubset::All, PI),
        Gate::Parity {
            n_bar: alpha * alpha / 4.0,
        },
        rot(PhotonSubset::All, PI),
        disp(u, real(alpha / 2.0)),
    ];
    let plan = Plan {
        gates,
        metadata: computational("not", alpha, alpha),
        global_phase: PI,
        k_conditional: how_k(how),
    };
    compile(plan, params, how)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwitchDirection {
    ComputationalToMemory,
    MemoryToComputational,
}

/// Default T_p of the conditional displacement in the encoding switch, in
/// units of π/χ.
pub const SWITCH_K_CONDITIONAL: f64 = 40.0;

/// Encoding switch |0⟩_L → |C⁺_{iα}⟩, |1⟩_L → |C⁺_α⟩:
/// D_{−α} Y⁰_π D_α D_{−iα} Y⁰_{−π} D_{iα} Π^e Y_{−π/2} D^e_{iα} Y⁰_π,
/// with D_α D_{−iα} merged into e^{iα²} D_{α−iα}. The reverse direction is
/// the exact inverse: reversed order, α → −α and every angle negated.
pub fn encoding_switch_sequence(
    alpha: f64,
    direction: SwitchDirection,
    params: &SystemParams,
    how: &Compile,
) -> Result<GateSequence> {
    check_alpha(alpha)?;
    params.check_amplitude(2.0 * alpha)?;
    let u = DisplacementKind::Unconditional;
    let forward = vec![
        rot(PhotonSubset::Number(0), PI),
        disp(DisplacementKind::Excited, imag(alpha)),
        rot(PhotonSubset::All, -FRAC_PI_2),
        Gate::Parity { n_bar: alpha * alpha },
        disp(u, imag(alpha)),
        rot(PhotonSubset::Number(0), -PI),
        disp(u, C64::new(alpha, -alpha)),
        rot(PhotonSubset::Number(0), PI),
        disp(u, real(-alpha)),
    ];
    let merge_phase = alpha * alpha;
    let (gates, global_phase, encoding, name) = match direction {
        SwitchDirection::ComputationalToMemory => (forward, merge_phase, Encoding::Computational, "comp_to_mem"),
        SwitchDirection::MemoryToComputational => (
            forward.iter().rev().map(Gate::inverse).collect(),
            -merge_phase,
            Encoding::Memory,
            "mem_to_comp",
        ),
    };
    let metadata = SequenceMetadata {
        recipe: "encoding_switch".into(),
        alpha: Some(alpha),
        direction: Some(name.into()),
        encoding: Some(encoding),
        peak_amplitude: 2.0 * alpha,
        ..Default::default()
    };
    let k_conditional = match how {
        Compile::Realized(s) => s.k_conditional_displacement.unwrap_or(SWITCH_K_CONDITIONAL),
        Compile::Ideal => SWITCH_K_CONDITIONAL,
    };
    compile(
        Plan {
            gates,
            metadata,
            global_phase,
            k_conditional,
        },
        params,
        how,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PumpDirection {
    Pump,
    Damp,
}

/// Amplitude pumping Y⁰_{−π} D^g_{±β} Y⁰_π: |α⟩ → |α ± β⟩ while the vacuum
/// is parked in e during the displacement.
pub fn pump_damp_sequence(
    beta: f64,
    direction: PumpDirection,
    alpha: f64,
    params: &SystemParams,
    how: &Compile,
) -> Result<GateSequence> {
    check_alpha(alpha)?;
    if !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be finite, got {beta}")));
    }
    let b = match direction {
        PumpDirection::Pump => beta,
        PumpDirection::Damp => -beta,
    };
    let peak = alpha.max(alpha + b);
    params.check_amplitude(peak)?;
    let gates = vec![
        rot(PhotonSubset::Number(0), PI),
        disp(DisplacementKind::Ground, real(b)),
        rot(PhotonSubset::Number(0), -PI),
    ];
    let mut metadata = computational("pump_damp", alpha, peak);
    metadata.beta = Some(b);
    compile(
        Plan {
            gates,
            metadata,
            global_phase: 0.0,
            k_conditional: how_k(how),
        },
        params,
        how,
    )
}

/// Two-cavity controlled phase: photon hopping for T = π/(2ξn̄). Requires
/// n̄ = α² > π²/4. Realized mode adds cavity loss at `params.kappa`.
pub fn cz_gate(alpha: f64, xi: f64, params: &SystemParams, how: &Compile) -> Result<GateSequence> {
    check_alpha(alpha)?;
    let n_bar = alpha * alpha;
    if n_bar <= PI * PI / 4.0 {
        return Err(Error::PhotonNumberTooSmall { n_bar });
    }
    if !(xi > 0.0) {
        return Err(Error::InvalidParameter(format!("xi must be positive, got {xi}")));
    }
    crate::hilbert::check_truncation(alpha, params.n_fock)?;
    let duration = PI / (2.0 * xi * n_bar);
    let gate = Gate::Hopping { xi, duration };
    Ok(GateSequence {
        items: vec![ScheduleItem {
            gate,
            action: Action::Hopping { xi, duration },
        }],
        mode: how.mode(),
        metadata: SequenceMetadata {
            recipe: "cz".into(),
            alpha: Some(alpha),
            xi: Some(xi),
            encoding: Some(Encoding::Computational),
            peak_amplitude: alpha,
            ..Default::default()
        },
        global_phase: 0.0,
        dims: vec![params.n_fock, params.n_fock],
    })
}

/// Worst-case coherent-overlap fidelity exp(−π²/(2n̄)) of the hopping gate.
pub fn cz_fidelity_floor(alpha: f64) -> f64 {
    (-PI * PI / (2.0 * alpha * alpha)).exp()
}

fn how_k(how: &Compile) -> f64 {
    match how {
        Compile::Realized(s) => s.k_conditional_displacement.unwrap_or(s.k_displacement),
        Compile::Ideal => crate::pulses::DEFAULT_K,
    }
}

/// Self-Kerr correction of a displacement from vacuum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KerrCorrection {
    /// Pre-rotated target β e^{−iφ_K}.
    pub target: C64,
    /// φ_K = K|β|²T/2.
    pub phi_k: f64,
    /// Uncorrected endpoint a(T) ≈ εT + iKε³T⁴/2, rotated onto β.
    pub predicted: C64,
    /// False when (εT)²KT exceeds [`KERR_CORRECTION_LIMIT`].
    pub valid: bool,
}

/// Under H_K = −K a†a†aa a resonant drive from vacuum ends at
/// a(T) ≈ εT + iKε³T⁴/2, rotated by φ_K = K n̄ T/2 with n̄ = (εT)². Aiming
/// at β e^{−iφ_K} lands the field on β.
pub fn kerr_corrected_displacement(beta: C64, params: &SystemParams, t_p: f64) -> KerrCorrection {
    let n_bar = beta.norm_sqr();
    let k = params.kerr;
    let phi_k = k * n_bar * t_p / 2.0;
    KerrCorrection {
        target: beta * C64::from_polar(1.0, -phi_k),
        phi_k,
        predicted: beta * C64::new(1.0, phi_k),
        valid: n_bar * k.abs() * t_p <= KERR_CORRECTION_LIMIT,
    }
}
