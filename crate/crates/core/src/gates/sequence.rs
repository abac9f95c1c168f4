use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    default_step, free_parity_wait, lindblad_evolve_in, standard_channels, two_cavity_hopping_evolve, Picture,
    RunResult, SegmentDiagnostics, TimeDependentHamiltonian,
};
use crate::error::{Error, Result};
use crate::hilbert::{build_static_hamiltonian, Operator, State, SystemParams, E, G};
use crate::pulses::{
    displacement_pulse, pulse_duration, pulse_to_hamiltonian, subset_rotation_pulse, DisplacementKind, Envelope,
    PulseRecord, PulseSpec, PulseTarget, DEFAULT_K,
};

use super::ideal::{
    ideal_conditional_displacement, ideal_conditional_rotation, ideal_displacement, ideal_parity_e, transmon_phase,
    PhotonSubset,
};
use super::kerr_corrected_displacement;
use super::logical::{Encoding, LogicalState};

/// Population below which a photon number gets no comb tone.
pub const SUPPORT_TAIL: f64 = 1e-6;

/// One operation of a sequence, before compilation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum Gate {
    Rotation {
        subset: PhotonSubset,
        theta: f64,
        phi: f64,
    },
    Displacement {
        kind: DisplacementKind,
        beta: C64,
    },
    /// Π^e; `n_bar` sets the self-Kerr wait correction.
    Parity {
        n_bar: f64,
    },
    /// Photon hopping between two cavities for `duration` seconds.
    Hopping {
        xi: f64,
        duration: f64,
    },
    Identity,
}

impl Gate {
    pub fn label(&self) -> String {
        match self {
            Gate::Rotation { subset, theta, phi } => subset.label(*theta, *phi),
            Gate::Displacement { kind, beta } => {
                let sup = match kind {
                    DisplacementKind::Unconditional => "",
                    DisplacementKind::Ground => "^g",
                    DisplacementKind::Excited => "^e",
                };
                format!("D{sup}({beta:.4})")
            }
            Gate::Parity { .. } => "Π^e".into(),
            Gate::Hopping { .. } => "hop".into(),
            Gate::Identity => "1".into(),
        }
    }

    /// The exact inverse: negated angle or amplitude, Π^e is self-inverse.
    pub fn inverse(&self) -> Gate {
        match self {
            Gate::Rotation { subset, theta, phi } => Gate::Rotation {
                subset: subset.clone(),
                theta: -theta,
                phi: *phi,
            },
            Gate::Displacement { kind, beta } => Gate::Displacement {
                kind: *kind,
                beta: -beta,
            },
            Gate::Hopping { xi, duration } => Gate::Hopping {
                xi: -xi,
                duration: *duration,
            },
            other => other.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Ideal,
    Realized,
}

/// Pulse-level choices for realized sequences. Durations are T_p = kπ/χ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseSettings {
    pub k_rotation: f64,
    pub k_displacement: f64,
    /// Conditional displacements; `None` uses the recipe default.
    pub k_conditional_displacement: Option<f64>,
    pub envelope: Envelope,
    /// Pre-rotate displacements and shorten the parity wait for self-Kerr.
    pub kerr_correction: bool,
    pub support_tail: f64,
}

impl Default for PulseSettings {
    fn default() -> Self {
        Self {
            k_rotation: DEFAULT_K,
            k_displacement: DEFAULT_K,
            k_conditional_displacement: None,
            envelope: Envelope::Square,
            kerr_correction: false,
            support_tail: SUPPORT_TAIL,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Compile {
    Ideal,
    Realized(PulseSettings),
}

impl Compile {
    pub fn mode(&self) -> Mode {
        match self {
            Compile::Ideal => Mode::Ideal,
            Compile::Realized(_) => Mode::Realized,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Action {
    Unitary(Operator),
    /// A drive; `frame_shift` is the transmon Z phase it leaves behind.
    Pulse {
        pulse: PulseSpec,
        frame_shift: f64,
    },
    Wait {
        duration: f64,
    },
    Hopping {
        xi: f64,
        duration: f64,
    },
}

#[derive(Clone, Debug)]
pub struct ScheduleItem {
    pub gate: Gate,
    pub action: Action,
}

impl ScheduleItem {
    pub fn label(&self) -> String {
        self.gate.label()
    }

    pub fn duration(&self) -> f64 {
        match &self.action {
            Action::Unitary(_) => 0.0,
            Action::Pulse { pulse, .. } => pulse.duration,
            Action::Wait { duration } | Action::Hopping { duration, .. } => *duration,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SequenceMetadata {
    pub recipe: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<String>,
    /// Input encoding of the sequence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub encoding: Option<Encoding>,
    /// Largest coherent amplitude the ideal sequence passes through.
    pub peak_amplitude: f64,
}

/// Items in execution order: `items[0]` is the rightmost factor of the
/// operator product and acts first.
#[derive(Clone, Debug)]
pub struct GateSequence {
    pub items: Vec<ScheduleItem>,
    pub mode: Mode,
    pub metadata: SequenceMetadata,
    /// The sequence equals e^{i global_phase} times the product of its items.
    pub global_phase: f64,
    pub dims: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActionRecord {
    Unitary,
    Pulse { pulse: PulseRecord, frame_shift: f64 },
    Wait { duration_s: f64 },
    Hopping { xi: f64, duration_s: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ItemRecord {
    pub label: String,
    #[serde(flatten)]
    pub gate: Gate,
    pub action: ActionRecord,
}

/// Serializable form of a sequence.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SequenceRecord {
    pub metadata: SequenceMetadata,
    pub mode: Mode,
    pub execution_order: String,
    pub global_phase: f64,
    pub total_duration_s: f64,
    pub items: Vec<ItemRecord>,
}

impl GateSequence {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Summed item durations (zero in ideal mode).
    pub fn duration(&self) -> f64 {
        self.items.iter().map(ScheduleItem::duration).sum()
    }

    pub fn labels(&self) -> Vec<String> {
        self.items.iter().map(ScheduleItem::label).collect()
    }

    /// Product of the ideal items, including the global phase.
    pub fn unitary(&self) -> Result<Operator> {
        if self.mode != Mode::Ideal {
            return Err(Error::InvalidParameter(
                "only ideal sequences have a closed-form unitary".into(),
            ));
        }
        let mut u = Operator::identity(self.dims.clone());
        for item in &self.items {
            match &item.action {
                Action::Unitary(op) => u = op.compose(&u)?,
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "item {} has no closed-form unitary",
                        item.label()
                    )))
                }
            }
        }
        Ok(u.scale(C64::from_polar(1.0, self.global_phase)))
    }

    pub fn record(&self, chi: f64) -> SequenceRecord {
        SequenceRecord {
            metadata: self.metadata.clone(),
            mode: self.mode,
            execution_order: "right_to_left".into(),
            global_phase: self.global_phase,
            total_duration_s: self.duration(),
            items: self
                .items
                .iter()
                .map(|it| ItemRecord {
                    label: it.label(),
                    gate: it.gate.clone(),
                    action: match &it.action {
                        Action::Unitary(_) => ActionRecord::Unitary,
                        Action::Pulse { pulse, frame_shift } => ActionRecord::Pulse {
                            pulse: pulse.record(chi),
                            frame_shift: *frame_shift,
                        },
                        Action::Wait { duration } => ActionRecord::Wait { duration_s: *duration },
                        Action::Hopping { xi, duration } => ActionRecord::Hopping {
                            xi: *xi,
                            duration_s: *duration,
                        },
                    },
                })
                .collect(),
        }
    }
}

/// Abstract gates plus what compilation needs to know about the inputs.
pub(crate) struct Plan {
    pub gates: Vec<Gate>,
    pub metadata: SequenceMetadata,
    pub global_phase: f64,
    /// Conditional-displacement k when the settings leave it open.
    pub k_conditional: f64,
}

/// Compiles a single-cavity plan. Realized comb rotations address exactly
/// the photon numbers populated (above `support_tail`) by the ideal
/// evolution of the logical basis states at that point.
pub(crate) fn compile(plan: Plan, params: &SystemParams, how: &Compile) -> Result<GateSequence> {
    if plan.gates.is_empty() {
        return Err(Error::InvalidParameter(
            "a gate sequence needs at least one item".into(),
        ));
    }
    params.validate()?;
    let (nf, nt) = (params.n_fock, params.n_transmon);
    let ideal: Vec<Operator> = plan
        .gates
        .iter()
        .map(|g| ideal_operator(g, nf, nt))
        .collect::<Result<_>>()?;
    let items = match how {
        Compile::Ideal => plan
            .gates
            .into_iter()
            .zip(ideal)
            .map(|(gate, op)| ScheduleItem {
                gate,
                action: Action::Unitary(op),
            })
            .collect(),
        Compile::Realized(settings) => {
            let mut states = support_inputs(&plan.metadata, params)?;
            let mut items = Vec::with_capacity(plan.gates.len());
            for (gate, op) in plan.gates.into_iter().zip(ideal) {
                let action = realize(&gate, &states, params, settings, plan.k_conditional)?;
                for s in &mut states {
                    *s = op.apply_ket(s);
                }
                items.push(ScheduleItem { gate, action });
            }
            items
        }
    };
    Ok(GateSequence {
        items,
        mode: how.mode(),
        metadata: plan.metadata,
        global_phase: plan.global_phase,
        dims: params.dims(),
    })
}

pub fn ideal_operator(gate: &Gate, n_fock: usize, n_transmon: usize) -> Result<Operator> {
    match gate {
        Gate::Rotation { subset, theta, phi } => ideal_conditional_rotation(subset, *theta, *phi, n_fock, n_transmon),
        Gate::Displacement { kind, beta } => match kind {
            DisplacementKind::Unconditional => ideal_displacement(*beta, n_fock, n_transmon),
            DisplacementKind::Ground => ideal_conditional_displacement(*beta, G, n_fock, n_transmon),
            DisplacementKind::Excited => ideal_conditional_displacement(*beta, E, n_fock, n_transmon),
        },
        Gate::Parity { .. } => ideal_parity_e(n_fock, n_transmon),
        Gate::Identity => Ok(Operator::identity(vec![n_fock, n_transmon])),
        Gate::Hopping { .. } => Err(Error::InvalidParameter(
            "hopping acts on two cavities and has no single-cavity operator".into(),
        )),
    }
}

fn support_inputs(meta: &SequenceMetadata, params: &SystemParams) -> Result<Vec<DVector<C64>>> {
    let (Some(alpha), Some(encoding)) = (meta.alpha, meta.encoding) else {
        return Ok(Vec::new());
    };
    [LogicalState::zero(alpha, encoding), LogicalState::one(alpha, encoding)]
        .iter()
        .map(|s| Ok(s.physical(params)?.as_ket().cloned().expect("physical states are kets")))
        .collect()
}

/// Photon numbers whose population exceeds `tail` in any of `states`.
fn photon_support(states: &[DVector<C64>], n_fock: usize, tail: f64) -> Vec<usize> {
    (0..n_fock)
        .filter(|&n| {
            states.iter().any(|v| {
                let p: f64 = (0..v.len() / n_fock).map(|j| v[n + n_fock * j].norm_sqr()).sum();
                p > tail
            })
        })
        .collect()
}

fn realize(
    gate: &Gate,
    states: &[DVector<C64>],
    params: &SystemParams,
    settings: &PulseSettings,
    k_conditional: f64,
) -> Result<Action> {
    let nf = params.n_fock;
    Ok(match gate {
        Gate::Rotation { subset, theta, phi } => {
            let numbers: Vec<usize> = match subset {
                PhotonSubset::Number(_) | PhotonSubset::Set(_) => subset.members(nf),
                PhotonSubset::All | PhotonSubset::Odd if states.is_empty() => subset.members(nf),
                _ => photon_support(states, nf, settings.support_tail)
                    .into_iter()
                    .filter(|&n| subset.contains(n))
                    .collect(),
            };
            let pulse = if numbers.is_empty() {
                PulseSpec::new(
                    PulseTarget::Qubit,
                    settings.envelope,
                    pulse_duration(settings.k_rotation, params.chi),
                    Vec::new(),
                    gate.label(),
                )?
            } else {
                let mut p =
                    subset_rotation_pulse(&numbers, *theta, *phi, params, settings.k_rotation, settings.envelope)?;
                p.label = gate.label();
                p
            };
            Action::Pulse {
                pulse,
                frame_shift: 0.0,
            }
        }
        Gate::Displacement { kind, beta } => {
            let k = match kind {
                DisplacementKind::Unconditional => settings.k_displacement,
                _ => settings.k_conditional_displacement.unwrap_or(k_conditional),
            };
            let target = if settings.kerr_correction {
                kerr_corrected_displacement(*beta, params, pulse_duration(k, params.chi)).target
            } else {
                *beta
            };
            let cal = displacement_pulse(*kind, target, params, k, settings.envelope)?;
            let mut pulse = cal.pulse.clone();
            pulse.label = gate.label();
            Action::Pulse {
                pulse,
                frame_shift: cal.frame_shift(),
            }
        }
        Gate::Parity { n_bar } => {
            let n = if settings.kerr_correction { *n_bar } else { 0.0 };
            Action::Wait {
                duration: free_parity_wait(params, n)?.duration,
            }
        }
        Gate::Identity => Action::Unitary(Operator::identity(params.dims())),
        Gate::Hopping { xi, duration } => Action::Hopping {
            xi: *xi,
            duration: *duration,
        },
    })
}

/// State after one item of a sequence.
#[derive(Clone, Debug)]
pub struct Intermediate {
    pub label: String,
    /// Elapsed time at the end of the item, seconds.
    pub time: f64,
    pub state: State,
}

#[derive(Clone, Debug, Default)]
pub struct ApplyOptions {
    pub keep_intermediates: bool,
    /// Overrides the default step of every segment.
    pub dt: Option<f64>,
    pub picture: Picture,
}

#[derive(Clone, Debug)]
pub struct SequenceRun {
    pub result: RunResult,
    pub intermediates: Vec<Intermediate>,
    /// Transmon Z frame removed at the end of a realized run.
    pub frame: f64,
}

/// Runs `seq` on `rho0`. Ideal items act as exact conjugations; realized
/// items are integrated with the loss channels of `params`. Relative block
/// phases left by displacement pulses are carried as a transmon Z frame:
/// later qubit pulses are phase shifted to match it and the remaining frame
/// is undone exactly at the end.
pub fn apply_sequence(
    seq: &GateSequence,
    rho0: &State,
    params: &SystemParams,
    opts: &ApplyOptions,
) -> Result<SequenceRun> {
    if seq.items.is_empty() {
        return Err(Error::InvalidParameter(
            "a gate sequence needs at least one item".into(),
        ));
    }
    if rho0.dims() != seq.dims.as_slice() {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", seq.dims),
            found: format!("{:?}", rho0.dims()),
        });
    }
    let single_cavity = seq.dims.len() == 2 && seq.dims == params.dims();
    let channels = if seq.mode == Mode::Realized && single_cavity {
        standard_channels(params)?
    } else {
        Vec::new()
    };
    let static_h = if single_cavity {
        Some(build_static_hamiltonian(params)?)
    } else {
        None
    };

    let mut run = RunResult::trivial(rho0.clone());
    let mut intermediates = Vec::new();
    let mut frame = 0.0;
    for item in &seq.items {
        let label = item.label();
        let state = &run.rho_final;
        let step = match &item.action {
            Action::Unitary(op) => {
                let started = Instant::now();
                let out = op.apply(state)?;
                let mut r = RunResult::trivial(out);
                r.diagnostics.push(SegmentDiagnostics {
                    label: label.clone(),
                    start: 0.0,
                    duration: 0.0,
                    steps: 0,
                    dt: 0.0,
                    wall_time_s: started.elapsed().as_secs_f64(),
                });
                r
            }
            Action::Pulse { pulse, frame_shift } => {
                let shifted;
                let p = if pulse.target == PulseTarget::Qubit && frame != 0.0 {
                    shifted = pulse.phase_shifted(-frame);
                    &shifted
                } else {
                    pulse
                };
                let h = pulse_to_hamiltonian(p, params)?;
                let dt = opts.dt.unwrap_or_else(|| {
                    default_step(
                        opts.picture,
                        params,
                        &h,
                        &channels,
                        &p.detunings(),
                        p.coefficient_bound(),
                    )
                });
                let r = lindblad_evolve_in(state, &h, &channels, p.duration, dt, &label, opts.picture)?;
                frame += frame_shift;
                r
            }
            Action::Wait { duration } => {
                let h = TimeDependentHamiltonian::new(
                    static_h
                        .clone()
                        .ok_or_else(|| Error::InvalidParameter("wait needs a cavity-transmon system".into()))?,
                );
                let dt = opts
                    .dt
                    .unwrap_or_else(|| default_step(opts.picture, params, &h, &channels, &[], 0.0));
                lindblad_evolve_in(state, &h, &channels, *duration, dt, &label, opts.picture)?
            }
            Action::Hopping { xi, duration } => {
                let kappa = if seq.mode == Mode::Realized { params.kappa } else { 0.0 };
                let mut r = two_cavity_hopping_evolve(state, *xi, kappa, *duration, opts.dt)?;
                for d in &mut r.diagnostics {
                    d.label = label.clone();
                }
                r
            }
        };
        run.extend(step);
        if opts.keep_intermediates {
            intermediates.push(Intermediate {
                label,
                time: run.total_time(),
                state: run.rho_final.clone(),
            });
        }
    }
    if frame != 0.0 {
        let z = transmon_phase(-frame, params.n_fock, params.n_transmon)?;
        run.rho_final = z.apply(&run.rho_final)?;
        if let Some(last) = intermediates.last_mut() {
            last.state = run.rho_final.clone();
        }
    }
    Ok(SequenceRun {
        result: run,
        intermediates,
        frame: frame.rem_euclid(2.0 * PI),
    })
}
