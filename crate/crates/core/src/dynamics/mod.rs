//! Time evolution under the Lindblad master equation.
//!
//! The integrator is a fixed-step classical RK4 on the full density matrix
//! (or on a ket when no collapse channel is active). A dense superoperator
//! exponential is provided as an exact oracle for small systems.

mod kernel;
mod superop;

pub use kernel::{diagonal_energies, LindbladKernel};
pub use superop::{superop_propagator, Superoperator, SUPEROP_MAX_DIM};

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{annihilation, ladder_ops, on_cavity, tensor, Operator, State, StateData, SystemParams};
use crate::sparse::{hermitize, CsrMatrix};

/// Largest tolerated |tr ρ(t) − tr ρ(0)| during an accepted run.
pub const TRACE_DRIFT_TOL: f64 = 1e-6;

/// Samples per period of the fastest rotating term in the default step.
pub const SAMPLES_PER_PERIOD: f64 = 40.0;

/// Number of retained points on the diagnostic time grid per segment.
const GRID_SAMPLES: usize = 200;

pub type Coefficient = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

#[derive(Clone, Debug)]
pub struct CollapseChannel {
    pub operator: Operator,
    pub rate: f64,
}

impl CollapseChannel {
    pub fn new(operator: Operator, rate: f64) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "collapse rate must be >= 0, got {rate}"
            )));
        }
        Ok(Self { operator, rate })
    }
}

/// A drive contributing `c(t) O + c(t)* O†` to the Hamiltonian.
#[derive(Clone)]
pub struct DriveTerm {
    pub operator: Operator,
    pub coefficient: Coefficient,
}

impl std::fmt::Debug for DriveTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DriveTerm")
            .field("operator", &self.operator.label())
            .finish()
    }
}

/// `H(t) = H_static + Σ_j (c_j(t) O_j + h.c.)`, Hermitian at every t by
/// construction when `H_static` is.
#[derive(Clone, Debug)]
pub struct TimeDependentHamiltonian {
    static_part: Operator,
    drive_terms: Vec<DriveTerm>,
}

impl TimeDependentHamiltonian {
    pub fn new(static_part: Operator) -> Self {
        Self {
            static_part,
            drive_terms: Vec::new(),
        }
    }

    pub fn with_drive(mut self, operator: Operator, coefficient: Coefficient) -> Result<Self> {
        self.add_drive(operator, coefficient)?;
        Ok(self)
    }

    pub fn add_drive(&mut self, operator: Operator, coefficient: Coefficient) -> Result<()> {
        if operator.dims() != self.static_part.dims() {
            return Err(Error::DimensionMismatch {
                expected: format!("{:?}", self.static_part.dims()),
                found: format!("{:?}", operator.dims()),
            });
        }
        self.drive_terms.push(DriveTerm { operator, coefficient });
        Ok(())
    }

    pub fn static_part(&self) -> &Operator {
        &self.static_part
    }

    pub fn drive_terms(&self) -> &[DriveTerm] {
        &self.drive_terms
    }

    pub fn dims(&self) -> &[usize] {
        self.static_part.dims()
    }

    /// The full Hamiltonian at time `t`.
    pub fn at(&self, t: f64) -> Operator {
        let mut m = self.static_part.matrix().clone();
        for d in &self.drive_terms {
            let c = (d.coefficient)(t);
            let o = d.operator.matrix();
            m = m.add(&o.scale(c)).add(&o.adjoint().scale(c.conj()));
        }
        Operator::new(m, self.static_part.dims().to_vec(), "H(t)").expect("dims checked on insertion")
    }
}

/// Timing and step bookkeeping of one integrated segment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SegmentDiagnostics {
    pub label: String,
    pub start: f64,
    pub duration: f64,
    pub steps: usize,
    pub dt: f64,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub rho_final: State,
    /// Sampled times (absolute, seconds) at which the trace was recorded.
    pub t_grid: Vec<f64>,
    pub trace_history: Vec<f64>,
    /// max_t |tr ρ(t) − tr ρ(0)|.
    pub trace_drift: f64,
    pub diagnostics: Vec<SegmentDiagnostics>,
}

impl RunResult {
    pub fn trivial(state: State) -> Self {
        let tr = state.trace().re;
        Self {
            rho_final: state,
            t_grid: vec![0.0],
            trace_history: vec![tr],
            trace_drift: 0.0,
            diagnostics: Vec::new(),
        }
    }

    pub fn total_time(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.duration).sum()
    }

    pub fn total_steps(&self) -> usize {
        self.diagnostics.iter().map(|d| d.steps).sum()
    }

    /// Appends a later run, shifting its times by the current total.
    pub fn extend(&mut self, next: RunResult) {
        let offset = self.total_time();
        let skip = usize::from(!self.t_grid.is_empty() && next.t_grid.first() == Some(&0.0));
        self.t_grid.extend(next.t_grid.iter().skip(skip).map(|t| t + offset));
        self.trace_history.extend(next.trace_history.iter().skip(skip));
        self.trace_drift = self.trace_drift.max(next.trace_drift);
        self.diagnostics.extend(next.diagnostics.into_iter().map(|mut d| {
            d.start += offset;
            d
        }));
        self.rho_final = next.rho_final;
    }

    /// JSON manifest without the state itself.
    pub fn manifest(&self) -> serde_json::Value {
        serde_json::json!({
            "total_time_s": self.total_time(),
            "total_steps": self.total_steps(),
            "trace_drift": self.trace_drift,
            "final_trace": self.rho_final.trace().re,
            "segments": self.diagnostics,
        })
    }
}

/// Fastest angular frequency of a run on the given system: the dispersive
/// spread 2χ n_fock, the drive detunings and the hopping bandwidth.
pub fn omega_max(params: &SystemParams, detunings: &[f64]) -> f64 {
    let nf = params.n_fock as f64;
    let mut w = 2.0 * params.chi * nf;
    if params.n_transmon == 3 {
        w = w.max(params.anharmonicity.abs() + 2.0 * (params.chi + params.chi_prime) * nf);
    }
    w = w.max(params.xi.abs() * nf).max(params.kerr.abs() * nf * nf);
    detunings.iter().fold(w, |acc, d| acc.max(d.abs()))
}

/// Frame in which the master equation is integrated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Picture {
    Lab,
    /// Interaction frame of a diagonal static Hamiltonian. Falls back to the
    /// lab frame when the static part has off-diagonal entries.
    #[default]
    Interaction,
}

/// Jump entries whose strength `r|L_ij|²` is below this fraction of their
/// frame frequency are not resolved by the interaction-frame step. Their
/// oscillating feed averages to O(r|L_ij|²/ω) and the trace is kept exactly
/// either way.
pub const WEAK_JUMP_RATIO: f64 = 1e-3;

/// Fastest rate of the interaction-frame generator: every drive entry
/// `(i, j)` oscillates at `Δ + E_i − E_j` for each tone `Δ`, jump entries at
/// `E_i − E_j` unless weak (see [`WEAK_JUMP_RATIO`]). The drive and decay magnitudes bound it from below.
/// `coefficient_bound` is an upper bound on |c(t)|. `None` when the static
/// part is not diagonal.
pub fn interaction_omega_max(
    h: &TimeDependentHamiltonian,
    channels: &[CollapseChannel],
    detunings: &[f64],
    coefficient_bound: f64,
) -> Option<f64> {
    let e = diagonal_energies(h.static_part().matrix())?;
    let mut w: f64 = 0.0;
    for d in h.drive_terms() {
        let mut largest: f64 = 0.0;
        for (i, j, v) in d.operator.matrix().iter() {
            let wij = e[i] - e[j];
            w = detunings.iter().fold(w, |acc, dd| acc.max((dd + wij).abs()));
            largest = largest.max(v.norm());
        }
        w = w.max(2.0 * coefficient_bound * largest);
    }
    for ch in channels.iter().filter(|c| c.rate > 0.0) {
        for (i, j, v) in ch.operator.matrix().iter() {
            let strength = ch.rate * v.norm_sqr();
            let wij = (e[i] - e[j]).abs();
            if strength >= WEAK_JUMP_RATIO * wij {
                w = w.max(wij);
            }
            w = w.max(strength);
        }
    }
    Some(w)
}

/// Default step for integrating `h` in `picture`, given the drive tones and
/// a bound on the drive coefficient.
pub fn default_step(
    picture: Picture,
    params: &SystemParams,
    h: &TimeDependentHamiltonian,
    channels: &[CollapseChannel],
    detunings: &[f64],
    coefficient_bound: f64,
) -> f64 {
    let lab = omega_max(params, detunings);
    let w = match picture {
        Picture::Lab => lab,
        Picture::Interaction => interaction_omega_max(h, channels, detunings, coefficient_bound).unwrap_or(lab),
    };
    default_dt(w)
}

/// Default step `(2π/ω_max)/40`.
pub fn default_dt(omega_max: f64) -> f64 {
    2.0 * PI / omega_max / SAMPLES_PER_PERIOD
}

/// Number of fixed steps covering `duration` with steps no longer than `dt`.
pub fn step_count(duration: f64, dt: f64) -> usize {
    if duration <= 0.0 {
        return 0;
    }
    ((duration / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// Cavity loss and Purcell-derived transmon relaxation for a cavity ⊗
/// transmon system.
pub fn standard_channels(params: &SystemParams) -> Result<Vec<CollapseChannel>> {
    let ops = ladder_ops(params.n_fock, params.n_transmon)?;
    let mut out = Vec::new();
    if params.kappa > 0.0 {
        out.push(CollapseChannel::new(ops.a, params.kappa)?);
    }
    let gamma = params.gamma_rate();
    if gamma > 0.0 {
        out.push(CollapseChannel::new(ops.sigma_minus, gamma)?);
    }
    if params.gamma_phi > 0.0 {
        let z = ops.projectors[1].add(&ops.projectors[0].scale(C64::new(-1.0, 0.0)))?;
        out.push(CollapseChannel::new(z, params.gamma_phi / 2.0)?);
    }
    Ok(out)
}

fn check_dims(expected: &[usize], found: &[usize]) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            expected: format!("{expected:?}"),
            found: format!("{found:?}"),
        });
    }
    Ok(())
}

struct Sampler {
    stride: usize,
    t_grid: Vec<f64>,
    trace: Vec<f64>,
}

impl Sampler {
    fn new(steps: usize, tr0: f64) -> Self {
        Self {
            stride: (steps / GRID_SAMPLES).max(1),
            t_grid: vec![0.0],
            trace: vec![tr0],
        }
    }

    fn record(&mut self, step: usize, steps: usize, t: f64, tr: f64) {
        if step % self.stride == 0 || step == steps {
            self.t_grid.push(t);
            self.trace.push(tr);
        }
    }
}

/// Integrates the master equation for `duration` with steps of at most `dt`.
///
/// Without active channels a ket input is propagated as a ket. Without
/// drives or channels and with a diagonal static Hamiltonian the exact phase
/// evolution is applied directly.
pub fn lindblad_evolve(
    rho0: &State,
    h: &TimeDependentHamiltonian,
    channels: &[CollapseChannel],
    duration: f64,
    dt: f64,
) -> Result<RunResult> {
    lindblad_evolve_labeled(rho0, h, channels, duration, dt, "evolve")
}

pub fn lindblad_evolve_labeled(
    rho0: &State,
    h: &TimeDependentHamiltonian,
    channels: &[CollapseChannel],
    duration: f64,
    dt: f64,
    label: &str,
) -> Result<RunResult> {
    lindblad_evolve_in(rho0, h, channels, duration, dt, label, Picture::Lab)
}

/// As [`lindblad_evolve_labeled`], integrating in the given picture. The
/// returned state is always in the lab (rotating) frame.
pub fn lindblad_evolve_in(
    rho0: &State,
    h: &TimeDependentHamiltonian,
    channels: &[CollapseChannel],
    duration: f64,
    dt: f64,
    label: &str,
    picture: Picture,
) -> Result<RunResult> {
    check_dims(h.dims(), rho0.dims())?;
    for ch in channels {
        check_dims(h.dims(), ch.operator.dims())?;
    }
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "duration must be >= 0, got {duration}"
        )));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let started = Instant::now();
    let active = channels.iter().any(|c| c.rate > 0.0);
    let steps = step_count(duration, dt);
    let dt = if steps > 0 { duration / steps as f64 } else { 0.0 };
    let dims = rho0.dims().to_vec();

    let static_diag = h.static_part().matrix().iter().all(|(i, j, _)| i == j);
    let (state, sampler, drift, steps) = if steps == 0 {
        let tr = rho0.trace().re;
        (rho0.clone(), Sampler::new(0, tr), 0.0, 0)
    } else if !active && h.drive_terms().is_empty() && static_diag {
        let s = exact_diagonal(rho0, h.static_part().matrix(), duration);
        let mut sampler = Sampler::new(1, rho0.trace().re);
        sampler.record(1, 1, duration, s.trace().re);
        (s, sampler, 0.0, 0)
    } else {
        let kernel = match picture {
            Picture::Interaction => LindbladKernel::interaction(h, channels),
            Picture::Lab => None,
        }
        .unwrap_or_else(|| LindbladKernel::new(h, channels));
        let out = match (rho0.data(), active) {
            (StateData::Ket(v), false) => {
                let (v, sampler, drift) = rk4_ket(&kernel, v.clone(), steps, dt)?;
                (State::ket_unchecked(v, dims.clone()), sampler, drift, steps)
            }
            _ => {
                let (m, sampler, drift) = rk4_density(&kernel, rho0.density_matrix(), steps, dt, 0.0)?;
                (State::density_unchecked(m, dims.clone()), sampler, drift, steps)
            }
        };
        match kernel.frame_energies() {
            Some(e) => (diagonal_phases(&out.0, e, duration), out.1, out.2, out.3),
            None => out,
        }
    };
    Ok(RunResult {
        rho_final: state,
        t_grid: sampler.t_grid,
        trace_history: sampler.trace,
        trace_drift: drift,
        diagnostics: vec![SegmentDiagnostics {
            label: label.to_string(),
            start: 0.0,
            duration,
            steps,
            dt,
            wall_time_s: started.elapsed().as_secs_f64(),
        }],
    })
}

/// Evolves an arbitrary Hermitian operator under the same linear map,
/// returning the final matrix. Trace drift is measured relative to the
/// initial trace.
pub fn evolve_hermitian_matrix(
    m0: DMatrix<C64>,
    h: &TimeDependentHamiltonian,
    channels: &[CollapseChannel],
    duration: f64,
    dt: f64,
) -> Result<(DMatrix<C64>, f64)> {
    let steps = step_count(duration, dt);
    if steps == 0 {
        return Ok((m0, 0.0));
    }
    let kernel = LindbladKernel::new(h, channels);
    let (m, _, drift) = rk4_density(&kernel, m0, steps, duration / steps as f64, 0.0)?;
    Ok((m, drift))
}

fn exact_diagonal(rho0: &State, h: &CsrMatrix, t: f64) -> State {
    let e: Vec<f64> = (0..h.nrows()).map(|i| h.get(i, i).re).collect();
    diagonal_phases(rho0, &e, t)
}

/// `e^{−iEt} ρ e^{iEt}` for diagonal energies `e`.
fn diagonal_phases(rho0: &State, e: &[f64], t: f64) -> State {
    let phase: Vec<C64> = e.iter().map(|&x| C64::from_polar(1.0, -x * t)).collect();
    match rho0.data() {
        StateData::Ket(v) => {
            let out = DVector::from_iterator(v.len(), v.iter().zip(&phase).map(|(a, p)| a * p));
            State::ket_unchecked(out, rho0.dims().to_vec())
        }
        StateData::Density(m) => {
            let n = m.nrows();
            let out = DMatrix::from_fn(n, n, |i, j| m[(i, j)] * phase[i] * phase[j].conj());
            State::density_unchecked(out, rho0.dims().to_vec())
        }
    }
}

fn axpy_into(out: &mut [C64], y: &[C64], a: C64, k: &[C64]) {
    for ((o, y), k) in out.iter_mut().zip(y).zip(k) {
        *o = y + a * k;
    }
}

fn accumulate(acc: &mut [C64], a: C64, k: &[C64]) {
    for (o, k) in acc.iter_mut().zip(k) {
        *o += a * k;
    }
}

fn trace_of(m: &[C64], n: usize) -> f64 {
    (0..n).map(|i| m[i + i * n].re).sum()
}

fn rk4_density(
    kernel: &LindbladKernel,
    m0: DMatrix<C64>,
    steps: usize,
    dt: f64,
    t0: f64,
) -> Result<(DMatrix<C64>, Sampler, f64)> {
    let n = kernel.dim();
    let mut y = m0;
    let tr0 = trace_of(y.as_slice(), n);
    let mut sampler = Sampler::new(steps, tr0);
    let len = n * n;
    let zero = C64::new(0.0, 0.0);
    let (mut k, mut acc, mut ytmp, mut tmp) = (vec![zero; len], vec![zero; len], vec![zero; len], vec![zero; len]);
    let (mut h0, mut hm, mut h1) = (kernel.new_values(), kernel.new_values(), kernel.new_values());
    let (mut j0, mut jm, mut j1) = (
        kernel.new_jump_values(),
        kernel.new_jump_values(),
        kernel.new_jump_values(),
    );
    let scale = tr0.abs().max(1.0);
    let mut drift: f64 = 0.0;
    let half = C64::from(dt / 2.0);
    kernel.hamiltonian_values(t0, &mut h0);
    kernel.jump_values(t0, &mut j0);
    for step in 0..steps {
        let t = t0 + step as f64 * dt;
        kernel.hamiltonian_values(t + dt / 2.0, &mut hm);
        kernel.hamiltonian_values(t + dt, &mut h1);
        kernel.jump_values(t + dt / 2.0, &mut jm);
        kernel.jump_values(t + dt, &mut j1);
        let ys = y.as_mut_slice();
        acc.copy_from_slice(ys);

        kernel.density_rhs(&h0, &j0, ys, &mut k, &mut tmp);
        accumulate(&mut acc, C64::from(dt / 6.0), &k);
        axpy_into(&mut ytmp, ys, half, &k);

        kernel.density_rhs(&hm, &jm, &ytmp, &mut k, &mut tmp);
        accumulate(&mut acc, C64::from(dt / 3.0), &k);
        axpy_into(&mut ytmp, ys, half, &k);

        kernel.density_rhs(&hm, &jm, &ytmp, &mut k, &mut tmp);
        accumulate(&mut acc, C64::from(dt / 3.0), &k);
        axpy_into(&mut ytmp, ys, C64::from(dt), &k);

        kernel.density_rhs(&h1, &j1, &ytmp, &mut k, &mut tmp);
        accumulate(&mut acc, C64::from(dt / 6.0), &k);

        ys.copy_from_slice(&acc);
        hermitize(ys, n);
        std::mem::swap(&mut h0, &mut h1);
        std::mem::swap(&mut j0, &mut j1);

        let tr = trace_of(ys, n);
        let d = (tr - tr0).abs() / scale;
        drift = drift.max(d);
        if !tr.is_finite() || d > TRACE_DRIFT_TOL {
            return Err(Error::TraceDriftExceeded {
                drift: d,
                tolerance: TRACE_DRIFT_TOL,
                time: t + dt,
            });
        }
        sampler.record(step + 1, steps, t + dt, tr);
    }
    Ok((y, sampler, drift))
}

fn rk4_ket(kernel: &LindbladKernel, v0: DVector<C64>, steps: usize, dt: f64) -> Result<(DVector<C64>, Sampler, f64)> {
    let n = kernel.dim();
    let mut y = v0;
    let n0 = y.norm_squared();
    let mut sampler = Sampler::new(steps, n0);
    let zero = C64::new(0.0, 0.0);
    let (mut k, mut acc, mut ytmp) = (vec![zero; n], vec![zero; n], vec![zero; n]);
    let (mut h0, mut hm, mut h1) = (kernel.new_values(), kernel.new_values(), kernel.new_values());
    let mut drift: f64 = 0.0;
    let half = C64::from(dt / 2.0);
    kernel.hamiltonian_values(0.0, &mut h0);
    for step in 0..steps {
        let t = step as f64 * dt;
        kernel.hamiltonian_values(t + dt / 2.0, &mut hm);
        kernel.hamiltonian_values(t + dt, &mut h1);
        let ys = y.as_mut_slice();
        acc.copy_from_slice(ys);

        kernel.ket_rhs(&h0, ys, &mut k);
        accumulate(&mut acc, C64::from(dt / 6.0), &k);
        axpy_into(&mut ytmp, ys, half, &k);

        kernel.ket_rhs(&hm, &ytmp, &mut k);
        accumulate(&mut acc, C64::from(dt / 3.0), &k);
        axpy_into(&mut ytmp, ys, half, &k);

        kernel.ket_rhs(&hm, &ytmp, &mut k);
        accumulate(&mut acc, C64::from(dt / 3.0), &k);
        axpy_into(&mut ytmp, ys, C64::from(dt), &k);

        kernel.ket_rhs(&h1, &ytmp, &mut k);
        accumulate(&mut acc, C64::from(dt / 6.0), &k);

        ys.copy_from_slice(&acc);
        std::mem::swap(&mut h0, &mut h1);

        let nn: f64 = ys.iter().map(|x| x.norm_sqr()).sum();
        let d = (nn - n0).abs();
        drift = drift.max(d);
        if !nn.is_finite() || d > TRACE_DRIFT_TOL {
            return Err(Error::TraceDriftExceeded {
                drift: d,
                tolerance: TRACE_DRIFT_TOL,
                time: t + dt,
            });
        }
        sampler.record(step + 1, steps, t + dt, nn);
    }
    Ok((y, sampler, drift))
}

/// A free-evolution wait realizing the conditional parity Π^e.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeWait {
    pub duration: f64,
    /// Mean photon number used for the self-Kerr correction.
    pub n_bar: f64,
}

/// Wait time π/(2(χ + K n̄)); equals π/(2χ) without self-Kerr.
pub fn free_parity_wait(params: &SystemParams, n_bar: f64) -> Result<FreeWait> {
    let rate = params.chi + params.kerr * n_bar;
    if !(rate > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "chi + K n_bar must be positive, got {rate}"
        )));
    }
    Ok(FreeWait {
        duration: PI / (2.0 * rate),
        n_bar,
    })
}

/// Hopping Hamiltonian ξ(a₁†a₂ + a₂†a₁) on two equally truncated cavities.
pub fn hopping_hamiltonian(xi: f64, n_fock: usize) -> Result<Operator> {
    let a = Operator::new(annihilation(n_fock), vec![n_fock], "a")?;
    let id = Operator::identity(vec![n_fock]);
    let a1 = tensor(&[&a, &id])?;
    let a2 = tensor(&[&id, &a])?;
    let hop = a1.adjoint().compose(&a2)?;
    Ok(hop.add(&hop.adjoint())?.scale(C64::from(xi)).with_label("H_hop"))
}

/// Photon loss on each of two cavities.
pub fn two_cavity_channels(kappa: f64, n_fock: usize) -> Result<Vec<CollapseChannel>> {
    let a = Operator::new(annihilation(n_fock), vec![n_fock], "a")?;
    let id = Operator::identity(vec![n_fock]);
    Ok(vec![
        CollapseChannel::new(tensor(&[&a, &id])?, kappa)?,
        CollapseChannel::new(tensor(&[&id, &a])?, kappa)?,
    ])
}

/// Evolution of two cavities under photon hopping with independent loss.
pub fn two_cavity_hopping_evolve(
    rho0: &State,
    xi: f64,
    kappa: f64,
    duration: f64,
    dt: Option<f64>,
) -> Result<RunResult> {
    let dims = rho0.dims();
    if dims.len() != 2 || dims[0] != dims[1] {
        return Err(Error::DimensionMismatch {
            expected: "two equally truncated cavities".into(),
            found: format!("{dims:?}"),
        });
    }
    let nf = dims[0];
    let h = TimeDependentHamiltonian::new(hopping_hamiltonian(xi, nf)?);
    let channels = two_cavity_channels(kappa, nf)?;
    let dt = dt.unwrap_or_else(|| default_dt((xi.abs() * nf as f64).max(kappa * nf as f64).max(1e-300)));
    lindblad_evolve_labeled(rho0, &h, &channels, duration, dt, "hopping")
}

/// Single-cavity loss operator embedded as `a ⊗ 1`.
pub fn cavity_loss(params: &SystemParams) -> Result<CollapseChannel> {
    let a = on_cavity(&annihilation(params.n_fock), params.n_transmon);
    CollapseChannel::new(Operator::new(a, params.dims(), "a")?, params.kappa)
}

#[cfg(test)]
mod tests;
