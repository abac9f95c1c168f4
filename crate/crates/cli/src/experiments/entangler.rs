use catqubit::analysis::{default_n_omega, parity_entangler_fidelity, EntanglerPoint};
use catqubit::pulses::Envelope;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Resolved;
use crate::error::CliResult;
use crate::output::Outputs;

#[derive(Serialize)]
struct Row {
    alpha: f64,
    k: f64,
    n_omega: usize,
    envelope: Envelope,
    fidelity: f64,
    envelope_bound: f64,
    trace_drift: f64,
    duration_s: f64,
    dt_s: f64,
    steps: usize,
}

impl From<EntanglerPoint> for Row {
    fn from(p: EntanglerPoint) -> Self {
        Self {
            alpha: p.alpha,
            k: p.k,
            n_omega: p.n_omega,
            envelope: p.envelope,
            fidelity: p.fidelity,
            envelope_bound: p.envelope_bound,
            trace_drift: p.trace_drift,
            duration_s: p.duration,
            dt_s: p.dt,
            steps: p.steps,
        }
    }
}

#[derive(Serialize)]
struct Optimum {
    alpha: f64,
    envelope: Envelope,
    k: f64,
    fidelity: f64,
    envelope_bound: f64,
}

type Job = (f64, f64, usize, Envelope);

fn evaluate(r: &Resolved, jobs: &[Job]) -> CliResult<Vec<Row>> {
    let points: CliResult<Vec<EntanglerPoint>> = jobs
        .par_iter()
        .map(|&(alpha, k, n_omega, envelope)| {
            log::info!("entangler alpha = {alpha}, k = {k}, n_omega = {n_omega}, {envelope:?}");
            Ok(parity_entangler_fidelity(
                alpha, n_omega, k, envelope, &r.params, r.dt_s,
            )?)
        })
        .collect();
    Ok(points?.into_iter().map(Row::from).collect())
}

fn optima(rows: &[Row]) -> Vec<Optimum> {
    let mut out: Vec<Optimum> = Vec::new();
    for row in rows {
        match out
            .iter_mut()
            .find(|o| o.alpha == row.alpha && o.envelope == row.envelope)
        {
            Some(o) if row.fidelity <= o.fidelity => {}
            Some(o) => {
                o.k = row.k;
                o.fidelity = row.fidelity;
                o.envelope_bound = row.envelope_bound;
            }
            None => out.push(Optimum {
                alpha: row.alpha,
                envelope: row.envelope,
                k: row.k,
                fidelity: row.fidelity,
                envelope_bound: row.envelope_bound,
            }),
        }
    }
    out
}

fn n_omega_for(r: &Resolved, alpha: f64) -> usize {
    r.n_omega.unwrap_or_else(|| default_n_omega(alpha))
}

pub fn parity_pulse_sweep(r: &Resolved) -> CliResult<Outputs> {
    let jobs: Vec<Job> = r
        .alphas
        .iter()
        .flat_map(|&a| r.ks.iter().map(move |&k| (a, k)))
        .map(|(a, k)| (a, k, n_omega_for(r, a), r.pulse.envelope))
        .collect();
    let rows = evaluate(r, &jobs)?;
    let mut out = Outputs::default();
    out.record("optima", &optima(&rows))?;
    out.csv("fidelity_vs_k.csv", &rows)?;
    Ok(out)
}

pub fn parity_pulse_saturation(r: &Resolved) -> CliResult<Outputs> {
    let jobs: Vec<Job> = r
        .n_omegas
        .iter()
        .map(|&n| (r.alpha, r.pulse.k_rotation, n, r.pulse.envelope))
        .collect();
    let rows = evaluate(r, &jobs)?;
    let mut out = Outputs::default();
    out.record("default_n_omega", &default_n_omega(r.alpha))?;
    out.csv("fidelity_vs_n_omega.csv", &rows)?;
    Ok(out)
}

pub fn gaussian_vs_square(r: &Resolved) -> CliResult<Outputs> {
    let n = n_omega_for(r, r.alpha);
    let jobs: Vec<Job> = [Envelope::Square, Envelope::Gaussian]
        .into_iter()
        .flat_map(|env| r.ks.iter().map(move |&k| (r.alpha, k, n, env)))
        .collect();
    let rows = evaluate(r, &jobs)?;
    let mut out = Outputs::default();
    out.record("optima", &optima(&rows))?;
    out.csv("fidelity_vs_k.csv", &rows)?;
    Ok(out)
}
