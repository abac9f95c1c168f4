use catqubit::analysis::{cavity_mean_field, wigner, GridSpec, LogicalMap};
use catqubit::dynamics::{default_step, lindblad_evolve_in, standard_channels, Picture};
use catqubit::gates::{apply_sequence, hadamard_sequence, kerr_corrected_displacement, Compile, Encoding};
use catqubit::hilbert::{basis_index, G};
use catqubit::pulses::{displacement_pulse, pulse_to_hamiltonian, DisplacementKind};
use catqubit::{State, C64};
use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Resolved, RunMode};
use crate::error::CliResult;
use crate::output::{Outputs, RunSummary};

use super::{apply_options, score};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftRow {
    pub kerr_over_chi: f64,
    pub phi_k: f64,
    pub arg_mean_field: f64,
    pub arg_centroid: f64,
    pub arg_predicted: f64,
    /// arg_centroid / arg_predicted − 1.
    pub relative_error: f64,
    pub correction_valid: bool,
}

/// Drives vacuum ⊗ |g⟩ with the K = 0 calibration of D_β and compares the
/// direction of the resulting field with the first-order Kerr prediction.
pub fn kerr_drift_point(r: &Resolved, kerr_over_chi: f64) -> CliResult<(DriftRow, RunSummary, String)> {
    let p = r.with_kerr(kerr_over_chi);
    let beta = C64::from(r.beta);
    let cal = displacement_pulse(
        DisplacementKind::Ground,
        beta,
        &p,
        r.pulse.k_displacement,
        r.pulse.envelope,
    )?;
    let mut v = DVector::zeros(p.dim());
    v[basis_index(0, G, p.n_fock)] = C64::from(1.0);
    let psi = State::ket(v, p.dims())?;
    let h = pulse_to_hamiltonian(&cal.pulse, &p)?;
    let channels = standard_channels(&p)?;
    let pic = Picture::Interaction;
    let dt = r.dt_s.unwrap_or_else(|| {
        default_step(
            pic,
            &p,
            &h,
            &channels,
            &cal.pulse.detunings(),
            cal.pulse.coefficient_bound(),
        )
    });
    let label = format!("kerr_{kerr_over_chi:e}");
    let run = lindblad_evolve_in(&psi, &h, &channels, cal.pulse.duration, dt, &label, pic)?;
    let grid = wigner(&run.rho_final, &GridSpec::default_for(r.beta))?;
    let kc = kerr_corrected_displacement(beta, &p, cal.pulse.duration);
    let (arg_centroid, arg_predicted) = (grid.centroid().arg(), kc.predicted.arg());
    let row = DriftRow {
        kerr_over_chi,
        phi_k: kc.phi_k,
        arg_mean_field: cavity_mean_field(&run.rho_final)?.arg(),
        arg_centroid,
        arg_predicted,
        relative_error: arg_centroid / arg_predicted - 1.0,
        correction_valid: kc.valid,
    };
    Ok((row, RunSummary::new(label, &run), grid.to_csv()))
}

pub fn kerr_displacement(r: &Resolved) -> CliResult<Outputs> {
    let points: CliResult<Vec<_>> = r.kerrs_over_chi.par_iter().map(|&k| kerr_drift_point(r, k)).collect();
    let mut out = Outputs::default();
    let mut rows = Vec::new();
    for (i, (row, run, csv)) in points?.into_iter().enumerate() {
        out.file(format!("wigner_{:02}.csv", i + 1), csv);
        out.runs.push(run);
        rows.push(row);
    }
    out.record("drift", &rows)?;
    out.csv("kerr_drift.csv", &rows)?;
    Ok(out)
}

/// Hadamard with self-Kerr: the configured correction setting, its
/// opposite, and the same sequence without Kerr.
pub fn kerr_hadamard(r: &Resolved) -> CliResult<Outputs> {
    let initial = r.input.logical(r.alpha, Encoding::Computational);
    let variants = [
        ("kerr_corrected", r.kerr_over_chi, true),
        ("kerr_uncorrected", r.kerr_over_chi, false),
        ("no_kerr", 0.0, false),
    ];
    let scored: CliResult<Vec<_>> = variants
        .par_iter()
        .map(|&(label, kerr, corr)| {
            let p = r.with_kerr(kerr);
            let how = match r.mode {
                RunMode::Ideal => Compile::Ideal,
                RunMode::Realized => Compile::Realized(catqubit::gates::PulseSettings {
                    kerr_correction: corr,
                    ..r.pulse.clone()
                }),
            };
            let seq = hadamard_sequence(r.alpha, &p, &how)?;
            log::info!("{label}: K/chi = {kerr:e}");
            let run = apply_sequence(&seq, &initial.physical(&p)?, &p, &apply_options(r, false))?;
            let rho = &run.result.rho_final;
            Ok((
                score(label, rho, &initial, &LogicalMap::hadamard())?,
                RunSummary::new(label, &run.result),
                wigner(rho, &GridSpec::default_for(r.alpha))?.to_csv(),
            ))
        })
        .collect();
    let mut out = Outputs::default();
    let mut records = Vec::new();
    for (f, run, csv) in scored? {
        out.file(format!("wigner_{}.csv", f.label), csv);
        out.runs.push(run);
        records.push(f);
    }
    out.record("fidelities", &records)?;
    out.json("fidelity.json", &records)?;
    Ok(out)
}
