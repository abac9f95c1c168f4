use catqubit::analysis::{cz_fidelity_matrix, cz_input, CzFidelityMatrix};
use catqubit::gates::{apply_sequence, cz_fidelity_floor, cz_gate, Compile};
use catqubit::{State, SystemParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Resolved, RunMode};
use crate::error::CliResult;
use crate::output::{Outputs, RunSummary};

use super::apply_options;

#[derive(Serialize)]
struct Row {
    alpha: f64,
    lossy: bool,
    input: usize,
    target: usize,
    fidelity: f64,
}

#[derive(Serialize)]
struct Summary {
    alpha: f64,
    lossy: bool,
    diagonal: [f64; 4],
    floor: f64,
}

/// Runs the hopping gate on the four product inputs and scores every output
/// against every target.
pub fn cz_matrix(
    r: &Resolved,
    alpha: f64,
    params: &SystemParams,
    lossy: bool,
) -> CliResult<(CzFidelityMatrix, Vec<RunSummary>)> {
    let how = if lossy {
        Compile::Realized(r.pulse.clone())
    } else {
        Compile::Ideal
    };
    let seq = cz_gate(alpha, r.xi(), params, &how)?;
    let runs: CliResult<Vec<(State, RunSummary)>> = (0..4)
        .into_par_iter()
        .map(|k| {
            let psi = cz_input(k / 2, k % 2, alpha, params.n_fock)?;
            let psi = if lossy { psi.into_density() } else { psi };
            let run = apply_sequence(&seq, &psi, params, &apply_options(r, false))?;
            let label = format!("alpha_{alpha}_{}_{k}", if lossy { "lossy" } else { "ideal" });
            let summary = RunSummary::new(label, &run.result);
            Ok((run.result.rho_final, summary))
        })
        .collect();
    let (finals, summaries): (Vec<State>, Vec<RunSummary>) = runs?.into_iter().unzip();
    let finals: [State; 4] = finals.try_into().expect("four inputs");
    Ok((cz_fidelity_matrix(&finals, alpha)?, summaries))
}

pub fn run_cz(r: &Resolved) -> CliResult<Outputs> {
    let mut modes = vec![false];
    if r.mode == RunMode::Realized && r.params.kappa > 0.0 {
        modes.push(true);
    }
    let mut out = Outputs::default();
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for &alpha in &r.alphas {
        for &lossy in &modes {
            log::info!("cz alpha = {alpha}, lossy = {lossy}");
            let (m, runs) = cz_matrix(r, alpha, &r.params, lossy)?;
            for (input, row) in m.matrix.iter().enumerate() {
                for (target, &fidelity) in row.iter().enumerate() {
                    rows.push(Row {
                        alpha,
                        lossy,
                        input,
                        target,
                        fidelity,
                    });
                }
            }
            summaries.push(Summary {
                alpha,
                lossy,
                diagonal: m.diagonal(),
                floor: cz_fidelity_floor(alpha),
            });
            out.runs.extend(runs);
        }
    }
    out.record("diagonals", &summaries)?;
    out.csv("cz_fidelity.csv", &rows)?;
    Ok(out)
}
