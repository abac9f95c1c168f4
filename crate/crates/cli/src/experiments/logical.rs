use catqubit::analysis::{bloch_grid, bloch_sweep, wigner, GridSpec, LogicalMap};
use catqubit::gates::{
    apply_sequence, encoding_switch_sequence, hadamard_sequence, not_sequence, phase_gate_sequence, Encoding,
    GateSequence, LogicalState, SwitchDirection,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{InputState, Resolved};
use crate::error::CliResult;
use crate::output::{Outputs, RunSummary};

use super::{apply_options, compile, score, LogicalFidelity};

struct Scored {
    fidelity: LogicalFidelity,
    run: RunSummary,
    wigner_csv: String,
}

fn run_and_score(
    r: &Resolved,
    seq: &GateSequence,
    label: &str,
    initial: &LogicalState,
    map: &LogicalMap,
) -> CliResult<Scored> {
    log::info!("{label}: {} items, {:.3e} s", seq.len(), seq.duration());
    let run = apply_sequence(seq, &initial.physical(&r.params)?, &r.params, &apply_options(r, false))?;
    let rho = &run.result.rho_final;
    Ok(Scored {
        fidelity: score(label, rho, initial, map)?,
        run: RunSummary::new(label, &run.result),
        wigner_csv: wigner(rho, &GridSpec::default_for(initial.alpha))?.to_csv(),
    })
}

fn collect(out: &mut Outputs, scored: Vec<Scored>, prefix: &str) -> CliResult<()> {
    let mut records = Vec::new();
    for s in scored {
        out.file(format!("{prefix}_{}.csv", s.fidelity.label), s.wigner_csv);
        out.runs.push(s.run);
        records.push(s.fidelity);
    }
    out.record("fidelities", &records)?;
    out.json("fidelity.json", &records)
}

#[derive(Serialize)]
struct WignerFile {
    file: String,
    item: String,
    time_s: f64,
}

pub fn hadamard_single(r: &Resolved) -> CliResult<Outputs> {
    let seq = hadamard_sequence(r.alpha, &r.params, &compile(r))?;
    let initial = r.input.logical(r.alpha, Encoding::Computational);
    let run = apply_sequence(&seq, &initial.physical(&r.params)?, &r.params, &apply_options(r, true))?;

    let grid = GridSpec::default_for(r.alpha);
    let mut out = Outputs::default();
    let grids: CliResult<Vec<String>> = run
        .intermediates
        .par_iter()
        .map(|s| Ok(wigner(&s.state, &grid)?.to_csv()))
        .collect();
    let mut files = Vec::new();
    for (i, (s, csv)) in run.intermediates.iter().zip(grids?).enumerate() {
        let file = format!("wigner_{:02}.csv", i + 1);
        out.file(file.clone(), csv);
        files.push(WignerFile {
            file,
            item: s.label.clone(),
            time_s: s.time,
        });
    }
    let label = r.input.name();
    let fidelity = score(label, &run.result.rho_final, &initial, &LogicalMap::hadamard())?;
    out.record("total_duration_s", &seq.duration())?;
    out.record("wigner_files", &files)?;
    out.record("fidelity", &fidelity)?;
    out.json("fidelity.json", &fidelity)?;
    out.json("sequence.json", &seq.record(r.chi()))?;
    out.runs.push(RunSummary::new(label, &run.result));
    Ok(out)
}

pub fn hadamard_bloch(r: &Resolved) -> CliResult<Outputs> {
    let seq = hadamard_sequence(r.alpha, &r.params, &compile(r))?;
    let (thetas, phis) = bloch_grid(r.n_theta, r.n_phi);
    let surface = bloch_sweep(
        &seq,
        &r.params,
        r.alpha,
        &LogicalMap::hadamard(),
        &thetas,
        &phis,
        &apply_options(r, false),
    )?;
    let mut out = Outputs::default();
    out.record("min_fidelity_paper", &surface.min_paper())?;
    out.record("total_duration_s", &seq.duration())?;
    out.file("bloch.csv", surface.to_csv());
    Ok(out)
}

#[derive(Serialize)]
struct PhaseRow {
    theta: f64,
    fidelity_paper: f64,
    fidelity_normalized: f64,
    g_population: f64,
}

pub fn phase_gate(r: &Resolved) -> CliResult<Outputs> {
    let initial = r.input.logical(r.alpha, Encoding::Computational);
    let scored: CliResult<Vec<Scored>> = r
        .thetas
        .par_iter()
        .enumerate()
        .map(|(i, &theta)| {
            let seq = phase_gate_sequence(theta, r.alpha, &r.params, &compile(r))?;
            run_and_score(r, &seq, &format!("theta_{i:02}"), &initial, &LogicalMap::phase(theta))
        })
        .collect();
    let scored = scored?;
    let rows: Vec<PhaseRow> = r
        .thetas
        .iter()
        .zip(&scored)
        .map(|(&theta, s)| PhaseRow {
            theta,
            fidelity_paper: s.fidelity.fidelity_paper,
            fidelity_normalized: s.fidelity.fidelity_normalized,
            g_population: s.fidelity.g_population,
        })
        .collect();
    let mut out = Outputs::default();
    out.csv("phase_fidelity.csv", &rows)?;
    collect(&mut out, scored, "wigner")?;
    Ok(out)
}

pub fn encoding_switch(r: &Resolved) -> CliResult<Outputs> {
    let (input, output) = match r.direction {
        SwitchDirection::ComputationalToMemory => (Encoding::Computational, Encoding::Memory),
        SwitchDirection::MemoryToComputational => (Encoding::Memory, Encoding::Computational),
    };
    let seq = encoding_switch_sequence(r.alpha, r.direction, &r.params, &compile(r))?;
    let map = LogicalMap::switch(input, output);
    let scored: CliResult<Vec<Scored>> = [InputState::Zero, InputState::One]
        .par_iter()
        .map(|s| run_and_score(r, &seq, s.name(), &s.logical(r.alpha, input), &map))
        .collect();
    let mut out = Outputs::default();
    out.record("total_duration_s", &seq.duration())?;
    out.json("sequence.json", &seq.record(r.chi()))?;
    collect(&mut out, scored?, "wigner")?;
    Ok(out)
}

pub fn not_gate(r: &Resolved) -> CliResult<Outputs> {
    let seq = not_sequence(r.alpha, &r.params, &compile(r))?;
    let scored: CliResult<Vec<Scored>> = [InputState::Zero, InputState::One]
        .par_iter()
        .map(|s| {
            run_and_score(
                r,
                &seq,
                s.name(),
                &s.logical(r.alpha, Encoding::Computational),
                &LogicalMap::not(),
            )
        })
        .collect();
    let mut out = Outputs::default();
    out.record("total_duration_s", &seq.duration())?;
    out.json("sequence.json", &seq.record(r.chi()))?;
    collect(&mut out, scored?, "wigner")?;
    Ok(out)
}
