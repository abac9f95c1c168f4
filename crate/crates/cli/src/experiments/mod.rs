//! Experiment implementations. Each returns its files and records; writing
//! is left to the collector in [`crate::output`].

pub mod cz;
pub mod entangler;
pub mod kerr;
pub mod logical;

use catqubit::analysis::{logical_fidelity, FidelityDefinition, LogicalMap};
use catqubit::gates::{ApplyOptions, Compile, LogicalState};
use catqubit::State;
use serde::Serialize;

use crate::config::{Resolved, RunMode};
use crate::error::CliResult;

pub(crate) fn compile(r: &Resolved) -> Compile {
    match r.mode {
        RunMode::Ideal => Compile::Ideal,
        RunMode::Realized => Compile::Realized(r.pulse.clone()),
    }
}

pub(crate) fn apply_options(r: &Resolved, keep_intermediates: bool) -> ApplyOptions {
    ApplyOptions {
        keep_intermediates,
        dt: r.dt_s,
        ..Default::default()
    }
}

/// Both fidelity definitions for one logical input.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogicalFidelity {
    pub label: String,
    pub initial: LogicalState,
    pub fidelity_paper: f64,
    pub fidelity_normalized: f64,
    pub g_population: f64,
}

pub(crate) fn score(label: &str, rho: &State, initial: &LogicalState, map: &LogicalMap) -> CliResult<LogicalFidelity> {
    let paper = logical_fidelity(rho, initial, map, FidelityDefinition::Paper)?;
    let normalized = logical_fidelity(rho, initial, map, FidelityDefinition::Normalized)?;
    Ok(LogicalFidelity {
        label: label.to_string(),
        initial: *initial,
        fidelity_paper: paper.value,
        fidelity_normalized: normalized.value,
        g_population: paper.g_population,
    })
}
