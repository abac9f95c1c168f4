//! Run outputs and the manifest collector.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use catqubit::dynamics::RunResult;
use serde::Serialize;

use crate::config::Resolved;
use crate::error::CliResult;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_FORMAT: &str = "catqubit-manifest";

/// Deterministic summary of one integrated run. Wall-clock times are left
/// out so that reruns produce identical manifests.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub label: String,
    pub total_time_s: f64,
    pub total_steps: usize,
    pub trace_drift: f64,
    pub final_trace: f64,
    pub segments: Vec<SegmentSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SegmentSummary {
    pub label: String,
    pub start_s: f64,
    pub duration_s: f64,
    pub steps: usize,
    pub dt_s: f64,
}

impl RunSummary {
    pub fn new(label: impl Into<String>, run: &RunResult) -> Self {
        Self {
            label: label.into(),
            total_time_s: run.total_time(),
            total_steps: run.total_steps(),
            trace_drift: run.trace_drift,
            final_trace: run.rho_final.trace().re,
            segments: run
                .diagnostics
                .iter()
                .map(|d| SegmentSummary {
                    label: d.label.clone(),
                    start_s: d.start,
                    duration_s: d.duration,
                    steps: d.steps,
                    dt_s: d.dt,
                })
                .collect(),
        }
    }
}

/// Files and records produced by an experiment, written by [`write_outputs`].
#[derive(Debug, Default)]
pub struct Outputs {
    /// File name (relative to the output directory) to contents.
    pub files: BTreeMap<String, String>,
    pub runs: Vec<RunSummary>,
    pub summary: serde_json::Map<String, serde_json::Value>,
}

impl Outputs {
    pub fn file(&mut self, name: impl Into<String>, contents: String) {
        self.files.insert(name.into(), contents);
    }

    pub fn record<T: Serialize>(&mut self, key: &str, value: &T) -> CliResult<()> {
        self.summary.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.file(name, text);
        Ok(())
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> CliResult<()> {
        self.file(name, to_csv(rows)?);
        Ok(())
    }
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[derive(Serialize)]
struct Manifest<'a> {
    format: &'static str,
    version: u32,
    experiment: &'a str,
    /// The configuration file exactly as given.
    config: &'a str,
    resolved: &'a Resolved,
    outputs: Vec<&'a str>,
    summary: &'a serde_json::Map<String, serde_json::Value>,
    runs: &'a [RunSummary],
}

/// Writes every output file and the manifest into `dir`, returning the
/// paths written.
pub fn write_outputs(dir: &Path, resolved: &Resolved, config_text: &str, out: &Outputs) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, contents) in &out.files {
        let path = dir.join(name);
        fs::write(&path, contents)?;
        written.push(path);
    }
    let manifest = Manifest {
        format: MANIFEST_FORMAT,
        version: 1,
        experiment: resolved.experiment.name(),
        config: config_text,
        resolved,
        outputs: out.files.keys().map(String::as_str).collect(),
        summary: &out.summary,
        runs: &out.runs,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, text)?;
    written.push(path);
    Ok(written)
}
