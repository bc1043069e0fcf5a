//! CSV output for sweeps and per-trial dumps.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::sim::{SimSummary, TrialOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub mttdl_hours: f64,
    pub mttdl_stderr: f64,
    pub mttdu_hours: f64,
    pub mttdu_stderr: f64,
    pub censored_fraction: f64,
    pub lower_bound_hours: f64,
    pub upper_bound_hours: f64,
}

impl SweepRow {
    pub fn new(axis_value: f64, summary: &SimSummary, lower_bound_hours: f64, upper_bound_hours: f64) -> Self {
        SweepRow {
            axis_value,
            mttdl_hours: summary.mttdl.mean,
            mttdl_stderr: summary.mttdl.stderr,
            mttdu_hours: summary.mttdu.mean,
            mttdu_stderr: summary.mttdu.stderr,
            censored_fraction: summary.censored_fraction,
            lower_bound_hours,
            upper_bound_hours,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: u64,
    pub ttdl_hours: f64,
    pub ttdu_hours: f64,
    pub censored: bool,
    pub exchanges: u64,
    pub carrier_failures: u64,
    pub node_failures: u64,
}

impl TrialRow {
    pub fn new(trial: u64, o: &TrialOutcome) -> Self {
        TrialRow {
            trial,
            ttdl_hours: o.time_to_data_loss.hours,
            ttdu_hours: o.time_to_first_unavailability.hours,
            censored: o.time_to_data_loss.censored,
            exchanges: o.total_exchanges,
            carrier_failures: o.carrier_failures,
            node_failures: o.node_failures,
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("cannot write {path}: {source}")]
pub struct OutputError {
    pub path: String,
    #[source]
    pub source: csv::Error,
}

fn write_rows<W: Write, T: Serialize>(writer: W, rows: &[T]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_file<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), OutputError> {
    let wrap = |source| OutputError {
        path: path.display().to_string(),
        source,
    };
    let file = std::fs::File::create(path).map_err(|e| wrap(e.into()))?;
    write_rows(std::io::BufWriter::new(file), rows).map_err(wrap)
}

pub fn write_sweep_csv<W: Write>(writer: W, rows: &[SweepRow]) -> csv::Result<()> {
    write_rows(writer, rows)
}

pub fn emit_sweep_csv(rows: &[SweepRow], path: impl AsRef<Path>) -> Result<(), OutputError> {
    write_file(path.as_ref(), rows)
}

pub fn write_trials_csv<W: Write>(writer: W, outcomes: &[TrialOutcome]) -> csv::Result<()> {
    let rows: Vec<TrialRow> = outcomes.iter().enumerate().map(|(t, o)| TrialRow::new(t as u64, o)).collect();
    write_rows(writer, &rows)
}

pub fn emit_trials_csv(outcomes: &[TrialOutcome], path: impl AsRef<Path>) -> Result<(), OutputError> {
    let rows: Vec<TrialRow> = outcomes.iter().enumerate().map(|(t, o)| TrialRow::new(t as u64, o)).collect();
    write_file(path.as_ref(), &rows)
}

pub fn read_sweep_csv(path: impl AsRef<Path>) -> csv::Result<Vec<SweepRow>> {
    csv::Reader::from_path(path)?.deserialize().collect()
}
