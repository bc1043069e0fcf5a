//! Field exchange logs: one exchanges-before-failure count per line.

use std::fmt;
use std::path::Path;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq)]
pub enum IngestError {
    Io { path: String, message: String },
    BadValue { line: usize, text: String, reason: &'static str },
    Empty,
}

impl fmt::Display for IngestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IngestError::Io { path, message } => write!(f, "cannot read {path}: {message}"),
            IngestError::BadValue { line, text, reason } => write!(f, "line {line}: `{text}` {reason}"),
            IngestError::Empty => f.write_str("exchange log holds no samples"),
        }
    }
}

impl std::error::Error for IngestError {}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogStats {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeLog {
    pub samples: Vec<f64>,
    pub stats: LogStats,
}

/// Parses a log held in memory. The first field of each nonblank line is
/// read; a non-numeric first line is taken as a header.
pub fn parse_exchange_log(text: &str) -> Result<ExchangeLog, IngestError> {
    let mut samples = Vec::new();
    let mut seen_content = false;
    for (idx, raw) in text.lines().enumerate() {
        let field = raw.split(',').next().unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        let first = !seen_content;
        seen_content = true;
        match field.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => samples.push(v),
            Ok(_) => {
                return Err(IngestError::BadValue {
                    line: idx + 1,
                    text: field.to_string(),
                    reason: "is not a positive count",
                })
            }
            Err(_) if first => {}
            Err(_) => {
                return Err(IngestError::BadValue {
                    line: idx + 1,
                    text: field.to_string(),
                    reason: "is not a number",
                })
            }
        }
    }
    if samples.is_empty() {
        return Err(IngestError::Empty);
    }
    let count = samples.len();
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = samples.iter().sum::<f64>() / count as f64;
    Ok(ExchangeLog {
        samples,
        stats: LogStats { count, min, max, mean },
    })
}

pub fn ingest_exchange_log(path: impl AsRef<Path>) -> Result<ExchangeLog, IngestError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| IngestError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let log = parse_exchange_log(&text)?;
    log::info!(
        "{}: {} samples, min {}, max {}, mean {:.1}",
        path.display(),
        log.stats.count,
        log.stats.min,
        log.stats.max,
        log.stats.mean
    );
    Ok(log)
}
