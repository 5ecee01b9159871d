//! Benchmark result records and their CSV/JSON files.
//!
//! Column order is fixed: `scenario,experiment,method,mean,std,n_episodes,
//! seed_base,wall_time`. Floats are written in shortest round-trip form, so
//! export, import and re-export reproduce the file byte for byte.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::BenchError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub scenario: String,
    pub experiment: String,
    pub method: String,
    pub mean: f64,
    /// Population standard deviation over episodes.
    pub std: f64,
    pub n_episodes: usize,
    pub seed_base: u64,
    /// Seconds; 0 unless timing was requested.
    pub wall_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(BenchError::Usage(format!("unknown format `{other}` (expected csv or json)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

impl Format {
    /// Chooses by file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

pub fn to_csv_string(records: &[ResultRecord]) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| BenchError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn to_json_string(records: &[ResultRecord]) -> Result<String, BenchError> {
    let mut s = serde_json::to_string_pretty(records)?;
    s.push('\n');
    Ok(s)
}

pub fn export_results(records: &[ResultRecord], path: &Path, format: Format) -> Result<(), BenchError> {
    if records.is_empty() {
        return Err(BenchError::Usage("no result records to export".into()));
    }
    for r in records {
        if !r.mean.is_finite() || !r.std.is_finite() {
            return Err(BenchError::Usage(format!(
                "non-finite result for {} {} {}",
                r.scenario, r.experiment, r.method
            )));
        }
    }
    let text = match format {
        Format::Csv => to_csv_string(records)?,
        Format::Json => to_json_string(records)?,
    };
    std::fs::write(path, text)?;
    Ok(())
}

pub fn import_results(path: &Path, format: Format) -> Result<Vec<ResultRecord>, BenchError> {
    match format {
        Format::Csv => {
            let mut r = csv::Reader::from_path(path)?;
            Ok(r.deserialize().collect::<Result<Vec<ResultRecord>, _>>()?)
        }
        Format::Json => Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?),
    }
}

/// Plain-text table: one row per experiment, one `mean ± std` column per
/// method, in first-seen order.
pub fn render_table(records: &[ResultRecord]) -> String {
    let mut rows: Vec<(String, String)> = Vec::new();
    let mut methods: Vec<String> = Vec::new();
    for r in records {
        let key = (r.scenario.clone(), r.experiment.clone());
        if !rows.contains(&key) {
            rows.push(key);
        }
        if !methods.contains(&r.method) {
            methods.push(r.method.clone());
        }
    }
    let mut out = format!("{:<16}", "experiment");
    for m in &methods {
        out.push_str(&format!("{:>20}", m));
    }
    out.push('\n');
    for (s, e) in &rows {
        out.push_str(&format!("{:<16}", format!("{s}-{e}")));
        for m in &methods {
            let cell = records
                .iter()
                .find(|r| &r.scenario == s && &r.experiment == e && &r.method == m)
                .map(|r| format!("{:.1} ± {:.1}", r.mean, r.std))
                .unwrap_or_else(|| "-".into());
            out.push_str(&format!("{:>20}", cell));
        }
        out.push('\n');
    }
    out
}
