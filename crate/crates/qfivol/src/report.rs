//! Report rendering: one JSON object or a flat CSV table per campaign.

use std::path::Path;

use crate::campaign::TrialReport;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::fmt::Display for ReportFormat {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        out.write_str(match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        })
    }
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::UnknownToken(other.to_string())),
        }
    }
}

pub const CSV_HEADER: &str =
    "seed_offset,f,F_det,F_oracle,cov_vol,qfi_vol,robertson_det,residual,pass";

/// 17 significant digits: enough to reproduce every f64 bit for bit.
fn float_field(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.16e}"),
        None => String::new(),
    }
}

/// Flat CSV: pinned header, one row per trial record, trailing newline.
/// Identical configs yield byte-identical output.
pub fn to_csv(report: &TrialReport) -> String {
    let mut out = String::with_capacity(64 * (report.trials.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for t in &report.trials {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            t.seed_offset,
            t.f,
            float_field(t.f_det),
            float_field(t.f_oracle),
            float_field(t.cov_vol),
            float_field(t.qfi_vol),
            float_field(t.robertson_det),
            float_field(t.residual),
            t.pass
        ));
    }
    out
}

/// One JSON object: {"config": …, "trials": […], "aggregate": …}.
pub fn to_json(report: &TrialReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)
        .map_err(|e| Error::Parameter(format!("report serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Render the report and, when a path is given, write it there. The
/// rendered text is returned either way (callers print it for stdout
/// output).
pub fn emit_report(
    report: &TrialReport,
    format: ReportFormat,
    out: Option<&Path>,
) -> Result<String> {
    let rendered = match format {
        ReportFormat::Json => to_json(report)?,
        ReportFormat::Csv => to_csv(report),
    };
    if let Some(path) = out {
        std::fs::write(path, &rendered).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(rendered)
}
