//! Evaluation report serialization: JSON mirroring [`EvalReport`], and a
//! CSV table with one row per frame plus an aggregate row.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::EvalReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::config(format!(
                "unknown report format '{other}' (expected json or csv)"
            ))),
        }
    }
}

pub fn report_to_json(report: &EvalReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serialize");
    s.push('\n');
    s
}

pub fn report_from_json(text: &str) -> Result<EvalReport> {
    serde_json::from_str(text).map_err(|e| Error::invalid(format!("bad report JSON: {e}")))
}

/// CSV with columns `method,frame,e_a_deg,m,t_ms,pi,e_p@<phi>...`; frame
/// rows first, then one aggregate row with frame name `all`. Numbers use
/// Rust's shortest round-trip formatting, so full precision is preserved.
pub fn report_to_csv(report: &EvalReport) -> String {
    let mut out = String::new();
    out.push_str("method,frame,e_a_deg,m,t_ms,pi,");
    let phis: Vec<String> = report
        .e_p
        .iter()
        .map(|e| format!("e_p@{}", e.phi))
        .collect();
    out.push_str(&phis.join(","));
    out.push('\n');
    for f in &report.frames {
        let _ = write!(out, "{},{},{},{},{},", report.method, f.frame, f.e_a, f.m, f.t_ms);
        let _ = write!(out, "{}", f.e_a * f.t_ms);
        for e in &f.e_p {
            let _ = write!(out, ",{}", e.proportion);
        }
        out.push('\n');
    }
    let _ = write!(
        out,
        "{},all,{},{},{},{}",
        report.method, report.e_a, report.m, report.t_ms, report.pi
    );
    for e in &report.e_p {
        let _ = write!(out, ",{}", e.proportion);
    }
    out.push('\n');
    out
}

pub fn write_report(report: &EvalReport, path: &Path, format: ReportFormat) -> Result<()> {
    let text = match format {
        ReportFormat::Json => report_to_json(report),
        ReportFormat::Csv => report_to_csv(report),
    };
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Concatenate several per-method CSVs into one table (single header).
pub fn reports_to_csv(reports: &[EvalReport]) -> String {
    let mut out = String::new();
    for (i, r) in reports.iter().enumerate() {
        let csv = report_to_csv(r);
        if i == 0 {
            out.push_str(&csv);
        } else {
            // Skip the duplicate header line.
            if let Some(pos) = csv.find('\n') {
                out.push_str(&csv[pos + 1..]);
            }
        }
    }
    out
}
