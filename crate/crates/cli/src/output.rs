//! CSV, JSON and plain-text renderings of a [`SweepResult`].

use std::fmt::Write as _;
use std::io::{self, Write};

use serde::Serialize;

use crate::experiment::{Cell, Check, SweepResult};

/// Header row plus one line per row. Numbers carry 17 significant digits,
/// missing values are empty fields, lines end in `\n`.
pub fn emit_csv(result: &SweepResult, out: &mut impl Write) -> io::Result<()> {
    let header: Vec<String> = result.columns.iter().map(|c| quote(c)).collect();
    writeln!(out, "{}", header.join(","))?;
    for row in &result.rows {
        let fields: Vec<String> = row.iter().map(format_cell).collect();
        writeln!(out, "{}", fields.join(","))?;
    }
    out.flush()
}

pub fn emit_json(result: &SweepResult, out: &mut impl Write) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, result)?;
    writeln!(out)?;
    out.flush()
}

fn format_cell(cell: &Cell) -> String {
    match cell {
        Cell::Num(x) => format_number(*x),
        Cell::Int(k) => k.to_string(),
        Cell::Text(s) => quote(s),
        Cell::Missing => String::new(),
    }
}

pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Serialize)]
struct FailureSummary<'a> {
    status: &'static str,
    kind: String,
    failures: Vec<&'a Check>,
}

/// Single-line JSON naming every failed check.
pub fn failure_summary(result: &SweepResult) -> String {
    let summary = FailureSummary { status: "failed", kind: result.kind.to_string(), failures: result.failures() };
    serde_json::to_string(&summary).expect("plain data serializes")
}

pub fn error_summary(message: &str) -> String {
    serde_json::json!({ "status": "error", "message": message }).to_string()
}

/// Plain-text summary: a table of the rows followed by the checks.
pub fn report(result: &SweepResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} ({} rows)", result.kind, result.rows.len());
    let cells: Vec<Vec<String>> = result
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| match c {
                    Cell::Num(x) => format!("{x:.6}"),
                    Cell::Int(k) => k.to_string(),
                    Cell::Text(t) => t.clone(),
                    Cell::Missing => "-".into(),
                })
                .collect()
        })
        .collect();
    let widths: Vec<usize> = result
        .columns
        .iter()
        .enumerate()
        .map(|(k, c)| cells.iter().map(|r| r[k].len()).chain([c.len()]).max().unwrap_or(0))
        .collect();
    let line = |fields: &[String]| {
        fields.iter().zip(&widths).map(|(f, w)| format!("{f:>w$}")).collect::<Vec<_>>().join("  ")
    };
    let _ = writeln!(s, "{}", line(&result.columns));
    for row in &cells {
        let _ = writeln!(s, "{}", line(row));
    }
    s.push('\n');
    for c in &result.checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        let _ = writeln!(s, "[{mark}] {}: worst {:.3e} (tolerance {:.0e}, n = {})", c.name, c.worst, c.tolerance, c.samples);
    }
    s
}
