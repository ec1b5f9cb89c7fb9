//! Report emission.
//!
//! Machine-readable output is JSON Lines: one [`ExperimentRecord`] per line
//! with the keys `strategy`, `imputer`, `missing_rate`, `mse`, `accuracy`,
//! `fold_accuracies`, `input_width`, `stage_seconds`, `total_seconds`,
//! `seed`, `na`, `na_reason`. The human-readable table has one row per
//! imputer / strategy pair and one column per missing rate; each cell is
//! `(metric, seconds)` or `NA`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

use super::run::ExperimentRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Jsonl,
    Table,
    Both,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Ok(ReportFormat::Jsonl),
            "table" | "txt" => Ok(ReportFormat::Table),
            "both" => Ok(ReportFormat::Both),
            _ => Err(Error::Config(format!("unknown report format {s:?}"))),
        }
    }
}

pub fn to_jsonl(records: &[ExperimentRecord]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_jsonl(text: &str) -> Result<Vec<ExperimentRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}

fn rate_label(rate: f64) -> String {
    let pct = (rate * 100.0 * 1e6).round() / 1e6;
    format!("{pct}%")
}

fn cell_text(r: &ExperimentRecord) -> String {
    match r.metric() {
        Some(metric) if !r.na => format!("({metric:.4}, {:.3})", r.total_seconds),
        _ => "NA".to_owned(),
    }
}

/// Fixed-width text table. Rows keep first-appearance order of
/// (imputer, strategy); rate columns ascend.
pub fn render_table(records: &[ExperimentRecord], workers: usize) -> String {
    let mut rates: Vec<f64> = Vec::new();
    let mut rows: Vec<(String, String)> = Vec::new();
    for r in records {
        if !rates.iter().any(|x| x.to_bits() == r.missing_rate.to_bits()) {
            rates.push(r.missing_rate);
        }
        let key = (r.imputer.name().to_owned(), r.strategy.name().to_owned());
        if !rows.contains(&key) {
            rows.push(key);
        }
    }
    rates.sort_by(f64::total_cmp);
    // imputer groups in first-appearance order, strategies within each group likewise
    let mut imputers: Vec<&str> = Vec::new();
    for (imp, _) in &rows {
        if !imputers.contains(&imp.as_str()) {
            imputers.push(imp);
        }
    }
    let ordered: Vec<&(String, String)> = imputers
        .iter()
        .flat_map(|imp| rows.iter().filter(move |(i, _)| i == imp))
        .collect();

    let mut grid: Vec<Vec<String>> = Vec::with_capacity(ordered.len() + 1);
    let mut header = vec!["imputer / strategy".to_owned()];
    header.extend(rates.iter().map(|&r| rate_label(r)));
    grid.push(header);
    for (imp, strat) in &ordered {
        let mut line = vec![format!("{imp} / {strat}")];
        for &rate in &rates {
            let cell = records.iter().find(|r| {
                r.imputer.name() == imp
                    && r.strategy.name() == strat
                    && r.missing_rate.to_bits() == rate.to_bits()
            });
            line.push(cell.map_or_else(|| "-".to_owned(), cell_text));
        }
        grid.push(line);
    }

    let widths: Vec<usize> = (0..grid[0].len())
        .map(|c| grid.iter().map(|row| row[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let _ = writeln!(out, "# cells: (metric, seconds); workers: {workers}");
    for (n, row) in grid.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        let _ = writeln!(out, "{}", cells.join(" | ").trim_end());
        if n == 0 {
            let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            let _ = writeln!(out, "{}", rule.join("-+-"));
        }
    }
    out
}

/// Writes `<base>.jsonl` and/or `<base>.txt`; returns the paths written.
pub fn emit_report(
    records: &[ExperimentRecord],
    base: &Path,
    format: ReportFormat,
    workers: usize,
) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(Error::Contract("no records to report".into()));
    }
    if let Some(dir) = base.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut written = Vec::new();
    if matches!(format, ReportFormat::Jsonl | ReportFormat::Both) {
        let path = base.with_extension("jsonl");
        std::fs::write(&path, to_jsonl(records)?)?;
        written.push(path);
    }
    if matches!(format, ReportFormat::Table | ReportFormat::Both) {
        let path = base.with_extension("txt");
        std::fs::write(&path, render_table(records, workers))?;
        written.push(path);
    }
    Ok(written)
}
