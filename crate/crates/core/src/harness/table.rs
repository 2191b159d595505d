use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{HestonError, Result};
use crate::harness::{ExperimentResult, ProductKind, ResultRow};

/// Column order of the CSV output.
pub const CSV_COLUMNS: [&str; 11] = [
    "case",
    "scheme",
    "N",
    "K",
    "paths",
    "reps",
    "estimate",
    "benchmark",
    "bias",
    "se",
    "wall_seconds",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

impl FromStr for TableFormat {
    type Err = HestonError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(TableFormat::Csv),
            "md" | "markdown" => Ok(TableFormat::Markdown),
            _ => Err(HestonError::Config(format!(
                "format: unknown value '{s}' (expected csv or md)"
            ))),
        }
    }
}

fn table_err(e: impl std::fmt::Display) -> HestonError {
    HestonError::Table(e.to_string())
}

fn emit_csv(rows: &[ResultRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(CSV_COLUMNS).map_err(table_err)?;
    }
    for row in rows {
        w.serialize(row).map_err(table_err)?;
    }
    let bytes = w.into_inner().map_err(table_err)?;
    String::from_utf8(bytes).map_err(table_err)
}

fn emit_markdown(result: &ExperimentResult) -> String {
    let swap = result.product == ProductKind::VarianceSwap;
    let scale = if swap { 100.0 } else { 1.0 };
    let unit = if swap { " (x1e-2)" } else { "" };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "| Case | Scheme | N | K | Paths | Reps | Estimate{unit} | Benchmark{unit} | Bias{unit} | SE{unit} | Time (s) |"
    );
    let _ = writeln!(out, "|---|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|");
    let opt = |x: Option<f64>| x.map_or(String::new(), |v| format!("{:.3}", v * scale));
    for r in &result.rows {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {:.3} | {} | {} | {:.3} | {:.2} |",
            r.case,
            r.scheme,
            r.n_steps,
            r.k.map_or(String::new(), |k| k.to_string()),
            r.paths,
            r.reps,
            r.estimate * scale,
            opt(r.benchmark),
            opt(r.bias),
            r.se * scale,
            r.wall_seconds,
        );
    }
    out
}

/// Render the summary rows as CSV or a markdown table.
pub fn emit_table(result: &ExperimentResult, format: TableFormat) -> Result<String> {
    match format {
        TableFormat::Csv => emit_csv(&result.rows),
        TableFormat::Markdown => Ok(emit_markdown(result)),
    }
}

/// Long-format CSV of every repetition estimate: `row,case,scheme,N,K,rep,estimate`.
pub fn emit_rep_estimates(result: &ExperimentResult) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["row", "case", "scheme", "N", "K", "rep", "estimate"])
        .map_err(table_err)?;
    for (i, (row, reps)) in result.rows.iter().zip(&result.rep_estimates).enumerate() {
        let k = row.k.map_or(String::new(), |k| k.to_string());
        for (j, x) in reps.iter().enumerate() {
            w.write_record([
                i.to_string(),
                row.case.clone(),
                row.scheme.clone(),
                row.n_steps.to_string(),
                k.clone(),
                j.to_string(),
                x.to_string(),
            ])
            .map_err(table_err)?;
        }
    }
    let bytes = w.into_inner().map_err(table_err)?;
    String::from_utf8(bytes).map_err(table_err)
}

/// Parse CSV produced by [`emit_table`].
pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().map_err(table_err)?;
    if headers.iter().ne(CSV_COLUMNS) {
        return Err(HestonError::Table(format!(
            "unexpected header: {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    r.deserialize().map(|row| row.map_err(table_err)).collect()
}
