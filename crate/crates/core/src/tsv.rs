//! Shared helpers for the tool's tab-separated file formats.
//!
//! All floating-point output uses 17 significant digits so that written
//! values reparse bit-exactly.

use std::io::Write;

/// Format an `f64` with 17 significant digits (round-trip exact).
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "NA".to_string();
    }
    format!("{:.16e}", x)
}

/// Format an optional metric, `NA` when undefined.
pub fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => fmt_f64(v),
        None => "NA".to_string(),
    }
}

/// Parse a decimal cell, reporting the 1-based row/column on failure.
pub fn parse_cell(s: &str, row: usize, col: usize) -> Result<f64, crate::error::DataError> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| crate::error::DataError::Parse {
            row,
            col,
            msg: format!("{:?}: {}", s, e),
        })
}

/// Write one TSV row.
pub fn write_row<W: Write>(w: &mut W, fields: &[String]) -> std::io::Result<()> {
    writeln!(w, "{}", fields.join("\t"))
}
