//! Rendering of command reports as text, JSON or CSV.
//!
//! JSON reports are objects with the keys `command`, `inputs`, `results` and
//! `diagnostics`. CSV reports are a single table whose columns depend on the
//! command. Machine formats print floats in shortest round-trip form; text
//! output uses 9 significant digits.

use serde::Serialize;
use serde_json::Value;

use crate::args::Format;

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Str(String),
}

impl Cell {
    fn machine(&self) -> String {
        match self {
            Cell::Num(x) => format_machine(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Str(s) => s.clone(),
        }
    }

    fn human(&self) -> String {
        match self {
            Cell::Num(x) => format_sig(*x, 9),
            other => other.machine(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Str(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Str(s)
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_machine(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// `x` rounded to `digits` significant digits.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format_machine(x);
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&magnitude) {
        return format!("{:.*e}", digits - 1, x);
    }
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn columns(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub inputs: Value,
    pub results: Value,
    pub diagnostics: Value,
    #[serde(skip)]
    pub table: Table,
    /// Labelled lines for the text format.
    #[serde(skip)]
    pub text: Vec<(String, Cell)>,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = self.table.header.join(",");
                s.push('\n');
                for row in &self.table.rows {
                    s.push_str(&row.iter().map(Cell::machine).collect::<Vec<_>>().join(","));
                    s.push('\n');
                }
                s
            }
            Format::Text => {
                let width = self.text.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                let mut s = String::new();
                for (k, v) in &self.text {
                    s.push_str(&format!("{k:<width$}  {}\n", v.human()));
                }
                s
            }
        }
    }
}
