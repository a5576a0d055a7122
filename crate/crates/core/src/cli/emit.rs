use std::io::Write;
use std::path::Path;

use serde_json::{Map, Number, Value};

use super::config::Format;
use crate::error::{Error, Result};

/// Column contract for estimate, sandwich and sweep output.
pub const RECORD_HEADER: [&str; 13] = [
    "n",
    "N",
    "q",
    "case",
    "phi",
    "phi1",
    "phi2",
    "phi3",
    "upper",
    "lower",
    "alpha_star_p",
    "beta_star_p",
    "warnings",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Empty,
    Int(u64),
    Float(f64),
    Text(String),
}

impl Cell {
    pub fn opt_float(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Float)
    }

    /// Shortest round-trip decimal; `inf` for +∞.
    pub fn to_csv(&self) -> String {
        match self {
            Cell::Empty => String::new(),
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Empty => Value::Null,
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => Number::from_f64(*v).map_or_else(|| Value::from(format_float(*v)), Value::Number),
            Cell::Text(s) => Value::from(s.clone()),
        }
    }
}

pub fn format_float(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

pub fn write_table<W: Write>(table: &Table, format: Format, out: W) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&table.header)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::to_csv))?;
            }
            w.flush()
        }
        Format::Jsonl => {
            let mut out = out;
            for row in &table.rows {
                let obj: Map<String, Value> = table
                    .header
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::to_json))
                    .collect();
                serde_json::to_writer(&mut out, &obj)?;
                out.write_all(b"\n")?;
            }
            out.flush()
        }
    }
}

/// Writes to `path`, or stdout when `None`.
pub fn emit(table: &Table, format: Format, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let file = std::fs::File::create(p).map_err(|source| Error::Io { path: p.to_path_buf(), source })?;
            write_table(table, format, std::io::BufWriter::new(file))
                .map_err(|source| Error::Io { path: p.to_path_buf(), source })
        }
        None => {
            let stdout = std::io::stdout();
            write_table(table, format, stdout.lock())
                .map_err(|source| Error::Io { path: "<stdout>".into(), source })
        }
    }
}
