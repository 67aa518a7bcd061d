//! CSV and JSON emitters. CSV floats carry 17 significant digits, so a
//! value read back is bit-identical.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::args::Format;
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub enum Cell {
    Float(f64),
    Int(usize),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
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
        Cell::Text(s.to_owned())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

/// A table row with a fixed CSV header.
pub trait Row: Serialize {
    const HEADER: &'static [&'static str];
    fn cells(&self) -> Vec<Cell>;
}

pub fn write_csv<R: Row, W: Write>(out: W, rows: &[R]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(R::HEADER)?;
    for r in rows {
        let cells = r.cells();
        debug_assert_eq!(cells.len(), R::HEADER.len());
        w.write_record(cells.iter().map(Cell::render))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Document<'a, R> {
    schema_version: u32,
    command: &'a str,
    records: &'a [R],
}

pub fn write_json<R: Row, W: Write>(mut out: W, command: &str, rows: &[R]) -> Result<(), CliError> {
    let doc = Document {
        schema_version: SCHEMA_VERSION,
        command,
        records: rows,
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn write_rows<R: Row, W: Write>(out: W, format: Format, command: &str, rows: &[R]) -> Result<(), CliError> {
    match format {
        Format::Csv => write_csv(out, rows),
        Format::Json => write_json(out, command, rows),
    }
}

/// Writes to `path`, or to stdout when `None`.
pub fn emit<R: Row>(path: Option<&Path>, format: Format, command: &str, rows: &[R]) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::check(format!("cannot create {}: {e}", p.display())))?;
            let mut w = BufWriter::new(f);
            write_rows(&mut w, format, command, rows)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            write_rows(stdout.lock(), format, command, rows)?;
        }
    }
    Ok(())
}
