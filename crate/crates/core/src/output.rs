//! CSV and JSON emission with a fixed schema and 12 significant digits.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

/// A table row with a fixed list of named fields.
pub trait Record {
    const FIELDS: &'static [&'static str];
    fn cells(&self) -> Vec<Cell>;
}

/// `x` rounded to 12 significant digits; non-finite values pass through.
pub fn round_sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Shortest text that round-trips the 12-digit value (`nan`, `inf`, `-inf`
/// for non-finite input).
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    // finite values always have a JSON representation
    serde_json::to_string(&round_sig12(x)).expect("finite float")
}

fn cell_text(cell: &Cell) -> String {
    match cell {
        Cell::Num(x) => format_number(*x),
        Cell::Int(n) => n.to_string(),
        Cell::Text(s) => s.clone(),
    }
}

fn cell_json(cell: &Cell) -> Value {
    match cell {
        Cell::Num(x) => Number::from_f64(round_sig12(*x)).map_or(Value::Null, Value::Number),
        Cell::Int(n) => Value::from(*n),
        Cell::Text(s) => Value::String(s.clone()),
    }
}

pub fn render_csv<R: Record>(rows: &[R]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(R::FIELDS)?;
    for row in rows {
        w.write_record(row.cells().iter().map(cell_text))?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv writer emits utf-8"))
}

pub fn render_json<R: Record>(rows: &[R]) -> Result<String> {
    let array: Vec<Value> = rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = R::FIELDS
                .iter()
                .zip(row.cells().iter())
                .map(|(k, v)| (k.to_string(), cell_json(v)))
                .collect();
            Value::Object(obj)
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&array)?;
    s.push('\n');
    Ok(s)
}

pub fn render<R: Record>(rows: &[R], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => render_csv(rows),
        OutputFormat::Json => render_json(rows),
    }
}
