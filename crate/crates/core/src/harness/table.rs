use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(HarnessError::ConfigInvalid(format!(
                "unknown format '{other}' (expected csv or json)"
            ))),
        }
    }
}

/// One output value.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            // Same rounding as the CSV so both formats carry identical values.
            Cell::Float(v) => format_float(*v)
                .parse::<f64>()
                .ok()
                .and_then(Number::from_f64)
                .map_or(Value::Null, Value::Number),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(v) => Value::String(v.clone()),
        }
    }
}

/// A row type with a fixed header.
pub trait Table {
    const HEADERS: &'static [&'static str];
    fn cells(&self) -> Vec<Cell>;
}

/// `%.6g`-style formatting: 6 significant digits, trailing zeros removed,
/// exponent form when the decimal exponent is below -4 or at least 6.
pub fn format_float(v: f64) -> String {
    const SIG: i32 = 6;
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (SIG - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..SIG).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (SIG - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Header plus one line per row, LF line endings.
pub fn write_csv<T: Table, W: Write>(rows: &[T], mut out: W) -> Result<(), HarnessError> {
    writeln!(out, "{}", T::HEADERS.join(","))?;
    for row in rows {
        let line: Vec<String> = row.cells().iter().map(Cell::csv).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

/// JSON array of objects keyed by the CSV header names.
pub fn write_json<T: Table, W: Write>(rows: &[T], mut out: W) -> Result<(), HarnessError> {
    serde_json::to_writer_pretty(&mut out, &json_rows(rows))?;
    writeln!(out)?;
    Ok(())
}

/// Rows as the JSON array [`write_json`] prints.
pub fn json_rows<T: Table>(rows: &[T]) -> Value {
    rows.iter()
        .map(|row| {
            let obj: Map<String, Value> = T::HEADERS
                .iter()
                .zip(row.cells())
                .map(|(k, c)| (k.to_string(), c.json()))
                .collect();
            Value::Object(obj)
        })
        .collect()
}

impl OutputFormat {
    pub fn write<T: Table, W: Write>(self, rows: &[T], out: W) -> Result<(), HarnessError> {
        match self {
            OutputFormat::Csv => write_csv(rows, out),
            OutputFormat::Json => write_json(rows, out),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}
