use std::io::Write;

use causal_vc::{Error, Result};
use clap::ValueEnum;
use serde_json::Value;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Print a result on stdout. CSV renders an object as one row, an array of
/// objects as a table and an array of arrays as bare rows; nested values are
/// embedded as JSON.
pub fn emit(v: &Value, format: Format) -> Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, v)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            match v {
                Value::Object(m) => {
                    w.write_record(m.keys())?;
                    w.write_record(m.values().map(cell))?;
                }
                Value::Array(rows) if rows.iter().all(Value::is_object) && !rows.is_empty() => {
                    let keys: Vec<String> = rows[0].as_object().unwrap().keys().cloned().collect();
                    w.write_record(&keys)?;
                    for r in rows {
                        w.write_record(keys.iter().map(|k| cell(r.get(k).unwrap_or(&Value::Null))))?;
                    }
                }
                Value::Array(rows) if rows.iter().all(Value::is_array) => {
                    for r in rows {
                        w.write_record(r.as_array().unwrap().iter().map(cell))?;
                    }
                }
                other => return Err(Error::Unsupported(format!("cannot render {other} as CSV"))),
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        other => other.to_string(),
    }
}
