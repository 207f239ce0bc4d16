//! File output. CSV files open with `# key: value` lines recording every
//! setting of the run; JSON files wrap the result as
//! `{"metadata": …, "result": …}`. No timestamps are written, so the same
//! arguments give byte-identical files.

use std::error::Error;
use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::{Format, OutputArgs};

pub type CliResult<T> = Result<T, Box<dyn Error>>;

/// Run settings: the subcommand, its resolved arguments and the version.
pub fn metadata<A: Serialize>(command: &str, args: &A, extra: Value) -> CliResult<Map<String, Value>> {
    let mut map = Map::new();
    map.insert("command".into(), json!(command));
    map.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    if let Value::Object(fields) = serde_json::to_value(args)? {
        for (k, v) in fields {
            // flattened groups are stored inline
            match v {
                Value::Object(inner) if k == "point" || k == "output" => map.extend(inner),
                v => {
                    map.insert(k, v);
                }
            }
        }
    }
    if let Value::Object(fields) = extra {
        map.extend(fields);
    }
    Ok(map)
}

/// A plain table for CSV output.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, out: W) -> CliResult<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn metadata_lines(meta: &Map<String, Value>) -> String {
    let mut s = String::new();
    for (k, v) in meta {
        let v = match v {
            Value::String(x) => x.clone(),
            other => other.to_string(),
        };
        s.push_str(&format!("# {k}: {v}\n"));
    }
    s
}

/// Writes `result` to `--out` if given. `csv` renders the CSV body.
pub fn emit<R, F>(out: &OutputArgs, meta: &Map<String, Value>, result: &R, csv: F) -> CliResult<()>
where
    R: Serialize,
    F: FnOnce(&mut Vec<u8>) -> CliResult<()>,
{
    let Some(path) = &out.out else {
        return Ok(());
    };
    let mut buf = Vec::new();
    match out.format {
        Format::Csv => {
            buf.extend_from_slice(metadata_lines(meta).as_bytes());
            csv(&mut buf)?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, &json!({ "metadata": meta, "result": result }))?;
            buf.push(b'\n');
        }
    }
    std::fs::write(path, buf).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Shortest round-trip form, switching to exponent notation for very small
/// or very large magnitudes.
pub fn num(x: f64) -> String {
    let m = x.abs();
    if m == 0.0 || !m.is_finite() || (1e-4..1e15).contains(&m) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// `None` as an empty cell.
pub fn cell(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}
