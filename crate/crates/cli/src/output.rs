//! CSV with a `#` comment header, or JSON.

use std::io::Write;
use std::path::Path;

use hyperspec::C64;
use serde_json::{json, Value};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A command's output, renderable in either format.
#[derive(Debug, Clone, Default)]
pub struct Document {
    /// Metadata lines, written as `# ...` before the CSV header.
    pub header: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Summary lines, written as `# ...` after the data.
    pub footer: Vec<String>,
    pub json: Value,
}

impl Document {
    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => Ok(serde_json::to_string_pretty(&self.json).expect("JSON values serialize") + "\n"),
        }
    }

    fn render_csv(&self) -> Result<String> {
        let mut out = Vec::new();
        for line in &self.header {
            writeln!(out, "# {line}")?;
        }
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&self.columns).map_err(csv_io)?;
            for row in &self.rows {
                w.write_record(row).map_err(csv_io)?;
            }
            w.flush()?;
        }
        for line in &self.footer {
            writeln!(out, "# {line}")?;
        }
        Ok(String::from_utf8(out).expect("output is UTF-8"))
    }
}

fn csv_io(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e.to_string())
}

/// Write to `path`, or to standard output.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Shortest round-tripping decimal, in exponent form when very small or
/// large.
pub fn num(x: f64) -> String {
    let m = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e16).contains(&m) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(String::new, num)
}

pub fn json_complex(z: C64) -> Value {
    json!([finite_or_null(z.re), finite_or_null(z.im)])
}

pub fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let doc = Document {
            header: vec!["hyperspec eval".into()],
            columns: vec!["x".into(), "note".into()],
            rows: vec![vec![num(0.1), "a, b".into()]],
            footer: vec!["1 rows".into()],
            json: Value::Null,
        };
        assert_eq!(doc.render(Format::Csv).unwrap(), "# hyperspec eval\nx,note\n0.1,\"a, b\"\n# 1 rows\n");
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, -1.0 / 3.0, 6882.463762013978, 1.5e-300, 2.7e-16, -4e20] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(json_complex(C64::new(f64::NAN, 1.0)), json!([null, 1.0]));
    }
}
