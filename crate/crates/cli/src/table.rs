//! Reproduction of published table rows.
//!
//! A row passes when its relative deviation from the stored 20-digit
//! reference is within `max(10³ ΔF_reported, 10⁻¹²)` and both components
//! agree with the printed value to one unit in the last printed digit. Rows
//! without a stored reference are judged on the printed digits alone.

use hyperspec::{HypParams, C64};
use hyperspec_oracle::{Params, Table, TableRow};
use rayon::prelude::*;
use serde_json::json;

use crate::evaluate::{relative_error, Evaluator, RunConfig};
use crate::literal::format_complex;
use crate::output::{finite_or_null, json_complex, num, opt_num, Document};

pub const DELTA_FACTOR: f64 = 1e3;
pub const DELTA_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct RowOutcome {
    pub row: TableRow,
    pub value: Option<C64>,
    pub error: Option<String>,
    /// `|F - F_ref| / |F_ref|` against the stored reference, or against the
    /// printed value when there is none.
    pub delta: Option<f64>,
    pub tolerance: Option<f64>,
    pub printed_ok: bool,
    pub pass: bool,
}

pub fn row_tolerance(row: &TableRow) -> f64 {
    (DELTA_FACTOR * row.reported_delta).max(DELTA_FLOOR)
}

/// Agreement with the printed value to one unit in its last digit.
pub fn printed_agreement(row: &TableRow, value: C64) -> bool {
    let (ure, uim) = row.last_digit;
    let slack = 1.0 + 1e-9;
    (value.re - row.value.re).abs() <= ure * slack && (value.im - row.value.im).abs() <= uim * slack
}

fn judge(row: &TableRow, result: crate::error::Result<C64>) -> RowOutcome {
    let value = match result {
        Ok(v) => v,
        Err(e) => {
            return RowOutcome {
                row: row.clone(),
                value: None,
                error: Some(e.to_string()),
                delta: None,
                tolerance: row.reference.map(|_| row_tolerance(row)),
                printed_ok: false,
                pass: false,
            }
        }
    };
    let printed_ok = printed_agreement(row, value);
    let (delta, tolerance, pass) = match row.reference {
        Some(r) => {
            let d = relative_error(value, r);
            let tol = row_tolerance(row);
            (d, Some(tol), printed_ok && d <= tol)
        }
        None => (relative_error(value, row.value), None, printed_ok),
    };
    RowOutcome {
        row: row.clone(),
        value: Some(value),
        error: None,
        delta: Some(delta),
        tolerance,
        printed_ok,
        pass,
    }
}

/// Evaluate every row, building one representation per parameter set.
pub fn evaluate_rows(rows: &[TableRow], base: &RunConfig) -> Vec<RowOutcome> {
    let mut groups: Vec<(Params, Vec<usize>)> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        match groups.iter_mut().find(|(p, _)| *p == r.params) {
            Some((_, members)) => members.push(i),
            None => groups.push((r.params, vec![i])),
        }
    }
    let mut outcomes: Vec<(usize, RowOutcome)> = groups
        .par_iter()
        .flat_map_iter(|(p, members)| {
            let evaluator = HypParams::new(p.a, p.b, p.c)
                .map_err(crate::error::CliError::from)
                .and_then(|params| Evaluator::new(RunConfig { params, ..*base }));
            members
                .iter()
                .map(|&i| {
                    let result = match &evaluator {
                        Ok(ev) => ev.eval(rows[i].z).map(|r| r.value),
                        Err(e) => Err(crate::error::CliError::Data(e.to_string())),
                    };
                    (i, judge(&rows[i], result))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    outcomes.sort_by_key(|(i, _)| *i);
    outcomes.into_iter().map(|(_, o)| o).collect()
}

pub fn summary(outcomes: &[RowOutcome]) -> String {
    if outcomes.is_empty() {
        return "0 rows".to_string();
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    format!("{passed}/{} rows pass", outcomes.len())
}

fn table_label(t: Table) -> &'static str {
    match t {
        Table::RealArgument => "real",
        Table::ComplexArgument => "complex",
    }
}

pub fn document(outcomes: &[RowOutcome], header: Vec<String>) -> Document {
    let columns = [
        "row", "table", "a", "b", "c", "z", "F_re", "F_im", "ref_re", "ref_im", "dF", "reported_dF", "tol",
        "printed_ok", "pass", "error",
    ];
    let nan = C64::new(f64::NAN, f64::NAN);
    let rows = outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let v = o.value.unwrap_or(nan);
            let reference = o.row.reference.unwrap_or(o.row.value);
            vec![
                (i + 1).to_string(),
                table_label(o.row.table).to_string(),
                format_complex(o.row.params.a),
                format_complex(o.row.params.b),
                format_complex(o.row.params.c),
                format_complex(o.row.z),
                num(v.re),
                num(v.im),
                num(reference.re),
                num(reference.im),
                opt_num(o.delta),
                num(o.row.reported_delta),
                opt_num(o.tolerance),
                o.printed_ok.to_string(),
                o.pass.to_string(),
                o.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    let json_rows: Vec<_> = outcomes
        .iter()
        .map(|o| {
            json!({
                "table": table_label(o.row.table),
                "a": json_complex(o.row.params.a),
                "b": json_complex(o.row.params.b),
                "c": json_complex(o.row.params.c),
                "z": json_complex(o.row.z),
                "F": o.value.map(json_complex),
                "reference": json_complex(o.row.reference.unwrap_or(o.row.value)),
                "dF": o.delta.map(finite_or_null),
                "reported_dF": o.row.reported_delta,
                "tol": o.tolerance,
                "printed_ok": o.printed_ok,
                "pass": o.pass,
                "error": o.error,
            })
        })
        .collect();
    let summary = summary(outcomes);
    Document {
        header,
        columns: columns.iter().map(|s| s.to_string()).collect(),
        rows,
        footer: vec![summary.clone()],
        json: json!({ "rows": json_rows, "summary": summary }),
    }
}
