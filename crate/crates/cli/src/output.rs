//! Rendering of results as a table, JSON or plot-ready CSV. Table and JSON
//! carry identical polynomial data; ordering is deterministic (dimension
//! vectors graded-lex, exponents ascending).

use num_rational::Rational64;
use quiver_dt::motive::RationalMotive;
use quiver_dt::DimVector;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// A fully rendered command result ready to be written in any format.
pub struct Rendered {
    pub json: Value,
    pub table: String,
    pub csv: String,
}

impl Rendered {
    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Table => self.table.clone(),
            Format::Json => format!("{:#}\n", self.json),
            Format::Csv => self.csv.clone(),
        }
    }
}

pub fn dim_label(d: &DimVector) -> String {
    d.entries()
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn slope_label(mu: &Rational64) -> String {
    if *mu.denom() == 1 {
        mu.numer().to_string()
    } else {
        format!("{}/{}", mu.numer(), mu.denom())
    }
}

/// Render aligned columns with a header row.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    let render = |cells: &[String], widths: &[usize], out: &mut String| {
        let line = cells
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ");
        out.push_str(line.trim_end());
        out.push('\n');
    };
    render(
        &header.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        &widths,
        &mut out,
    );
    render(
        &widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>(),
        &widths,
        &mut out,
    );
    for row in rows {
        render(row, &widths, &mut out);
    }
    out
}

/// CSV over simple unquoted cells (no commas occur in the emitted values).
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Plot-ready (d, exponent, coefficient) triples for a polynomial map.
pub fn polynomial_csv(entries: &[(DimVector, RationalMotive)]) -> String {
    let mut rows = Vec::new();
    for (d, value) in entries {
        if value.is_zero() {
            rows.push(vec![dim_label(d), String::new(), "0".to_string()]);
            continue;
        }
        if let Some(poly) = value.as_integral_laurent() {
            for (e, c) in poly.terms() {
                rows.push(vec![dim_label(d), e.to_string(), c.to_string()]);
            }
        } else {
            rows.push(vec![dim_label(d), String::new(), value.to_string()]);
        }
    }
    csv(&["d", "exponent", "coefficient"], &rows)
}


pub fn betti_json(betti: &std::collections::BTreeMap<i64, u64>) -> Value {
    let mut map = serde_json::Map::new();
    for (k, v) in betti {
        map.insert(k.to_string(), json!(v));
    }
    Value::Object(map)
}
