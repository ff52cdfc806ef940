//! One row of solver output and its CSV / JSON-lines encodings.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const CSV_COLUMNS: [&str; 12] = [
    "geometry",
    "N",
    "p",
    "q",
    "mu",
    "eps",
    "mesh",
    "mu_q",
    "lambda_upper",
    "iters",
    "seconds",
    "converged",
];
/// Appended when a row carries an exact eigenvalue.
pub const ORACLE_COLUMNS: [&str; 2] = ["lambda_exact", "rel_error"];

pub const SIGNIFICANT_DIGITS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Ball,
    Interval,
    Square,
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Geometry::Ball => "ball",
            Geometry::Interval => "interval",
            Geometry::Square => "square",
        })
    }
}

impl FromStr for Geometry {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "ball" => Ok(Geometry::Ball),
            "interval" => Ok(Geometry::Interval),
            "square" => Ok(Geometry::Square),
            other => Err(CliError::Usage(format!("unknown geometry {other:?}"))),
        }
    }
}

/// `mu` is empty for runs that do not use it (Algorithm 2), `eps` for
/// radial runs, `mu_q`/`lambda_upper` for failed sweep rows. `mesh` is the
/// radial grid size or the number of square cells per side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub geometry: Geometry,
    #[serde(rename = "N")]
    pub dim: usize,
    pub p: f64,
    pub q: f64,
    pub mu: Option<f64>,
    pub eps: Option<f64>,
    pub mesh: usize,
    pub mu_q: Option<f64>,
    pub lambda_upper: Option<f64>,
    pub iters: usize,
    pub seconds: f64,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_exact: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunRecord {
    pub fn with_exact(mut self, exact: Option<f64>) -> Self {
        self.lambda_exact = exact;
        self.rel_error = match (self.mu_q, exact) {
            (Some(m), Some(e)) => Some((m - e) / e),
            _ => None,
        };
        self
    }

    fn csv_fields(&self, oracle: bool) -> Vec<String> {
        let mut out = vec![
            self.geometry.to_string(),
            self.dim.to_string(),
            fmt_num(self.p),
            fmt_num(self.q),
            fmt_opt(self.mu),
            fmt_opt(self.eps),
            self.mesh.to_string(),
            fmt_opt(self.mu_q),
            fmt_opt(self.lambda_upper),
            self.iters.to_string(),
            fmt_num(self.seconds),
            self.converged.to_string(),
        ];
        if oracle {
            out.push(fmt_opt(self.lambda_exact));
            out.push(fmt_opt(self.rel_error));
        }
        out
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    pub fn from_json_line(line: &str) -> Result<Self, CliError> {
        serde_json::from_str(line).map_err(|e| CliError::Parse(e.to_string()))
    }
}

/// `x` rounded to 15 significant digits, printed in the shortest form that
/// reads back to the rounded value.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("float repr");
    let a = rounded.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

pub fn write_csv<W: std::io::Write>(out: W, records: &[RunRecord]) -> Result<(), CliError> {
    let oracle = records.iter().any(|r| r.lambda_exact.is_some());
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = CSV_COLUMNS.to_vec();
    if oracle {
        header.extend(ORACLE_COLUMNS);
    }
    w.write_record(&header)?;
    for r in records {
        w.write_record(r.csv_fields(oracle))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json_lines<W: std::io::Write>(
    mut out: W,
    records: &[RunRecord],
) -> Result<(), CliError> {
    for r in records {
        writeln!(out, "{}", r.to_json_line())?;
    }
    Ok(())
}

/// Reads records written by [`write_csv`]. Warnings and error messages are
/// not part of the CSV format and come back empty.
pub fn read_csv(text: &str) -> Result<Vec<RunRecord>, CliError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers()?.clone();
    let col = |name: &str| header.iter().position(|h| h == name);
    for name in CSV_COLUMNS {
        if col(name).is_none() {
            return Err(CliError::Parse(format!("missing column {name}")));
        }
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let field = |name: &str| col(name).and_then(|i| row.get(i)).unwrap_or("");
        let num = |name: &str| parse_field::<f64>(name, field(name));
        let opt = |name: &str| -> Result<Option<f64>, CliError> {
            match field(name) {
                "" => Ok(None),
                s => parse_field(name, s).map(Some),
            }
        };
        out.push(RunRecord {
            geometry: field("geometry").parse()?,
            dim: parse_field("N", field("N"))?,
            p: num("p")?,
            q: num("q")?,
            mu: opt("mu")?,
            eps: opt("eps")?,
            mesh: parse_field("mesh", field("mesh"))?,
            mu_q: opt("mu_q")?,
            lambda_upper: opt("lambda_upper")?,
            iters: parse_field("iters", field("iters"))?,
            seconds: num("seconds")?,
            converged: parse_field("converged", field("converged"))?,
            lambda_exact: opt("lambda_exact")?,
            rel_error: opt("rel_error")?,
            warning: None,
            error: None,
        });
    }
    Ok(out)
}

fn parse_field<T: FromStr>(name: &str, s: &str) -> Result<T, CliError> {
    s.parse()
        .map_err(|_| CliError::Parse(format!("bad value {s:?} in column {name}")))
}
