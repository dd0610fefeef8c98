//! Tables and their CSV/JSON renderings.

use std::io;
use std::path::Path;

use gnslab_core::ParamSet;
use serde_json::{json, Map, Value};

use crate::spec::{Command, Format};

/// Bumped whenever a column is renamed, removed or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Float)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) => Value::from(*x),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

/// Shortest round-trip text, switching to exponent form outside `[1e-4, 1e15)`.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Rows for one ParamSet; the labeling columns are added on output.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    /// Appends a row given as `(column, value)` pairs; unnamed columns stay empty.
    pub fn push(&mut self, cells: Vec<(&'static str, Cell)>) {
        let mut row = vec![Cell::Empty; self.columns.len()];
        for (name, cell) in cells {
            let i = self
                .columns
                .iter()
                .position(|c| *c == name)
                .unwrap_or_else(|| panic!("no column `{name}`"));
            row[i] = cell;
        }
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }
}

/// Everything computed for one ParamSet.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemReport {
    pub command: Command,
    pub params: ParamSet,
    pub resolution: usize,
    pub table: Table,
    /// Rows whose check did not hold or whose computation failed.
    pub failed_checks: usize,
}

const LEAD: [&str; 3] = ["n", "t", "m"];
const TRAIL: [&str; 2] = ["resolution", "schema_version"];

impl ItemReport {
    pub fn header(&self) -> Vec<&'static str> {
        LEAD.iter().chain(&self.table.columns).chain(&TRAIL).copied().collect()
    }

    fn labeled_rows(&self) -> impl Iterator<Item = Vec<Cell>> + '_ {
        let p = &self.params;
        self.table.rows.iter().map(move |row| {
            let mut out = vec![Cell::Int(p.n() as i64), Cell::Float(p.t()), Cell::Float(p.m())];
            out.extend(row.iter().cloned());
            out.push(Cell::Int(self.resolution as i64));
            out.push(Cell::Int(SCHEMA_VERSION as i64));
            out
        })
    }

    pub fn to_csv(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header())?;
        for row in self.labeled_rows() {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }

    pub fn to_json(&self) -> Value {
        let header = self.header();
        let rows: Vec<Value> = self
            .labeled_rows()
            .map(|row| {
                let obj: Map<String, Value> = header.iter().map(|h| h.to_string()).zip(row.iter().map(Cell::json)).collect();
                Value::Object(obj)
            })
            .collect();
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command.name(),
            "resolution": self.resolution,
            "params": params_json(&self.params),
            "columns": header,
            "rows": rows,
            "failed_checks": self.failed_checks,
        })
    }

    pub fn render(&self, format: Format) -> io::Result<Vec<u8>> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(pretty(&self.to_json())),
        }
    }
}

pub fn params_json(p: &ParamSet) -> Value {
    json!({
        "n": p.n(),
        "t": p.t(),
        "m": p.m(),
        "two_star": p.two_star(),
        "gamma": p.gamma(),
        "mu": p.mu(),
    })
}

pub fn pretty(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("JSON values always serialize");
    out.push(b'\n');
    out
}

/// Writes through a sibling temporary file and a rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)
}
