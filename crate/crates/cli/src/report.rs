//! Result payloads and their CSV / JSON encodings.

use std::io::Write;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Named columns with one value per column in every row.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Outcome of an internal consistency check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub experiment: String,
    pub parameters: Map<String, Value>,
    pub summary: Map<String, Value>,
    pub table: Option<Table>,
    pub checks: Vec<Check>,
    pub default_format: Format,
}

impl Report {
    pub fn new(experiment: &str, parameters: Map<String, Value>) -> Self {
        Self {
            experiment: experiment.to_string(),
            parameters,
            summary: Map::new(),
            table: None,
            checks: Vec::new(),
            default_format: Format::Json,
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn prefer(mut self, format: Format) -> Self {
        self.default_format = format;
        self
    }

    /// Records a check that passes when `error <= tol`.
    pub fn check_close(&mut self, name: &str, error: f64, tol: f64) {
        self.checks.push(Check {
            name: name.to_string(),
            passed: error <= tol,
            detail: format!("deviation {error:.3e}, tolerance {tol:.1e}"),
        });
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    /// Summary keys at top level next to `experiment`, `parameters`,
    /// `rows` and `checks`.
    pub fn to_json(&self) -> Value {
        let mut out = self.summary.clone();
        out.insert("experiment".into(), json!(self.experiment));
        out.insert("parameters".into(), Value::Object(self.parameters.clone()));
        if let Some(t) = &self.table {
            let rows = t
                .rows
                .iter()
                .map(|r| Value::Object(t.columns.iter().cloned().zip(r.iter().cloned()).collect()))
                .collect();
            out.insert("rows".into(), Value::Array(rows));
        }
        if !self.checks.is_empty() {
            out.insert(
                "checks".into(),
                serde_json::to_value(&self.checks).expect("plain data"),
            );
        }
        Value::Object(out)
    }

    /// Header: `experiment`, every parameter, then the table columns (or the
    /// scalar summary when there is no table). Parameters repeat on each row.
    pub fn write_csv<W: Write>(&self, w: W) -> CliResult<()> {
        let mut writer = csv::Writer::from_writer(w);
        let (columns, rows) = match &self.table {
            Some(t) => (t.columns.clone(), t.rows.clone()),
            None => (
                self.summary.keys().cloned().collect(),
                vec![self.summary.values().cloned().collect()],
            ),
        };
        // A parameter sharing a name with a result column is written as `param_<name>`.
        let param_names: Vec<String> = self
            .parameters
            .keys()
            .map(|p| {
                if columns.contains(p) {
                    format!("param_{p}")
                } else {
                    p.clone()
                }
            })
            .collect();
        let header = std::iter::once("experiment".to_string())
            .chain(param_names)
            .chain(columns);
        let csv_err = |e: csv::Error| CliError::Output(e.to_string());
        writer.write_record(header).map_err(csv_err)?;
        let prefix: Vec<String> = std::iter::once(self.experiment.clone())
            .chain(self.parameters.values().map(csv_cell))
            .collect();
        for row in rows {
            let record = prefix.iter().cloned().chain(row.iter().map(csv_cell));
            writer.write_record(record).map_err(csv_err)?;
        }
        writer.flush().map_err(|e| CliError::Output(e.to_string()))
    }

    pub fn render(&self, format: Format) -> CliResult<Vec<u8>> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_vec_pretty(&self.to_json())
                    .map_err(|e| CliError::Output(e.to_string()))?;
                s.push(b'\n');
                Ok(s)
            }
            Format::Csv => {
                let mut buf = Vec::new();
                self.write_csv(&mut buf)?;
                Ok(buf)
            }
        }
    }
}

/// Plain decimal, or scientific notation for nonzero `|x| < 1e-4`.
pub fn format_number(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.to_string(),
            (None, Some(u)) => u.to_string(),
            _ => format_number(n.as_f64().unwrap_or(f64::NAN)),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// JSON number, or `null` for non-finite values.
pub fn num(x: f64) -> Value {
    // Folds −0 into 0 so signs of exact zeros never differ between runs.
    let x = if x == 0.0 { 0.0 } else { x };
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}
