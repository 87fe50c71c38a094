//! Tabular output: aligned text on stdout, or CSV/JSON chosen by file extension.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context};
use serde_json::{Map, Number, Value as Json};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Missing,
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<Option<f64>> for Value {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Value::Missing, Value::Num)
    }
}

impl Value {
    /// Shortest representation that parses back to the same number.
    fn exact(&self) -> String {
        match self {
            Value::Num(v) => format!("{v}"),
            Value::Int(v) => v.to_string(),
            Value::Bool(v) => v.to_string(),
            Value::Text(s) => s.clone(),
            Value::Missing => String::new(),
        }
    }

    fn display(&self) -> String {
        match self {
            Value::Num(v) => format!("{v:.6}"),
            other => other.exact(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Value::Num(v) => Number::from_f64(*v).map_or(Json::Null, Json::Number),
            Value::Int(v) => Json::from(*v),
            Value::Bool(v) => Json::from(*v),
            Value::Text(s) => Json::from(s.as_str()),
            Value::Missing => Json::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Appends the rows of `other`, which must have the same columns.
    pub fn extend(&mut self, other: Table) {
        debug_assert_eq!(self.columns, other.columns);
        self.rows.extend(other.rows);
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Value::display).collect())
            .collect();
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(j, c)| cells.iter().map(|r| r[j].len()).fold(c.len(), usize::max))
            .collect();
        let line = |items: &[String]| -> String {
            items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        writeln!(out, "{}", line(&self.columns))?;
        for r in &cells {
            writeln!(out, "{}", line(r))?;
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Value::exact))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Json {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let object: Map<String, Json> = self.columns.iter().cloned().zip(r.iter().map(Value::json)).collect();
                Json::Object(object)
            })
            .collect();
        Json::Array(rows)
    }
}

/// Writes `table` to `path` (format by extension) or as text to stdout.
pub fn emit(table: &Table, path: Option<&Path>) -> anyhow::Result<()> {
    let Some(path) = path else {
        let stdout = io::stdout();
        table.write_text(stdout.lock())?;
        return Ok(());
    };
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    let open = || -> anyhow::Result<BufWriter<File>> {
        let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        Ok(BufWriter::new(file))
    };
    match ext.as_deref() {
        Some("csv") => table.write_csv(open()?),
        Some("json") => {
            let mut w = open()?;
            serde_json::to_writer_pretty(&mut w, &table.to_json())?;
            writeln!(w)?;
            w.flush()?;
            Ok(())
        }
        _ => bail!(crate::UsageError(format!(
            "--out must end in .csv or .json, got {}",
            path.display()
        ))),
    }
}
