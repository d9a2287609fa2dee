use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::Result;

use super::config::{OutputFormat, RunConfig};

/// Rows of one command, in output order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    pub fn objects(&self) -> Vec<Value> {
        self.rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect::<Map<_, _>>()))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(cell_text))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, config: &RunConfig, mut w: W) -> Result<()> {
        let envelope = json!({
            "config": config,
            "rows": self.objects(),
            "versions": versions(),
        });
        serde_json::to_writer_pretty(&mut w, &envelope)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for obj in self.objects() {
            serde_json::to_writer(&mut w, &obj)?;
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn write<W: Write>(&self, config: &RunConfig, w: W) -> Result<()> {
        match config.format {
            OutputFormat::Csv => self.write_csv(w),
            OutputFormat::Json => self.write_json(config, w),
            OutputFormat::Jsonl => self.write_jsonl(w),
        }
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn versions() -> Value {
    json!({ "ringgap": env!("CARGO_PKG_VERSION") })
}

/// JSON number, `null` when not finite.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn cell<T: Serialize>(x: T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}
