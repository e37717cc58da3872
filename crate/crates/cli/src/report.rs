use serde::Serialize;
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::CliError;

pub type Row = Map<String, Value>;

/// Everything one invocation produced, plus what is needed to rerun it.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub version: String,
    pub params: Value,
    pub seeds: Vec<u64>,
    pub tolerances: BTreeMap<String, f64>,
    pub rows: Vec<Row>,
    /// Set by `verify`, None elsewhere.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
    /// Not part of the determinism contract.
    pub wall_clock_s: f64,
}

impl RunReport {
    pub fn new(command: &str, params: Value) -> Self {
        RunReport {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            params,
            seeds: Vec::new(),
            tolerances: BTreeMap::new(),
            rows: Vec::new(),
            passed: None,
            wall_clock_s: 0.0,
        }
    }

    pub fn tolerance(mut self, name: &str, value: f64) -> Self {
        self.tolerances.insert(name.to_string(), value);
        self
    }

    /// The report as JSON with the wall clock removed; two runs with the
    /// same inputs must give the same string.
    pub fn fingerprint(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().unwrap().remove("wall_clock_s");
        v.to_string()
    }

    /// One line per row, then one summary line without the rows.
    pub fn write_jsonl(&self, mut w: impl Write) -> std::io::Result<()> {
        for row in &self.rows {
            let mut line = Map::new();
            line.insert("kind".into(), "row".into());
            line.insert("command".into(), self.command.clone().into());
            line.extend(row.clone());
            writeln!(w, "{}", Value::Object(line))?;
        }
        let mut head = serde_json::to_value(self).expect("report serializes");
        let obj = head.as_object_mut().unwrap();
        obj.remove("rows");
        obj.insert("kind".into(), "report".into());
        obj.insert("row_count".into(), self.rows.len().into());
        writeln!(w, "{head}")
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        let mut header: Vec<String> = Vec::new();
        for row in &self.rows {
            for k in row.keys() {
                if !header.contains(k) {
                    header.push(k.clone());
                }
            }
        }
        let err = |e: csv::Error| CliError::input(format!("{}: {e}", path.display()));
        let mut w = csv::Writer::from_path(path).map_err(err)?;
        w.write_record(&header).map_err(err)?;
        for row in &self.rows {
            let cells: Vec<String> = header.iter().map(|k| row.get(k).map(csv_cell).unwrap_or_default()).collect();
            w.write_record(&cells).map_err(err)?;
        }
        w.flush().map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }
}

// same text as the JSON emission, so the two agree field by field
fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Row builder.
#[derive(Default)]
pub struct RowBuilder(Row);

impl RowBuilder {
    pub fn new() -> Self {
        RowBuilder(Map::new())
    }

    pub fn put(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.0.insert(key.to_string(), v.into());
        self
    }

    /// Non-finite floats become null.
    pub fn num(self, key: &str, x: f64) -> Self {
        let v = serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null);
        self.put(key, v)
    }

    pub fn opt(self, key: &str, x: Option<f64>) -> Self {
        match x {
            Some(x) => self.num(key, x),
            None => self.put(key, Value::Null),
        }
    }

    pub fn complex(self, key: &str, z: Complex64) -> Self {
        self.num(&format!("{key}_re"), z.re).num(&format!("{key}_im"), z.im)
    }

    pub fn opt_complex(self, key: &str, z: Option<Complex64>) -> Self {
        self.opt(&format!("{key}_re"), z.map(|z| z.re)).opt(&format!("{key}_im"), z.map(|z| z.im))
    }

    pub fn build(self) -> Row {
        self.0
    }
}
