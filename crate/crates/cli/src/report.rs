use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use hopfphase::Complex64;
use serde_json::{Map, Value};

use crate::CliError;

pub const SCHEMA_VERSION: u64 = 1;

/// A computed quantity checked against its reference value.
#[derive(Debug, Clone)]
pub struct Reference {
    pub name: String,
    pub computed: Value,
    pub reference: Value,
    pub provenance: String,
    pub abs_error: f64,
    pub tolerance: f64,
}

impl Reference {
    pub fn scalar(name: &str, computed: f64, reference: f64, tolerance: f64, provenance: &str) -> Self {
        Self {
            name: name.into(),
            computed: num(computed),
            reference: num(reference),
            provenance: provenance.into(),
            abs_error: (computed - reference).abs(),
            tolerance,
        }
    }

    pub fn complex(name: &str, computed: Complex64, reference: Complex64, tolerance: f64, provenance: &str) -> Self {
        Self {
            name: name.into(),
            computed: complex(computed),
            reference: complex(reference),
            provenance: provenance.into(),
            abs_error: (computed - reference).norm(),
            tolerance,
        }
    }

    /// `error` must stay below `tolerance`.
    pub fn bound(name: &str, error: f64, tolerance: f64, provenance: &str) -> Self {
        Self::scalar(name, error, 0.0, tolerance, provenance)
    }

    /// `value` must exceed `threshold`.
    pub fn above(name: &str, value: f64, threshold: f64, provenance: &str) -> Self {
        Self {
            name: name.into(),
            computed: num(value),
            reference: num(threshold),
            provenance: provenance.into(),
            abs_error: if value > threshold { 0.0 } else { threshold - value },
            tolerance: 0.0,
        }
    }

    pub fn pass(&self) -> bool {
        self.abs_error.is_finite()
            && if self.tolerance == 0.0 {
                self.abs_error == 0.0
            } else {
                self.abs_error < self.tolerance
            }
    }
}

pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn complex(z: Complex64) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

/// Column-major numeric table written as rows.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub experiment: String,
    pub inputs: Map<String, Value>,
    pub values: Map<String, Value>,
    pub references: Vec<Reference>,
    pub table: Option<Table>,
}

impl Report {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.into(),
            inputs: Map::new(),
            values: Map::new(),
            references: Vec::new(),
            table: None,
        }
    }

    pub fn input(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.into(), v.into());
        self
    }

    pub fn input_f(&mut self, key: &str, x: f64) -> &mut Self {
        self.inputs.insert(key.into(), num(x));
        self
    }

    pub fn value(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.values.insert(key.into(), v.into());
        self
    }

    pub fn value_f(&mut self, key: &str, x: f64) -> &mut Self {
        self.values.insert(key.into(), num(x));
        self
    }

    pub fn check(&mut self, r: Reference) -> &mut Self {
        self.references.push(r);
        self
    }

    pub fn pass(&self) -> bool {
        self.references.iter().all(Reference::pass)
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
        m.insert("experiment".into(), Value::from(self.experiment.clone()));
        m.insert("inputs".into(), Value::Object(self.inputs.clone()));
        m.insert("values".into(), Value::Object(self.values.clone()));
        let refs = self
            .references
            .iter()
            .map(|r| {
                let mut o = Map::new();
                o.insert("name".into(), Value::from(r.name.clone()));
                o.insert("computed".into(), r.computed.clone());
                o.insert("reference".into(), r.reference.clone());
                o.insert("provenance".into(), Value::from(r.provenance.clone()));
                o.insert("abs_error".into(), num(r.abs_error));
                o.insert("tolerance".into(), num(r.tolerance));
                o.insert("pass".into(), Value::from(r.pass()));
                Value::Object(o)
            })
            .collect();
        m.insert("references".into(), Value::Array(refs));
        if let Some(t) = &self.table {
            m.insert("columns".into(), Value::Array(t.columns.iter().cloned().map(Value::from).collect()));
            let rows = t.rows.iter().map(|r| Value::Array(r.iter().map(|x| num(*x)).collect())).collect();
            m.insert("rows".into(), Value::Array(rows));
        }
        m.insert("pass".into(), Value::from(self.pass()));
        Value::Object(m)
    }

    pub fn to_json(&self) -> String {
        let mut s = String::new();
        write_value(&mut s, &self.to_value(), 0);
        s.push('\n');
        s
    }

    /// The table when present, otherwise one row per reference.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        match &self.table {
            Some(t) => {
                w.write_record(&t.columns).map_err(io)?;
                for row in &t.rows {
                    w.write_record(row.iter().map(|x| float(*x))).map_err(io)?;
                }
            }
            None => {
                w.write_record(["name", "computed", "reference", "abs_error", "tolerance", "pass", "provenance"])
                    .map_err(io)?;
                for r in &self.references {
                    w.write_record([
                        r.name.clone(),
                        flat(&r.computed),
                        flat(&r.reference),
                        float(r.abs_error),
                        float(r.tolerance),
                        r.pass().to_string(),
                        r.provenance.clone(),
                    ])
                    .map_err(io)?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for r in &self.references {
            let verdict = if r.pass() { "PASS" } else { "FAIL" };
            let _ = if r.tolerance == 0.0 {
                writeln!(s, "{verdict} {}: {} (must exceed {})", r.name, flat(&r.computed), flat(&r.reference))
            } else {
                writeln!(s, "{verdict} {}: error {:.3e} (tolerance {:.1e})", r.name, r.abs_error, r.tolerance)
            };
        }
        s
    }

    pub fn emit(&self, out: Option<&Path>, format: Option<&str>) -> Result<(), CliError> {
        let csv_by_ext = out.and_then(|p| p.extension()).is_some_and(|e| e == "csv");
        let text = match format {
            Some("csv") => self.to_csv()?,
            Some("json") => self.to_json(),
            None if csv_by_ext => self.to_csv()?,
            None => self.to_json(),
            Some(other) => return Err(CliError::Config(format!("unknown format {other:?}"))),
        };
        match out {
            Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))?,
        }
        eprint!("{}", self.summary());
        Ok(())
    }
}

/// 17 significant digits; non-finite values become `NaN`/`inf` in CSV.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn flat(v: &Value) -> String {
    match v {
        Value::Array(a) => a.iter().map(flat).collect::<Vec<_>>().join(" "),
        Value::Number(n) => n.as_f64().map(float).unwrap_or_else(|| n.to_string()),
        Value::Null => "NaN".into(),
        other => other.to_string(),
    }
}

fn write_value(s: &mut String, v: &Value, indent: usize) {
    let pad = |s: &mut String, n: usize| s.extend(std::iter::repeat_n(' ', n));
    match v {
        Value::Null => s.push_str("null"),
        Value::Bool(b) => s.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                s.push_str(&float(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                s.push_str(&n.to_string());
            }
        }
        Value::String(t) => s.push_str(&Value::String(t.clone()).to_string()),
        Value::Array(a) => {
            if a.iter().all(|x| !x.is_object() && !x.is_array()) {
                s.push('[');
                for (i, x) in a.iter().enumerate() {
                    if i > 0 {
                        s.push_str(", ");
                    }
                    write_value(s, x, indent);
                }
                s.push(']');
            } else {
                s.push_str("[\n");
                for (i, x) in a.iter().enumerate() {
                    pad(s, indent + 2);
                    write_value(s, x, indent + 2);
                    s.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
                }
                pad(s, indent);
                s.push(']');
            }
        }
        Value::Object(o) => {
            if o.is_empty() {
                s.push_str("{}");
                return;
            }
            s.push_str("{\n");
            for (i, (k, x)) in o.iter().enumerate() {
                pad(s, indent + 2);
                s.push_str(&Value::String(k.clone()).to_string());
                s.push_str(": ");
                write_value(s, x, indent + 2);
                s.push_str(if i + 1 < o.len() { ",\n" } else { "\n" });
            }
            pad(s, indent);
            s.push('}');
        }
    }
}
