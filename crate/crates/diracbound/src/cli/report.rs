//! Report serialization. JSON reports promise bit-identical bytes for
//! identical config + seed, so every float is emitted as a fixed-width
//! decimal string and all maps iterate in key order.

use crate::cli::config::{OutputFormat, RunConfig};
use crate::error::Result;
use serde_json::{json, Map, Value};

pub fn fnum(x: f64) -> Value {
    Value::String(format!("{x:.17e}"))
}

pub struct Report {
    pub kind: String,
    pub tolerance: f64,
    pub results: Vec<Value>,
    pub extra: Map<String, Value>,
}

impl Report {
    pub fn new(kind: &str, tolerance: f64) -> Self {
        Report { kind: kind.to_string(), tolerance, results: Vec::new(), extra: Map::new() }
    }

    pub fn push(&mut self, v: Value) {
        self.results.push(v);
    }

    pub fn to_json(&self, config: &RunConfig) -> Value {
        let mut cfg = Map::new();
        for (k, v) in &config.echo {
            cfg.insert(k.clone(), Value::String(v.clone()));
        }
        let mut root = Map::new();
        root.insert("kind".into(), Value::String(self.kind.clone()));
        root.insert("version".into(), Value::String(env!("CARGO_PKG_VERSION").into()));
        root.insert("config".into(), Value::Object(cfg));
        root.insert("tolerance".into(), fnum(self.tolerance));
        for (k, v) in &self.extra {
            root.insert(k.clone(), v.clone());
        }
        root.insert("results".into(), Value::Array(self.results.clone()));
        Value::Object(root)
    }

    /// CSV: header from the first record's keys (sorted), floats at 17
    /// significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let Some(first) = self.results.first() else { return out };
        let keys: Vec<String> = match first {
            Value::Object(m) => m.keys().cloned().collect(),
            _ => return out,
        };
        out.push_str(&keys.join(","));
        out.push('\n');
        for rec in &self.results {
            let Value::Object(m) = rec else { continue };
            let row: Vec<String> = keys
                .iter()
                .map(|k| match m.get(k) {
                    Some(Value::String(s)) => s.clone(),
                    Some(Value::Number(n)) => {
                        if let Some(f) = n.as_f64() {
                            if n.is_i64() || n.is_u64() {
                                format!("{}", n)
                            } else {
                                format!("{f:.16e}")
                            }
                        } else {
                            n.to_string()
                        }
                    }
                    Some(Value::Bool(b)) => b.to_string(),
                    Some(v) => v.to_string(),
                    None => String::new(),
                })
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, config: &RunConfig) -> Result<()> {
        let text = match config.format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json(config)).unwrap();
                s.push('\n');
                s
            }
            OutputFormat::Csv => self.to_csv(),
        };
        match &config.out {
            None => {
                print!("{text}");
                Ok(())
            }
            Some(path) if path == "-" => {
                print!("{text}");
                Ok(())
            }
            Some(path) => {
                std::fs::write(path, text)?;
                Ok(())
            }
        }
    }
}

pub fn spectrum_record(e: &crate::spectrum::SpectrumEntry, oracle: &str) -> Value {
    json!({
        "lambda_re": fnum(e.lambda_re),
        "lambda_im": fnum(e.lambda_im),
        "multiplicity": e.multiplicity,
        "mode": e.mode,
        "residual": fnum(e.residual),
        "non_discrete": e.non_discrete,
        "oracle": oracle,
    })
}
