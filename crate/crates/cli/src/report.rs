//! Report assembly and rendering.

use arboreal::algebra::ratio_string;
use arboreal::forest::MeasureValue;
use arboreal::{BetaPolynomial, Rational};
use clap::ValueEnum;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SIZE: i32 = 3;

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub struct Report {
    pub command: &'static str,
    pub input: Value,
    pub params: Map<String, Value>,
    pub results: Value,
    pub verdicts: Value,
    pub witnesses: Value,
    pub table: Option<Table>,
    /// Preferred text rendering; results are flattened otherwise.
    pub text: Option<String>,
    pub code: i32,
}

impl Report {
    pub fn new(command: &'static str, input: Value) -> Self {
        Report {
            command,
            input,
            params: Map::new(),
            results: Value::Null,
            verdicts: json!({}),
            witnesses: json!([]),
            table: None,
            text: None,
            code: EXIT_OK,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    pub fn json(&self, timing_ms: u64) -> Value {
        json!({
            "command": self.command,
            "input": self.input,
            "params": self.params,
            "results": self.results,
            "verdicts": self.verdicts,
            "witnesses": self.witnesses,
            "timing_ms": timing_ms,
            "version": env!("CARGO_PKG_VERSION"),
        })
    }

    pub fn render(&self, format: Format, timing_ms: u64) -> Result<String, String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(&self.json(timing_ms)).expect("json values serialize") + "\n"),
            Format::Csv => {
                let table = self
                    .table
                    .as_ref()
                    .ok_or_else(|| format!("csv output is not available for `{}`; use json or text", self.command))?;
                let mut out = table.header.join(",") + "\n";
                for row in &table.rows {
                    let cells: Vec<String> = row.iter().map(|c| csv_cell(c)).collect();
                    out += &(cells.join(",") + "\n");
                }
                Ok(out)
            }
            Format::Text => Ok(match &self.text {
                Some(t) => t.clone(),
                None => {
                    let mut lines = Vec::new();
                    flatten("", &self.results, &mut lines);
                    flatten("verdict", &self.verdicts, &mut lines);
                    lines.join("\n") + "\n"
                }
            }),
        }
    }
}

fn csv_cell(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        Value::Null => {}
        Value::String(s) => out.push(format!("{prefix}: {s}")),
        other => out.push(format!("{prefix}: {other}")),
    }
}

pub fn exact(x: &Rational) -> Value {
    Value::String(ratio_string(x))
}

pub fn polynomial(p: &BetaPolynomial) -> Value {
    json!({
        "coefficients": p.coeffs().iter().map(ratio_string).collect::<Vec<_>>(),
        "degree": p.degree(),
        "display": p.to_string(),
    })
}

pub fn measure(m: &MeasureValue) -> Value {
    match m {
        MeasureValue::Rational(x) => exact(x),
        MeasureValue::Polynomial(p) => polynomial(p),
    }
}

/// Scalar cell for csv: exact rational or the polynomial display form.
pub fn cell(m: &MeasureValue) -> String {
    match m {
        MeasureValue::Rational(x) => ratio_string(x),
        MeasureValue::Polynomial(p) => p.to_string(),
    }
}
