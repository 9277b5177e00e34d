//! Report assembly and output: deterministic JSON (fixed field order, 15
//! significant digits) and flattened CSV.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::CliError;

/// Round to 15 significant digits so identical inputs print byte-identical
/// output regardless of how the value was computed.
pub fn sig15(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

pub fn num(x: f64) -> Value {
    match serde_json::Number::from_f64(sig15(x)) {
        Some(n) => Value::Number(n),
        None => Value::Null,
    }
}

pub fn vec3_value(v: torusphase::Vec3) -> Value {
    json!([num(v.x), num(v.y), num(v.z)])
}

/// A complete command report: echoed input, result fields, and run metadata.
pub struct Report {
    pub input: Value,
    pub result: Value,
    /// Top-level result keys holding angles, for the --degrees conversion.
    pub angle_keys: &'static [&'static str],
    pub meta: Value,
}

impl Report {
    /// Convert angle fields to degrees in place and record the unit.
    pub fn convert_to_degrees(&mut self) {
        let factor = 180.0 / std::f64::consts::PI;
        if let Value::Object(map) = &mut self.result {
            for key in self.angle_keys {
                if let Some(Value::Number(n)) = map.get(*key) {
                    if let Some(x) = n.as_f64() {
                        map.insert((*key).to_string(), num(x * factor));
                    }
                }
            }
        }
        if let Value::Object(meta) = &mut self.meta {
            meta.insert("angle_unit".into(), Value::String("deg".into()));
        }
    }

    pub fn to_value(&self) -> Value {
        json!({
            "input": self.input,
            "result": self.result,
            "meta": self.meta,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("report serializes")
    }

    /// Single-row CSV: flattened result keys as the header.
    pub fn to_csv_string(&self) -> String {
        let mut flat = Vec::new();
        flatten("", &self.result, &mut flat);
        let header: Vec<&str> = flat.iter().map(|(k, _)| k.as_str()).collect();
        let row: Vec<String> = flat.iter().map(|(_, v)| csv_cell(v)).collect();
        format!("{}\n{}\n", header.join(","), row.join(","))
    }
}

/// Depth-first flatten of a JSON value into (key, scalar) pairs, preserving
/// insertion order; nested keys join with '_', array indices append.
pub fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, Value)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}_{k}")
                };
                flatten(&key, v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}_{i}"), v, out);
            }
        }
        scalar => out.push((prefix.to_string(), scalar.clone())),
    }
}

pub fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => {
            if s.contains(',') || s.contains('"') || s.contains('\n') {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.clone()
            }
        }
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Shared metadata block: version, angle unit, and the pinned tolerances of
/// the numerical kernels.
pub fn meta_block(quad_rel_tol: f64, quad_panels: usize) -> Value {
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "angle_unit": "rad",
        "anholonomy_normalization": "raw_loop_integral_per_unit_angular_speed",
        "tolerances": {
            "quad_rel_tol": num(quad_rel_tol),
            "quad_panels": quad_panels,
            "ode_step_halving_rel": num(1e-6),
            "eigen_residual_rel": num(1e-8),
        },
    })
}

/// Write to the given path, or stdout when no path is set.
pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| {
            CliError::Io(format!("--out {}: {e}", path.display()))
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| {
                    if text.ends_with('\n') {
                        Ok(())
                    } else {
                        stdout.write_all(b"\n")
                    }
                })
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}
