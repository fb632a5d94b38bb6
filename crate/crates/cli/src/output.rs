//! JSON helpers and the run manifest.

use std::fs;
use std::path::Path;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Finite numbers as JSON numbers; `NaN` and infinities as strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("NaN")
    } else if x > 0.0 {
        json!("Infinity")
    } else {
        json!("-Infinity")
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Command, resolved configuration, seed, input hashes and version.
pub fn manifest(command: &str, config: Value, seed: u64, inputs: &[&Path]) -> Result<Value, CliError> {
    let mut hashed = Vec::new();
    for p in inputs {
        hashed.push(json!({
            "path": p.display().to_string(),
            "sha256": sha256_file(p)?,
        }));
    }
    Ok(json!({
        "command": command,
        "config": config,
        "seed": seed,
        "inputs": hashed,
        "version": env!("CARGO_PKG_VERSION"),
    }))
}

/// Top-level object with the manifest and the encoding flag.
pub fn document(manifest: Value, body: Map<String, Value>) -> Value {
    let mut out = body;
    out.insert("manifest".into(), manifest);
    out.insert("nonfinite_as_strings".into(), Value::Bool(true));
    Value::Object(out)
}

pub fn emit(doc: &Value, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(doc).expect("values serialize");
    text.push('\n');
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
