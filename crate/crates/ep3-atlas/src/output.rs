//! JSON and CSV serialization helpers. One convention each: complex
//! numbers are `[re, im]` pairs in JSON and split `re_*`/`im_*` column
//! pairs in CSV, never mixed.

use ep3_core::jordan::JordanChain;
use ep3_core::linalg::ComplexVector;
use ep3_core::{Complex64, CoreError};
use serde_json::{json, Value};

pub fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn complex_list(zs: &[Complex64]) -> Value {
    Value::Array(zs.iter().map(|&z| complex(z)).collect())
}

pub fn vector(v: &ComplexVector) -> Value {
    complex_list(v.as_slice())
}

/// `slope` may legitimately be infinite (a branch pinned at the EP value);
/// JSON numbers cannot carry infinities, so those become `null`.
pub fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn chain_json(chain: &JordanChain) -> Value {
    json!({
        "lambda0": complex(chain.lambda0),
        "length": chain.length(),
        "vectors": Value::Array(chain.vectors.iter().map(vector).collect()),
        "residuals": Value::Array(
            chain
                .condition_report
                .entries
                .iter()
                .map(|(name, value)| json!({ "name": name, "value": value }))
                .collect(),
        ),
        "max_residual": chain.condition_report.max_residual(),
    })
}

fn error_kind(err: &CoreError) -> &'static str {
    match err {
        CoreError::InvalidInput(_) => "InvalidInput",
        CoreError::NonConvergence { .. } => "NonConvergence",
        CoreError::Singular { .. } => "Singular",
        CoreError::AmbiguousStructure { .. } => "AmbiguousStructure",
        CoreError::ChainBreaks { .. } => "ChainBreaks",
        CoreError::DegenerateNormalization { .. } => "DegenerateNormalization",
        CoreError::EpOnPath { .. } => "EpOnPath",
        CoreError::MatchingAmbiguous { .. } => "MatchingAmbiguous",
        CoreError::InconsistentCycles { .. } => "InconsistentCycles",
        CoreError::WrongOrder { .. } => "WrongOrder",
    }
}

/// Machine-readable error payload emitted on stdout for exit codes 2 and 3.
pub fn error_json(err: &CoreError) -> String {
    json!({
        "error": {
            "kind": error_kind(err),
            "message": err.to_string(),
        }
    })
    .to_string()
}

/// Pretty JSON with a trailing newline (byte-identical across reruns).
pub fn render(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report values serialize");
    text.push('\n');
    text
}

/// Write a JSON report to `<prefix>.json`, or to stdout without a prefix.
pub fn emit_json(out: &Option<String>, value: &Value) -> std::io::Result<()> {
    let text = render(value);
    match out {
        Some(prefix) => std::fs::write(format!("{prefix}.json"), text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
