//! Report envelope shared by all subcommands.
//!
//! Everything except `timestamp` is a function of the inputs and flags, so
//! two runs with the same seed differ only on that line.

use std::time::SystemTime;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const TOOL: &str = "weavelab";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    /// Path or `gallery:<name>:<d>` as given.
    pub source: String,
    /// SHA-256 of the file bytes, or of the generated file for gallery inputs.
    pub sha256: String,
}

impl InputRecord {
    pub fn new(source: impl Into<String>, bytes: &[u8]) -> Self {
        InputRecord { source: source.into(), sha256: hex::encode(Sha256::digest(bytes)) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub inputs: Vec<InputRecord>,
    pub parameters: Value,
    pub result: Value,
    pub timestamp: String,
}

impl Report {
    pub fn new(command: &str, inputs: Vec<InputRecord>, parameters: Value, result: Value) -> Self {
        Report {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            inputs,
            parameters,
            result,
            timestamp: humantime::format_rfc3339_seconds(SystemTime::now()).to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports hold plain data");
        s.push('\n');
        s
    }
}

/// Two-column CSV `d,constant` for growth tables; non-finite values as `inf`/`nan`.
pub fn growth_csv(header: &str, rows: &[(usize, f64)]) -> String {
    let mut out = format!("d,{header}\n");
    for (d, v) in rows {
        let v = if v.is_finite() { format!("{v}") } else if v.is_nan() { "nan".into() } else if *v > 0.0 { "inf".into() } else { "-inf".into() };
        out.push_str(&format!("{d},{v}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_fields() {
        let r = Report::new("analyze", vec![InputRecord::new("a.json", b"abc")], Value::Null, Value::Bool(true));
        assert_eq!(r.inputs[0].sha256, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn csv_rows() {
        assert_eq!(growth_csv("worst", &[(2, 2.0), (3, f64::INFINITY)]), "d,worst\n2,2\n3,inf\n");
    }
}
