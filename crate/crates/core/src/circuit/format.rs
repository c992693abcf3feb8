//! Line-oriented JSON circuit files (`.qc.json`).
//!
//! ```text
//! {
//!   "n_qubits": 3,
//!   "name": "example",
//!   "metadata": {},
//!   "ops": [
//!     {"kind":"Pulse","qubits":[0],"angle":"pi/2"},
//!     {"kind":"GlobalG","qubits":[0,1,2],"angle":"pi/4"}
//!   ]
//! }
//! ```
//!
//! Angles are strings holding either an exact π multiple or a decimal;
//! plain JSON numbers are accepted on input.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Circuit;
use crate::angle::{format_angle, parse_angle};
use crate::error::{Error, Result};
use crate::gates::{Couplings, GateKind, GateOp};

pub const CIRCUIT_FILE_EXTENSION: &str = "qc.json";

#[derive(Serialize)]
struct OpOut<'a> {
    kind: &'static str,
    qubits: &'a [usize],
    #[serde(skip_serializing_if = "Option::is_none")]
    angle: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    couplings: Option<Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AngleIn {
    Token(String),
    Number(f64),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OpIn {
    kind: String,
    qubits: Vec<i64>,
    #[serde(default)]
    angle: Option<AngleIn>,
    #[serde(default)]
    couplings: Option<Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DocIn {
    n_qubits: usize,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
    ops: Vec<OpIn>,
}

pub fn serialize(c: &Circuit) -> String {
    let mut s = String::from("{\n");
    s.push_str(&format!("  \"n_qubits\": {},\n", c.n_qubits));
    if let Some(name) = &c.name {
        s.push_str(&format!("  \"name\": {},\n", serde_json::to_string(name).expect("string")));
    }
    s.push_str(&format!(
        "  \"metadata\": {},\n",
        serde_json::to_string(&c.metadata).expect("string map")
    ));
    s.push_str("  \"ops\": [");
    for (i, op) in c.ops.iter().enumerate() {
        let out = OpOut {
            kind: op.kind.name(),
            qubits: &op.qubits,
            angle: op.angle.map(format_angle),
            couplings: op.couplings.as_ref().map(Couplings::rows),
        };
        s.push_str(if i == 0 { "\n    " } else { ",\n    " });
        s.push_str(&serde_json::to_string(&out).expect("op"));
    }
    s.push_str(if c.ops.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
    s
}

pub fn parse(text: &str) -> Result<Circuit> {
    let doc: DocIn = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let op_lines = op_start_lines(text);
    let loc = |i: usize| match op_lines.get(i) {
        Some(line) => format!("ops[{i}] (line {line})"),
        None => format!("ops[{i}]"),
    };
    let mut circuit = Circuit::new(doc.n_qubits)
        .map_err(|e| Error::Parse { location: "n_qubits".into(), message: e.to_string() })?;
    circuit.name = doc.name;
    circuit.metadata = doc.metadata;
    for (i, raw) in doc.ops.into_iter().enumerate() {
        let fail = |message: String| Error::Parse { location: loc(i), message };
        let kind: GateKind =
            raw.kind.parse().map_err(|_| fail(format!("unknown gate kind \"{}\"", raw.kind)))?;
        let qubits = raw
            .qubits
            .iter()
            .map(|&q| {
                usize::try_from(q)
                    .ok()
                    .filter(|&q| q < circuit.n_qubits)
                    .ok_or_else(|| fail(format!("bad qubit index {q}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let angle = match raw.angle {
            None => None,
            Some(AngleIn::Number(x)) => Some(x),
            Some(AngleIn::Token(t)) => Some(parse_angle(&t).map_err(|e| fail(e.to_string()))?),
        };
        let couplings =
            raw.couplings.map(Couplings::new).transpose().map_err(|e| fail(e.to_string()))?;
        let op = GateOp { kind, qubits, angle, couplings };
        circuit.push(op).map_err(|e| fail(e.to_string()))?;
    }
    Ok(circuit)
}

/// 1-based line numbers at which each element of the top-level `ops` array opens.
fn op_start_lines(text: &str) -> Vec<usize> {
    let mut lines = Vec::new();
    let mut line = 1;
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    let mut last_key = String::new();
    let mut current = String::new();
    let mut ops_depth: Option<usize> = None;
    for ch in text.chars() {
        if ch == '\n' {
            line += 1;
        }
        if in_string {
            if escaped {
                escaped = false;
            } else if ch == '\\' {
                escaped = true;
            } else if ch == '"' {
                in_string = false;
                last_key = std::mem::take(&mut current);
            } else {
                current.push(ch);
            }
            continue;
        }
        match ch {
            '"' => in_string = true,
            '[' => {
                if depth == 1 && last_key == "ops" {
                    ops_depth = Some(depth + 1);
                }
                depth += 1;
            }
            '{' => {
                if ops_depth == Some(depth) {
                    lines.push(line);
                }
                depth += 1;
            }
            ']' | '}' => {
                depth = depth.saturating_sub(1);
                if ops_depth.is_some_and(|d| depth < d) {
                    ops_depth = None;
                }
            }
            _ => {}
        }
    }
    lines
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample() -> Circuit {
        let mut c = Circuit::from_ops(
            3,
            [
                GateOp::p(0),
                GateOp::global_g([0, 1, 2], PI / 8.0),
                GateOp::phase(1, 0.123456789),
                GateOp::coupling_u(vec![0, 1, 2], Couplings::uniform(3, 0.7), 1.1),
            ],
        )
        .unwrap()
        .with_name("sample");
        c.metadata.insert("note".into(), "x".into());
        c
    }

    #[test]
    fn one_op_per_line() {
        let text = serialize(&sample());
        assert!(text.contains("{\"kind\":\"GlobalG\",\"qubits\":[0,1,2],\"angle\":\"pi/8\"}"));
        assert_eq!(op_start_lines(&text), vec![6, 7, 8, 9]);
    }

    #[test]
    fn round_trip() {
        let c = sample();
        assert_eq!(parse(&serialize(&c)).unwrap(), c);
        let empty = Circuit::new(2).unwrap();
        assert_eq!(parse(&serialize(&empty)).unwrap(), empty);
    }

    #[test]
    fn unknown_kind_reports_location() {
        let text = "{\n \"n_qubits\": 2,\n \"ops\": [\n  {\"kind\":\"Pulse\",\"qubits\":[0],\"angle\":\"pi\"},\n  {\"kind\":\"XX\",\"qubits\":[0,1]}\n ]\n}";
        match parse(text) {
            Err(Error::Parse { location, message }) => {
                assert!(message.contains("unknown gate kind"), "{message}");
                assert_eq!(location, "ops[1] (line 5)");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_index_and_syntax() {
        let bad_q = r#"{"n_qubits": 2, "ops": [{"kind":"PauliX","qubits":[2]}]}"#;
        assert!(matches!(parse(bad_q), Err(Error::Parse { .. })));
        let neg = r#"{"n_qubits": 2, "ops": [{"kind":"PauliX","qubits":[-1]}]}"#;
        assert!(parse(neg).unwrap_err().to_string().contains("bad qubit index"));
        let syntax = "{\"n_qubits\": 2, \"ops\": [";
        assert!(parse(syntax).unwrap_err().to_string().contains("line 1"));
        let numeric = r#"{"n_qubits": 1, "ops": [{"kind":"Phase","qubits":[0],"angle":0.5}]}"#;
        assert_eq!(parse(numeric).unwrap().ops()[0].angle, Some(0.5));
        let missing = r#"{"n_qubits": 1, "ops": [{"kind":"Phase","qubits":[0]}]}"#;
        assert!(parse(missing).is_err());
    }
}
