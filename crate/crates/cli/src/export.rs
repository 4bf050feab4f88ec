//! Circuit file formats: a lossless JSON gate list and OpenQASM 2.0.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::str::FromStr;

use rus_core::circuit::{Circuit, Gate, GateKind};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("unknown format '{0}' (expected json or qasm)")]
    UnknownFormat(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid gate #{index}: {reason}")]
    Gate { index: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Qasm,
}

impl FromStr for Format {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "qasm" => Ok(Format::Qasm),
            other => Err(FormatError::UnknownFormat(other.into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateJson {
    pub kind: String,
    pub qubits: Vec<u8>,
}

impl From<&Gate> for GateJson {
    fn from(g: &Gate) -> Self {
        Self {
            kind: g.kind().name().to_string(),
            qubits: g.qubits().to_vec(),
        }
    }
}

pub fn gates_to_json(gates: &[Gate]) -> Vec<GateJson> {
    gates.iter().map(GateJson::from).collect()
}

pub fn gates_from_json(gates: &[GateJson]) -> Result<Vec<Gate>, FormatError> {
    gates
        .iter()
        .enumerate()
        .map(|(index, g)| {
            let kind: GateKind = g.kind.parse().map_err(|e| FormatError::Gate {
                index,
                reason: format!("{e}"),
            })?;
            Gate::new(kind, &g.qubits).map_err(|e| FormatError::Gate {
                index,
                reason: format!("{e}"),
            })
        })
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct CircuitJson {
    gates: Vec<GateJson>,
    #[serde(default)]
    name: String,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
}

pub fn circuit_to_json(c: &Circuit) -> String {
    let doc = CircuitJson {
        gates: gates_to_json(&c.gates),
        name: c.name.clone(),
        metadata: c.metadata.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

pub fn circuit_from_json(text: &str) -> Result<Circuit, FormatError> {
    let doc: CircuitJson = serde_json::from_str(text)?;
    Ok(Circuit {
        gates: gates_from_json(&doc.gates)?,
        name: doc.name,
        metadata: doc.metadata,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QasmOptions {
    /// Emit `cs`/`csdg` as gate definitions instead of expanding each use.
    pub named_cs: bool,
    /// Reset the ancilla first and measure it into `c[0]` at the end.
    pub rus_wrapper: bool,
}

// CS = (T ⊗ T)·CX·(I ⊗ T†)·CX: the T phases sum to i on |11⟩ and cancel elsewhere
const CS_BODY: &str = "t a; t b; cx a,b; tdg b; cx a,b;";
const CSDG_BODY: &str = "tdg a; tdg b; cx a,b; t b; cx a,b;";

/// OpenQASM 2.0 text for `c`, with `q[0]` the ancilla and `q[1]` the data
/// qubit. The global phase is dropped.
pub fn to_qasm(c: &Circuit, opts: QasmOptions) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    if opts.named_cs {
        writeln!(out, "gate cs a,b {{ {CS_BODY} }}").unwrap();
        writeln!(out, "gate csdg a,b {{ {CSDG_BODY} }}").unwrap();
    }
    out.push_str("qreg q[2];\ncreg c[1];\n");
    if opts.rus_wrapper {
        out.push_str("reset q[0];\n");
    }
    for g in &c.gates {
        let q = g.qubits();
        let simple = match g.kind() {
            GateKind::H => Some("h"),
            GateKind::S => Some("s"),
            GateKind::Sdg => Some("sdg"),
            GateKind::X => Some("x"),
            GateKind::Z => Some("z"),
            GateKind::CZ => Some("cz"),
            GateKind::CNOT => Some("cx"),
            GateKind::SWAP => Some("swap"),
            GateKind::CS | GateKind::CSdg => None,
        };
        if let Some(name) = simple {
            let args: Vec<String> = q.iter().map(|i| format!("q[{i}]")).collect();
            writeln!(out, "{name} {};", args.join(",")).unwrap();
            continue;
        }
        let (a, b) = (format!("q[{}]", q[0]), format!("q[{}]", q[1]));
        let dagger = g.kind() == GateKind::CSdg;
        if opts.named_cs {
            writeln!(out, "{} {a},{b};", if dagger { "csdg" } else { "cs" }).unwrap();
        } else {
            let (t, tdg) = if dagger { ("tdg", "t") } else { ("t", "tdg") };
            write!(out, "{t} {a};\n{t} {b};\ncx {a},{b};\n{tdg} {b};\ncx {a},{b};\n").unwrap();
        }
    }
    if opts.rus_wrapper {
        out.push_str("measure q[0] -> c[0];\n");
    }
    out
}

pub fn export(c: &Circuit, format: Format, qasm: QasmOptions) -> String {
    match format {
        Format::Json => circuit_to_json(c),
        Format::Qasm => to_qasm(c, qasm),
    }
}
