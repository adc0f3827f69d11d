//! Channel file format: a JSON document per machine.
//!
//! Fields: `kind` ("erasure" or "additive"), `q`, `states` (array of names,
//! whose order fixes the state indices), and `edges` referencing states by
//! name. Round-trips losslessly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::{ChannelKind, ChannelMachine, Edge, MachineError};

#[derive(Debug, Serialize, Deserialize)]
struct FileEdge {
    from: String,
    to: String,
    noise: u8,
}

#[derive(Debug, Serialize, Deserialize)]
struct ChannelFile {
    kind: String,
    q: u8,
    states: Vec<String>,
    edges: Vec<FileEdge>,
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed channel file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown channel kind {0:?}, expected \"erasure\" or \"additive\"")]
    UnknownKind(String),
    #[error("edge references unknown state {0:?}")]
    UnknownState(String),
    #[error(transparent)]
    Invalid(#[from] MachineError),
}

/// Serializes a machine to the channel file format.
pub fn to_json(machine: &ChannelMachine) -> String {
    let kind = match machine.kind() {
        ChannelKind::Erasure => "erasure",
        ChannelKind::AdditiveNoise => "additive",
    };
    let file = ChannelFile {
        kind: kind.to_string(),
        q: machine.q(),
        states: machine.state_names().to_vec(),
        edges: machine
            .edges()
            .iter()
            .map(|e| FileEdge {
                from: machine.state_name(e.from).to_string(),
                to: machine.state_name(e.to).to_string(),
                noise: e.noise,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("channel file serializes")
}

/// Parses and validates a machine from the channel file format.
pub fn from_json(text: &str) -> Result<ChannelMachine, FormatError> {
    let file: ChannelFile = serde_json::from_str(text)?;
    let kind = match file.kind.as_str() {
        "erasure" => ChannelKind::Erasure,
        "additive" => ChannelKind::AdditiveNoise,
        other => return Err(FormatError::UnknownKind(other.to_string())),
    };
    let index_of = |name: &str| {
        file.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| FormatError::UnknownState(name.to_string()))
    };
    let mut edges = Vec::with_capacity(file.edges.len());
    for e in &file.edges {
        edges.push(Edge {
            from: index_of(&e.from)?,
            to: index_of(&e.to)?,
            noise: e.noise,
        });
    }
    Ok(ChannelMachine::new(kind, file.q, file.states, edges)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_sliding_window_erasure, SlidingWindowSpec};
    use crate::machine::no_consecutive_ones;

    #[test]
    fn round_trip_preserves_the_machine() {
        let spec = SlidingWindowSpec::new(3, 1, 2).unwrap();
        let m = build_sliding_window_erasure(spec);
        let text = to_json(&m);
        let back = from_json(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn state_order_fixes_indices() {
        let m = no_consecutive_ones(ChannelKind::Erasure, 2);
        let text = to_json(&m);
        let back = from_json(&text).unwrap();
        assert_eq!(back.state_name(0), "s1");
        assert_eq!(back.state_name(1), "s2");
    }

    #[test]
    fn unknown_kind_is_rejected() {
        let text = r#"{"kind":"fuzzy","q":2,"states":["s"],"edges":[{"from":"s","to":"s","noise":0}]}"#;
        assert!(matches!(from_json(text), Err(FormatError::UnknownKind(_))));
    }

    #[test]
    fn unknown_state_reference_is_rejected() {
        let text = r#"{"kind":"erasure","q":2,"states":["s"],"edges":[{"from":"s","to":"t","noise":0}]}"#;
        assert!(matches!(from_json(text), Err(FormatError::UnknownState(_))));
    }

    #[test]
    fn invalid_machine_is_rejected_on_load() {
        let text = r#"{"kind":"erasure","q":2,"states":["a","b"],"edges":[
            {"from":"a","to":"a","noise":0},
            {"from":"a","to":"b","noise":1}
        ]}"#;
        assert!(matches!(from_json(text), Err(FormatError::Invalid(_))));
    }
}
