// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Labelled ZX diagrams: spiders, Hadamard nodes, and ordered open wires.
//!
//! Edges form a multiset, so self-loops and parallel edges can be written
//! down; [`crate::graphlike`] is responsible for removing them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::Phase;

/// Prefix reserved for labels generated by rewrites.
pub const FRESH_PREFIX: char = '_';

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Z,
    X,
    H,
}

impl NodeKind {
    pub fn is_spider(self) -> bool {
        !matches!(self, NodeKind::H)
    }

    /// The other spider colour. `H` maps to itself.
    pub fn opposite(self) -> NodeKind {
        match self {
            NodeKind::Z => NodeKind::X,
            NodeKind::X => NodeKind::Z,
            NodeKind::H => NodeKind::H,
        }
    }

    fn tag(self) -> &'static str {
        match self {
            NodeKind::Z => "Z",
            NodeKind::X => "X",
            NodeKind::H => "H",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZXNode {
    pub kind: NodeKind,
    pub phase: Phase,
}

/// An open wire: `wire` is its identifier, `node` the node it attaches to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wire {
    pub wire: String,
    pub node: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZXDiagram {
    pub nodes: BTreeMap<String, ZXNode>,
    pub edges: Vec<(String, String)>,
    pub inputs: Vec<Wire>,
    pub outputs: Vec<Wire>,
    pub scalar: Complex64,
}

impl Default for ZXDiagram {
    fn default() -> Self {
        ZXDiagram {
            nodes: BTreeMap::new(),
            edges: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            scalar: Complex64::new(1.0, 0.0),
        }
    }
}

/// A list of problems found by a validator. Empty means valid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport<V> {
    pub violations: Vec<V>,
}

impl<V> ValidationReport<V> {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl<V> Default for ValidationReport<V> {
    fn default() -> Self {
        ValidationReport {
            violations: Vec::new(),
        }
    }
}

impl<V: fmt::Display> fmt::Display for ValidationReport<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZXViolation {
    EmptyLabel,
    DanglingEdge { a: String, b: String, missing: String },
    DanglingWire { wire: String, node: String },
    DuplicateWire(String),
    WireLabelClash(String),
    HadamardPhase(String),
    HadamardDegree { node: String, degree: usize },
}

impl fmt::Display for ZXViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZXViolation::EmptyLabel => write!(f, "node with empty label"),
            ZXViolation::DanglingEdge { a, b, missing } => {
                write!(f, "edge {a}-{b} references unknown node `{missing}`")
            }
            ZXViolation::DanglingWire { wire, node } => {
                write!(f, "wire `{wire}` is dangling: no node `{node}` to attach to")
            }
            ZXViolation::DuplicateWire(w) => write!(f, "wire id `{w}` is used more than once"),
            ZXViolation::WireLabelClash(w) => {
                write!(f, "wire id `{w}` coincides with a node label")
            }
            ZXViolation::HadamardPhase(n) => write!(f, "Hadamard node `{n}` carries a phase"),
            ZXViolation::HadamardDegree { node, degree } => write!(
                f,
                "Hadamard node `{node}` has degree {degree}, the degree invariant requires 2"
            ),
        }
    }
}

impl ZXDiagram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, label: impl Into<String>, kind: NodeKind, phase: Phase) -> &mut Self {
        self.nodes.insert(label.into(), ZXNode { kind, phase });
        self
    }

    pub fn add_z(&mut self, label: impl Into<String>, phase: Phase) -> &mut Self {
        self.add_node(label, NodeKind::Z, phase)
    }

    pub fn add_x(&mut self, label: impl Into<String>, phase: Phase) -> &mut Self {
        self.add_node(label, NodeKind::X, phase)
    }

    pub fn add_h(&mut self, label: impl Into<String>) -> &mut Self {
        self.add_node(label, NodeKind::H, Phase::ZERO)
    }

    pub fn add_edge(&mut self, a: impl Into<String>, b: impl Into<String>) -> &mut Self {
        self.edges.push((a.into(), b.into()));
        self
    }

    pub fn add_input(&mut self, wire: impl Into<String>, node: impl Into<String>) -> &mut Self {
        self.inputs.push(Wire {
            wire: wire.into(),
            node: node.into(),
        });
        self
    }

    pub fn add_output(&mut self, wire: impl Into<String>, node: impl Into<String>) -> &mut Self {
        self.outputs.push(Wire {
            wire: wire.into(),
            node: node.into(),
        });
        self
    }

    /// Edge incidences plus attached open wires; a self-loop counts twice.
    pub fn degree(&self, label: &str) -> usize {
        let mut d = 0;
        for (a, b) in &self.edges {
            if a == label {
                d += 1;
            }
            if b == label {
                d += 1;
            }
        }
        d + self.wire_count(label)
    }

    pub fn wire_count(&self, label: &str) -> usize {
        self.inputs
            .iter()
            .chain(self.outputs.iter())
            .filter(|w| w.node == label)
            .count()
    }

    /// A label starting with [`FRESH_PREFIX`] not used by any node or wire.
    pub fn fresh_label(&self, stem: &str, counter: &mut usize) -> String {
        loop {
            let candidate = format!("{FRESH_PREFIX}{stem}{}", *counter);
            *counter += 1;
            let clash = self.nodes.contains_key(&candidate)
                || self
                    .inputs
                    .iter()
                    .chain(self.outputs.iter())
                    .any(|w| w.wire == candidate);
            if !clash {
                return candidate;
            }
        }
    }

    pub fn validate(&self) -> ValidationReport<ZXViolation> {
        let mut report = ValidationReport::default();
        let v = &mut report.violations;
        if self.nodes.keys().any(|l| l.is_empty()) {
            v.push(ZXViolation::EmptyLabel);
        }
        for (a, b) in &self.edges {
            for end in [a, b] {
                if !self.nodes.contains_key(end) {
                    v.push(ZXViolation::DanglingEdge {
                        a: a.clone(),
                        b: b.clone(),
                        missing: end.clone(),
                    });
                    break;
                }
            }
        }
        let mut seen = BTreeSet::new();
        for w in self.inputs.iter().chain(self.outputs.iter()) {
            if !self.nodes.contains_key(&w.node) {
                v.push(ZXViolation::DanglingWire {
                    wire: w.wire.clone(),
                    node: w.node.clone(),
                });
            }
            if !seen.insert(w.wire.as_str()) {
                v.push(ZXViolation::DuplicateWire(w.wire.clone()));
            }
            if self.nodes.contains_key(&w.wire) {
                v.push(ZXViolation::WireLabelClash(w.wire.clone()));
            }
        }
        for (label, node) in &self.nodes {
            if node.kind == NodeKind::H {
                if !node.phase.is_zero() {
                    v.push(ZXViolation::HadamardPhase(label.clone()));
                }
                let degree = self.degree(label);
                if degree != 2 {
                    v.push(ZXViolation::HadamardDegree {
                        node: label.clone(),
                        degree,
                    });
                }
            }
        }
        report
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidDiagram(report.to_string()))
        }
    }

    /// Parses the `.zx.json` format. Hadamard-edge sugar is expanded into
    /// explicit `H` nodes with fresh labels.
    pub fn from_json(text: &str) -> Result<ZXDiagram> {
        let repr: DiagramRepr = serde_json::from_str(text)?;
        let mut d = ZXDiagram::new();
        for (i, n) in repr.nodes.iter().enumerate() {
            let kind = match n.kind.as_str() {
                "Z" => NodeKind::Z,
                "X" => NodeKind::X,
                "H" => NodeKind::H,
                other => {
                    return Err(Error::parse(
                        format!("nodes[{i}].kind"),
                        format!("unknown node kind `{other}`"),
                    ))
                }
            };
            let phase = n.phase.unwrap_or_default();
            if kind == NodeKind::H && !phase.is_zero() {
                return Err(Error::parse(
                    format!("nodes[{i}].phase"),
                    "Hadamard nodes carry no phase",
                ));
            }
            if d.nodes.insert(n.id.clone(), ZXNode { kind, phase }).is_some() {
                return Err(Error::parse(
                    format!("nodes[{i}].id"),
                    format!("duplicate node id `{}`", n.id),
                ));
            }
        }
        d.inputs = repr.inputs;
        d.outputs = repr.outputs;
        if let Some(s) = repr.scalar {
            d.scalar = Complex64::new(s.re, s.im);
        }
        let mut counter = 0;
        for (i, e) in repr.edges.iter().enumerate() {
            match e.as_slice() {
                [a, b] => {
                    d.edges.push((a.clone(), b.clone()));
                }
                [a, b, tag] if tag == "h" => {
                    let h = d.fresh_label("h", &mut counter);
                    d.nodes.insert(
                        h.clone(),
                        ZXNode {
                            kind: NodeKind::H,
                            phase: Phase::ZERO,
                        },
                    );
                    d.edges.push((a.clone(), h.clone()));
                    d.edges.push((h, b.clone()));
                }
                _ => {
                    return Err(Error::parse(
                        format!("edges[{i}]"),
                        "expected [a, b] or [a, b, \"h\"]",
                    ))
                }
            }
        }
        Ok(d)
    }

    /// Canonical `.zx.json` text: nodes sorted by label, edges in stored
    /// order, pretty-printed with a trailing newline.
    pub fn to_json(&self) -> String {
        let repr = DiagramRepr {
            nodes: self
                .nodes
                .iter()
                .map(|(id, n)| NodeRepr {
                    id: id.clone(),
                    kind: n.kind.tag().to_string(),
                    phase: n.kind.is_spider().then_some(n.phase),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|(a, b)| vec![a.clone(), b.clone()])
                .collect(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            scalar: Some(ScalarRepr {
                re: self.scalar.re,
                im: self.scalar.im,
            }),
        };
        let mut s = serde_json::to_string_pretty(&repr).expect("diagram serializes");
        s.push('\n');
        s
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeRepr {
    id: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phase: Option<Phase>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct ScalarRepr {
    pub re: f64,
    pub im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagramRepr {
    nodes: Vec<NodeRepr>,
    #[serde(default)]
    edges: Vec<Vec<String>>,
    #[serde(default)]
    inputs: Vec<Wire>,
    #[serde(default)]
    outputs: Vec<Wire>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scalar: Option<ScalarRepr>,
}
