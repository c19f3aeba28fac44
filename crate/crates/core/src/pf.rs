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

//! Annotated Pauli Fusion diagrams: data model, classical control,
//! time-ordering and branch substitution.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::Phase;
use crate::semantics::KrausOp;
use crate::zx::{NodeKind, ValidationReport, ZXDiagram};

/// Classical control `Θ(α, S, T) = [∏_{v∈S} (−1)^{s_v}] α + Σ_{w∈T} s_w π`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ThetaAnnotation {
    pub alpha: Phase,
    pub sign_set: BTreeSet<String>,
    pub shift_set: BTreeSet<String>,
}

impl ThetaAnnotation {
    pub fn constant(alpha: Phase) -> Self {
        ThetaAnnotation {
            alpha,
            ..Default::default()
        }
    }

    pub fn bits(&self) -> impl Iterator<Item = &String> {
        self.sign_set.iter().chain(self.shift_set.iter())
    }
}

/// Assignment of heralded and external bits.
pub type BranchString = BTreeMap<String, bool>;

pub fn theta(a: &ThetaAnnotation, bits: &BranchString) -> Result<Phase> {
    let get = |b: &String| bits.get(b).copied().ok_or_else(|| Error::MissingBit(b.clone()));
    let mut negate = false;
    for b in &a.sign_set {
        negate ^= get(b)?;
    }
    let mut out = if negate { -a.alpha } else { a.alpha };
    for b in &a.shift_set {
        if get(b)? {
            out = out + Phase::PI;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PFOp {
    SplitV,
    MergeV,
    RotV(ThetaAnnotation),
    SplitH,
    MergeH,
    RotH(ThetaAnnotation),
    InitV,
    InitH,
    Had,
    ProjV,
    ProjH,
    Swap,
}

impl PFOp {
    /// `(inputs, outputs)`.
    pub fn arity(&self) -> (usize, usize) {
        match self {
            PFOp::SplitV | PFOp::SplitH => (1, 2),
            PFOp::MergeV | PFOp::MergeH => (2, 1),
            PFOp::RotV(_) | PFOp::RotH(_) | PFOp::Had => (1, 1),
            PFOp::InitV | PFOp::InitH => (0, 1),
            PFOp::ProjV | PFOp::ProjH => (1, 0),
            PFOp::Swap => (2, 2),
        }
    }

    pub fn emits_bit(&self) -> bool {
        matches!(self, PFOp::MergeV | PFOp::MergeH | PFOp::ProjV | PFOp::ProjH)
    }

    pub fn annotation(&self) -> Option<&ThetaAnnotation> {
        match self {
            PFOp::RotV(a) | PFOp::RotH(a) => Some(a),
            _ => None,
        }
    }

    pub fn annotation_mut(&mut self) -> Option<&mut ThetaAnnotation> {
        match self {
            PFOp::RotV(a) | PFOp::RotH(a) => Some(a),
            _ => None,
        }
    }

    /// Colour of the spider this generator is drawn as.
    pub fn colour(&self) -> Option<NodeKind> {
        match self {
            PFOp::MergeH | PFOp::SplitH | PFOp::RotV(_) | PFOp::InitV | PFOp::ProjV => {
                Some(NodeKind::Z)
            }
            PFOp::MergeV | PFOp::SplitV | PFOp::RotH(_) | PFOp::InitH | PFOp::ProjH => {
                Some(NodeKind::X)
            }
            PFOp::Had | PFOp::Swap => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PFOp::SplitV => "SplitV",
            PFOp::MergeV => "MergeV",
            PFOp::RotV(_) => "RotV",
            PFOp::SplitH => "SplitH",
            PFOp::MergeH => "MergeH",
            PFOp::RotH(_) => "RotH",
            PFOp::InitV => "InitV",
            PFOp::InitH => "InitH",
            PFOp::Had => "Had",
            PFOp::ProjV => "ProjV",
            PFOp::ProjH => "ProjH",
            PFOp::Swap => "Swap",
        }
    }

    /// The physical operation once the rotation angle is resolved.
    pub fn kraus_op(&self, angle: Phase) -> KrausOp {
        match self {
            PFOp::SplitV => KrausOp::SplitV,
            PFOp::MergeV => KrausOp::MergeV,
            PFOp::RotV(_) => KrausOp::RotV(angle.to_radians()),
            PFOp::SplitH => KrausOp::SplitH,
            PFOp::MergeH => KrausOp::MergeH,
            PFOp::RotH(_) => KrausOp::RotH(angle.to_radians()),
            PFOp::InitV => KrausOp::InitV,
            PFOp::InitH => KrausOp::InitH,
            PFOp::Had => KrausOp::Had,
            PFOp::ProjV => KrausOp::ProjV,
            PFOp::ProjH => KrausOp::ProjH,
            PFOp::Swap => KrausOp::Swap,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Port {
    pub node: String,
    #[serde(default)]
    pub port: usize,
}

impl Port {
    pub fn new(node: impl Into<String>, port: usize) -> Self {
        Port {
            node: node.into(),
            port,
        }
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.node, self.port)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PFEdge {
    pub from: Port,
    pub to: Port,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PFWire {
    pub wire: String,
    pub node: String,
    #[serde(default)]
    pub port: usize,
}

impl PFWire {
    pub fn port(&self) -> Port {
        Port::new(self.node.clone(), self.port)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PFDiagram {
    pub nodes: BTreeMap<String, PFOp>,
    pub edges: Vec<PFEdge>,
    pub inputs: Vec<PFWire>,
    pub outputs: Vec<PFWire>,
    pub bits: BTreeSet<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PFViolation {
    UnknownNode(String),
    PortOutOfRange(Port),
    /// An input port fed zero or several times, or an output port used zero
    /// or several times.
    Arity { node: String, op: &'static str, detail: String },
    UndeclaredBit { node: String, bit: String },
    SilentBit(String),
    DuplicateWire(String),
}

impl fmt::Display for PFViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PFViolation::UnknownNode(n) => write!(f, "reference to unknown node `{n}`"),
            PFViolation::PortOutOfRange(p) => write!(f, "port {p} is out of range"),
            PFViolation::Arity { node, op, detail } => {
                write!(f, "arity of {op} node `{node}`: {detail}")
            }
            PFViolation::UndeclaredBit { node, bit } => {
                write!(f, "annotation of `{node}` references undeclared bit `{bit}`")
            }
            PFViolation::SilentBit(b) => {
                write!(f, "bit-emitting node `{b}` is missing from the bit set")
            }
            PFViolation::DuplicateWire(w) => write!(f, "wire id `{w}` is used more than once"),
        }
    }
}

/// Longest-path layering of the dependency graph, starting at 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimeOrdering {
    pub t: BTreeMap<String, u32>,
}

impl TimeOrdering {
    /// Node labels grouped by time step, in increasing time.
    pub fn layers(&self) -> Vec<Vec<String>> {
        let mut out: Vec<Vec<String>> = Vec::new();
        for (label, &t) in &self.t {
            let i = t as usize - 1;
            if out.len() <= i {
                out.resize(i + 1, Vec::new());
            }
            out[i].push(label.clone());
        }
        out
    }
}

impl PFDiagram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, label: impl Into<String>, op: PFOp) -> &mut Self {
        let label = label.into();
        if op.emits_bit() {
            self.bits.insert(label.clone());
        }
        self.nodes.insert(label, op);
        self
    }

    pub fn connect(&mut self, from: Port, to: Port) -> &mut Self {
        self.edges.push(PFEdge { from, to });
        self
    }

    pub fn add_input(&mut self, wire: impl Into<String>, to: Port) -> &mut Self {
        self.inputs.push(PFWire {
            wire: wire.into(),
            node: to.node,
            port: to.port,
        });
        self
    }

    pub fn add_output(&mut self, wire: impl Into<String>, from: Port) -> &mut Self {
        self.outputs.push(PFWire {
            wire: wire.into(),
            node: from.node,
            port: from.port,
        });
        self
    }

    /// Bits heralded by nodes of this diagram, i.e. `ℬ ∩ V(D)`.
    pub fn internal_bits(&self) -> Vec<String> {
        self.bits
            .iter()
            .filter(|b| self.nodes.contains_key(*b))
            .cloned()
            .collect()
    }

    /// Bits supplied from outside, i.e. `ℬ \ V(D)`.
    pub fn external_bits(&self) -> Vec<String> {
        self.bits
            .iter()
            .filter(|b| !self.nodes.contains_key(*b))
            .cloned()
            .collect()
    }

    pub fn validate(&self) -> ValidationReport<PFViolation> {
        let mut report = ValidationReport::default();
        let v = &mut report.violations;
        let mut fed: BTreeMap<Port, usize> = BTreeMap::new();
        let mut used: BTreeMap<Port, usize> = BTreeMap::new();
        let check = |p: &Port, input_side: bool, v: &mut Vec<PFViolation>| -> bool {
            match self.nodes.get(&p.node) {
                None => {
                    v.push(PFViolation::UnknownNode(p.node.clone()));
                    false
                }
                Some(op) => {
                    let (ni, no) = op.arity();
                    let limit = if input_side { ni } else { no };
                    if p.port >= limit {
                        v.push(PFViolation::PortOutOfRange(p.clone()));
                        return false;
                    }
                    true
                }
            }
        };
        for e in &self.edges {
            if check(&e.from, false, v) {
                *used.entry(e.from.clone()).or_default() += 1;
            }
            if check(&e.to, true, v) {
                *fed.entry(e.to.clone()).or_default() += 1;
            }
        }
        let mut wires = BTreeSet::new();
        for w in &self.inputs {
            if check(&w.port(), true, v) {
                *fed.entry(w.port()).or_default() += 1;
            }
            if !wires.insert(w.wire.clone()) {
                v.push(PFViolation::DuplicateWire(w.wire.clone()));
            }
        }
        for w in &self.outputs {
            if check(&w.port(), false, v) {
                *used.entry(w.port()).or_default() += 1;
            }
            if !wires.insert(w.wire.clone()) {
                v.push(PFViolation::DuplicateWire(w.wire.clone()));
            }
        }
        for (label, op) in &self.nodes {
            let (ni, no) = op.arity();
            let mut problems = Vec::new();
            for p in 0..ni {
                let k = fed.get(&Port::new(label.clone(), p)).copied().unwrap_or(0);
                if k != 1 {
                    problems.push(format!("input port {p} connected {k} times"));
                }
            }
            for p in 0..no {
                let k = used.get(&Port::new(label.clone(), p)).copied().unwrap_or(0);
                if k != 1 {
                    problems.push(format!("output port {p} connected {k} times"));
                }
            }
            if !problems.is_empty() {
                v.push(PFViolation::Arity {
                    node: label.clone(),
                    op: op.name(),
                    detail: format!("{} in / {} out expected; {}", ni, no, problems.join(", ")),
                });
            }
            if let Some(a) = op.annotation() {
                for b in a.bits() {
                    if !self.bits.contains(b) {
                        v.push(PFViolation::UndeclaredBit {
                            node: label.clone(),
                            bit: b.clone(),
                        });
                    }
                }
            }
            if op.emits_bit() && !self.bits.contains(label) {
                v.push(PFViolation::SilentBit(label.clone()));
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

    /// Dependency edges: wires, plus `b → v` whenever node `b` heralds a bit
    /// used in the annotation of `v`.
    pub fn dependencies(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut succ: BTreeMap<String, BTreeSet<String>> =
            self.nodes.keys().map(|l| (l.clone(), BTreeSet::new())).collect();
        for e in &self.edges {
            if let Some(s) = succ.get_mut(&e.from.node) {
                s.insert(e.to.node.clone());
            }
        }
        for (label, op) in &self.nodes {
            if let Some(a) = op.annotation() {
                for b in a.bits() {
                    if let Some(s) = succ.get_mut(b) {
                        s.insert(label.clone());
                    }
                }
            }
        }
        succ
    }

    /// A directed cycle of the dependency graph, if there is one.
    pub fn dependency_cycle(&self) -> Option<Vec<String>> {
        let succ = self.dependencies();
        let mut state: BTreeMap<&str, u8> = BTreeMap::new();
        let mut stack: Vec<&str> = Vec::new();
        fn visit<'a>(
            n: &'a str,
            succ: &'a BTreeMap<String, BTreeSet<String>>,
            state: &mut BTreeMap<&'a str, u8>,
            stack: &mut Vec<&'a str>,
        ) -> Option<Vec<String>> {
            state.insert(n, 1);
            stack.push(n);
            for m in &succ[n] {
                match state.get(m.as_str()).copied().unwrap_or(0) {
                    0 => {
                        if let Some(c) = visit(m, succ, state, stack) {
                            return Some(c);
                        }
                    }
                    1 => {
                        let start = stack.iter().position(|x| *x == m).expect("on stack");
                        return Some(stack[start..].iter().map(|s| s.to_string()).collect());
                    }
                    _ => {}
                }
            }
            stack.pop();
            state.insert(n, 2);
            None
        }
        for n in succ.keys() {
            if state.get(n.as_str()).copied().unwrap_or(0) == 0 {
                if let Some(c) = visit(n, &succ, &mut state, &mut stack) {
                    return Some(c);
                }
            }
        }
        None
    }

    pub fn to_json(&self) -> String {
        let repr = PFRepr {
            nodes: self
                .nodes
                .iter()
                .map(|(id, op)| {
                    let a = op.annotation();
                    PFNodeRepr {
                        id: id.clone(),
                        op: op.name().to_string(),
                        alpha: a.map(|a| a.alpha),
                        s: a.map(|a| a.sign_set.iter().cloned().collect()),
                        t: a.map(|a| a.shift_set.iter().cloned().collect()),
                    }
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| PFEdgeRepr {
                    from: e.from.node.clone(),
                    from_port: e.from.port,
                    to: e.to.node.clone(),
                    to_port: e.to.port,
                })
                .collect(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            bits: self.bits.iter().cloned().collect(),
        };
        let mut s = serde_json::to_string_pretty(&repr).expect("pf diagram serializes");
        s.push('\n');
        s
    }

    /// Parses the `.pf.json` format and rejects ill-typed diagrams.
    pub fn from_json(text: &str) -> Result<PFDiagram> {
        let repr: PFRepr = serde_json::from_str(text)?;
        let mut d = PFDiagram::new();
        for (i, n) in repr.nodes.iter().enumerate() {
            let annotation = || ThetaAnnotation {
                alpha: n.alpha.unwrap_or_default(),
                sign_set: n.s.iter().flatten().cloned().collect(),
                shift_set: n.t.iter().flatten().cloned().collect(),
            };
            let op = match n.op.as_str() {
                "SplitV" => PFOp::SplitV,
                "MergeV" => PFOp::MergeV,
                "RotV" => PFOp::RotV(annotation()),
                "SplitH" => PFOp::SplitH,
                "MergeH" => PFOp::MergeH,
                "RotH" => PFOp::RotH(annotation()),
                "InitV" => PFOp::InitV,
                "InitH" => PFOp::InitH,
                "Had" => PFOp::Had,
                "ProjV" => PFOp::ProjV,
                "ProjH" => PFOp::ProjH,
                "Swap" => PFOp::Swap,
                other => {
                    return Err(Error::parse(
                        format!("nodes[{i}].op"),
                        format!("unknown operation `{other}`"),
                    ))
                }
            };
            if op.annotation().is_none() && (n.alpha.is_some() || n.s.is_some() || n.t.is_some()) {
                return Err(Error::parse(
                    format!("nodes[{i}]"),
                    format!("{} nodes take no annotation", op.name()),
                ));
            }
            if d.nodes.insert(n.id.clone(), op).is_some() {
                return Err(Error::parse(
                    format!("nodes[{i}].id"),
                    format!("duplicate node id `{}`", n.id),
                ));
            }
        }
        d.edges = repr
            .edges
            .into_iter()
            .map(|e| PFEdge {
                from: Port::new(e.from, e.from_port),
                to: Port::new(e.to, e.to_port),
            })
            .collect();
        d.inputs = repr.inputs;
        d.outputs = repr.outputs;
        d.bits = repr.bits.into_iter().collect();
        let report = d.validate();
        if let Some(first) = report.violations.first() {
            return Err(Error::parse("pf diagram", first.to_string()));
        }
        Ok(d)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PFNodeRepr {
    id: String,
    op: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<Phase>,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    s: Option<Vec<String>>,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    t: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PFEdgeRepr {
    from: String,
    #[serde(default)]
    from_port: usize,
    to: String,
    #[serde(default)]
    to_port: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PFRepr {
    nodes: Vec<PFNodeRepr>,
    #[serde(default)]
    edges: Vec<PFEdgeRepr>,
    #[serde(default)]
    inputs: Vec<PFWire>,
    #[serde(default)]
    outputs: Vec<PFWire>,
    #[serde(default)]
    bits: Vec<String>,
}

pub fn pf_load(text: &str) -> Result<PFDiagram> {
    PFDiagram::from_json(text)
}

pub fn pf_save(d: &PFDiagram) -> String {
    d.to_json()
}

/// Earliest-schedule time-ordering, or `None` when wires and classical
/// control together form a cycle.
pub fn time_ordering(d: &PFDiagram) -> Option<TimeOrdering> {
    let succ = d.dependencies();
    let mut indegree: BTreeMap<&str, usize> = succ.keys().map(|k| (k.as_str(), 0)).collect();
    for targets in succ.values() {
        for t in targets {
            *indegree.get_mut(t.as_str()).expect("known node") += 1;
        }
    }
    let mut t: BTreeMap<String, u32> = BTreeMap::new();
    let mut queue: VecDeque<&str> = indegree
        .iter()
        .filter(|(_, &k)| k == 0)
        .map(|(&n, _)| n)
        .collect();
    for n in &queue {
        t.insert(n.to_string(), 1);
    }
    while let Some(n) = queue.pop_front() {
        let tn = t[n];
        for m in &succ[n] {
            let e = t.entry(m.clone()).or_insert(0);
            *e = (*e).max(tn + 1);
            let k = indegree.get_mut(m.as_str()).expect("known node");
            *k -= 1;
            if *k == 0 {
                queue.push_back(m);
            }
        }
    }
    if t.len() == d.nodes.len() && indegree.values().all(|&k| k == 0) {
        Some(TimeOrdering { t })
    } else {
        None
    }
}

/// Bit lookup for a branch: heralded bits from `x`, external ones from `r`.
pub fn branch_assignment(d: &PFDiagram, x: &BranchString, r: &BranchString) -> BranchString {
    let mut all = BranchString::new();
    for b in &d.bits {
        let source = if d.nodes.contains_key(b) { x } else { r };
        if let Some(&v) = source.get(b) {
            all.insert(b.clone(), v);
        }
    }
    all
}

/// Label of the ZX node that realizes input port `p` in a branch diagram.
fn zx_in(d: &PFDiagram, names: &ZXNames, p: &Port) -> String {
    match (&d.nodes[&p.node], p.port) {
        (PFOp::MergeV | PFOp::MergeH, 1) => format!("{}#e", p.node),
        (PFOp::Swap, 0) => format!("{}#a", p.node),
        (PFOp::Swap, _) => format!("{}#b", p.node),
        _ => names.main(&p.node),
    }
}

fn zx_out(d: &PFDiagram, names: &ZXNames, p: &Port) -> String {
    match (&d.nodes[&p.node], p.port) {
        (PFOp::Swap, 0) => format!("{}#b", p.node),
        (PFOp::Swap, _) => format!("{}#a", p.node),
        _ => names.main(&p.node),
    }
}

/// PF nodes named after a wire id (the caps on inputs and outputs) get a
/// `#w` suffix in the ZX picture, where wire ids and node labels share one
/// namespace.
struct ZXNames {
    wires: BTreeSet<String>,
}

impl ZXNames {
    fn new(d: &PFDiagram) -> Self {
        ZXNames {
            wires: d.inputs.iter().chain(d.outputs.iter()).map(|w| w.wire.clone()).collect(),
        }
    }

    fn main(&self, label: &str) -> String {
        if self.wires.contains(label) {
            format!("{label}#w")
        } else {
            label.to_string()
        }
    }
}

/// Global phase of a resolved rotation: the rotation by `±α` is the physical
/// `e^{∓iαP/2}` and each shift bit adds a bare Pauli `P`.
fn rotation_phase(a: &ThetaAnnotation, bits: &BranchString) -> Complex64 {
    let negate = a.sign_set.iter().filter(|b| bits.get(*b) == Some(&true)).count() % 2 == 1;
    let alpha = a.alpha.to_radians();
    Complex64::from_polar(1.0, if negate { alpha / 2.0 } else { -alpha / 2.0 })
}

/// The plain ZX diagram `D(x)`, each generator drawn as its ZX picture. The
/// scalar makes every generator evaluate exactly to its Kraus operator, with
/// a controlled rotation read as a rotation by `±α` followed by Paulis.
pub fn branch_diagram(d: &PFDiagram, x: &BranchString, r: &BranchString) -> Result<ZXDiagram> {
    let bits = branch_assignment(d, x, r);
    let bit = |b: &String| bits.get(b).copied().ok_or_else(|| Error::MissingBit(b.clone()));
    let names = ZXNames::new(d);
    let mut z = ZXDiagram::new();
    let mut scalar = Complex64::new(1.0, 0.0);
    for (label, op) in &d.nodes {
        let colour = op.colour();
        let main = names.main(label);
        match op {
            PFOp::SplitV | PFOp::SplitH => {
                z.add_node(main.clone(), colour.expect("spider"), Phase::ZERO);
            }
            PFOp::MergeV | PFOp::MergeH => {
                let c = colour.expect("spider");
                let aux = format!("{label}#e");
                z.add_node(main.clone(), c, Phase::ZERO);
                z.add_node(aux.clone(), c.opposite(), Phase::from_bit(bit(label)?));
                z.add_edge(aux, main.clone());
            }
            PFOp::RotV(a) | PFOp::RotH(a) => {
                let angle = theta(a, &bits)?;
                z.add_node(main.clone(), colour.expect("spider"), angle);
                scalar *= rotation_phase(a, &bits);
            }
            PFOp::InitV | PFOp::InitH => {
                z.add_node(main.clone(), colour.expect("spider"), Phase::ZERO);
                scalar *= FRAC_1_SQRT_2;
            }
            PFOp::ProjV | PFOp::ProjH => {
                z.add_node(main.clone(), colour.expect("spider"), Phase::from_bit(bit(label)?));
                scalar *= FRAC_1_SQRT_2;
            }
            PFOp::Had => {
                z.add_h(main.clone());
            }
            PFOp::Swap => {
                z.add_z(format!("{label}#a"), Phase::ZERO);
                z.add_z(format!("{label}#b"), Phase::ZERO);
            }
        }
    }
    for e in &d.edges {
        z.add_edge(zx_out(d, &names, &e.from), zx_in(d, &names, &e.to));
    }
    for w in &d.inputs {
        z.add_input(w.wire.clone(), zx_in(d, &names, &w.port()));
    }
    for w in &d.outputs {
        z.add_output(w.wire.clone(), zx_out(d, &names, &w.port()));
    }
    z.scalar = scalar;
    Ok(z)
}
