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

//! Compilation of a graph-like diagram with a PF-flow into an annotated
//! PF diagram.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::flow::{find_pf_flow, odd_neighborhood, validate_pf_flow, PFFlow, VertexSet};
use crate::graphlike::{build_signature, to_graph_like, GraphLikeDiagram, Signature};
use crate::pf::{time_ordering, PFDiagram, PFOp, Port, ThetaAnnotation, TimeOrdering};
use crate::phase::Phase;
use crate::semantics::{check_determinism, VerificationReport, VerifyConfig};
use crate::zx::{NodeKind, ZXDiagram};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CompileStep {
    pub step: u8,
    pub name: &'static str,
    pub affected: Vec<String>,
    pub inserted: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompilationTrace {
    pub steps: Vec<CompileStep>,
    /// `(u, v)` to the merges on the path from `u` into `v` that carry a
    /// heralded phase.
    pub p_paths: BTreeMap<(String, String), Vec<String>>,
}

#[derive(Serialize)]
struct PPathRepr<'a> {
    u: &'a str,
    v: &'a str,
    merges: &'a [String],
}

#[derive(Serialize)]
struct TraceRepr<'a> {
    steps: &'a [CompileStep],
    p_paths: Vec<PPathRepr<'a>>,
}

impl CompilationTrace {
    pub fn to_json(&self) -> String {
        let repr = TraceRepr {
            steps: &self.steps,
            p_paths: self
                .p_paths
                .iter()
                .map(|((u, v), m)| PPathRepr { u, v, merges: m })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&repr).expect("trace serializes");
        s.push('\n');
        s
    }
}

fn rotation(kind: NodeKind, alpha: Phase) -> PFOp {
    let a = ThetaAnnotation::constant(alpha);
    match kind {
        NodeKind::X => PFOp::RotH(a),
        _ => PFOp::RotV(a),
    }
}

fn merge(kind: NodeKind) -> PFOp {
    if kind == NodeKind::X { PFOp::MergeV } else { PFOp::MergeH }
}

fn split(kind: NodeKind) -> PFOp {
    if kind == NodeKind::X { PFOp::SplitV } else { PFOp::SplitH }
}

fn init(kind: NodeKind) -> PFOp {
    if kind == NodeKind::X { PFOp::InitH } else { PFOp::InitV }
}

fn proj(kind: NodeKind) -> PFOp {
    if kind == NodeKind::X { PFOp::ProjH } else { PFOp::ProjV }
}

fn toggle(set: &mut BTreeSet<String>, bit: &str) {
    if !set.remove(bit) {
        set.insert(bit.to_string());
    }
}

struct Builder<'a> {
    sig: &'a Signature,
    flow: &'a PFFlow,
    pf: PFDiagram,
    /// Colour of every signature vertex; wire endpoints take the colour
    /// opposite to their spider.
    colour: Vec<NodeKind>,
    /// Rotation node that absorbs phase corrections for each vertex.
    rot: Vec<Option<String>>,
    /// `(from, to)` signature edge, oriented in time, to its two ports.
    exits: BTreeMap<(usize, usize), Port>,
    entries: BTreeMap<(usize, usize), Port>,
    /// Bits whose correction leaves a Pauli on an output wire.
    leaks: BTreeMap<usize, BTreeSet<String>>,
    trace: CompilationTrace,
}

impl<'a> Builder<'a> {
    fn label(&self, i: usize) -> String {
        self.sig.label(i).to_string()
    }

    /// Earliest first; ties broken by label index.
    fn by_time(&self, a: usize, b: usize) -> Ordering {
        self.flow.layer[b]
            .cmp(&self.flow.layer[a])
            .then_with(|| {
                if self.flow.precedes(a, b) {
                    Ordering::Less
                } else if self.flow.precedes(b, a) {
                    Ordering::Greater
                } else {
                    Ordering::Equal
                }
            })
            .then(a.cmp(&b))
    }

    /// Past neighbours, earliest first.
    fn past(&self, v: usize) -> Vec<usize> {
        let mut p: Vec<usize> = self.flow.past_neighbors(self.sig, v).iter().collect();
        p.sort_by(|&a, &b| self.by_time(a, b));
        p
    }

    /// Future neighbours by ascending layer, i.e. latest first.
    fn future(&self, v: usize) -> Vec<usize> {
        let mut p: Vec<usize> = self.flow.future_neighbors(self.sig, v).iter().collect();
        p.sort_by(|&a, &b| self.by_time(b, a));
        p
    }

    fn step0(&mut self) {
        let mut step = CompileStep { step: 0, name: "orientation, inputs and outputs", ..Default::default() };
        let d = self.sig.origin().inner();
        for w in d.inputs.iter() {
            let i = self.sig.index_of(&w.wire).expect("input vertex");
            let n = self.sig.index_of(&w.node).expect("spider");
            self.pf.add_node(w.wire.clone(), rotation(self.colour[i], Phase::ZERO));
            self.pf.add_input(w.wire.clone(), Port::new(w.wire.clone(), 0));
            self.exits.insert((i, n), Port::new(w.wire.clone(), 0));
            self.rot[i] = Some(w.wire.clone());
            step.affected.push(w.node.clone());
            step.inserted.push(w.wire.clone());
        }
        for w in d.outputs.iter() {
            let o = self.sig.index_of(&w.wire).expect("output vertex");
            let n = self.sig.index_of(&w.node).expect("spider");
            self.pf.add_node(w.wire.clone(), rotation(self.colour[o], Phase::ZERO));
            self.pf.add_output(w.wire.clone(), Port::new(w.wire.clone(), 0));
            self.entries.insert((n, o), Port::new(w.wire.clone(), 0));
            self.rot[o] = Some(w.wire.clone());
            step.affected.push(w.node.clone());
            step.inserted.push(w.wire.clone());
        }
        self.trace.steps.push(step);
    }

    /// Merge-split decomposition and projections.
    fn steps12(&mut self) {
        let mut s1 = CompileStep { step: 1, name: "merge-split decomposition", ..Default::default() };
        let mut s2 = CompileStep { step: 2, name: "projections", ..Default::default() };
        let d = self.sig.origin().inner();
        for v in self.sig.spiders().iter() {
            let lv = self.label(v);
            let kind = self.colour[v];
            let alpha = d.nodes[&lv].phase;
            let past = self.past(v);
            let future = self.future(v);
            let projected = future.is_empty();
            let rot_label = if projected { format!("{lv}#r") } else { lv.clone() };
            self.pf.add_node(rot_label.clone(), rotation(kind, alpha));
            self.rot[v] = Some(rot_label.clone());
            s1.affected.push(lv.clone());
            if rot_label != lv {
                s1.inserted.push(rot_label.clone());
            }

            match past.len() {
                0 => {
                    let l = format!("{lv}#i");
                    self.pf.add_node(l.clone(), init(kind));
                    self.pf.connect(Port::new(l.clone(), 0), Port::new(rot_label.clone(), 0));
                    s1.inserted.push(l);
                }
                1 => {
                    self.entries.insert((past[0], v), Port::new(rot_label.clone(), 0));
                }
                k => {
                    let first = match self.flow.f.get(&v) {
                        Some(&f) if past.contains(&f) => f,
                        _ => past[0],
                    };
                    let rest: Vec<usize> = past.iter().copied().filter(|&u| u != first).collect();
                    let mut prev: Option<String> = None;
                    for j in 1..k {
                        let m = format!("{lv}#m{j}");
                        self.pf.add_node(m.clone(), merge(kind));
                        match &prev {
                            None => {
                                self.entries.insert((first, v), Port::new(m.clone(), 0));
                            }
                            Some(p) => {
                                self.pf.connect(Port::new(p.clone(), 0), Port::new(m.clone(), 0));
                            }
                        }
                        let u = rest[j - 1];
                        self.entries.insert((u, v), Port::new(m.clone(), 1));
                        self.trace.p_paths.insert((self.label(u), lv.clone()), vec![m.clone()]);
                        s1.inserted.push(m.clone());
                        prev = Some(m);
                    }
                    let last = prev.expect("at least one merge");
                    self.pf.connect(Port::new(last, 0), Port::new(rot_label.clone(), 0));
                }
            }

            match future.len() {
                0 => {
                    self.pf.add_node(lv.clone(), proj(kind));
                    self.pf.connect(Port::new(rot_label.clone(), 0), Port::new(lv.clone(), 0));
                    s2.affected.push(lv.clone());
                    s2.inserted.push(rot_label.clone());
                }
                1 => {
                    self.exits.insert((v, future[0]), Port::new(rot_label.clone(), 0));
                }
                k => {
                    let mut source = Port::new(rot_label.clone(), 0);
                    for j in 1..k {
                        let s = format!("{lv}#s{j}");
                        self.pf.add_node(s.clone(), split(kind));
                        self.pf.connect(source, Port::new(s.clone(), 0));
                        self.exits.insert((v, future[j - 1]), Port::new(s.clone(), 0));
                        source = Port::new(s.clone(), 1);
                        s1.inserted.push(s);
                    }
                    self.exits.insert((v, future[k - 1]), source);
                }
            }
        }
        let wires: Vec<((usize, usize), Port)> =
            self.exits.iter().map(|(k, p)| (*k, p.clone())).collect();
        for (key, from) in wires {
            let to = self.entries[&key].clone();
            self.pf.connect(from, to);
        }
        self.trace.steps.push(s1);
        self.trace.steps.push(s2);
    }

    /// Cancels the Pauli heralded by `bit` on vertex `u` with corrector `c`.
    fn correct(&mut self, c: &VertexSet, u: usize, bit: &str, step: &mut CompileStep) {
        for t in c.difference(self.sig.pinned()).iter() {
            self.annotate(t, bit, true, step);
            if self.sig.outputs().contains(t) {
                toggle(self.leaks.entry(t).or_default(), bit);
            }
        }
        let mut odd = odd_neighborhood(self.sig, c);
        odd.remove(u);
        for w in odd.iter() {
            self.annotate(w, bit, false, step);
        }
    }

    fn annotate(&mut self, x: usize, bit: &str, sign: bool, step: &mut CompileStep) {
        let label = self.rot[x].clone().expect("every corrected vertex has a rotation");
        let a = self.pf.nodes.get_mut(&label).and_then(PFOp::annotation_mut).expect("rotation");
        toggle(if sign { &mut a.sign_set } else { &mut a.shift_set }, bit);
        step.affected.push(label);
    }

    fn step3(&mut self) -> Result<()> {
        let mut step = CompileStep { step: 3, name: "merge correction", ..Default::default() };
        let paths: Vec<((String, String), Vec<String>)> =
            self.trace.p_paths.iter().map(|(k, m)| (k.clone(), m.clone())).collect();
        for ((lu, lv), merges) in paths {
            let u = self.sig.index_of(&lu).expect("vertex");
            let v = self.sig.index_of(&lv).expect("vertex");
            let c = self
                .flow
                .corrector(u, v)
                .cloned()
                .ok_or_else(|| Error::FlowInvalid(format!("no {lv}-corrector of {lu}")))?;
            for m in &merges {
                self.correct(&c, u, m, &mut step);
            }
        }
        self.trace.steps.push(step);
        Ok(())
    }

    fn step4(&mut self) -> Result<()> {
        let mut step = CompileStep { step: 4, name: "projector correction", ..Default::default() };
        for v in self.sig.spiders().iter() {
            let lv = self.label(v);
            if !matches!(self.pf.nodes.get(&lv), Some(PFOp::ProjV | PFOp::ProjH)) {
                continue;
            }
            let c = self
                .flow
                .corrector(v, v)
                .cloned()
                .ok_or_else(|| Error::FlowInvalid(format!("no {lv}-corrector of {lv}")))?;
            self.correct(&c, v, &lv, &mut step);
        }
        // Paulis left on output wires are undone by one more rotation.
        let leaks = std::mem::take(&mut self.leaks);
        for (o, bits) in leaks {
            if bits.is_empty() {
                continue;
            }
            let lo = self.label(o);
            let aux = format!("{lo}#p");
            let mut op = rotation(self.colour[o].opposite(), Phase::ZERO);
            op.annotation_mut().expect("rotation").shift_set = bits;
            self.pf.add_node(aux.clone(), op);
            self.pf.connect(Port::new(lo.clone(), 0), Port::new(aux.clone(), 0));
            for w in self.pf.outputs.iter_mut().filter(|w| w.node == lo) {
                w.node = aux.clone();
            }
            step.inserted.push(aux);
        }
        step.affected.sort();
        step.affected.dedup();
        self.trace.steps.push(step);
        Ok(())
    }
}

/// Compiles a graph-like diagram along a PF-flow. Every branch of the result
/// realizes the source diagram up to a sign and a common scalar.
pub fn compile_to_pf(g: &GraphLikeDiagram, flow: &PFFlow) -> Result<(PFDiagram, CompilationTrace)> {
    let sig = build_signature(g);
    let report = validate_pf_flow(&sig, flow);
    if !report.is_ok() {
        return Err(Error::FlowInvalid(report.to_string()));
    }
    let d = g.inner();
    let mut colour = vec![NodeKind::Z; sig.len()];
    for (label, node) in &d.nodes {
        colour[sig.index_of(label).expect("spider")] = node.kind;
    }
    for w in d.inputs.iter().chain(d.outputs.iter()) {
        colour[sig.index_of(&w.wire).expect("wire")] = d.nodes[&w.node].kind.opposite();
    }
    let mut b = Builder {
        sig: &sig,
        flow,
        pf: PFDiagram::new(),
        colour,
        rot: vec![None; sig.len()],
        exits: BTreeMap::new(),
        entries: BTreeMap::new(),
        leaks: BTreeMap::new(),
        trace: CompilationTrace::default(),
    };
    b.step0();
    b.steps12();
    b.step3()?;
    b.step4()?;
    for step in &mut b.trace.steps {
        step.affected.sort();
        step.affected.dedup();
    }
    let pf = b.pf;
    if let Some(v) = pf.validate().violations.first() {
        let node = match v {
            crate::pf::PFViolation::Arity { node, .. } => node.clone(),
            other => other.to_string(),
        };
        return Err(Error::InternalArity(node));
    }
    Ok((pf, b.trace))
}

#[derive(Clone, Debug, Default)]
pub struct PipelineConfig {
    pub verify: VerifyConfig,
    /// Skip the dense determinism check entirely.
    pub skip_verification: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineOutcome {
    /// Compiled, runnable and verified (or verification skipped).
    Compiled,
    NoFlow,
    /// Compiled, but not runnable or some branch is not proportional.
    VerificationFailed,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct StageTimings {
    pub normalize_ms: f64,
    pub signature_ms: f64,
    pub flow_ms: f64,
    pub compile_ms: f64,
    pub verify_ms: f64,
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub source: ZXDiagram,
    pub graph: GraphLikeDiagram,
    pub signature: Signature,
    pub flow: Option<PFFlow>,
    pub pf: Option<PFDiagram>,
    pub trace: Option<CompilationTrace>,
    pub time_ordering: Option<TimeOrdering>,
    pub verification: Option<VerificationReport>,
    /// Why verification did not run, when it did not.
    pub verification_skipped: Option<String>,
    pub timings: StageTimings,
}

impl PipelineResult {
    pub fn outcome(&self) -> PipelineOutcome {
        match (&self.flow, &self.pf) {
            (None, _) | (_, None) => PipelineOutcome::NoFlow,
            _ if self.time_ordering.is_none() => PipelineOutcome::VerificationFailed,
            _ if self.verification.as_ref().is_some_and(|v| !v.passed) => {
                PipelineOutcome::VerificationFailed
            }
            _ => PipelineOutcome::Compiled,
        }
    }

    pub fn to_json_value(&self) -> Value {
        let parse = |s: String| serde_json::from_str::<Value>(&s).expect("own json output parses");
        json!({
            "outcome": self.outcome(),
            "graph_like": parse(self.graph.inner().to_json()),
            "signature": parse(self.signature.to_json()),
            "flow": self.flow.as_ref().map(|f| parse(f.to_json(&self.signature))),
            "pf": self.pf.as_ref().map(|d| parse(d.to_json())),
            "trace": self.trace.as_ref().map(|t| parse(t.to_json())),
            "runnable": self.pf.as_ref().map(|_| self.time_ordering.is_some()),
            "time_ordering": self.time_ordering.as_ref().map(|t| &t.t),
            "verification": self.verification,
            "verification_skipped": self.verification_skipped,
            "timings": self.timings,
        })
    }
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Normalize, find a flow, compile and verify. A missing flow is reported
/// through [`PipelineOutcome::NoFlow`], not as an error. Verification that
/// would exceed the evaluation caps is skipped and the reason recorded.
pub fn full_pipeline(d: &ZXDiagram, config: &PipelineConfig) -> Result<PipelineResult> {
    d.ensure_valid()?;
    let mut timings = StageTimings::default();
    let t = Instant::now();
    let graph = to_graph_like(d)?;
    timings.normalize_ms = ms(t);
    let t = Instant::now();
    let signature = build_signature(&graph);
    timings.signature_ms = ms(t);
    let t = Instant::now();
    let flow = find_pf_flow(&signature);
    timings.flow_ms = ms(t);
    let mut result = PipelineResult {
        source: d.clone(),
        graph,
        signature,
        flow,
        pf: None,
        trace: None,
        time_ordering: None,
        verification: None,
        verification_skipped: None,
        timings,
    };
    let Some(flow) = &result.flow else {
        return Ok(result);
    };
    let t = Instant::now();
    let (pf, trace) = compile_to_pf(&result.graph, flow)?;
    result.time_ordering = time_ordering(&pf);
    result.timings.compile_ms = ms(t);
    if config.skip_verification {
        result.verification_skipped = Some("disabled".into());
    } else {
        let t = Instant::now();
        match check_determinism(&pf, d, &config.verify) {
            Ok(report) => result.verification = Some(report),
            Err(e @ (Error::WidthExceeded { .. } | Error::SizeExceeded { .. })) => {
                result.verification_skipped = Some(e.to_string());
            }
            Err(e) => return Err(e),
        }
        result.timings.verify_ms = ms(t);
    }
    result.pf = Some(pf);
    result.trace = Some(trace);
    Ok(result)
}
