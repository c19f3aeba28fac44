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

//! Graph-like normal form and the signature of a graph-like diagram.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_4;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::VertexSet;
use crate::phase::Phase;
use crate::zx::{NodeKind, ValidationReport, Wire, ZXDiagram, ZXNode};

/// A ZX diagram that is H-free, has only opposite-colour adjacencies, and
/// no parallel edges or self-loops.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphLikeDiagram {
    inner: ZXDiagram,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphLikeViolation {
    Invalid(String),
    Hadamard(String),
    SameColour(String, String),
    Parallel(String, String),
    SelfLoop(String),
}

impl fmt::Display for GraphLikeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphLikeViolation::Invalid(m) => write!(f, "{m}"),
            GraphLikeViolation::Hadamard(n) => write!(f, "Hadamard node `{n}`"),
            GraphLikeViolation::SameColour(a, b) => {
                write!(f, "edge {a}-{b} joins spiders of the same colour")
            }
            GraphLikeViolation::Parallel(a, b) => write!(f, "parallel edges between {a} and {b}"),
            GraphLikeViolation::SelfLoop(n) => write!(f, "self-loop on `{n}`"),
        }
    }
}

impl GraphLikeDiagram {
    pub fn check(d: &ZXDiagram) -> ValidationReport<GraphLikeViolation> {
        let mut report = ValidationReport::default();
        let v = &mut report.violations;
        for violation in d.validate().violations {
            v.push(GraphLikeViolation::Invalid(violation.to_string()));
        }
        for (label, node) in &d.nodes {
            if node.kind == NodeKind::H {
                v.push(GraphLikeViolation::Hadamard(label.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for (a, b) in &d.edges {
            if a == b {
                v.push(GraphLikeViolation::SelfLoop(a.clone()));
                continue;
            }
            let key = ordered(a, b);
            if !seen.insert(key.clone()) {
                v.push(GraphLikeViolation::Parallel(key.0, key.1));
            }
            if let (Some(na), Some(nb)) = (d.nodes.get(a), d.nodes.get(b)) {
                if na.kind.is_spider() && na.kind == nb.kind {
                    v.push(GraphLikeViolation::SameColour(a.clone(), b.clone()));
                }
            }
        }
        report
    }

    /// Wraps `d` after checking the graph-like invariants.
    pub fn new(d: ZXDiagram) -> Result<Self> {
        let report = Self::check(&d);
        if report.is_ok() {
            Ok(GraphLikeDiagram { inner: d })
        } else {
            Err(Error::InvalidDiagram(report.to_string()))
        }
    }

    pub fn inner(&self) -> &ZXDiagram {
        &self.inner
    }

    pub fn into_inner(self) -> ZXDiagram {
        self.inner
    }
}

fn ordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// Mutable working form used by the normalizer.
struct Work {
    nodes: BTreeMap<String, ZXNode>,
    edges: Vec<(String, String)>,
    inputs: Vec<Wire>,
    outputs: Vec<Wire>,
    scalar: Complex64,
    counter: usize,
}

impl Work {
    fn fresh(&mut self, stem: &str) -> String {
        let d = ZXDiagram {
            nodes: self.nodes.clone(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            ..ZXDiagram::default()
        };
        d.fresh_label(stem, &mut self.counter)
    }

    fn wires_mut(&mut self) -> impl Iterator<Item = &mut Wire> {
        self.inputs.iter_mut().chain(self.outputs.iter_mut())
    }

    fn cap_hadamard_wires(&mut self) {
        let targets: Vec<usize> = self
            .inputs
            .iter()
            .chain(self.outputs.iter())
            .enumerate()
            .filter(|(_, w)| self.nodes[&w.node].kind == NodeKind::H)
            .map(|(i, _)| i)
            .collect();
        for i in targets {
            let cap = self.fresh("c");
            self.nodes.insert(
                cap.clone(),
                ZXNode {
                    kind: NodeKind::Z,
                    phase: Phase::ZERO,
                },
            );
            let wire = self.wires_mut().nth(i).expect("wire index");
            let h = std::mem::replace(&mut wire.node, cap.clone());
            self.edges.push((cap, h));
        }
    }

    /// H = e^{-iπ/4} Z(π/2) X(π/2) Z(π/2).
    fn decompose_hadamards(&mut self) {
        let hs: Vec<String> = self
            .nodes
            .iter()
            .filter(|(_, n)| n.kind == NodeKind::H)
            .map(|(l, _)| l.clone())
            .collect();
        for h in hs {
            self.nodes.remove(&h);
            let z1 = self.fresh("e");
            self.nodes.insert(z1.clone(), spider(NodeKind::Z, Phase::HALF_PI));
            let x = self.fresh("e");
            self.nodes.insert(x.clone(), spider(NodeKind::X, Phase::HALF_PI));
            let z2 = self.fresh("e");
            self.nodes.insert(z2.clone(), spider(NodeKind::Z, Phase::HALF_PI));
            let mut first = true;
            for (a, b) in self.edges.iter_mut() {
                for end in [a, b] {
                    if *end == h {
                        *end = if first { z1.clone() } else { z2.clone() };
                        first = false;
                    }
                }
            }
            self.edges.push((z1.clone(), x.clone()));
            self.edges.push((x, z2));
            self.scalar *= Complex64::from_polar(1.0, -FRAC_PI_4);
        }
    }

    /// Fuses every connected same-colour cluster into its smallest label.
    fn fuse(&mut self) -> bool {
        let labels: Vec<String> = self.nodes.keys().cloned().collect();
        let index: BTreeMap<&str, usize> =
            labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let mut parent: Vec<usize> = (0..labels.len()).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        let mut changed = false;
        for (a, b) in &self.edges {
            if a == b || self.nodes[a].kind != self.nodes[b].kind {
                continue;
            }
            let (ra, rb) = (find(&mut parent, index[a.as_str()]), find(&mut parent, index[b.as_str()]));
            if ra != rb {
                // Labels are sorted, so the smaller index is the smaller label.
                let (lo, hi) = (ra.min(rb), ra.max(rb));
                parent[hi] = lo;
                changed = true;
            }
        }
        if !changed {
            return false;
        }
        let rep: Vec<usize> = (0..labels.len()).map(|i| find(&mut parent, i)).collect();
        for (i, label) in labels.iter().enumerate() {
            if rep[i] != i {
                let node = self.nodes.remove(label).expect("fused node");
                let target = self.nodes.get_mut(&labels[rep[i]]).expect("representative");
                target.phase = target.phase + node.phase;
            }
        }
        let rename = |l: &mut String| *l = labels[rep[index[l.as_str()]]].clone();
        for (a, b) in self.edges.iter_mut() {
            rename(a);
            rename(b);
        }
        for w in self.wires_mut() {
            rename(&mut w.node);
        }
        true
    }

    /// Drops self-loops and reduces opposite-colour multi-edges mod 2.
    fn simplify_edges(&mut self) -> bool {
        let before = self.edges.len();
        let mut counts: BTreeMap<(String, String), usize> = BTreeMap::new();
        let mut same_colour = Vec::new();
        for (a, b) in self.edges.drain(..) {
            if a == b {
                continue;
            }
            if self.nodes[&a].kind == self.nodes[&b].kind {
                same_colour.push((a, b));
                continue;
            }
            *counts.entry(ordered(&a, &b)).or_default() += 1;
        }
        for ((a, b), m) in counts {
            self.scalar *= 0.5f64.powi((m / 2) as i32);
            if m % 2 == 1 {
                self.edges.push((a, b));
            }
        }
        self.edges.extend(same_colour);
        self.edges.sort();
        self.edges.len() != before
    }

    /// Folds spiders with no legs into the scalar.
    fn fold_isolated(&mut self) -> Result<bool> {
        let mut used = BTreeSet::new();
        for (a, b) in &self.edges {
            used.insert(a.clone());
            used.insert(b.clone());
        }
        for w in self.inputs.iter().chain(self.outputs.iter()) {
            used.insert(w.node.clone());
        }
        let isolated: Vec<String> = self
            .nodes
            .keys()
            .filter(|l| !used.contains(*l))
            .cloned()
            .collect();
        for l in &isolated {
            let node = self.nodes.remove(l).expect("isolated node");
            if node.phase == Phase::PI {
                return Err(Error::ZeroDiagram);
            }
            self.scalar *= Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, node.phase.to_radians());
        }
        Ok(!isolated.is_empty())
    }

    fn finish(self) -> ZXDiagram {
        let mut edges: Vec<(String, String)> =
            self.edges.iter().map(|(a, b)| ordered(a, b)).collect();
        edges.sort();
        ZXDiagram {
            nodes: self.nodes,
            edges,
            inputs: self.inputs,
            outputs: self.outputs,
            scalar: self.scalar,
        }
    }
}

fn spider(kind: NodeKind, phase: Phase) -> ZXNode {
    ZXNode { kind, phase }
}

/// Normalizes `d` to graph-like form. The returned diagram's scalar absorbs
/// every factor introduced by the rewrites, so its interpretation equals
/// that of `d` up to floating-point error.
pub fn to_graph_like(d: &ZXDiagram) -> Result<GraphLikeDiagram> {
    d.ensure_valid()?;
    let mut w = Work {
        nodes: d.nodes.clone(),
        edges: d.edges.clone(),
        inputs: d.inputs.clone(),
        outputs: d.outputs.clone(),
        scalar: d.scalar,
        counter: 0,
    };
    w.cap_hadamard_wires();
    w.decompose_hadamards();
    let budget = 10 * w.nodes.len().max(1);
    let mut sweeps = 0;
    loop {
        sweeps += 1;
        if sweeps > budget {
            return Err(Error::NormalizationBudget(budget));
        }
        let fused = w.fuse();
        let simplified = w.simplify_edges();
        let folded = w.fold_isolated()?;
        if !(fused || simplified || folded) {
            break;
        }
    }
    GraphLikeDiagram::new(w.finish())
}

/// The signature graph of a graph-like diagram together with the sets ℐ, 𝒪
/// and 𝒫. Vertices are indexed in ascending label order; input and output
/// endpoint vertices are labelled by their wire ids.
#[derive(Clone, Debug)]
pub struct Signature {
    labels: Vec<String>,
    index: BTreeMap<String, usize>,
    adjacency: Vec<VertexSet>,
    self_loops: VertexSet,
    spiders: VertexSet,
    inputs: VertexSet,
    outputs: VertexSet,
    pinned: VertexSet,
    origin: GraphLikeDiagram,
}

pub fn build_signature(g: &GraphLikeDiagram) -> Signature {
    let d = g.inner();
    let mut labels: Vec<String> = d.nodes.keys().cloned().collect();
    labels.extend(d.inputs.iter().map(|w| w.wire.clone()));
    labels.extend(d.outputs.iter().map(|w| w.wire.clone()));
    labels.sort();
    let n = labels.len();
    let index: BTreeMap<String, usize> =
        labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
    let mut adjacency = vec![VertexSet::new(n); n];
    let mut connect = |a: usize, b: usize| {
        adjacency[a].insert(b);
        adjacency[b].insert(a);
    };
    for (a, b) in &d.edges {
        connect(index[a], index[b]);
    }
    for w in d.inputs.iter().chain(d.outputs.iter()) {
        connect(index[&w.wire], index[&w.node]);
    }
    let mut sig = Signature {
        adjacency,
        self_loops: VertexSet::new(n),
        spiders: VertexSet::new(n),
        inputs: VertexSet::from_indices(n, d.inputs.iter().map(|w| index[&w.wire])),
        outputs: VertexSet::from_indices(n, d.outputs.iter().map(|w| index[&w.wire])),
        pinned: VertexSet::new(n),
        labels,
        index,
        origin: g.clone(),
    };
    for (label, node) in &d.nodes {
        let i = sig.index[label];
        sig.spiders.insert(i);
        if node.phase.is_multiple_of_half_pi() {
            sig.pinned.insert(i);
        }
        if node.phase.is_odd_multiple_of_half_pi() {
            sig.self_loops.insert(i);
        }
    }
    sig
}

impl Signature {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Neighbours of `i`, never including `i` itself.
    pub fn neighbors(&self, i: usize) -> &VertexSet {
        &self.adjacency[i]
    }

    pub fn has_self_loop(&self, i: usize) -> bool {
        self.self_loops.contains(i)
    }

    /// V(D): the spiders of the underlying diagram.
    pub fn spiders(&self) -> &VertexSet {
        &self.spiders
    }

    pub fn inputs(&self) -> &VertexSet {
        &self.inputs
    }

    pub fn outputs(&self) -> &VertexSet {
        &self.outputs
    }

    /// Spiders whose phase is an integer multiple of π/2.
    pub fn pinned(&self) -> &VertexSet {
        &self.pinned
    }

    pub fn origin(&self) -> &GraphLikeDiagram {
        &self.origin
    }

    pub fn empty_set(&self) -> VertexSet {
        VertexSet::new(self.len())
    }

    pub fn set_of<'a>(&self, labels: impl IntoIterator<Item = &'a str>) -> Option<VertexSet> {
        let mut s = self.empty_set();
        for l in labels {
            s.insert(self.index_of(l)?);
        }
        Some(s)
    }

    /// Undirected edges `(a, b)` with `a < b`, in index order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.len() {
            for b in self.adjacency[a].iter() {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Row of the adjacency matrix used for odd neighbourhoods: the
    /// neighbours of `i`, plus `i` when it carries a self-loop.
    pub fn odd_row(&self, i: usize) -> VertexSet {
        let mut row = self.adjacency[i].clone();
        if self.has_self_loop(i) {
            row.insert(i);
        }
        row
    }

    pub fn to_json(&self) -> String {
        let repr = SignatureRepr {
            vertices: (0..self.len())
                .map(|i| SigVertex {
                    label: self.labels[i].clone(),
                    in_i: self.inputs.contains(i),
                    in_o: self.outputs.contains(i),
                    in_p: self.pinned.contains(i),
                    self_loop: self.self_loops.contains(i),
                })
                .collect(),
            edges: self
                .edges()
                .into_iter()
                .map(|(a, b)| [self.labels[a].clone(), self.labels[b].clone()])
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&repr).expect("signature serializes");
        s.push('\n');
        s
    }
}

#[derive(Serialize, Deserialize)]
struct SigVertex {
    label: String,
    #[serde(rename = "in_I")]
    in_i: bool,
    #[serde(rename = "in_O")]
    in_o: bool,
    #[serde(rename = "in_P")]
    in_p: bool,
    self_loop: bool,
}

#[derive(Serialize, Deserialize)]
struct SignatureRepr {
    vertices: Vec<SigVertex>,
    edges: Vec<[String; 2]>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{eval_zx, proportional, DenseMap};

    fn assert_proportional(a: &ZXDiagram, b: &ZXDiagram) {
        let ea = eval_zx(a).unwrap();
        let eb = eval_zx(b).unwrap();
        let c = proportional(&ea, &eb, 1e-9).unwrap().expect("proportional");
        assert!(c.norm() > 1e-12);
    }

    #[test]
    fn bare_hadamard_becomes_three_spiders() {
        let mut d = ZXDiagram::new();
        d.add_h("h").add_input("i1", "h").add_output("o1", "h");
        let g = to_graph_like(&d).unwrap();
        let inner = g.inner();
        assert!(inner.nodes.values().all(|n| n.kind.is_spider()));
        let h = DenseMap::from_real(&[&[1.0, 1.0], &[1.0, -1.0]]).scale(Complex64::new(
            std::f64::consts::FRAC_1_SQRT_2,
            0.0,
        ));
        let e = eval_zx(inner).unwrap();
        assert!(proportional(&h, &e, 1e-9).unwrap().is_some());
        // The tracked scalar is exact for this rewrite.
        assert!(e.approx_eq(&h, 1e-12));
    }

    #[test]
    fn adjacent_z_spiders_fuse() {
        let mut d = ZXDiagram::new();
        d.add_z("a", Phase::new(1, 4))
            .add_z("b", Phase::new(1, 2))
            .add_edge("a", "b")
            .add_input("i1", "a")
            .add_output("o1", "b");
        let g = to_graph_like(&d).unwrap();
        let inner = g.inner();
        assert_eq!(inner.nodes.len(), 1);
        assert_eq!(inner.nodes["a"].phase, Phase::new(3, 4));
        assert_eq!(inner.outputs[0].node, "a");
    }

    #[test]
    fn hopf_pair_disconnects() {
        let mut d = ZXDiagram::new();
        d.add_z("z", Phase::new(1, 4))
            .add_x("x", Phase::new(1, 3))
            .add_edge("z", "x")
            .add_edge("x", "z")
            .add_input("i1", "z")
            .add_output("o1", "x");
        let g = to_graph_like(&d).unwrap();
        assert!(g.inner().edges.is_empty());
        assert_proportional(&d, g.inner());
        assert!(eval_zx(&d).unwrap().approx_eq(&eval_zx(g.inner()).unwrap(), 1e-12));
    }

    #[test]
    fn contradictory_loop_is_zero() {
        // A legless X spider with phase π is the scalar 0.
        let mut d = ZXDiagram::new();
        d.add_z("z", Phase::ZERO)
            .add_x("x", Phase::PI)
            .add_input("i1", "z")
            .add_output("o1", "z");
        assert!(matches!(to_graph_like(&d), Err(Error::ZeroDiagram)));
    }

    #[test]
    fn normalization_is_idempotent() {
        let mut d = ZXDiagram::new();
        d.add_z("a", Phase::new(1, 4))
            .add_x("b", Phase::ZERO)
            .add_z("c", Phase::HALF_PI)
            .add_h("h")
            .add_edge("a", "b")
            .add_edge("b", "c")
            .add_edge("c", "h")
            .add_edge("h", "a")
            .add_input("i1", "a")
            .add_output("o1", "c");
        let g = to_graph_like(&d).unwrap();
        let g2 = to_graph_like(g.inner()).unwrap();
        assert_eq!(g, g2);
        assert_proportional(&d, g.inner());
    }

    #[test]
    fn signature_of_single_spider() {
        let mut d = ZXDiagram::new();
        d.add_z("v", Phase::ZERO).add_input("i1", "v").add_output("o1", "v");
        let sig = build_signature(&to_graph_like(&d).unwrap());
        assert_eq!(sig.len(), 3);
        let v = sig.index_of("v").unwrap();
        assert!(sig.pinned().contains(v));
        assert!(!sig.has_self_loop(v));
        assert_eq!(sig.inputs().count(), 1);
        assert_eq!(sig.outputs().count(), 1);
    }

    #[test]
    fn half_pi_spider_gets_self_loop() {
        let mut d = ZXDiagram::new();
        d.add_z("v", Phase::HALF_PI).add_input("i1", "v").add_output("o1", "v");
        let sig = build_signature(&to_graph_like(&d).unwrap());
        let v = sig.index_of("v").unwrap();
        assert!(sig.has_self_loop(v));
        assert!(sig.pinned().contains(v));
        assert!(sig.odd_row(v).contains(v));
    }
}
