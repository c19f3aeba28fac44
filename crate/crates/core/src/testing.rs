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

//! Diagram generators shared by the test suites and the CLI smoke corpus.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::flow::{find_pf_flow, PFFlow};
use crate::graphlike::{build_signature, to_graph_like, GraphLikeDiagram, Signature};
use crate::phase::Phase;
use crate::zx::{NodeKind, ZXDiagram};

/// `{0, ±π/4, ±π/2, π}`.
pub fn corpus_phases() -> [Phase; 6] {
    [
        Phase::ZERO,
        Phase::new(1, 4),
        Phase::new(-1, 4),
        Phase::HALF_PI,
        Phase::new(-1, 2),
        Phase::PI,
    ]
}

/// A random diagram that is already graph-like up to isolated spiders:
/// coloured spiders, opposite-colour edges only, and open wires on spiders.
pub fn random_graph_like<R: Rng>(rng: &mut R, max_spiders: usize, max_wires: usize) -> ZXDiagram {
    let phases = corpus_phases();
    let n = rng.gen_range(1..=max_spiders);
    let mut d = ZXDiagram::new();
    let mut kinds = Vec::with_capacity(n);
    for i in 0..n {
        let kind = if rng.gen_bool(0.5) { NodeKind::Z } else { NodeKind::X };
        kinds.push(kind);
        d.add_node(format!("v{i}"), kind, *phases.choose(rng).expect("nonempty"));
    }
    let density = rng.gen_range(0.3..0.8);
    for a in 0..n {
        for b in a + 1..n {
            if kinds[a] != kinds[b] && rng.gen_bool(density) {
                d.add_edge(format!("v{a}"), format!("v{b}"));
            }
        }
    }
    let wires = rng.gen_range(1..=max_wires);
    let inputs = rng.gen_range(0..=wires);
    for k in 0..wires {
        let node = format!("v{}", rng.gen_range(0..n));
        if k < inputs {
            d.add_input(format!("i{k}"), node);
        } else {
            d.add_output(format!("o{}", k - inputs), node);
        }
    }
    d
}

/// A random valid diagram with Hadamard nodes, same-colour and parallel
/// edges and self-loops.
pub fn random_zx<R: Rng>(rng: &mut R, max_nodes: usize, max_wires: usize) -> ZXDiagram {
    let phases = corpus_phases();
    let n = rng.gen_range(1..=max_nodes);
    let mut d = ZXDiagram::new();
    let mut spiders = Vec::new();
    for i in 0..n {
        let label = format!("n{i}");
        match rng.gen_range(0..5) {
            0 if i > 0 => {
                d.add_h(label.clone());
                let a = spiders.choose(rng).cloned().unwrap_or_else(|| "n0".to_string());
                d.add_edge(label.clone(), a);
                continue;
            }
            1 | 2 => d.add_z(label.clone(), *phases.choose(rng).expect("nonempty")),
            _ => d.add_x(label.clone(), *phases.choose(rng).expect("nonempty")),
        };
        spiders.push(label);
    }
    if spiders.is_empty() {
        return random_zx(rng, max_nodes, max_wires);
    }
    let extra = rng.gen_range(0..=2 * n);
    for _ in 0..extra {
        let a = spiders.choose(rng).expect("nonempty").clone();
        let b = spiders.choose(rng).expect("nonempty").clone();
        d.add_edge(a, b);
    }
    // Hadamard nodes need exactly two legs.
    let hs: Vec<String> = d
        .nodes
        .iter()
        .filter(|(_, n)| n.kind == NodeKind::H)
        .map(|(l, _)| l.clone())
        .collect();
    for h in hs {
        while d.degree(&h) < 2 {
            let b = spiders.choose(rng).expect("nonempty").clone();
            d.add_edge(h.clone(), b);
        }
    }
    let wires = rng.gen_range(0..=max_wires);
    let inputs = rng.gen_range(0..=wires);
    for k in 0..wires {
        let node = spiders.choose(rng).expect("nonempty").clone();
        if k < inputs {
            d.add_input(format!("i{k}"), node);
        } else {
            d.add_output(format!("o{}", k - inputs), node);
        }
    }
    d
}

/// One element of the flow-bearing corpus with all intermediate artifacts.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub source: ZXDiagram,
    pub graph: GraphLikeDiagram,
    pub signature: Signature,
    pub flow: PFFlow,
}

/// `count` random graph-like diagrams that admit a PF-flow.
pub fn flow_bearing_corpus(seed: u64, count: usize, max_spiders: usize, max_wires: usize) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let source = random_graph_like(&mut rng, max_spiders, max_wires);
        let Ok(graph) = to_graph_like(&source) else {
            continue;
        };
        if graph.inner().nodes.is_empty() {
            continue;
        }
        let signature = build_signature(&graph);
        if let Some(flow) = find_pf_flow(&signature) {
            out.push(CorpusEntry {
                source,
                graph,
                signature,
                flow,
            });
        }
    }
    out
}

/// A path of `n` alternating spiders with one input at the start and one
/// output at the end.
pub fn path_diagram(n: usize) -> GraphLikeDiagram {
    let mut d = ZXDiagram::new();
    let label = |i: usize| format!("p{i:05}");
    for i in 0..n {
        let kind = if i % 2 == 0 { NodeKind::Z } else { NodeKind::X };
        let phase = if i % 3 == 0 { Phase::new(1, 4) } else { Phase::ZERO };
        d.add_node(label(i), kind, phase);
        if i > 0 {
            d.add_edge(label(i - 1), label(i));
        }
    }
    d.add_input("in", label(0));
    d.add_output("out", label(n - 1));
    GraphLikeDiagram::new(d).expect("a path is graph-like")
}

/// Edge sets of all connected graphs on `n` vertices that are 2-colourable,
/// one per isomorphism class.
pub fn connected_bipartite_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        if !is_connected(n, &edges) || two_colouring(n, &edges).is_none() {
            continue;
        }
        let canon = perms
            .iter()
            .map(|p| {
                let mut e: Vec<(usize, usize)> = edges
                    .iter()
                    .map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b])))
                    .collect();
                e.sort();
                e
            })
            .min()
            .expect("at least one permutation");
        if seen.insert(canon) {
            out.push(edges);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &(a, b) in edges {
            let y = if a == x { b } else if b == x { a } else { continue };
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// Colour classes of a connected bipartite graph, vertex 0 in class false.
pub fn two_colouring(n: usize, edges: &[(usize, usize)]) -> Option<Vec<bool>> {
    let mut colour: Vec<Option<bool>> = vec![None; n];
    colour[0] = Some(false);
    let mut stack = vec![0];
    while let Some(x) = stack.pop() {
        let cx = colour[x].expect("coloured");
        for &(a, b) in edges {
            let y = if a == x { b } else if b == x { a } else { continue };
            match colour[y] {
                None => {
                    colour[y] = Some(!cx);
                    stack.push(y);
                }
                Some(cy) if cy == cx => return None,
                _ => {}
            }
        }
    }
    colour.into_iter().collect()
}

/// Graph-like diagrams built from a connected bipartite graph, a phase class
/// per spider (`0`, `π/2` or `π/4`) and a multiset of open wires. Vertex
/// `k` becomes spider `v{k}`.
pub fn decorate(edges: &[(usize, usize)], n: usize, classes: &[u8], wires: &[(usize, bool)]) -> ZXDiagram {
    let colours = two_colouring(n, edges).expect("bipartite");
    let mut d = ZXDiagram::new();
    for k in 0..n {
        let kind = if colours[k] { NodeKind::X } else { NodeKind::Z };
        let phase = match classes[k] {
            0 => Phase::ZERO,
            1 => Phase::HALF_PI,
            _ => Phase::new(1, 4),
        };
        d.add_node(format!("v{k}"), kind, phase);
    }
    for &(a, b) in edges {
        d.add_edge(format!("v{a}"), format!("v{b}"));
    }
    let (mut i, mut o) = (0, 0);
    for &(k, is_input) in wires {
        if is_input {
            d.add_input(format!("w_i{i}"), format!("v{k}"));
            i += 1;
        } else {
            d.add_output(format!("w_o{o}"), format!("v{k}"));
            o += 1;
        }
    }
    d
}

/// Multisets of at most `max` wires over `n` spiders, each wire an input or
/// an output.
pub fn wire_multisets(n: usize, max: usize) -> Vec<Vec<(usize, bool)>> {
    let slots: Vec<(usize, bool)> = (0..n).flat_map(|k| [(k, true), (k, false)]).collect();
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<(usize, Vec<(usize, bool)>)> = vec![(0, Vec::new())];
    for _ in 0..max {
        let mut next = Vec::new();
        for (start, w) in &frontier {
            for s in *start..slots.len() {
                let mut w2 = w.clone();
                w2.push(slots[s]);
                out.push(w2.clone());
                next.push((s, w2));
            }
        }
        frontier = next;
    }
    out
}
