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

//! Odd neighbourhoods, corrector sets, PF-flow finding and validation.

mod gf2;
mod oracle;
mod vertex_set;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphlike::Signature;
use crate::zx::ValidationReport;

pub use gf2::{Elimination, GF2Matrix};
pub use oracle::{exhaustive_flow_oracle, ORACLE_MAX_VERTICES};
pub use vertex_set::VertexSet;

/// Vertices adjacent to an odd number of members of `c`. A self-looped
/// member counts as its own neighbour.
pub fn odd_neighborhood(sig: &Signature, c: &VertexSet) -> VertexSet {
    let mut out = sig.empty_set();
    for t in c.iter() {
        out.xor_assign(&sig.odd_row(t));
    }
    out
}

/// The system `A_[M] x = e_u` for one marked set `M`, eliminated once so
/// that every `u` can be queried.
///
/// Rows are the unmarked vertices of the whole signature graph, input
/// endpoints included, and columns are `M ∪ 𝒫`. All-zero rows and columns
/// are dropped: a zero column never helps and a zero row only constrains
/// its own `u`, which is then unsolvable.
struct CorrectorSystem {
    row_of: BTreeMap<usize, usize>,
    col_vertex: Vec<usize>,
    elim: Elimination,
    len: usize,
}

impl CorrectorSystem {
    fn new(sig: &Signature, marked: &VertexSet) -> Self {
        let unmarked = VertexSet::full(sig.len()).difference(marked);
        let candidates = marked.union(sig.pinned());
        let mut columns = Vec::new();
        let mut rows = BTreeSet::new();
        for t in candidates.iter() {
            let hit = sig.odd_row(t).intersection(&unmarked);
            if !hit.is_empty() {
                rows.extend(hit.iter());
                columns.push((t, hit));
            }
        }
        let row_of: BTreeMap<usize, usize> =
            rows.iter().enumerate().map(|(r, &v)| (v, r)).collect();
        let mut a = GF2Matrix::new(row_of.len(), columns.len());
        for (c, (_, hit)) in columns.iter().enumerate() {
            for v in hit.iter() {
                a.set(row_of[&v], c, true);
            }
        }
        CorrectorSystem {
            row_of,
            col_vertex: columns.into_iter().map(|(t, _)| t).collect(),
            elim: a.eliminate(),
            len: sig.len(),
        }
    }

    fn solve(&self, u: usize) -> Option<VertexSet> {
        let row = *self.row_of.get(&u)?;
        let support = self.elim.solve_unit(row)?;
        Some(VertexSet::from_indices(
            self.len,
            support.into_iter().map(|c| self.col_vertex[c]),
        ))
    }
}

/// A set `C ⊆ M ∪ 𝒫` with `Odd(C) \ M = {u}`, if one exists. The echelon
/// solution with every free variable zeroed is returned.
pub fn find_corrector(sig: &Signature, marked: &VertexSet, u: usize) -> Option<VertexSet> {
    CorrectorSystem::new(sig, marked).solve(u)
}

/// A PF-flow encoded by integer layers. Outputs sit at layer 0, a vertex
/// marked in round `k` at layer `k`, inputs one above the highest round.
/// A higher layer is earlier in time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PFFlow {
    pub layer: Vec<u32>,
    pub f: BTreeMap<usize, usize>,
    /// Keyed by `(u, v)`: a `v`-corrector of `u`.
    pub correctors: BTreeMap<(usize, usize), VertexSet>,
    /// Same-layer pairs `(earlier, later)` ordered by the refinement.
    pub refinements: Vec<(usize, usize)>,
}

impl PFFlow {
    /// Strict order `a ≺ b`.
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        if a == b {
            return false;
        }
        if self.layer[a] != self.layer[b] {
            return self.layer[a] > self.layer[b];
        }
        // Same layer: reachable through refinement pairs.
        let mut stack = vec![a];
        let mut seen = BTreeSet::from([a]);
        while let Some(x) = stack.pop() {
            for &(p, q) in &self.refinements {
                if p == x && seen.insert(q) {
                    if q == b {
                        return true;
                    }
                    stack.push(q);
                }
            }
        }
        false
    }

    pub fn past_neighbors(&self, sig: &Signature, v: usize) -> VertexSet {
        VertexSet::from_indices(
            sig.len(),
            sig.neighbors(v).iter().filter(|&u| self.precedes(u, v)),
        )
    }

    pub fn future_neighbors(&self, sig: &Signature, v: usize) -> VertexSet {
        VertexSet::from_indices(
            sig.len(),
            sig.neighbors(v).iter().filter(|&u| self.precedes(v, u)),
        )
    }

    pub fn corrector(&self, u: usize, v: usize) -> Option<&VertexSet> {
        self.correctors.get(&(u, v))
    }

    pub fn to_json(&self, sig: &Signature) -> String {
        let label = |i: usize| sig.label(i).to_string();
        let repr = FlowRepr {
            layers: (0..sig.len()).map(|i| (label(i), self.layer[i])).collect(),
            f: self.f.iter().map(|(&v, &w)| [label(v), label(w)]).collect(),
            correctors: self
                .correctors
                .iter()
                .map(|(&(u, v), c)| CorrectorRepr {
                    u: label(u),
                    v: label(v),
                    set: c.iter().map(label).collect(),
                })
                .collect(),
            refinements: self
                .refinements
                .iter()
                .map(|&(a, b)| [label(a), label(b)])
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&repr).expect("flow serializes");
        s.push('\n');
        s
    }

    pub fn from_json(sig: &Signature, text: &str) -> Result<PFFlow> {
        let repr: FlowRepr = serde_json::from_str(text)?;
        let idx = |context: &str, l: &str| {
            sig.index_of(l)
                .ok_or_else(|| Error::parse(context, format!("unknown vertex `{l}`")))
        };
        let mut layer = vec![None; sig.len()];
        for (l, &n) in &repr.layers {
            layer[idx("layers", l)?] = Some(n);
        }
        let layer = layer
            .into_iter()
            .enumerate()
            .map(|(i, n)| {
                n.ok_or_else(|| Error::parse("layers", format!("no layer for `{}`", sig.label(i))))
            })
            .collect::<Result<Vec<u32>>>()?;
        let mut f = BTreeMap::new();
        for [v, w] in &repr.f {
            f.insert(idx("f", v)?, idx("f", w)?);
        }
        let mut correctors = BTreeMap::new();
        for (i, c) in repr.correctors.iter().enumerate() {
            let ctx = format!("correctors[{i}]");
            let mut set = sig.empty_set();
            for l in &c.set {
                set.insert(idx(&ctx, l)?);
            }
            correctors.insert((idx(&ctx, &c.u)?, idx(&ctx, &c.v)?), set);
        }
        let refinements = repr
            .refinements
            .iter()
            .map(|[a, b]| Ok((idx("refinements", a)?, idx("refinements", b)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(PFFlow {
            layer,
            f,
            correctors,
            refinements,
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorrectorRepr {
    u: String,
    v: String,
    set: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlowRepr {
    layers: BTreeMap<String, u32>,
    f: Vec<[String; 2]>,
    correctors: Vec<CorrectorRepr>,
    #[serde(default)]
    refinements: Vec<[String; 2]>,
}

/// Flow-finding by rounds of marking from the outputs backwards.
///
/// Two adjacent vertices marked in the same round would be incomparable;
/// such pairs are ordered by label (smaller label earlier) and listed in
/// [`PFFlow::refinements`].
pub fn find_pf_flow(sig: &Signature) -> Option<PFFlow> {
    let n = sig.len();
    let spiders = sig.spiders();
    let mut marked = sig.outputs().clone();
    let mut layer = vec![0u32; n];
    let mut f = BTreeMap::new();
    let mut correctors = BTreeMap::new();
    let mut refinements = Vec::new();
    let mut round = 0u32;
    loop {
        round += 1;
        let system = CorrectorSystem::new(sig, &marked);
        let mut correctable = sig.empty_set();
        let mut witness = BTreeMap::new();
        for u in spiders.difference(&marked).iter() {
            if let Some(c) = system.solve(u) {
                correctable.insert(u);
                witness.insert(u, c);
            }
        }
        let mut newly = sig.empty_set();
        for v in spiders.difference(&marked).iter() {
            let nbrs = sig.neighbors(v);
            let near = if nbrs.intersects(&marked) {
                nbrs.difference(&marked)
            } else {
                let mut s = nbrs.clone();
                s.insert(v);
                s
            };
            let uncorrectable = near.difference(&correctable);
            // v itself uncorrectable means no corrector for its own
            // projection, so v cannot be marked.
            if uncorrectable.count() > 1 || uncorrectable.contains(v) {
                continue;
            }
            newly.insert(v);
            layer[v] = round;
            for u in near.intersection(&correctable).iter() {
                correctors.insert((u, v), witness[&u].clone());
            }
            // With nothing marked yet (no outputs) f(v) falls back to v.
            let target = uncorrectable
                .iter()
                .next()
                .or_else(|| marked.iter().next())
                .unwrap_or(v);
            f.insert(v, target);
        }
        if newly.is_empty() {
            break;
        }
        for a in newly.iter() {
            for b in sig.neighbors(a).intersection(&newly).iter() {
                if a < b {
                    refinements.push((a, b));
                }
            }
        }
        marked.union_assign(&newly);
    }
    if !spiders.is_subset(&marked) {
        return None;
    }
    let top = layer.iter().copied().max().unwrap_or(0) + 1;
    for i in sig.inputs().iter() {
        layer[i] = top;
    }
    Some(PFFlow {
        layer,
        f,
        correctors,
        refinements,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlowViolation {
    Shape(String),
    MissingF(String),
    /// Adjacent vertices left incomparable.
    SameLayerAdjacency(String, String),
    OutputPrecedes { output: String, vertex: String },
    InputSucceeds { input: String, vertex: String },
    MissingProjectionCorrector(String),
    MissingCorrector { u: String, v: String },
    NotInOdd { u: String, v: String },
    CorrectorOrder { u: String, v: String, w: String },
}

impl fmt::Display for FlowViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowViolation::Shape(m) => write!(f, "malformed flow: {m}"),
            FlowViolation::MissingF(v) => write!(f, "f is undefined at `{v}`"),
            FlowViolation::SameLayerAdjacency(a, b) => {
                write!(f, "same-layer adjacency: `{a}` and `{b}` are adjacent but incomparable")
            }
            FlowViolation::OutputPrecedes { output, vertex } => {
                write!(f, "ordering: output `{output}` precedes its neighbour `{vertex}`")
            }
            FlowViolation::InputSucceeds { input, vertex } => {
                write!(f, "ordering: input `{input}` succeeds its neighbour `{vertex}`")
            }
            FlowViolation::MissingProjectionCorrector(v) => {
                write!(f, "`{v}` has no future neighbour and no corrector of itself")
            }
            FlowViolation::MissingCorrector { u, v } => {
                write!(f, "past neighbour `{u}` of `{v}` has no corrector")
            }
            FlowViolation::NotInOdd { u, v } => {
                write!(f, "corrector ({u}, {v}): `{u}` is not in its odd neighbourhood")
            }
            FlowViolation::CorrectorOrder { u, v, w } => write!(
                f,
                "corrector ordering: ({u}, {v}) touches `{w}`, which does not strictly follow `{v}`"
            ),
        }
    }
}

/// Checks that `c` is a `v`-corrector of `u` under the flow's order.
fn corrector_violations(sig: &Signature, flow: &PFFlow, u: usize, v: usize, c: &VertexSet) -> Vec<FlowViolation> {
    let mut out = Vec::new();
    let odd = odd_neighborhood(sig, c);
    if !odd.contains(u) {
        out.push(FlowViolation::NotInOdd {
            u: sig.label(u).into(),
            v: sig.label(v).into(),
        });
    }
    let mut touched = c.difference(sig.pinned());
    let mut rest = odd;
    rest.remove(u);
    touched.union_assign(&rest);
    for w in touched.iter() {
        if !flow.precedes(v, w) {
            out.push(FlowViolation::CorrectorOrder {
                u: sig.label(u).into(),
                v: sig.label(v).into(),
                w: sig.label(w).into(),
            });
        }
    }
    out
}

pub fn validate_pf_flow(sig: &Signature, flow: &PFFlow) -> ValidationReport<FlowViolation> {
    let mut report = ValidationReport::default();
    let out = &mut report.violations;
    if flow.layer.len() != sig.len() {
        out.push(FlowViolation::Shape(format!(
            "{} layers for {} vertices",
            flow.layer.len(),
            sig.len()
        )));
        return report;
    }
    let in_range = |i: usize| i < sig.len();
    if !flow.f.iter().all(|(&a, &b)| in_range(a) && in_range(b))
        || !flow.correctors.iter().all(|(&(a, b), c)| in_range(a) && in_range(b) && c.capacity() == sig.len())
        || !flow.refinements.iter().all(|&(a, b)| in_range(a) && in_range(b))
    {
        out.push(FlowViolation::Shape("vertex index out of range".into()));
        return report;
    }
    let name = |i: usize| sig.label(i).to_string();
    for v in sig.spiders().iter() {
        if !flow.f.contains_key(&v) {
            out.push(FlowViolation::MissingF(name(v)));
        }
        for u in sig.neighbors(v).iter() {
            let before = flow.precedes(u, v);
            let after = flow.precedes(v, u);
            if !before && !after {
                if v < u || !sig.spiders().contains(u) {
                    out.push(FlowViolation::SameLayerAdjacency(name(v), name(u)));
                }
            } else if before && sig.outputs().contains(u) {
                out.push(FlowViolation::OutputPrecedes {
                    output: name(u),
                    vertex: name(v),
                });
            } else if after && sig.inputs().contains(u) {
                out.push(FlowViolation::InputSucceeds {
                    input: name(u),
                    vertex: name(v),
                });
            }
        }
        if flow.future_neighbors(sig, v).is_empty() && flow.corrector(v, v).is_none() {
            out.push(FlowViolation::MissingProjectionCorrector(name(v)));
        }
        for u in flow.past_neighbors(sig, v).iter() {
            if flow.f.get(&v) == Some(&u) {
                continue;
            }
            if flow.corrector(u, v).is_none() {
                out.push(FlowViolation::MissingCorrector { u: name(u), v: name(v) });
            }
        }
    }
    for (&(u, v), c) in &flow.correctors {
        out.extend(corrector_violations(sig, flow, u, v, c));
    }
    report
}
