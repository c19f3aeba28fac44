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

//! Dense evaluation of ZX diagrams by greedy tensor contraction.
//!
//! Each edge and each open wire is a tensor index. Nodes are absorbed one at
//! a time into a single accumulated tensor; the next node is the one that
//! leaves the smallest frontier, ties broken by label. The order depends only
//! on the diagram's structure, so a [`ContractionPlan`] can be reused across
//! diagrams that differ only in phases, such as the branches of a PF diagram.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::dense::DenseMap;
use crate::error::{Error, Result};
use crate::zx::{NodeKind, ZXDiagram, ZXNode};

pub const DEFAULT_WIDTH_CAP: usize = 12;

#[derive(Clone, Copy, Debug)]
pub struct EvalConfig {
    /// Largest number of open indices allowed on the accumulated tensor.
    pub width_cap: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            width_cap: DEFAULT_WIDTH_CAP,
        }
    }
}

/// A dense tensor; `idx[0]` is the most significant bit of the data index.
#[derive(Clone, Debug)]
struct Tensor {
    idx: Vec<usize>,
    data: Vec<Complex64>,
}

impl Tensor {
    fn scalar(v: Complex64) -> Self {
        Tensor {
            idx: Vec::new(),
            data: vec![v],
        }
    }

    fn bit(&self, entry: usize, pos: usize) -> usize {
        (entry >> (self.idx.len() - 1 - pos)) & 1
    }

    /// Sums over pairs of equal indices (self-loops).
    fn trace_duplicates(self) -> Tensor {
        let mut t = self;
        loop {
            let mut pair = None;
            'find: for i in 0..t.idx.len() {
                for j in (i + 1)..t.idx.len() {
                    if t.idx[i] == t.idx[j] {
                        pair = Some((i, j));
                        break 'find;
                    }
                }
            }
            let Some((i, j)) = pair else { return t };
            let keep: Vec<usize> = (0..t.idx.len()).filter(|&p| p != i && p != j).collect();
            let mut data = vec![Complex64::new(0.0, 0.0); 1 << keep.len()];
            for (entry, v) in t.data.iter().enumerate() {
                if t.bit(entry, i) != t.bit(entry, j) {
                    continue;
                }
                let mut out = 0;
                for &p in &keep {
                    out = (out << 1) | t.bit(entry, p);
                }
                data[out] += v;
            }
            t = Tensor {
                idx: keep.iter().map(|&p| t.idx[p]).collect(),
                data,
            };
        }
    }

    /// Contracts all shared indices; result indices are `self`'s free
    /// indices followed by `other`'s.
    fn contract(&self, other: &Tensor) -> Tensor {
        let shared: Vec<usize> = self
            .idx
            .iter()
            .copied()
            .filter(|i| other.idx.contains(i))
            .collect();
        let a_free: Vec<usize> = (0..self.idx.len())
            .filter(|&p| !shared.contains(&self.idx[p]))
            .collect();
        let b_free: Vec<usize> = (0..other.idx.len())
            .filter(|&p| !shared.contains(&other.idx[p]))
            .collect();
        let a_shared: Vec<usize> = shared
            .iter()
            .map(|s| self.idx.iter().position(|x| x == s).unwrap())
            .collect();
        let b_shared: Vec<usize> = shared
            .iter()
            .map(|s| other.idx.iter().position(|x| x == s).unwrap())
            .collect();
        let ns = shared.len();
        let (na, nb) = (a_free.len(), b_free.len());

        // Reshape into matrices A[free_a][shared] and B[shared][free_b].
        let mut a_mat = vec![Complex64::new(0.0, 0.0); (1 << na) << ns];
        for (entry, v) in self.data.iter().enumerate() {
            let mut r = 0;
            for &p in &a_free {
                r = (r << 1) | self.bit(entry, p);
            }
            let mut s = 0;
            for &p in &a_shared {
                s = (s << 1) | self.bit(entry, p);
            }
            a_mat[(r << ns) | s] = *v;
        }
        let mut b_mat = vec![Complex64::new(0.0, 0.0); (1 << ns) << nb];
        for (entry, v) in other.data.iter().enumerate() {
            let mut s = 0;
            for &p in &b_shared {
                s = (s << 1) | other.bit(entry, p);
            }
            let mut r = 0;
            for &p in &b_free {
                r = (r << 1) | other.bit(entry, p);
            }
            b_mat[(s << nb) | r] = *v;
        }
        let mut data = vec![Complex64::new(0.0, 0.0); (1 << na) << nb];
        for r in 0..(1 << na) {
            for s in 0..(1 << ns) {
                let av = a_mat[(r << ns) | s];
                if av.re == 0.0 && av.im == 0.0 {
                    continue;
                }
                let brow = &b_mat[(s << nb)..((s + 1) << nb)];
                let out = &mut data[(r << nb)..((r + 1) << nb)];
                for (o, bv) in out.iter_mut().zip(brow) {
                    *o += av * bv;
                }
            }
        }
        let mut idx: Vec<usize> = a_free.iter().map(|&p| self.idx[p]).collect();
        idx.extend(b_free.iter().map(|&p| other.idx[p]));
        Tensor { idx, data }
    }

    fn permuted(&self, order: &[usize]) -> Vec<Complex64> {
        let pos: Vec<usize> = order
            .iter()
            .map(|i| self.idx.iter().position(|x| x == i).expect("index present"))
            .collect();
        let mut out = vec![Complex64::new(0.0, 0.0); self.data.len()];
        for (entry, v) in self.data.iter().enumerate() {
            let mut k = 0;
            for &p in &pos {
                k = (k << 1) | self.bit(entry, p);
            }
            out[k] = *v;
        }
        out
    }
}

/// The tensor of a single generator over `legs` (duplicates allowed).
fn node_tensor(node: &ZXNode, legs: &[usize]) -> Tensor {
    let m = legs.len();
    let mut data = vec![Complex64::new(0.0, 0.0); 1 << m];
    let phase = Complex64::from_polar(1.0, node.phase.to_radians());
    match node.kind {
        NodeKind::Z => {
            data[0] += Complex64::new(1.0, 0.0);
            data[(1 << m) - 1] += phase;
        }
        NodeKind::X => {
            let norm = std::f64::consts::FRAC_1_SQRT_2.powi(m as i32);
            for (entry, v) in data.iter_mut().enumerate() {
                let sign = if entry.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                *v = (Complex64::new(1.0, 0.0) + phase * sign) * norm;
            }
        }
        NodeKind::H => {
            assert_eq!(m, 2, "Hadamard node must have two legs");
            let s = std::f64::consts::FRAC_1_SQRT_2;
            data = vec![
                Complex64::new(s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(-s, 0.0),
            ];
        }
    }
    Tensor {
        idx: legs.to_vec(),
        data,
    }
    .trace_duplicates()
}

/// Contraction order plus index bookkeeping for one diagram shape.
#[derive(Clone, Debug)]
pub struct ContractionPlan {
    steps: Vec<(String, Vec<usize>)>,
    output_order: Vec<usize>,
    n_in: usize,
    n_out: usize,
    /// Largest frontier reached during contraction.
    pub max_width: usize,
}

impl ContractionPlan {
    pub fn new(d: &ZXDiagram, config: EvalConfig) -> Result<Self> {
        d.ensure_valid()?;
        let n_edges = d.edges.len();
        let mut legs: BTreeMap<&str, Vec<usize>> =
            d.nodes.keys().map(|k| (k.as_str(), Vec::new())).collect();
        for (k, (a, b)) in d.edges.iter().enumerate() {
            legs.get_mut(a.as_str()).unwrap().push(k);
            legs.get_mut(b.as_str()).unwrap().push(k);
        }
        let mut output_order = Vec::new();
        for (j, w) in d.outputs.iter().enumerate() {
            let id = n_edges + d.inputs.len() + j;
            legs.get_mut(w.node.as_str()).unwrap().push(id);
            output_order.push(id);
        }
        for (j, w) in d.inputs.iter().enumerate() {
            let id = n_edges + j;
            legs.get_mut(w.node.as_str()).unwrap().push(id);
            output_order.push(id);
        }

        // Unique (post-trace) index sets, used for greedy scheduling.
        let unique = |l: &Vec<usize>| -> Vec<usize> {
            let mut out = Vec::new();
            for &i in l {
                if l.iter().filter(|&&x| x == i).count() == 1 {
                    out.push(i);
                }
            }
            out
        };
        let mut remaining: Vec<(&str, Vec<usize>)> =
            legs.iter().map(|(k, l)| (*k, unique(l))).collect();
        let mut frontier: Vec<usize> = Vec::new();
        let mut steps = Vec::new();
        let mut max_width = 0;
        while !remaining.is_empty() {
            let mut best: Option<(usize, usize, usize)> = None;
            for (pos, (_, idx)) in remaining.iter().enumerate() {
                let shared = idx.iter().filter(|i| frontier.contains(i)).count();
                let new_width = frontier.len() + idx.len() - 2 * shared;
                let disconnected = usize::from(shared == 0 && !frontier.is_empty());
                let key = (disconnected, new_width, pos);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
            let (_, new_width, pos) = best.unwrap();
            if new_width > config.width_cap {
                return Err(Error::WidthExceeded {
                    width: new_width,
                    cap: config.width_cap,
                });
            }
            let (label, idx) = remaining.remove(pos);
            let shared: Vec<usize> = idx.iter().copied().filter(|i| frontier.contains(i)).collect();
            frontier.retain(|i| !shared.contains(i));
            frontier.extend(idx.iter().copied().filter(|i| !shared.contains(i)));
            max_width = max_width.max(frontier.len());
            steps.push((label.to_string(), legs[label].clone()));
        }
        Ok(ContractionPlan {
            steps,
            output_order,
            n_in: d.inputs.len(),
            n_out: d.outputs.len(),
            max_width,
        })
    }

    /// Evaluates a diagram with the same shape as the one the plan was built from.
    pub fn evaluate(&self, d: &ZXDiagram) -> DenseMap {
        let mut acc = Tensor::scalar(d.scalar);
        for (label, legs) in &self.steps {
            let node = &d.nodes[label];
            acc = acc.contract(&node_tensor(node, legs));
        }
        let data = if acc.idx.is_empty() {
            acc.data
        } else {
            acc.permuted(&self.output_order)
        };
        DenseMap {
            n_out: self.n_out,
            n_in: self.n_in,
            data,
            inputs: d.inputs.iter().map(|w| w.wire.clone()).collect(),
            outputs: d.outputs.iter().map(|w| w.wire.clone()).collect(),
        }
    }
}

/// The standard interpretation of `d` as a `2^outputs × 2^inputs` matrix.
///
/// Z spiders are `Σ_b e^{ibα}|b…b⟩⟨b…b|`, X spiders their Hadamard
/// conjugates, and `H` the normalized Hadamard matrix. No per-spider scalar
/// normalization is applied.
pub fn eval_zx(d: &ZXDiagram) -> Result<DenseMap> {
    eval_zx_with(d, EvalConfig::default())
}

pub fn eval_zx_with(d: &ZXDiagram, config: EvalConfig) -> Result<DenseMap> {
    Ok(ContractionPlan::new(d, config)?.evaluate(d))
}
