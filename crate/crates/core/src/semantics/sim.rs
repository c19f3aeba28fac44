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

//! Operational semantics: heralded execution of a runnable PF diagram on a
//! state vector, and exact channel application.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::dense::DenseMap;
use super::eval::{ContractionPlan, EvalConfig};
use super::kraus::kraus;
use crate::error::{Error, Result};
use crate::pf::{branch_assignment, branch_diagram, theta, time_ordering, BranchString, PFDiagram, Port};
use crate::phase::Phase;

/// Probability below which an outcome is treated as impossible.
pub const COLLAPSE_THRESHOLD: f64 = 1e-12;
/// Largest number of heralded bits `apply_channel` enumerates.
pub const CHANNEL_MAX_BITS: usize = 16;

#[derive(Clone, Debug, Serialize)]
pub struct RunResult {
    /// Normalized output state over the output wires, first wire most
    /// significant.
    pub state: Vec<Complex64>,
    pub outcomes: BranchString,
    pub log: Vec<String>,
}

/// State vector over a list of live wire ids, first id most significant.
struct Register {
    wires: Vec<usize>,
    amp: Vec<Complex64>,
}

impl Register {
    /// Applies `k` (rows over `outs`, columns over `ins`) and returns the new
    /// register. Consumed wires leave, produced wires are appended.
    fn apply(&self, k: &DenseMap, ins: &[usize], outs: &[usize]) -> Register {
        let n = self.wires.len();
        let pos: Vec<usize> = ins
            .iter()
            .map(|w| self.wires.iter().position(|x| x == w).expect("live wire"))
            .collect();
        let rest: Vec<usize> = (0..n).filter(|p| !pos.contains(p)).collect();
        let mut wires: Vec<usize> = rest.iter().map(|&p| self.wires[p]).collect();
        wires.extend_from_slice(outs);
        let no = outs.len();
        let mut amp = vec![Complex64::new(0.0, 0.0); 1 << wires.len()];
        let bit = |b: usize, p: usize| (b >> (n - 1 - p)) & 1;
        for (b, &a) in self.amp.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let col = pos.iter().fold(0, |acc, &p| acc << 1 | bit(b, p));
            let r = rest.iter().fold(0, |acc, &p| acc << 1 | bit(b, p));
            for row in 0..1usize << no {
                let v = k.get(row, col);
                if v != Complex64::new(0.0, 0.0) {
                    amp[r << no | row] += v * a;
                }
            }
        }
        Register { wires, amp }
    }

    fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    fn scale(&mut self, s: f64) {
        self.amp.iter_mut().for_each(|a| *a *= s);
    }

    /// Amplitudes reordered to follow `order`.
    fn ordered(&self, order: &[usize]) -> Vec<Complex64> {
        let n = self.wires.len();
        let pos: Vec<usize> = order
            .iter()
            .map(|w| self.wires.iter().position(|x| x == w).expect("live wire"))
            .collect();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amp.len()];
        for (b, &a) in self.amp.iter().enumerate() {
            let t = pos.iter().fold(0, |acc, &p| acc << 1 | ((b >> (n - 1 - p)) & 1));
            out[t] = a;
        }
        out
    }
}

/// Runs `d` on `input` (amplitudes over the input wires), sampling every
/// heralded outcome with its Born probability. External bits come from `r`.
pub fn run_procedure(d: &PFDiagram, input: &[Complex64], r: &BranchString, seed: u64) -> Result<RunResult> {
    d.ensure_valid()?;
    let order = time_ordering(d).ok_or_else(|| {
        let cycle = d.dependency_cycle().unwrap_or_default();
        Error::NotRunnable(format!("dependency cycle through {}", cycle.join(" -> ")))
    })?;
    if input.len() != 1 << d.inputs.len() {
        return Err(Error::ShapeMismatch(format!(
            "input state has {} amplitudes, the diagram has {} input wires",
            input.len(),
            d.inputs.len()
        )));
    }
    // Every connection gets a wire id: inputs first, then edges, then outputs.
    let mut feeds: BTreeMap<Port, usize> = BTreeMap::new();
    let mut drains: BTreeMap<Port, usize> = BTreeMap::new();
    let mut next = 0;
    for w in &d.inputs {
        feeds.insert(w.port(), next);
        next += 1;
    }
    for e in &d.edges {
        drains.insert(e.from.clone(), next);
        feeds.insert(e.to.clone(), next);
        next += 1;
    }
    let outputs: Vec<usize> = d
        .outputs
        .iter()
        .map(|w| {
            drains.insert(w.port(), next);
            next += 1;
            next - 1
        })
        .collect();

    let mut reg = Register {
        wires: (0..d.inputs.len()).collect(),
        amp: input.to_vec(),
    };
    let norm = reg.norm_sqr().sqrt();
    if norm < COLLAPSE_THRESHOLD {
        return Err(Error::NormCollapse("input".into()));
    }
    reg.scale(1.0 / norm);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outcomes = BranchString::new();
    let mut log = Vec::new();
    for layer in order.layers() {
        for label in layer {
            let op = &d.nodes[&label];
            let (ni, no) = op.arity();
            let ins: Vec<usize> = (0..ni).map(|p| feeds[&Port::new(label.clone(), p)]).collect();
            let outs: Vec<usize> = (0..no).map(|p| drains[&Port::new(label.clone(), p)]).collect();
            let angle = match op.annotation() {
                Some(a) => theta(a, &branch_assignment(d, &outcomes, r))?,
                None => Phase::ZERO,
            };
            let kop = op.kraus_op(angle);
            if !op.emits_bit() {
                reg = reg.apply(&kraus(kop, 0)?, &ins, &outs);
                continue;
            }
            let branches = [reg.apply(&kraus(kop, 0)?, &ins, &outs), reg.apply(&kraus(kop, 1)?, &ins, &outs)];
            let p = [branches[0].norm_sqr(), branches[1].norm_sqr()];
            let total = p[0] + p[1];
            if total < COLLAPSE_THRESHOLD {
                return Err(Error::NormCollapse(label));
            }
            let mut s = usize::from(rng.gen::<f64>() * total >= p[0]);
            if p[s] < COLLAPSE_THRESHOLD {
                log.push(format!("{label}: outcome {s} has probability {:.3e}; forced {}", p[s] / total, 1 - s));
                s = 1 - s;
            }
            let [b0, b1] = branches;
            reg = if s == 0 { b0 } else { b1 };
            reg.scale(1.0 / p[s].sqrt());
            outcomes.insert(label.clone(), s == 1);
            log.push(format!("{label}: outcome {s} (p = {:.6})", p[s] / total));
        }
    }
    Ok(RunResult {
        state: reg.ordered(&outputs),
        outcomes,
        log,
    })
}

/// The linear map of branch `x`: the composition of the Kraus operators the
/// procedure applies when the heralded bits come out as `x`.
pub fn branch_operator(d: &PFDiagram, x: &BranchString, r: &BranchString) -> Result<DenseMap> {
    super::eval::eval_zx(&branch_diagram(d, x, r)?)
}

/// `ρ ↦ Σ_x ⟦D(x)⟧ ρ ⟦D(x)⟧†` over all heralded branches, external bits
/// fixed to `r`.
pub fn apply_channel(d: &PFDiagram, rho: &DenseMap, r: &BranchString, config: EvalConfig) -> Result<DenseMap> {
    let bits = d.internal_bits();
    if bits.len() > CHANNEL_MAX_BITS {
        return Err(Error::SizeExceeded {
            size: bits.len(),
            limit: CHANNEL_MAX_BITS,
        });
    }
    let dim_in = 1usize << d.inputs.len();
    if rho.rows() != dim_in || rho.cols() != dim_in {
        return Err(Error::ShapeMismatch(format!(
            "density matrix is {}x{}, the diagram has {} input wires",
            rho.rows(),
            rho.cols(),
            d.inputs.len()
        )));
    }
    let assign = |mask: usize| -> BranchString {
        bits.iter().enumerate().map(|(i, b)| (b.clone(), mask >> i & 1 == 1)).collect()
    };
    let plan = ContractionPlan::new(&branch_diagram(d, &assign(0), r)?, config)?;
    let mut out = DenseMap::zeros(d.outputs.len(), d.outputs.len());
    for mask in 0..1usize << bits.len() {
        let m = plan.evaluate(&branch_diagram(d, &assign(mask), r)?);
        let term = m.compose(rho).compose(&m.adjoint());
        for (a, b) in out.data.iter_mut().zip(&term.data) {
            *a += b;
        }
    }
    Ok(out)
}
