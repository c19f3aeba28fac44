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

//! Branch-determinism verification of compiled PF diagrams.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::dense::{proportional, DenseMap};
use super::eval::{eval_zx_with, ContractionPlan, EvalConfig, DEFAULT_WIDTH_CAP};
use crate::error::{Error, Result};
use crate::pf::{branch_diagram, BranchString, PFDiagram};
use crate::zx::ZXDiagram;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_BRANCH_CAP: usize = 1 << 16;
/// Branches drawn when exhaustive enumeration exceeds the cap.
pub const SAMPLED_BRANCHES: usize = 256;

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub tol: f64,
    /// Exhaustive enumeration is used while `2^|bits|` stays within this cap.
    pub branch_cap: usize,
    pub width_cap: usize,
    pub seed: u64,
    /// Values of bits not heralded by the diagram itself.
    pub external: BranchString,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            tol: DEFAULT_TOLERANCE,
            branch_cap: DEFAULT_BRANCH_CAP,
            width_cap: DEFAULT_WIDTH_CAP,
            seed: 0,
            external: BranchString::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchResult {
    /// One character per heralded bit, in the order of `VerificationReport::bits`.
    pub branch: String,
    /// `c` with `branch map ≈ c·⟦source⟧`, absent when not proportional.
    pub scalar: Option<Complex64>,
    /// `scalar / reference_scalar`.
    pub ratio: Option<Complex64>,
    /// `+1` or `−1` when the ratio is one of them.
    pub sign: Option<i8>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub bits: Vec<String>,
    pub exhaustive: bool,
    pub branches: Vec<BranchResult>,
    pub reference_scalar: Option<Complex64>,
    /// Largest distance of a branch ratio from the unit circle.
    pub max_deviation: f64,
    /// Every branch map is `c·ω·⟦source⟧` for one nonzero `c` and a phase `ω`.
    pub passed: bool,
    /// Additionally every `ω` is `±1`.
    pub signs_only: bool,
    pub failing: Vec<String>,
    /// Branches whose phase is neither `+1` nor `−1`.
    pub non_sign: Vec<String>,
}

impl VerificationReport {
    /// `g(s)`: the branches whose map carries a `−1` relative to branch zero.
    pub fn sign_pattern(&self) -> Vec<(String, i8)> {
        self.branches
            .iter()
            .filter_map(|b| b.sign.map(|s| (b.branch.clone(), s)))
            .collect()
    }
}

fn decode(bits: &[String], mask: u64) -> BranchString {
    bits.iter()
        .enumerate()
        .map(|(i, b)| (b.clone(), mask >> i & 1 == 1))
        .collect()
}

fn encode(bits: &[String], mask: u64) -> String {
    (0..bits.len())
        .map(|i| if mask >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn check_wires(compiled: &PFDiagram, source: &ZXDiagram) -> Result<()> {
    let ci: Vec<&str> = compiled.inputs.iter().map(|w| w.wire.as_str()).collect();
    let co: Vec<&str> = compiled.outputs.iter().map(|w| w.wire.as_str()).collect();
    let si: Vec<&str> = source.inputs.iter().map(|w| w.wire.as_str()).collect();
    let so: Vec<&str> = source.outputs.iter().map(|w| w.wire.as_str()).collect();
    if ci != si || co != so {
        return Err(Error::ShapeMismatch(format!(
            "compiled wires {ci:?} -> {co:?}, source wires {si:?} -> {so:?}"
        )));
    }
    Ok(())
}

/// Compares every branch map of `compiled` with `⟦source⟧`. Passes when all
/// branches share one nonzero scalar up to a phase; `signs_only` records
/// whether every such phase is `±1`.
pub fn check_determinism(
    compiled: &PFDiagram,
    source: &ZXDiagram,
    config: &VerifyConfig,
) -> Result<VerificationReport> {
    check_wires(compiled, source)?;
    let eval_config = EvalConfig {
        width_cap: config.width_cap,
    };
    let reference = eval_zx_with(source, eval_config)?;
    if reference.is_zero(1e-12) {
        return Err(Error::ZeroReference);
    }
    let bits = compiled.internal_bits();
    let n = bits.len();
    let exhaustive = n < 63 && (1u64 << n) <= config.branch_cap as u64;
    let masks: Vec<u64> = if exhaustive {
        (0..1u64 << n).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut m = vec![0u64];
        m.extend((1..SAMPLED_BRANCHES).map(|_| {
            (0..n).fold(0u64, |acc, i| acc | (u64::from(rng.gen::<bool>()) << i))
        }));
        m
    };

    let zero = branch_diagram(compiled, &decode(&bits, 0), &config.external)?;
    let plan = ContractionPlan::new(&zero, eval_config)?;
    let scalars: Vec<Option<Complex64>> = masks
        .par_iter()
        .map(|&mask| -> Result<Option<Complex64>> {
            let d = branch_diagram(compiled, &decode(&bits, mask), &config.external)?;
            let m: DenseMap = plan.evaluate(&d);
            proportional(&reference, &m, config.tol)
        })
        .collect::<Result<_>>()?;

    let reference_scalar = scalars[0].filter(|c| c.norm() > 1e-12);
    let mut branches = Vec::with_capacity(masks.len());
    let mut failing = Vec::new();
    let mut non_sign = Vec::new();
    let mut max_deviation: f64 = 0.0;
    for (&mask, scalar) in masks.iter().zip(&scalars) {
        let label = encode(&bits, mask);
        let ratio = match (reference_scalar, scalar) {
            (Some(c0), Some(c)) if c.norm() > 1e-12 => Some(c / c0),
            _ => None,
        };
        let mut sign = None;
        match ratio {
            Some(r) => {
                let dev = (r.norm() - 1.0).abs();
                max_deviation = max_deviation.max(dev);
                if dev > config.tol {
                    failing.push(label.clone());
                }
                if (r - 1.0).norm() <= config.tol {
                    sign = Some(1);
                } else if (r + 1.0).norm() <= config.tol {
                    sign = Some(-1);
                } else {
                    non_sign.push(label.clone());
                }
            }
            None => {
                max_deviation = f64::INFINITY;
                failing.push(label.clone());
                non_sign.push(label.clone());
            }
        }
        branches.push(BranchResult {
            branch: label,
            scalar: *scalar,
            ratio,
            sign,
        });
    }
    Ok(VerificationReport {
        bits,
        exhaustive,
        passed: failing.is_empty(),
        signs_only: failing.is_empty() && non_sign.is_empty(),
        branches,
        reference_scalar,
        max_deviation,
        failing,
        non_sign,
    })
}
