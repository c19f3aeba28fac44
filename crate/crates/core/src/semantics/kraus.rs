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

//! Kraus operators of the elementary Pauli Fusion operations.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dense::{c, DenseMap};
use crate::error::{Error, Result};

/// One elementary operation. Rotation angles are in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum KrausOp {
    ProjV,
    ProjH,
    MergeV,
    MergeH,
    SplitV,
    SplitH,
    InitV,
    InitH,
    RotV(f64),
    RotH(f64),
    Had,
    Swap,
}

impl KrausOp {
    /// Whether the operation heralds an outcome bit.
    pub fn emits_bit(self) -> bool {
        matches!(
            self,
            KrausOp::ProjV | KrausOp::ProjH | KrausOp::MergeV | KrausOp::MergeH
        )
    }
}

fn vec2(a: f64, b: f64) -> [Complex64; 2] {
    [c(a, 0.0), c(b, 0.0)]
}

const ZERO: [f64; 2] = [1.0, 0.0];
const ONE: [f64; 2] = [0.0, 1.0];
const PLUS: [f64; 2] = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
const MINUS: [f64; 2] = [FRAC_1_SQRT_2, -FRAC_1_SQRT_2];

/// `Σ_k |out_k⟩⟨in1_k in2_k|` for real single-qubit vectors.
fn two_to_one(terms: &[([f64; 2], [f64; 2], [f64; 2])]) -> DenseMap {
    let mut m = DenseMap::zeros(1, 2);
    for (out, a, b) in terms {
        for r in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let v = m.get(r, 2 * i + j) + c(out[r] * a[i] * b[j], 0.0);
                    m.set(r, 2 * i + j, v);
                }
            }
        }
    }
    m
}

fn bra(v: [f64; 2]) -> DenseMap {
    let [a, b] = vec2(v[0], v[1]);
    DenseMap::from_rows(&[&[a, b]])
}

/// Kraus operator of `op` for heralded `outcome` (0 for operations that
/// emit no bit).
pub fn kraus(op: KrausOp, outcome: u8) -> Result<DenseMap> {
    if outcome > 1 || (!op.emits_bit() && outcome != 0) {
        return Err(Error::InvalidKraus(format!("{op:?} has no outcome {outcome}")));
    }
    let s = FRAC_1_SQRT_2;
    Ok(match (op, outcome) {
        (KrausOp::ProjV, 0) => bra(PLUS),
        (KrausOp::ProjV, _) => bra(MINUS),
        (KrausOp::ProjH, 0) => bra(ZERO),
        (KrausOp::ProjH, _) => bra(ONE),
        (KrausOp::MergeV, 0) => two_to_one(&[(PLUS, PLUS, PLUS), (MINUS, MINUS, MINUS)]),
        (KrausOp::MergeV, _) => two_to_one(&[(PLUS, PLUS, MINUS), (MINUS, MINUS, PLUS)]),
        (KrausOp::MergeH, 0) => two_to_one(&[(ZERO, ZERO, ZERO), (ONE, ONE, ONE)]),
        (KrausOp::MergeH, _) => two_to_one(&[(ZERO, ZERO, ONE), (ONE, ONE, ZERO)]),
        (KrausOp::SplitV, _) => kraus(KrausOp::MergeV, 0)?.adjoint(),
        (KrausOp::SplitH, _) => kraus(KrausOp::MergeH, 0)?.adjoint(),
        (KrausOp::InitV, _) => bra(PLUS).adjoint(),
        (KrausOp::InitH, _) => bra(ZERO).adjoint(),
        (KrausOp::RotV(a), _) => DenseMap::from_rows(&[
            &[Complex64::from_polar(1.0, -a / 2.0), c(0.0, 0.0)],
            &[c(0.0, 0.0), Complex64::from_polar(1.0, a / 2.0)],
        ]),
        (KrausOp::RotH(a), _) => {
            let (cs, sn) = ((a / 2.0).cos(), (a / 2.0).sin());
            DenseMap::from_rows(&[&[c(cs, 0.0), c(0.0, -sn)], &[c(0.0, -sn), c(cs, 0.0)]])
        }
        (KrausOp::Had, _) => DenseMap::from_real(&[&[s, s], &[s, -s]]),
        (KrausOp::Swap, _) => DenseMap::from_real(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]),
    })
}

/// Every `(op, outcome)` pair of the library, with a representative angle
/// for the rotations.
pub fn library(angle: f64) -> Vec<(KrausOp, u8)> {
    let mut out = Vec::new();
    for op in [KrausOp::ProjV, KrausOp::ProjH, KrausOp::MergeV, KrausOp::MergeH] {
        out.push((op, 0));
        out.push((op, 1));
    }
    for op in [
        KrausOp::SplitV,
        KrausOp::SplitH,
        KrausOp::InitV,
        KrausOp::InitH,
        KrausOp::RotV(angle),
        KrausOp::RotH(angle),
        KrausOp::Had,
        KrausOp::Swap,
    ] {
        out.push((op, 0));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn completeness(op: KrausOp) -> DenseMap {
        let k0 = kraus(op, 0).unwrap();
        let k1 = kraus(op, 1).unwrap();
        &k0.adjoint().compose(&k0) + &k1.adjoint().compose(&k1)
    }

    #[test]
    fn projection_on_z_basis() {
        let a = kraus(KrausOp::ProjH, 0).unwrap();
        assert_eq!(a.data, vec![c(1.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn merge_h_zero_copies_basis() {
        let k = kraus(KrausOp::MergeH, 0).unwrap();
        let expected = DenseMap::from_real(&[&[1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 1.0]]);
        assert!(k.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn completeness_identities() {
        assert!(completeness(KrausOp::ProjV).approx_eq(&DenseMap::identity(1), 1e-12));
        assert!(completeness(KrausOp::ProjH).approx_eq(&DenseMap::identity(1), 1e-12));
        assert!(completeness(KrausOp::MergeV).approx_eq(&DenseMap::identity(2), 1e-12));
        assert!(completeness(KrausOp::MergeH).approx_eq(&DenseMap::identity(2), 1e-12));
    }

    #[test]
    fn merge_error_is_pauli_on_second_port() {
        let z = DenseMap::from_real(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let x = DenseMap::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let id = DenseMap::identity(1);
        let kv1 = kraus(KrausOp::MergeV, 0).unwrap().compose(&id.kron(&z));
        assert!(kv1.approx_eq(&kraus(KrausOp::MergeV, 1).unwrap(), 1e-12));
        let kh1 = kraus(KrausOp::MergeH, 0).unwrap().compose(&id.kron(&x));
        assert!(kh1.approx_eq(&kraus(KrausOp::MergeH, 1).unwrap(), 1e-12));
    }

    #[test]
    fn invalid_outcomes() {
        assert!(kraus(KrausOp::Had, 1).is_err());
        assert!(kraus(KrausOp::MergeV, 2).is_err());
    }
}
