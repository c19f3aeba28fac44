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

//! Exhaustive PF-flow existence check for small signatures.
//!
//! Any PF-flow order can be extended to a total order without breaking a
//! condition: adjacent vertices are already comparable, and corrector
//! conditions only ask for more strict precedences. So it suffices to
//! search total orders. Whether a vertex `x` is acceptable depends only on
//! the set `S` of vertices placed after it, which gives a dynamic program
//! over subsets: `S ∪ {x}` is a feasible suffix when `S` is and `x` is
//! acceptable in front of `S`.

use crate::error::{Error, Result};
use crate::graphlike::Signature;

pub const ORACLE_MAX_VERTICES: usize = 16;

/// Minimal masks `need(C) = (C \ 𝒫) ∪ (Odd(C) \ {u})` over all `C` with
/// `u ∈ Odd(C)`, one list per vertex `u`.
fn minimal_needs(sig: &Signature) -> Vec<Vec<u32>> {
    let n = sig.len();
    let rows: Vec<u32> = (0..n)
        .map(|i| sig.odd_row(i).iter().fold(0u32, |m, j| m | 1 << j))
        .collect();
    let pinned = sig.pinned().iter().fold(0u32, |m, j| m | 1 << j);
    let mut needs: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut odd = vec![0u32; 1 << n];
    for c in 1usize..1 << n {
        let low = c.trailing_zeros() as usize;
        odd[c] = odd[c & (c - 1)] ^ rows[low];
        let base = c as u32 & !pinned;
        let mut rest = odd[c];
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            needs[u].push(base | (odd[c] & !(1 << u)));
        }
    }
    for list in &mut needs {
        list.sort_by_key(|m| (m.count_ones(), *m));
        list.dedup();
        let mut minimal: Vec<u32> = Vec::new();
        for &m in list.iter() {
            if !minimal.iter().any(|&k| k & !m == 0) {
                minimal.push(m);
            }
        }
        *list = minimal;
    }
    needs
}

/// True iff some PF-flow exists for `sig`, decided by brute force.
pub fn exhaustive_flow_oracle(sig: &Signature) -> Result<bool> {
    let n = sig.len();
    if n > ORACLE_MAX_VERTICES {
        return Err(Error::SizeExceeded {
            size: n,
            limit: ORACLE_MAX_VERTICES,
        });
    }
    let needs = minimal_needs(sig);
    let correctable = |u: usize, after: u32| needs[u].iter().any(|&m| m & !after == 0);
    let mask = |s: &crate::flow::VertexSet| s.iter().fold(0u32, |m, j| m | 1 << j);
    let nbr: Vec<u32> = (0..n).map(|i| mask(sig.neighbors(i))).collect();
    let inputs = mask(sig.inputs());
    let outputs = mask(sig.outputs());
    let spiders = mask(sig.spiders());

    let acceptable = |x: usize, after: u32| -> bool {
        if spiders >> x & 1 == 0 {
            return true;
        }
        let nb = nbr[x];
        if nb & outputs & !after != 0 || nb & inputs & after != 0 {
            return false;
        }
        if nb & after == 0 && !correctable(x, after) {
            return false;
        }
        let mut past = nb & !after;
        let mut free = 0;
        while past != 0 {
            let u = past.trailing_zeros() as usize;
            past &= past - 1;
            if !correctable(u, after) {
                free += 1;
                if free > 1 {
                    return false;
                }
            }
        }
        true
    };

    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut feasible = vec![false; 1 << n];
    feasible[0] = true;
    for s in 0..=full {
        if !feasible[s as usize] {
            continue;
        }
        let mut rest = full & !s;
        while rest != 0 {
            let x = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let t = s | 1 << x;
            if !feasible[t as usize] && acceptable(x, s) {
                feasible[t as usize] = true;
            }
        }
    }
    Ok(feasible[full as usize])
}
