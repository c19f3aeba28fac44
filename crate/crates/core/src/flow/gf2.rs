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

//! Bit matrices over GF(2) and Gauss-Jordan elimination.
//!
//! Elimination runs on `[A | I]`, so the row operations are recorded as a
//! transform `E` with `E·A` in reduced row echelon form. A system `A·x = b`
//! is then solvable iff `E·b` vanishes below the rank, and the particular
//! solution with every free variable set to zero is read off the pivot rows.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GF2Matrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl GF2Matrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64).max(1);
        GF2Matrix {
            rows,
            cols,
            words_per_row,
            bits: vec![0; rows * words_per_row],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.words_per_row + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        assert!(r < self.rows && c < self.cols);
        let w = &mut self.bits[r * self.words_per_row + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    /// `A·x` for a 0/1 vector `x` of length `cols`.
    pub fn mul_vec(&self, x: &[bool]) -> Vec<bool> {
        (0..self.rows)
            .map(|r| (0..self.cols).filter(|&c| x[c] && self.get(r, c)).count() % 2 == 1)
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.eliminate().rank
    }

    pub fn eliminate(&self) -> Elimination {
        let width = self.cols + self.rows;
        let wpr = width.div_ceil(64).max(1);
        let mut work = vec![0u64; self.rows * wpr];
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    work[r * wpr + c / 64] |= 1 << (c % 64);
                }
            }
            let c = self.cols + r;
            work[r * wpr + c / 64] |= 1 << (c % 64);
        }
        let bit = |work: &[u64], r: usize, c: usize| work[r * wpr + c / 64] >> (c % 64) & 1 == 1;

        let mut rank = 0;
        let mut pivots = Vec::new();
        for c in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&r| bit(&work, r, c)) else {
                continue;
            };
            if p != rank {
                for k in 0..wpr {
                    work.swap(p * wpr + k, rank * wpr + k);
                }
            }
            for r in 0..self.rows {
                if r != rank && bit(&work, r, c) {
                    for k in 0..wpr {
                        let v = work[rank * wpr + k];
                        work[r * wpr + k] ^= v;
                    }
                }
            }
            pivots.push(c);
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        Elimination {
            rows: self.rows,
            cols: self.cols,
            wpr,
            work,
            rank,
            pivots,
        }
    }
}

/// Result of eliminating a matrix `A`; answers `A·x = b` queries.
#[derive(Clone, Debug)]
pub struct Elimination {
    rows: usize,
    cols: usize,
    wpr: usize,
    work: Vec<u64>,
    pub rank: usize,
    /// Pivot column of each of the first `rank` rows.
    pub pivots: Vec<usize>,
}

impl Elimination {
    fn bit(&self, r: usize, c: usize) -> bool {
        self.work[r * self.wpr + c / 64] >> (c % 64) & 1 == 1
    }

    /// `(E·b)_r`
    fn transformed(&self, r: usize, b: &[bool]) -> bool {
        (0..self.rows).filter(|&k| b[k] && self.bit(r, self.cols + k)).count() % 2 == 1
    }

    /// Particular solution of `A·x = b` with free variables zeroed.
    pub fn solve(&self, b: &[bool]) -> Option<Vec<bool>> {
        assert_eq!(b.len(), self.rows);
        if (self.rank..self.rows).any(|r| self.transformed(r, b)) {
            return None;
        }
        let mut x = vec![false; self.cols];
        for (r, &p) in self.pivots.iter().enumerate() {
            x[p] = self.transformed(r, b);
        }
        Some(x)
    }

    /// Solution support of `A·x = e_row`, the unit vector on `row`.
    pub fn solve_unit(&self, row: usize) -> Option<Vec<usize>> {
        let col = self.cols + row;
        if (self.rank..self.rows).any(|r| self.bit(r, col)) {
            return None;
        }
        Some(
            self.pivots
                .iter()
                .enumerate()
                .filter(|&(r, _)| self.bit(r, col))
                .map(|(_, &p)| p)
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn matrix(rows: usize, cols: usize, bits: &[bool]) -> GF2Matrix {
        let mut m = GF2Matrix::new(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, bits[r * cols + c]);
            }
        }
        m
    }

    #[test]
    fn identity_rank() {
        let mut m = GF2Matrix::new(3, 3);
        for i in 0..3 {
            m.set(i, i, true);
        }
        assert_eq!(m.rank(), 3);
    }

    #[test]
    fn free_variables_are_zeroed() {
        // x0 + x1 = 1 has solutions (1,0) and (0,1); echelon choice is (1,0).
        let m = matrix(1, 2, &[true, true]);
        assert_eq!(m.eliminate().solve(&[true]), Some(vec![true, false]));
    }

    #[test]
    fn inconsistent_system() {
        let m = matrix(2, 1, &[true, true]);
        let e = m.eliminate();
        assert_eq!(e.solve(&[true, false]), None);
        assert_eq!(e.solve_unit(0), None);
        assert_eq!(e.solve(&[true, true]), Some(vec![true]));
    }

    proptest! {
        #[test]
        fn solutions_are_sound_and_complete(
            rows in 1usize..7,
            cols in 1usize..7,
            seed in proptest::collection::vec(any::<bool>(), 49),
            rhs in proptest::collection::vec(any::<bool>(), 7),
        ) {
            let m = matrix(rows, cols, &seed[..rows * cols]);
            let b = &rhs[..rows];
            let e = m.eliminate();
            prop_assert!(e.rank <= rows.min(cols));
            let brute = (0..1u32 << cols).any(|mask| {
                let x: Vec<bool> = (0..cols).map(|c| mask >> c & 1 == 1).collect();
                m.mul_vec(&x) == b
            });
            match e.solve(b) {
                Some(x) => prop_assert_eq!(m.mul_vec(&x), b.to_vec()),
                None => prop_assert!(!brute),
            }
            prop_assert_eq!(e.solve(b).is_some(), brute);
            for r in 0..rows {
                let unit: Vec<bool> = (0..rows).map(|k| k == r).collect();
                let support = e.solve_unit(r);
                prop_assert_eq!(support.is_some(), e.solve(&unit).is_some());
                if let Some(s) = support {
                    let x: Vec<bool> = (0..cols).map(|c| s.contains(&c)).collect();
                    prop_assert_eq!(m.mul_vec(&x), unit);
                }
            }
        }
    }
}
