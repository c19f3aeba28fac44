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

//! Dense complex matrices with a qubit-count shape.
//!
//! Rows index output bit strings and columns index input bit strings, with
//! the first listed wire as the most significant bit.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseMap {
    pub n_out: usize,
    pub n_in: usize,
    /// Row-major, `2^n_out` rows by `2^n_in` columns.
    pub data: Vec<Complex64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<String>,
}

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl DenseMap {
    pub fn zeros(n_out: usize, n_in: usize) -> Self {
        DenseMap {
            n_out,
            n_in,
            data: vec![Complex64::new(0.0, 0.0); (1 << n_out) * (1 << n_in)],
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..(1 << n) {
            m.set(i, i, c(1.0, 0.0));
        }
        m
    }

    /// Builds from nested rows. Panics if the dimensions are not powers of two.
    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let r = rows.len();
        let cols = rows[0].len();
        assert!(r.is_power_of_two() && cols.is_power_of_two());
        let mut m = Self::zeros(r.trailing_zeros() as usize, cols.trailing_zeros() as usize);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols);
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        m
    }

    pub fn from_real(rows: &[&[f64]]) -> Self {
        let owned: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c(x, 0.0)).collect())
            .collect();
        let refs: Vec<&[Complex64]> = owned.iter().map(|r| r.as_slice()).collect();
        Self::from_rows(&refs)
    }

    pub fn rows(&self) -> usize {
        1 << self.n_out
    }

    pub fn cols(&self) -> usize {
        1 << self.n_in
    }

    pub fn get(&self, r: usize, col: usize) -> Complex64 {
        self.data[r * self.cols() + col]
    }

    pub fn set(&mut self, r: usize, col: usize, v: Complex64) {
        let cols = self.cols();
        self.data[r * cols + col] = v;
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut m = self.clone();
        m.data.iter_mut().for_each(|x| *x *= s);
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.n_in, self.n_out);
        for r in 0..self.rows() {
            for col in 0..self.cols() {
                m.set(col, r, self.get(r, col).conj());
            }
        }
        m.inputs = self.outputs.clone();
        m.outputs = self.inputs.clone();
        m
    }

    /// Matrix product `self · rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &DenseMap) -> Self {
        assert_eq!(self.n_in, rhs.n_out, "inner dimensions differ");
        let mut m = Self::zeros(self.n_out, rhs.n_in);
        let inner = self.cols();
        for r in 0..self.rows() {
            for k in 0..inner {
                let a = self.get(r, k);
                if a == c(0.0, 0.0) {
                    continue;
                }
                for col in 0..rhs.cols() {
                    let idx = r * m.cols() + col;
                    m.data[idx] += a * rhs.get(k, col);
                }
            }
        }
        m
    }

    /// Tensor product, `self` on the more significant qubits.
    pub fn kron(&self, rhs: &DenseMap) -> Self {
        let mut m = Self::zeros(self.n_out + rhs.n_out, self.n_in + rhs.n_in);
        for r1 in 0..self.rows() {
            for c1 in 0..self.cols() {
                let a = self.get(r1, c1);
                for r2 in 0..rhs.rows() {
                    for c2 in 0..rhs.cols() {
                        m.set(
                            r1 * rhs.rows() + r2,
                            c1 * rhs.cols() + c2,
                            a * rhs.get(r2, c2),
                        );
                    }
                }
            }
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        assert_eq!(self.n_in, self.n_out);
        (0..self.rows()).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs_diff(&self, other: &DenseMap) -> f64 {
        assert_eq!((self.n_out, self.n_in), (other.n_out, other.n_in));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &DenseMap, tol: f64) -> bool {
        (self.n_out, self.n_in) == (other.n_out, other.n_in) && self.max_abs_diff(other) <= tol
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.data.iter().all(|x| x.norm() <= tol)
    }
}

impl Add for &DenseMap {
    type Output = DenseMap;
    fn add(self, rhs: &DenseMap) -> DenseMap {
        assert_eq!((self.n_out, self.n_in), (rhs.n_out, rhs.n_in));
        let mut m = self.clone();
        m.data.iter_mut().zip(&rhs.data).for_each(|(a, b)| *a += b);
        m
    }
}

impl Sub for &DenseMap {
    type Output = DenseMap;
    fn sub(self, rhs: &DenseMap) -> DenseMap {
        assert_eq!((self.n_out, self.n_in), (rhs.n_out, rhs.n_in));
        let mut m = self.clone();
        m.data.iter_mut().zip(&rhs.data).for_each(|(a, b)| *a -= b);
        m
    }
}

impl Mul for &DenseMap {
    type Output = DenseMap;
    fn mul(self, rhs: &DenseMap) -> DenseMap {
        self.compose(rhs)
    }
}

/// Finds `c` with `b ≈ c·a`, measured as `‖b − c·a‖_F ≤ tol·‖b‖_F`.
///
/// `c` is read off at the entry of `a` with the largest modulus. Returns
/// `None` when `a` is zero or no such `c` exists.
pub fn proportional(a: &DenseMap, b: &DenseMap, tol: f64) -> Result<Option<Complex64>> {
    if (a.n_out, a.n_in) != (b.n_out, b.n_in) {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let Some((k, pivot)) = a
        .data
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
    else {
        return Ok(None);
    };
    if pivot.norm() == 0.0 {
        return Ok(None);
    }
    let scalar = b.data[k] / pivot;
    let residual: f64 = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (y - scalar * x).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let scale = b.frobenius_norm().max(scalar.norm() * a.frobenius_norm());
    if residual <= tol * scale {
        Ok(Some(scalar))
    } else {
        Ok(None)
    }
}
