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

//! Exact phases, stored as reduced rational multiples of π in `[0, 2)`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A phase `(num/den)·π`, always reduced with `0 <= num < 2·den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase {
    num: i64,
    den: i64,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Phase {
    pub const ZERO: Phase = Phase { num: 0, den: 1 };
    pub const PI: Phase = Phase { num: 1, den: 1 };
    pub const HALF_PI: Phase = Phase { num: 1, den: 2 };

    /// Builds `(num/den)·π`, reducing and wrapping into `[0, 2π)`.
    ///
    /// Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Phase {
        assert!(den != 0, "phase denominator must be nonzero");
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd(num, den).max(1);
        num /= g;
        den /= g;
        num = num.rem_euclid(2 * den);
        if num == 0 {
            den = 1;
        }
        Phase { num, den }
    }

    /// Strict constructor used by the file formats: the fraction must already
    /// be reduced and have a positive denominator. Out-of-range numerators
    /// are still wrapped mod 2π.
    pub fn from_file(num: i64, den: i64) -> Result<Phase> {
        if den <= 0 {
            return Err(Error::InvalidPhase {
                num,
                den,
                reason: "denominator must be positive",
            });
        }
        if gcd(num, den) != 1 && !(num == 0 && den == 1) {
            return Err(Error::InvalidPhase {
                num,
                den,
                reason: "fraction is not reduced",
            });
        }
        Ok(Phase::new(num, den))
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_multiple_of_pi(&self) -> bool {
        self.den == 1
    }

    pub fn is_multiple_of_half_pi(&self) -> bool {
        self.den <= 2
    }

    pub fn is_odd_multiple_of_half_pi(&self) -> bool {
        self.den == 2 && self.num % 2 == 1
    }

    /// The phase in radians, in `[0, 2π)`.
    pub fn to_radians(&self) -> f64 {
        std::f64::consts::PI * self.num as f64 / self.den as f64
    }

    /// `bit·π`
    pub fn from_bit(bit: bool) -> Phase {
        if bit {
            Phase::PI
        } else {
            Phase::ZERO
        }
    }
}

impl Default for Phase {
    fn default() -> Self {
        Phase::ZERO
    }
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        Phase::new(self.num * rhs.den + rhs.num * self.den, self.den * rhs.den)
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        Phase::new(-self.num, self.den)
    }
}

impl Sub for Phase {
    type Output = Phase;
    fn sub(self, rhs: Phase) -> Phase {
        self + (-rhs)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.num, self.den) {
            (0, _) => write!(f, "0"),
            (1, 1) => write!(f, "π"),
            (n, 1) => write!(f, "{n}π"),
            (1, d) => write!(f, "π/{d}"),
            (n, d) => write!(f, "{n}π/{d}"),
        }
    }
}

/// On-disk form `{"num": n, "den": d}`.
#[derive(Serialize, Deserialize)]
struct PhaseRepr {
    num: i64,
    den: i64,
}

impl Serialize for Phase {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PhaseRepr {
            num: self.num,
            den: self.den,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PhaseRepr::deserialize(d)?;
        Phase::from_file(r.num, r.den).map_err(serde::de::Error::custom)
    }
}
