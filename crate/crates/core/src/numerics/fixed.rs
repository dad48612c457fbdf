use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::bigfloat::BigFloat;
use super::rational::Rational;
use crate::error::{Error, Result};

/// Two's-complement fixed-point format with `int_bits` integer bits (sign
/// bit included) and `frac_bits` fractional bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FixedSpec {
    pub int_bits: u32,
    pub frac_bits: u32,
}

impl FixedSpec {
    pub fn new(int_bits: u32, frac_bits: u32) -> Result<Self> {
        if int_bits == 0 || int_bits + frac_bits > 126 {
            return Err(Error::Precondition(format!(
                "fixed-point format needs 1 <= int_bits and int_bits + frac_bits <= 126, got {int_bits}+{frac_bits}"
            )));
        }
        Ok(FixedSpec {
            int_bits,
            frac_bits,
        })
    }

    fn total(&self) -> u32 {
        self.int_bits + self.frac_bits
    }

    /// Smallest raw value.
    pub fn raw_min(&self) -> i128 {
        -(1i128 << (self.total() - 1))
    }

    /// Largest raw value.
    pub fn raw_max(&self) -> i128 {
        (1i128 << (self.total() - 1)) - 1
    }

    pub fn min_value(&self) -> FixedPoint {
        FixedPoint {
            raw: self.raw_min(),
            spec: *self,
        }
    }

    pub fn max_value(&self) -> FixedPoint {
        FixedPoint {
            raw: self.raw_max(),
            spec: *self,
        }
    }

    fn saturate(&self, v: BigInt) -> i128 {
        match v.to_i128() {
            Some(r) => r.clamp(self.raw_min(), self.raw_max()),
            None if v.is_negative() => self.raw_min(),
            None => self.raw_max(),
        }
    }

    /// Rounds `x * 2^frac_bits` to the nearest integer (ties to even) and
    /// saturates.
    pub fn quantize(&self, x: &Rational) -> FixedPoint {
        let scaled = x * &Rational::from_integer(BigInt::one() << self.frac_bits);
        let (num, den) = (scaled.numer(), scaled.denom());
        let (q, r) = num.div_mod_floor(den);
        let twice: BigInt = r << 1u32;
        let q = if twice > *den || (twice == *den && q.is_odd()) {
            q + 1
        } else {
            q
        };
        FixedPoint {
            raw: self.saturate(q),
            spec: *self,
        }
    }

    pub fn quantize_float(&self, x: &BigFloat) -> FixedPoint {
        self.quantize(&x.to_rational())
    }
}

impl fmt::Display for FixedSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q{}.{}", self.int_bits, self.frac_bits)
    }
}

/// A value of a [`FixedSpec`] format, stored as `raw / 2^frac_bits`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FixedPoint {
    raw: i128,
    spec: FixedSpec,
}

impl FixedPoint {
    pub fn from_raw(raw: i128, spec: FixedSpec) -> Result<Self> {
        if raw < spec.raw_min() || raw > spec.raw_max() {
            return Err(Error::Precondition(format!("raw value {raw} does not fit {spec}")));
        }
        Ok(FixedPoint { raw, spec })
    }

    pub fn raw(&self) -> i128 {
        self.raw
    }

    pub fn spec(&self) -> FixedSpec {
        self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.raw == 0
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(BigInt::from(self.raw), BigInt::one() << self.spec.frac_bits)
    }

    pub fn is_saturated(&self) -> bool {
        self.raw == self.spec.raw_min() || self.raw == self.spec.raw_max()
    }
}

impl fmt::Display for FixedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.raw.is_zero() {
            return write!(f, "0");
        }
        write!(f, "{}", self.to_rational().to_decimal_or_fraction())
    }
}
