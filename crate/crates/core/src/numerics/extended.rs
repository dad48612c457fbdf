use std::fmt;

use super::bigfloat::BigFloat;
use super::elementary::sigmoid_prec;
use crate::error::{Error, Result};

/// A gate weight that may be infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtendedWeight {
    Finite(BigFloat),
    PlusInf,
    MinusInf,
}

impl ExtendedWeight {
    pub fn is_infinite(&self) -> bool {
        !matches!(self, ExtendedWeight::Finite(_))
    }

    pub fn finite(&self) -> Option<&BigFloat> {
        match self {
            ExtendedWeight::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtendedWeight::Finite(v) if v.is_zero())
    }

    /// `+1` for `+inf`, `-1` for `-inf`, `0` for finite values.
    pub fn inf_sign(&self) -> i32 {
        match self {
            ExtendedWeight::PlusInf => 1,
            ExtendedWeight::MinusInf => -1,
            ExtendedWeight::Finite(_) => 0,
        }
    }

    /// Parses `+inf`, `-inf` (also `inf`) or a finite literal.
    pub fn parse(s: &str, prec: u32) -> Result<Self> {
        match s.trim() {
            "+inf" | "inf" => Ok(ExtendedWeight::PlusInf),
            "-inf" => Ok(ExtendedWeight::MinusInf),
            t => Ok(ExtendedWeight::Finite(BigFloat::parse(t, prec)?)),
        }
    }
}

impl fmt::Display for ExtendedWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedWeight::Finite(v) => write!(f, "{v}"),
            ExtendedWeight::PlusInf => write!(f, "+inf"),
            ExtendedWeight::MinusInf => write!(f, "-inf"),
        }
    }
}

impl From<BigFloat> for ExtendedWeight {
    fn from(v: BigFloat) -> Self {
        ExtendedWeight::Finite(v)
    }
}

/// Value of an extended pre-activation: a finite number or a signed infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtendedValue {
    Finite(BigFloat),
    PlusInf,
    MinusInf,
}

/// `σ` on the extended line: `σ(+inf) = 1` and `σ(-inf) = 0` exactly.
pub fn sigmoid_extended(x: &ExtendedValue, prec: u32) -> BigFloat {
    match x {
        ExtendedValue::Finite(v) => sigmoid_prec(v, prec),
        ExtendedValue::PlusInf => BigFloat::one(prec),
        ExtendedValue::MinusInf => BigFloat::zero(prec),
    }
}

/// Product of an extended weight with a finite value, as used by a gate.
///
/// An infinite weight times a positive value is `+inf` with the weight's
/// sign, and so on. An infinite weight times an exact zero has no meaning in
/// this model and is reported as [`Error::GateDegenerate`] (with the
/// caller's `step` and `row`).
pub fn weight_times(w: &ExtendedWeight, v: &BigFloat, prec: u32, step: usize, row: usize) -> Result<ExtendedValue> {
    match w {
        ExtendedWeight::Finite(a) => Ok(ExtendedValue::Finite(a.mul_prec(v, prec))),
        inf => {
            let s = v.signum() * inf.inf_sign();
            match s {
                1 => Ok(ExtendedValue::PlusInf),
                -1 => Ok(ExtendedValue::MinusInf),
                _ => Err(Error::GateDegenerate { step, row }),
            }
        }
    }
}

/// Sum of extended values; `+inf + -inf` is [`Error::InfiniteCancellation`].
pub fn extended_add(a: ExtendedValue, b: ExtendedValue, prec: u32, row: usize) -> Result<ExtendedValue> {
    use ExtendedValue::*;
    match (a, b) {
        (Finite(x), Finite(y)) => Ok(Finite(x.add_prec(&y, prec))),
        (PlusInf, MinusInf) | (MinusInf, PlusInf) => Err(Error::InfiniteCancellation { row }),
        (PlusInf, _) | (_, PlusInf) => Ok(PlusInf),
        (MinusInf, _) | (_, MinusInf) => Ok(MinusInf),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_at_infinity_is_exact() {
        assert_eq!(sigmoid_extended(&ExtendedValue::PlusInf, 64), BigFloat::one(64));
        assert!(sigmoid_extended(&ExtendedValue::MinusInf, 64).is_zero());
    }

    #[test]
    fn infinite_weight_follows_sign() {
        let pos = BigFloat::parse("1e-30", 64).unwrap();
        let neg = -&pos;
        let w = ExtendedWeight::PlusInf;
        assert_eq!(weight_times(&w, &pos, 64, 1, 3).unwrap(), ExtendedValue::PlusInf);
        assert_eq!(weight_times(&w, &neg, 64, 1, 3).unwrap(), ExtendedValue::MinusInf);
        assert!(matches!(
            weight_times(&w, &BigFloat::zero(64), 64, 2, 3),
            Err(Error::GateDegenerate { step: 2, row: 3 })
        ));
    }

    #[test]
    fn cancellation_is_an_error() {
        assert!(matches!(
            extended_add(ExtendedValue::PlusInf, ExtendedValue::MinusInf, 64, 0),
            Err(Error::InfiniteCancellation { row: 0 })
        ));
    }

    #[test]
    fn parses_literals() {
        assert_eq!(ExtendedWeight::parse("+inf", 64).unwrap(), ExtendedWeight::PlusInf);
        assert_eq!(ExtendedWeight::parse("-inf", 64).unwrap(), ExtendedWeight::MinusInf);
        assert!(ExtendedWeight::parse("0.5", 64).unwrap().finite().is_some());
    }
}
