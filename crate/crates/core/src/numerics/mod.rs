//! Exact rationals, binary floats of arbitrary precision, fixed-point
//! quantization, extended (infinite) gate weights, elementary functions and
//! small dense linear algebra.

mod bigfloat;
pub(crate) mod decimal;
pub mod elementary;
mod extended;
mod fixed;
mod matrix;
mod rational;

use std::fmt;

pub use bigfloat::{BigFloat, MIN_PRECISION};
pub use elementary::{atanh, exp, ln, sigmoid, sigmoid_inv, tanh};
pub use extended::{extended_add, sigmoid_extended, weight_times, ExtendedValue, ExtendedWeight};
pub use fixed::{FixedPoint, FixedSpec};
pub use matrix::{Field, Matrix};
pub use rational::Rational;

use crate::error::Result;

/// A number in one of the three numeric regimes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Exact(Rational),
    Float(BigFloat),
    Fixed(FixedPoint),
}

impl Scalar {
    /// Exact value of the scalar.
    pub fn to_rational(&self) -> Rational {
        match self {
            Scalar::Exact(r) => r.clone(),
            Scalar::Float(f) => f.to_rational(),
            Scalar::Fixed(x) => x.to_rational(),
        }
    }

    /// The value as a float: floats keep their precision, the other regimes
    /// are rounded to `prec` bits.
    pub fn to_float(&self, prec: u32) -> BigFloat {
        match self {
            Scalar::Float(f) => f.clone(),
            other => BigFloat::from_rational(&other.to_rational(), prec),
        }
    }

    /// `σ(x)`. Irrational results of exact or fixed-point inputs are rounded
    /// to `prec` bits.
    pub fn sigmoid(&self, prec: u32) -> Scalar {
        let x = self.to_float(prec);
        let p = x.prec();
        Scalar::Float(elementary::sigmoid_prec(&x, p))
    }

    pub fn sigmoid_inv(&self, prec: u32) -> Result<Scalar> {
        let x = self.to_float(prec);
        let p = x.prec();
        Ok(Scalar::Float(elementary::sigmoid_inv_prec(&x, p)?))
    }

    pub fn tanh(&self, prec: u32) -> Scalar {
        let x = self.to_float(prec);
        let p = x.prec();
        Scalar::Float(elementary::tanh_prec(&x, p))
    }

    pub fn tanh_inv(&self, prec: u32) -> Result<Scalar> {
        let x = self.to_float(prec);
        let p = x.prec();
        Ok(Scalar::Float(elementary::atanh_prec(&x, p)?))
    }

    pub fn quantize(&self, spec: &FixedSpec) -> FixedPoint {
        spec.quantize(&self.to_rational())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{}", r.to_decimal_or_fraction()),
            Scalar::Float(x) => write!(f, "{x}"),
            Scalar::Fixed(x) => write!(f, "{x}"),
        }
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Exact(r)
    }
}

impl From<BigFloat> for Scalar {
    fn from(x: BigFloat) -> Self {
        Scalar::Float(x)
    }
}

impl From<FixedPoint> for Scalar {
    fn from(x: FixedPoint) -> Self {
        Scalar::Fixed(x)
    }
}
