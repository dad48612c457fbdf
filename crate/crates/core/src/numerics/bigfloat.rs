use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::decimal;
use super::rational::Rational;
use crate::error::{Error, Result};

/// Smallest mantissa width accepted by [`BigFloat`].
pub const MIN_PRECISION: u32 = 2;

/// Binary floating-point number with a `prec`-bit mantissa and an unbounded
/// exponent.
///
/// The value is `mant * 2^exp`. `mant` is zero or odd, so every value has a
/// single representation and equality is structural. Every operation rounds
/// its exact result to nearest, ties to even, at the precision of the result;
/// binary operators produce the larger of the two operand precisions.
#[derive(Clone)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

impl BigFloat {
    pub fn zero(prec: u32) -> Self {
        BigFloat {
            mant: BigInt::zero(),
            exp: 0,
            prec: prec.max(MIN_PRECISION),
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_parts(BigInt::one(), 0, prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_parts(BigInt::from(v), 0, prec)
    }

    /// `2^e` at the given precision.
    pub fn pow2(e: i64, prec: u32) -> Self {
        Self::from_parts(BigInt::one(), e, prec)
    }

    /// Exactly converts a finite `f64` and rounds it to `prec` bits.
    pub fn from_f64(v: f64, prec: u32) -> Self {
        assert!(v.is_finite(), "BigFloat::from_f64 requires a finite value");
        if v == 0.0 {
            return Self::zero(prec);
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = (bits & ((1u64 << 52) - 1)) as i64;
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1i64 << 52), raw_exp - 1075)
        };
        Self::from_parts(BigInt::from(sign * m), e, prec)
    }

    /// Correctly rounded value of `r` at `prec` bits.
    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        Self::from_ratio(r.numer(), r.denom(), prec)
    }

    /// Correctly rounded value of `num / den`; `den` must be nonzero.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(!den.is_zero(), "BigFloat::from_ratio with zero denominator");
        quotient(num, 0, den, 0, prec)
    }

    /// Parses a decimal (`-1.25e-3`), integer or `p/q` literal, rounding to
    /// `prec` bits.
    pub fn parse(s: &str, prec: u32) -> Result<Self> {
        Ok(Self::from_rational(&Rational::parse(s)?, prec))
    }

    /// Rounds `mant * 2^exp` to `prec` bits.
    pub(crate) fn from_parts(mant: BigInt, exp: i64, prec: u32) -> Self {
        let prec = prec.max(MIN_PRECISION);
        if mant.is_zero() {
            return Self::zero(prec);
        }
        let nbits = mant.bits();
        let (mut m, mut e) = if nbits > prec as u64 {
            let shift = nbits - prec as u64;
            let negative = mant.is_negative();
            let mag = mant.into_parts().1;
            let guard = mag.bit(shift - 1);
            let sticky = mag.trailing_zeros().unwrap_or(0) < shift - 1;
            let mut q: BigUint = &mag >> shift;
            if guard && (sticky || q.is_odd()) {
                q += 1u32;
            }
            let sign = if negative { Sign::Minus } else { Sign::Plus };
            (BigInt::from_biguint(sign, q), exp + shift as i64)
        } else {
            (mant, exp)
        };
        let tz = m.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            m >>= tz;
            e += tz as i64;
        }
        BigFloat {
            mant: m,
            exp: e,
            prec,
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Rounds to a new precision. Increasing the precision never changes the
    /// value.
    pub fn with_prec(&self, prec: u32) -> Self {
        Self::from_parts(self.mant.clone(), self.exp, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    /// `-1`, `0` or `1`.
    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        BigFloat {
            mant: self.mant.abs(),
            exp: self.exp,
            prec: self.prec,
        }
    }

    /// The `t` with `2^(t-1) <= |self| < 2^t`. Meaningless for zero.
    pub(crate) fn top(&self) -> i64 {
        self.exp + self.mant.bits() as i64
    }

    pub(crate) fn mant(&self) -> &BigInt {
        &self.mant
    }

    pub(crate) fn exp(&self) -> i64 {
        self.exp
    }

    /// Multiplies by `2^k` exactly.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        BigFloat {
            mant: self.mant.clone(),
            exp: self.exp + k,
            prec: self.prec,
        }
    }

    pub fn add_prec(&self, other: &Self, prec: u32) -> Self {
        if self.is_zero() {
            return other.with_prec(prec);
        }
        if other.is_zero() {
            return self.with_prec(prec);
        }
        let (big, small) = if self.top() >= other.top() {
            (self, other)
        } else {
            (other, self)
        };
        // Everything below `cutoff` only acts as a sticky bit for rounding,
        // so a far smaller addend is replaced by a tiny one of the same sign.
        let cutoff = big.exp.min(big.top() - prec as i64) - 2;
        let (sm, se) = if small.top() < cutoff {
            let one = if small.is_negative() {
                -BigInt::one()
            } else {
                BigInt::one()
            };
            (one, cutoff - 1)
        } else {
            (small.mant.clone(), small.exp)
        };
        let e = big.exp.min(se);
        let m = (&big.mant << (big.exp - e) as u64) + (sm << (se - e) as u64);
        Self::from_parts(m, e, prec)
    }

    pub fn sub_prec(&self, other: &Self, prec: u32) -> Self {
        self.add_prec(&other.neg_ref(), prec)
    }

    pub fn mul_prec(&self, other: &Self, prec: u32) -> Self {
        Self::from_parts(&self.mant * &other.mant, self.exp + other.exp, prec)
    }

    /// Division rounded to `prec` bits. Panics on a zero divisor; see
    /// [`BigFloat::checked_div`].
    pub fn div_prec(&self, other: &Self, prec: u32) -> Self {
        assert!(!other.is_zero(), "BigFloat division by zero");
        quotient(&self.mant, self.exp, &other.mant, other.exp, prec)
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero("BigFloat division"));
        }
        Ok(self.div_prec(other, self.prec.max(other.prec)))
    }

    pub fn sqr_prec(&self, prec: u32) -> Self {
        self.mul_prec(self, prec)
    }

    /// Multiplies by a small integer and rounds.
    pub fn mul_int(&self, k: i64, prec: u32) -> Self {
        Self::from_parts(&self.mant * BigInt::from(k), self.exp, prec)
    }

    pub fn div_int(&self, k: i64, prec: u32) -> Self {
        assert!(k != 0, "BigFloat division by zero");
        quotient(&self.mant, self.exp, &BigInt::from(k), 0, prec)
    }

    fn neg_ref(&self) -> Self {
        BigFloat {
            mant: -&self.mant,
            exp: self.exp,
            prec: self.prec,
        }
    }

    /// Exact rational value.
    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mant << self.exp as u64)
        } else {
            Rational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Nearest `f64` (saturating to infinity, flushing to zero).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let nbits = self.mant.bits();
        let (m, e) = if nbits > 64 {
            let shift = nbits - 64;
            (&self.mant >> shift, self.exp + shift as i64)
        } else {
            (self.mant.clone(), self.exp)
        };
        let mut v = m.to_f64().unwrap_or(0.0);
        let mut e = e;
        while e > 0 {
            let step = e.min(1000);
            v *= 2f64.powi(step as i32);
            e -= step;
            if v.is_infinite() {
                return v;
            }
        }
        while e < 0 {
            let step = (-e).min(1000);
            v /= 2f64.powi(step as i32);
            e += step;
            if v == 0.0 {
                return v;
            }
        }
        v
    }

    /// Scientific notation with `sig` significant digits, in the
    /// `2.58e-04` style. Zero prints as `0.00e+00`.
    pub fn to_sci_string(&self, sig: usize) -> String {
        decimal::sci(&self.to_rational(), sig)
    }

    /// Shortest decimal string that parses back to exactly this value at
    /// this precision.
    pub fn to_shortest_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let r = self.to_rational();
        let max_digits = (self.prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2;
        for d in 1..=max_digits {
            let (digits, e10) = decimal::round_sig(&r, d);
            let candidate = decimal::to_rational(r.is_negative(), &digits, e10);
            if Self::from_rational(&candidate, self.prec) == *self {
                return decimal::format_plain(r.is_negative(), &digits, e10);
            }
        }
        let (digits, e10) = decimal::round_sig(&r, max_digits);
        decimal::format_plain(r.is_negative(), &digits, e10)
    }

    fn cmp_value(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        let mag = if self.top() != other.top() {
            self.top().cmp(&other.top())
        } else {
            let e = self.exp.min(other.exp);
            let a = self.mant.magnitude() << (self.exp - e) as u64;
            let b = other.mant.magnitude() << (other.exp - e) as u64;
            a.cmp(&b)
        };
        if sa > 0 {
            mag
        } else {
            mag.reverse()
        }
    }
}

/// Correctly rounded `(ma * 2^ea) / (mb * 2^eb)`.
fn quotient(ma: &BigInt, ea: i64, mb: &BigInt, eb: i64, prec: u32) -> BigFloat {
    if ma.is_zero() {
        return BigFloat::zero(prec);
    }
    let negative = ma.is_negative() != mb.is_negative();
    let na = ma.magnitude();
    let nb = mb.magnitude();
    let shift = (prec as i64 + 2 + nb.bits() as i64 - na.bits() as i64).max(0) as u64;
    let (q, r) = (na << shift).div_rem(nb);
    let (q, e) = if r.is_zero() {
        (q, ea - eb - shift as i64)
    } else {
        ((q << 1u32) + 1u32, ea - eb - shift as i64 - 1)
    };
    let sign = if negative { Sign::Minus } else { Sign::Plus };
    BigFloat::from_parts(BigInt::from_biguint(sign, q), e, prec)
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.mant == other.mant && self.exp == other.exp
    }
}

impl Eq for BigFloat {}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BigFloat {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_value(other)
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_shortest_string())
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[p={}]", self.to_shortest_string(), self.prec)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $imp:ident) => {
        impl $tr<&BigFloat> for &BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: &BigFloat) -> BigFloat {
                self.$imp(rhs, self.prec.max(rhs.prec))
            }
        }
        impl $tr<BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: BigFloat) -> BigFloat {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: &BigFloat) -> BigFloat {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, add_prec);
binop!(Sub, sub, sub_prec);
binop!(Mul, mul, mul_prec);
binop!(Div, div, div_prec);

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        self.neg_ref()
    }
}

impl Neg for &BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        self.neg_ref()
    }
}
