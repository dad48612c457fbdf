//! Exact decimal formatting shared by [`Rational`] and
//! [`BigFloat`](super::BigFloat).

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use super::rational::Rational;

fn pow10(e: u64) -> BigUint {
    num_traits::pow(BigUint::from(10u32), e as usize)
}

fn div_round_half_even(num: &BigUint, den: &BigUint) -> BigUint {
    let (q, r) = num.div_rem(den);
    let twice = &r << 1u32;
    if twice > *den || (twice == *den && q.is_odd()) {
        q + 1u32
    } else {
        q
    }
}

/// Rounds `|r|` to `sig` significant decimal digits. Returns the digit
/// string and the decimal exponent of the leading digit, so the rounded
/// value is `0.d1d2... * 10^(e+1)`. `r` must be nonzero.
pub(crate) fn round_sig(r: &Rational, sig: usize) -> (String, i64) {
    assert!(sig > 0);
    let num = r.numer().magnitude().clone();
    let den = r.denom().magnitude().clone();
    let mut e10 =
        ((num.bits() as f64 - den.bits() as f64) * std::f64::consts::LOG10_2).floor() as i64;
    let lo = pow10(sig as u64 - 1);
    let hi = pow10(sig as u64);
    for _ in 0..64 {
        let shift = sig as i64 - 1 - e10;
        let q = if shift >= 0 {
            div_round_half_even(&(&num * pow10(shift as u64)), &den)
        } else {
            div_round_half_even(&num, &(&den * pow10((-shift) as u64)))
        };
        if q >= hi {
            e10 += 1;
        } else if q < lo {
            e10 -= 1;
        } else {
            return (q.to_string(), e10);
        }
    }
    unreachable!("decimal exponent search did not converge")
}

/// Exact value of the digit string produced by [`round_sig`].
pub(crate) fn to_rational(negative: bool, digits: &str, e10: i64) -> Rational {
    let mant: BigInt = digits.parse().expect("digit string");
    let mant = if negative { -mant } else { mant };
    let shift = e10 - (digits.len() as i64 - 1);
    if shift >= 0 {
        Rational::from_integer(mant * BigInt::from(pow10(shift as u64)))
    } else {
        Rational::new(mant, BigInt::from(pow10((-shift) as u64)))
    }
}

/// `2.58e-04` style.
pub(crate) fn sci(r: &Rational, sig: usize) -> String {
    if r.is_zero() {
        return format!("{}e+00", zero_mantissa(sig));
    }
    let (digits, e10) = round_sig(r, sig);
    let sign = if r.is_negative() { "-" } else { "" };
    let mant = if digits.len() > 1 {
        format!("{}.{}", &digits[..1], &digits[1..])
    } else {
        digits
    };
    let esign = if e10 < 0 { '-' } else { '+' };
    format!("{sign}{mant}e{esign}{:02}", e10.abs())
}

fn zero_mantissa(sig: usize) -> String {
    if sig > 1 {
        format!("0.{}", "0".repeat(sig - 1))
    } else {
        "0".to_string()
    }
}

/// Positional notation for moderate exponents, `d.ddde-N` otherwise. Trailing
/// zeros in `digits` are dropped.
pub(crate) fn format_plain(negative: bool, digits: &str, e10: i64) -> String {
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let sign = if negative { "-" } else { "" };
    let n = digits.len() as i64;
    if (-7..21).contains(&e10) {
        if e10 < 0 {
            format!("{sign}0.{}{}", "0".repeat((-e10 - 1) as usize), digits)
        } else if e10 + 1 >= n {
            format!("{sign}{}{}", digits, "0".repeat((e10 + 1 - n) as usize))
        } else {
            let (a, b) = digits.split_at((e10 + 1) as usize);
            format!("{sign}{a}.{b}")
        }
    } else {
        let mant = if n > 1 {
            format!("{}.{}", &digits[..1], &digits[1..])
        } else {
            digits.to_string()
        };
        format!("{sign}{mant}e{e10}")
    }
}

/// Exact positional expansion when the denominator has no prime factors other
/// than 2 and 5; `None` otherwise.
pub(crate) fn exact_decimal(r: &Rational) -> Option<String> {
    if r.is_zero() {
        return Some("0".to_string());
    }
    let mut den = r.denom().magnitude().clone();
    let (two, five) = (BigUint::from(2u32), BigUint::from(5u32));
    let mut twos = 0u64;
    let mut fives = 0u64;
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    let places = twos.max(fives);
    let scaled = r.numer().magnitude() * pow10(places) / r.denom().magnitude();
    let s = scaled.to_string();
    let sign = if r.is_negative() { "-" } else { "" };
    if places == 0 {
        return Some(format!("{sign}{s}"));
    }
    let s = if s.len() as u64 <= places {
        format!("{}{}", "0".repeat((places + 1 - s.len() as u64) as usize), s)
    } else {
        s
    };
    let (int, frac) = s.split_at(s.len() - places as usize);
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        Some(format!("{sign}{int}"))
    } else {
        Some(format!("{sign}{int}.{frac}"))
    }
}
