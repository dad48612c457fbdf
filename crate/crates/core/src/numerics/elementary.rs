//! Elementary functions on [`BigFloat`].
//!
//! Each public function returns the correctly rounded result at the
//! precision of its argument (or the explicit `prec` of the `_prec`
//! variant) in all but pathological cases, which is well inside the
//! `2^(1-p)` relative error contract. The internal kernels run at a working
//! precision with generous guard bits and a rounding test decides whether the
//! approximation pins down the `p`-bit result; if not the working precision
//! grows and the kernel runs again.

use num_bigint::BigInt;
use num_traits::Zero;

use super::bigfloat::BigFloat;
use crate::error::{Error, Result};

/// Arguments with `|x| >= 2^MAX_TOP` are rejected by `exp`.
const MAX_TOP: i64 = 60;

fn guard_bits(w: u32) -> u32 {
    40 + 2 * (32 - w.leading_zeros())
}

/// Runs `kernel(w)` for growing `w` until its result, assumed to be within
/// relative error `2^-w` of the true value, rounds unambiguously to `p` bits.
fn ziv<F: Fn(u32) -> BigFloat>(p: u32, kernel: F) -> BigFloat {
    let mut w = p + 24;
    let mut last = BigFloat::zero(p);
    for _ in 0..12 {
        let y = kernel(w);
        if y.is_zero() {
            return BigFloat::zero(p);
        }
        let radius = y.abs().mul_pow2(-(w as i64));
        let lo = y.sub_prec(&radius, w + 8).with_prec(p);
        let hi = y.add_prec(&radius, w + 8).with_prec(p);
        if lo == hi {
            return lo;
        }
        last = y.with_prec(p);
        w += w / 2 + 32;
    }
    last
}

/// Nearest integer to `x`.
fn round_to_integer(x: &BigFloat) -> BigInt {
    if x.is_zero() {
        return BigInt::zero();
    }
    let e = x.exp();
    if e >= 0 {
        return x.mant() << e as u64;
    }
    // floor(x + 1/2)
    let shift = (-e) as u64;
    let half = BigInt::from(1) << (shift - 1);
    (x.mant() + half) >> shift
}

/// `atanh(y) = y + y^3/3 + y^5/5 + ...`, for `|y| <= 1/3`.
fn atanh_series(y: &BigFloat, w: u32) -> BigFloat {
    if y.is_zero() {
        return BigFloat::zero(w);
    }
    let y2 = y.sqr_prec(w);
    let mut power = y.with_prec(w);
    let mut sum = power.clone();
    let mut j = 1i64;
    loop {
        power = power.mul_prec(&y2, w);
        let term = power.div_int(2 * j + 1, w);
        if term.is_zero() || term.top() < sum.top() - w as i64 - 4 {
            break;
        }
        sum = sum.add_prec(&term, w);
        j += 1;
    }
    sum
}

fn ln2(w: u32) -> BigFloat {
    let third = BigFloat::one(w).div_int(3, w);
    atanh_series(&third, w).mul_pow2(1)
}

/// `e^x - 1` for `|x| < 2^-8` by its Taylor series.
fn expm1_series(x: &BigFloat, w: u32) -> BigFloat {
    let mut term = x.with_prec(w);
    let mut sum = term.clone();
    let mut n = 1i64;
    loop {
        n += 1;
        term = term.mul_prec(x, w).div_int(n, w);
        if term.is_zero() || term.top() < sum.top() - w as i64 - 4 {
            break;
        }
        sum = sum.add_prec(&term, w);
    }
    sum
}

fn expm1_kernel(x: &BigFloat, w: u32) -> BigFloat {
    if x.is_zero() {
        return BigFloat::zero(w);
    }
    if x.top() <= 5 {
        // Halve until tiny, then undo with e^(2r) - 1 = u (u + 2).
        let s = (x.top() + 8).max(0);
        let wi = w + s as u32 + 8;
        let mut u = expm1_series(&x.mul_pow2(-s), wi);
        let two = BigFloat::from_i64(2, wi);
        for _ in 0..s {
            u = u.mul_prec(&u.add_prec(&two, wi), wi);
        }
        u
    } else {
        exp_kernel(x, w).sub_prec(&BigFloat::one(w), w)
    }
}

fn exp_kernel(x: &BigFloat, w: u32) -> BigFloat {
    if x.is_zero() {
        return BigFloat::one(w);
    }
    if x.top() <= 5 {
        return expm1_kernel(x, w).add_prec(&BigFloat::one(w), w);
    }
    let wi = w + x.top().max(0) as u32 + 16;
    let l2 = ln2(wi);
    let k = round_to_integer(&x.div_prec(&l2, 64 + x.top().max(0) as u32));
    let kf = BigFloat::from_parts(k.clone(), 0, wi + 64);
    let r = x.sub_prec(&kf.mul_prec(&l2, wi + 64), wi);
    let e = exp_kernel(&r, wi);
    let k = i64::try_from(&k).expect("exponent range checked by caller");
    e.mul_pow2(k).with_prec(w)
}

fn ln_kernel(x: &BigFloat, w: u32) -> BigFloat {
    let wi = w + 16;
    let mut e = x.top();
    let mut m = x.mul_pow2(-e);
    let three_quarters = BigFloat::from_parts(BigInt::from(3), -2, 4);
    if m < three_quarters {
        m = m.mul_pow2(1);
        e -= 1;
    }
    let one = BigFloat::one(wi);
    let y = m.sub_prec(&one, wi).div_prec(&m.add_prec(&one, wi), wi);
    let lm = atanh_series(&y, wi).mul_pow2(1);
    if e == 0 {
        return lm;
    }
    let we = wi + 64 - e.unsigned_abs().leading_zeros();
    let el2 = ln2(we).mul_int(e, we);
    el2.add_prec(&lm, w)
}

fn ln1p_kernel(x: &BigFloat, w: u32) -> BigFloat {
    if x.is_zero() {
        return BigFloat::zero(w);
    }
    if x.top() <= -2 {
        // |x| < 1/4: ln(1+x) = 2 atanh(x / (2 + x)).
        let wi = w + 8;
        let y = x.div_prec(&x.add_prec(&BigFloat::from_i64(2, wi), wi), wi);
        return atanh_series(&y, wi).mul_pow2(1);
    }
    let wi = w + 8;
    let sum = x.add_prec(&BigFloat::one(wi), wi + x.top().unsigned_abs() as u32);
    ln_kernel(&sum, w)
}

fn check_exp_range(x: &BigFloat) -> Result<()> {
    if !x.is_zero() && x.top() >= MAX_TOP {
        return Err(Error::Domain {
            function: "exp",
            value: x.to_sci_string(6),
        });
    }
    Ok(())
}

/// `e^x` rounded to `prec` bits.
pub fn exp_prec(x: &BigFloat, prec: u32) -> Result<BigFloat> {
    check_exp_range(x)?;
    if x.is_zero() {
        return Ok(BigFloat::one(prec));
    }
    Ok(ziv(prec, |w| exp_kernel(x, w + guard_bits(w))))
}

pub fn exp(x: &BigFloat) -> Result<BigFloat> {
    exp_prec(x, x.prec())
}

/// `e^x - 1` rounded to `prec` bits.
pub fn expm1_prec(x: &BigFloat, prec: u32) -> Result<BigFloat> {
    check_exp_range(x)?;
    Ok(ziv(prec, |w| expm1_kernel(x, w + guard_bits(w))))
}

/// Natural logarithm; `x` must be positive.
pub fn ln_prec(x: &BigFloat, prec: u32) -> Result<BigFloat> {
    if !x.is_positive() {
        return Err(Error::Domain {
            function: "ln",
            value: x.to_sci_string(6),
        });
    }
    if *x == BigFloat::one(2) {
        return Ok(BigFloat::zero(prec));
    }
    Ok(ziv(prec, |w| ln_kernel(x, w + guard_bits(w))))
}

pub fn ln(x: &BigFloat) -> Result<BigFloat> {
    ln_prec(x, x.prec())
}

/// `ln(1 + x)`; `x` must exceed `-1`.
pub fn ln1p_prec(x: &BigFloat, prec: u32) -> Result<BigFloat> {
    if *x <= BigFloat::from_i64(-1, 2) {
        return Err(Error::Domain {
            function: "ln1p",
            value: x.to_sci_string(6),
        });
    }
    Ok(ziv(prec, |w| ln1p_kernel(x, w + guard_bits(w))))
}

fn tanh_kernel(x: &BigFloat, w: u32) -> BigFloat {
    let t = expm1_kernel(&x.abs().mul_pow2(1), w + 4);
    let two = BigFloat::from_i64(2, w + 4);
    let v = t.div_prec(&t.add_prec(&two, w + 4), w);
    if x.is_negative() {
        -v
    } else {
        v
    }
}

/// Hyperbolic tangent rounded to `prec` bits.
pub fn tanh_prec(x: &BigFloat, prec: u32) -> BigFloat {
    if x.is_zero() {
        return BigFloat::zero(prec);
    }
    // 1 - tanh|x| < 2 e^(-2|x|) < 2^-(prec+2) once 2|x| log2(e) > prec + 3.
    if x.top() > 2 + (64 - (prec as u64 + 8).leading_zeros()) as i64 {
        let bound = BigFloat::from_i64(prec as i64 + 8, 64);
        if x.abs() > bound {
            let one = BigFloat::one(prec);
            return if x.is_negative() { -one } else { one };
        }
    }
    ziv(prec, |w| tanh_kernel(x, w + guard_bits(w)))
}

pub fn tanh(x: &BigFloat) -> BigFloat {
    tanh_prec(x, x.prec())
}

/// Inverse hyperbolic tangent; requires `|y| < 1`.
pub fn atanh_prec(y: &BigFloat, prec: u32) -> Result<BigFloat> {
    if y.abs() >= BigFloat::one(2) {
        return Err(Error::Domain {
            function: "atanh",
            value: y.to_sci_string(6),
        });
    }
    if y.is_zero() {
        return Ok(BigFloat::zero(prec));
    }
    Ok(ziv(prec, |w| {
        let w = w + guard_bits(w);
        let a = y.abs();
        // atanh(a) = ln(1 + 2a/(1-a)) / 2
        let wi = w + 8;
        let denom = BigFloat::one(wi).sub_prec(&a, wi + a.prec() + a.top().unsigned_abs() as u32);
        let arg = a.mul_pow2(1).div_prec(&denom, wi);
        let v = ln1p_kernel(&arg, wi).mul_pow2(-1);
        if y.is_negative() {
            -v
        } else {
            v
        }
    }))
}

pub fn atanh(y: &BigFloat) -> Result<BigFloat> {
    atanh_prec(y, y.prec())
}

fn sigmoid_kernel(x: &BigFloat, w: u32) -> BigFloat {
    let one = BigFloat::one(w + 4);
    if x.is_negative() {
        let e = exp_kernel(x, w + 4);
        e.div_prec(&e.add_prec(&one, w + 4), w)
    } else {
        let e = exp_kernel(&-x, w + 4);
        one.div_prec(&one.add_prec(&e, w + 4), w)
    }
}

/// Logistic sigmoid `1 / (1 + e^-x)` rounded to `prec` bits. Arguments below
/// `-2^60` underflow to zero.
pub fn sigmoid_prec(x: &BigFloat, prec: u32) -> BigFloat {
    if x.is_zero() {
        return BigFloat::one(prec).mul_pow2(-1);
    }
    if x.is_positive() && x.top() > 2 + (64 - (prec as u64 + 8).leading_zeros()) as i64 {
        // e^-x < 2^-(prec+2)
        if *x > BigFloat::from_i64(prec as i64 + 8, 64) {
            return BigFloat::one(prec);
        }
    }
    if x.top() >= MAX_TOP {
        return BigFloat::zero(prec);
    }
    ziv(prec, |w| sigmoid_kernel(x, w + guard_bits(w)))
}

pub fn sigmoid(x: &BigFloat) -> BigFloat {
    sigmoid_prec(x, x.prec())
}

/// Logit `ln(y / (1 - y))`; requires `0 < y < 1`.
pub fn sigmoid_inv_prec(y: &BigFloat, prec: u32) -> Result<BigFloat> {
    if !y.is_positive() || *y >= BigFloat::one(2) {
        return Err(Error::Domain {
            function: "sigmoid_inv",
            value: y.to_sci_string(6),
        });
    }
    let half = BigFloat::one(2).mul_pow2(-1);
    if *y == half {
        return Ok(BigFloat::zero(prec));
    }
    let quarter = BigFloat::one(2).mul_pow2(-2);
    let three_quarters = BigFloat::from_i64(3, 2).mul_pow2(-2);
    let central = *y >= quarter && *y <= three_quarters;
    Ok(ziv(prec, |w| {
        let w = w + guard_bits(w);
        let wi = w + 8;
        // 1 - y is exact at this width.
        let exact = y.prec() + y.top().unsigned_abs() as u32 + 8;
        let comp = BigFloat::one(exact).sub_prec(y, exact);
        if central {
            let num = y.mul_pow2(1).sub_prec(&BigFloat::one(exact), exact + 1);
            ln1p_kernel(&num.div_prec(&comp, wi), w)
        } else {
            ln_kernel(&y.div_prec(&comp, wi), w)
        }
    }))
}

pub fn sigmoid_inv(y: &BigFloat) -> Result<BigFloat> {
    sigmoid_inv_prec(y, y.prec())
}

/// `ln 2` rounded to `prec` bits.
pub fn ln2_prec(prec: u32) -> BigFloat {
    ziv(prec, |w| ln2(w + guard_bits(w)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bf(v: f64) -> BigFloat {
        BigFloat::from_f64(v, 53)
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn matches_f64_libm() {
        for &x in &[-20.0, -3.5, -1.0, -0.3, -1e-5, 1e-9, 0.25, 0.5, 1.0, 2.0, 7.25, 30.0] {
            assert!(close(tanh(&bf(x)).to_f64(), x.tanh(), 1e-15), "tanh {x}");
            assert!(close(exp(&bf(x)).unwrap().to_f64(), x.exp(), 1e-15), "exp {x}");
            let s = 1.0 / (1.0 + (-x).exp());
            assert!(close(sigmoid(&bf(x)).to_f64(), s, 1e-15), "sigmoid {x}");
        }
        for &x in &[1e-12, 0.1, 0.75, 1.0 - 1e-9, 1.5, 10.0, 1e30] {
            assert!(close(ln(&bf(x)).unwrap().to_f64(), x.ln(), 1e-15), "ln {x}");
        }
        // mpmath at 200 bits; f64::atanh is not accurate enough near -1.
        let atanh_ref = [
            (-0.999, -3.800_201_167_250_2),
            (-0.5, -0.549_306_144_334_054_9),
            (1e-7, 1.000_000_000_000_003_3e-7),
            (0.3, 0.309_519_604_203_111_7),
            (0.9, 1.472_219_489_583_220_3),
        ];
        for (y, want) in atanh_ref {
            assert!(close(atanh(&bf(y)).unwrap().to_f64(), want, 1e-15), "atanh {y}");
        }
    }

    #[test]
    fn special_points() {
        assert!(tanh(&BigFloat::zero(64)).is_zero());
        assert_eq!(sigmoid(&BigFloat::zero(64)).to_f64(), 0.5);
        assert!(sigmoid_inv(&BigFloat::parse("0.5", 64).unwrap()).unwrap().is_zero());
        assert_eq!(exp(&BigFloat::zero(64)).unwrap().to_f64(), 1.0);
        assert!(ln(&BigFloat::one(64)).unwrap().is_zero());
        assert_eq!(tanh(&BigFloat::from_i64(1000, 64)).to_f64(), 1.0);
        assert_eq!(tanh(&BigFloat::from_i64(-1000, 64)).to_f64(), -1.0);
    }

    #[test]
    fn domain_errors() {
        for y in ["0", "1", "-0.5", "1.5"] {
            let y = BigFloat::parse(y, 64).unwrap();
            assert!(matches!(sigmoid_inv(&y), Err(Error::Domain { .. })));
        }
        for y in ["1", "-1", "2"] {
            let y = BigFloat::parse(y, 64).unwrap();
            assert!(matches!(atanh(&y), Err(Error::Domain { .. })));
        }
        assert!(ln(&BigFloat::zero(64)).is_err());
    }

    #[test]
    fn logit_reference_values() {
        // -ln(3124) and ln(4), mpmath at 200 bits
        let y = BigFloat::from_rational(&crate::numerics::Rational::ratio(1, 3125), 128);
        let v = sigmoid_inv(&y).unwrap();
        let want = BigFloat::parse("-8.046869510959576584225862", 128).unwrap();
        assert!((&v - &want).abs() < BigFloat::parse("1e-24", 64).unwrap());
        let v = sigmoid_inv(&BigFloat::parse("0.8", 128).unwrap()).unwrap();
        let want = BigFloat::parse("1.386294361119890618834464", 128).unwrap();
        assert!((&v - &want).abs() < BigFloat::parse("1e-24", 64).unwrap());
    }

    #[test]
    fn ln2_digits() {
        // 0.693147180559945309417232121458176568...
        let l = ln2_prec(128);
        let want = BigFloat::parse("0.6931471805599453094172321214581765680755", 160).unwrap();
        let err = (&l.with_prec(160) - &want).abs();
        assert!(err < BigFloat::pow2(-127, 64));
    }
}
