use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::numerics::Rational;

/// `ceil(log2(x))` for an integer `x >= 1`.
fn ceil_log2(x: &BigInt) -> u64 {
    (x - BigInt::one()).bits()
}

/// Working precision in bits for the Dyck GRU with `n` bracket kinds and
/// parameter `k` on words of length at most `max_len`:
/// `ceil((2k+4) log2(2n+1)) + ceil(log2(max_len+1)) + 32`.
pub fn required_precision(n: usize, k: u32, max_len: usize) -> u32 {
    let m = BigInt::from(2 * n + 1);
    let a = ceil_log2(&m.pow(2 * k + 4));
    let b = ceil_log2(&BigInt::from(max_len + 1));
    (a + b + 32) as u32
}

fn m_pow(m: i64, e: i64) -> Rational {
    Rational::from_i64(m).pow(e)
}

/// Checks the inequalities on `k` that the Dyck GRU's case analysis relies
/// on, in exact arithmetic.
pub fn check_k(n: usize, k: u32) -> Result<()> {
    let fail = |reason: String| Err(Error::KTooSmall { n, k, reason });
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let m = 2 * n as i64 + 1;
    let k = k as i64;
    let inv_m = Rational::ratio(1, m);
    let r = Rational::from_i64;
    let tail = m_pow(m, -2 * k + 7);
    // InDyck words end with an output inside (0, 1/m).
    if !(&r(5) * &tail < inv_m) {
        return fail("5(2n+1)^(7-2k) >= 1/(2n+1)".into());
    }
    // A proper prefix leaves |h1|/h2 at least 2/m minus the error.
    if Rational::ratio(2, m) - &r(2) * &tail <= inv_m {
        return fail("2/(2n+1) - 2(2n+1)^(7-2k) <= 1/(2n+1)".into());
    }
    let t8 = m_pow(m, -2 * k + 8);
    let t5 = m_pow(m, -2 * k + 5);
    if r(-1) + &r(5) * &t8 + &t5 >= -&inv_m {
        return fail("-1 + 5(2n+1)^(8-2k) + (2n+1)^(5-2k) >= -1/(2n+1)".into());
    }
    if r(2) - &r(2) * &t8 <= inv_m {
        return fail("2 - 2(2n+1)^(8-2k) <= 1/(2n+1)".into());
    }
    let mk = m_pow(m, k);
    if mk <= r(m) {
        return fail("(2n+1)^k <= 2n+1".into());
    }
    for y in sigmoid_inv_arguments(n, k as u32) {
        if !y.is_positive() || y >= Rational::one() {
            return fail(format!("gate value {y} outside (0, 1)"));
        }
    }
    Ok(())
}

/// Every value passed through the inverse sigmoid by the Dyck GRU.
pub(crate) fn sigmoid_inv_arguments(n: usize, k: u32) -> Vec<Rational> {
    let m = 2 * n as i64 + 1;
    let k = k as i64;
    let mut v = vec![m_pow(m, -1 - k), m_pow(m, 1 - k), m_pow(m, -k)];
    let half = Rational::ratio(1, 2);
    let open_den = &m_pow(m, k + 1) - &Rational::one();
    let close_den = &m_pow(m, k) - &Rational::from_i64(m);
    for i in 1..=n as i64 {
        let two_i = Rational::from_i64(2 * i);
        v.push(&half - &(&two_i / &open_den));
        if !close_den.is_zero() {
            v.push(&half + &(&two_i / &close_den));
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_values() {
        assert_eq!(required_precision(2, 5, 8), 69);
        assert!(required_precision(1, 5, 1) < required_precision(2, 5, 1));
        assert!(required_precision(2, 5, 100) >= required_precision(2, 5, 8));
        assert!(required_precision(2, 6, 8) > required_precision(2, 5, 8));
    }

    #[test]
    fn k_checks() {
        assert!(check_k(1, 5).is_ok());
        assert!(check_k(2, 5).is_ok());
        assert!(check_k(5, 5).is_ok());
        assert!(matches!(check_k(2, 4), Err(Error::KTooSmall { .. })));
        assert!(check_k(2, 1).is_err());
    }
}
