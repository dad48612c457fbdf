use super::Gru;
use crate::automata::{classify, state_trace, state_trace_bar, DyckSpec, MembershipClass, StateTrace};
use crate::error::{Error, Result};
use crate::numerics::Rational;

/// Deviations `ε_t = (2n+1)^{kt} h_{1,t} - h_{1,0}(2n+1)^{b_t - a_t} - s_t`
/// of the stack node from the exact encoding, with `a_t`, `b_t` the counts
/// of opening and closing symbols so far. `eps_bar` holds the same quantity
/// for node 5 against the mirrored encoding, when the network has one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorTrace {
    pub bound: Rational,
    pub eps: Vec<Rational>,
    pub eps_bar: Option<Vec<Rational>>,
}

impl ErrorTrace {
    pub fn max_abs(&self) -> Rational {
        self.eps
            .iter()
            .chain(self.eps_bar.iter().flatten())
            .map(Rational::abs)
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// First `(t, ε_t)` with `|ε_t| >= bound`, over both nodes.
    pub fn first_violation(&self) -> Option<(usize, &Rational)> {
        fn bad<'a>(v: &'a [Rational], bound: &Rational) -> Option<(usize, &'a Rational)> {
            v.iter().enumerate().find(|(_, e)| e.abs() >= *bound)
        }
        let a = bad(&self.eps, &self.bound);
        let b = self.eps_bar.as_deref().and_then(|v| bad(v, &self.bound));
        match (a, b) {
            (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
            (x, y) => x.or(y),
        }
    }
}

/// `2(2n+1)^{7-2k}`.
pub fn error_bound(n: usize, k: u32) -> Rational {
    let m = Rational::from_i64(2 * n as i64 + 1);
    Rational::from_i64(2) * m.pow(7 - 2 * k as i64)
}

fn deviations(gru: &Gru, node: usize, hs: &[Vec<Rational>], tr: &StateTrace, m: &Rational, k: u32) -> Vec<Rational> {
    let h10 = gru.h0()[node].to_rational();
    hs.iter()
        .enumerate()
        .map(|(t, h)| {
            let scaled = &h[node] * &m.pow(k as i64 * t as i64);
            let offset = if h10.is_zero() {
                Rational::zero()
            } else {
                &h10 * &m.pow(tr.closes[t] as i64 - tr.opens[t] as i64)
            };
            &(&scaled - &offset) - &tr.values[t]
        })
        .collect()
}

/// Runs `gru` (a Dyck GRU or its three-node stack tracker) on `word` and
/// returns the deviations of the stack nodes from the exact encodings.
pub fn error_trace(gru: &Gru, spec: &DyckSpec, k: u32, word: &[usize]) -> Result<ErrorTrace> {
    if *gru.alphabet() != spec.alphabet() {
        return Err(Error::AlphabetMismatch("network is not over the Dyck alphabet".into()));
    }
    let class = classify(word, spec)?;
    if class == MembershipClass::Neither {
        return Err(Error::Precondition(format!(
            "error bound only holds on proper prefixes and balanced words, got {}",
            spec.alphabet().format_word(word)
        )));
    }
    let mut h = gru.h0().to_vec();
    let mut hs = vec![h.iter().map(|v| v.to_rational()).collect::<Vec<_>>()];
    for (t, &x) in word.iter().enumerate() {
        h = gru.step_at(&h, x, t + 1)?.2;
        hs.push(h.iter().map(|v| v.to_rational()).collect());
    }
    let m = Rational::from_i64(spec.base());
    let eps = deviations(gru, 0, &hs, &state_trace(word, spec)?, &m, k);
    let eps_bar = (gru.hidden_size() >= 8).then(|| -> Result<_> {
        Ok(deviations(gru, 4, &hs, &state_trace_bar(word, spec)?, &m, k))
    });
    Ok(ErrorTrace {
        bound: error_bound(spec.n(), k),
        eps,
        eps_bar: eps_bar.transpose()?,
    })
}

/// [`error_trace`], failing with [`Error::BoundViolated`] at the first
/// `|ε_t|` that reaches the bound.
pub fn check_error_bound(gru: &Gru, spec: &DyckSpec, k: u32, word: &[usize]) -> Result<ErrorTrace> {
    let tr = error_trace(gru, spec, k, word)?;
    if let Some((step, eps)) = tr.first_violation() {
        return Err(Error::BoundViolated {
            step,
            eps: eps.to_sci_string(3),
            bound: tr.bound.to_sci_string(3),
        });
    }
    Ok(tr)
}
