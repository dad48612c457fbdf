use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::alphabet::Alphabet;
use super::dfa::Dfa;
use super::dyck::{classify, DyckSpec, MembershipClass};

/// A reproducible stream of words of one membership class.
///
/// The stream is infinite unless no word of the class fits in `max_len`,
/// in which case it is empty. `Neither` words rotate through three
/// strategies: uniform noise, a single-symbol corruption of a word in
/// `P_n ∪ D_n`, and words of the shape `A (j )i (i )j B` with `A`, `B`
/// balanced and `i != j`, whose stack encoding returns to zero although the
/// word is unbalanced (`)1 (1` when `n = 1`).
pub struct WordGenerator {
    spec: DyckSpec,
    class: MembershipClass,
    max_len: usize,
    rng: ChaCha8Rng,
    round: usize,
}

pub fn gen_words(spec: DyckSpec, class: MembershipClass, max_len: usize, seed: u64) -> WordGenerator {
    WordGenerator {
        spec,
        class,
        max_len,
        rng: ChaCha8Rng::seed_from_u64(seed),
        round: 0,
    }
}

impl WordGenerator {
    fn open(&mut self, stack: &mut Vec<usize>, out: &mut Vec<usize>) {
        let kind = self.rng.gen_range(1..=self.spec.n());
        stack.push(kind);
        out.push(self.spec.open(kind));
    }

    /// Balanced word of even length `len`.
    fn balanced(&mut self, len: usize) -> Vec<usize> {
        debug_assert!(len.is_multiple_of(2));
        let mut out = Vec::with_capacity(len);
        let mut stack = Vec::new();
        for t in 0..len {
            let remaining = len - t;
            let must_close = stack.len() == remaining;
            if !stack.is_empty() && (must_close || self.rng.gen_bool(0.5)) {
                let kind = stack.pop().unwrap();
                out.push(self.spec.close(kind));
            } else {
                self.open(&mut stack, &mut out);
            }
        }
        out
    }

    /// Word of length `len` that never violates and ends with open symbols
    /// on the stack.
    fn prefix(&mut self, len: usize) -> Vec<usize> {
        loop {
            let mut out = Vec::with_capacity(len);
            let mut stack = Vec::new();
            for _ in 0..len {
                if !stack.is_empty() && self.rng.gen_bool(0.5) {
                    let kind = stack.pop().unwrap();
                    out.push(self.spec.close(kind));
                } else {
                    self.open(&mut stack, &mut out);
                }
            }
            if !stack.is_empty() {
                return out;
            }
        }
    }

    fn noise(&mut self) -> Vec<usize> {
        loop {
            let len = self.rng.gen_range(1..=self.max_len);
            let w: Vec<usize> = (0..len).map(|_| self.rng.gen_range(0..2 * self.spec.n())).collect();
            if self.is(&w, MembershipClass::Neither) {
                return w;
            }
        }
    }

    fn corruption(&mut self) -> Vec<usize> {
        loop {
            let len = self.rng.gen_range(1..=self.max_len);
            let mut w = if len % 2 == 0 && self.rng.gen_bool(0.5) {
                self.balanced(len)
            } else {
                self.prefix(len)
            };
            let pos = self.rng.gen_range(0..len);
            let old = w[pos];
            let choices: Vec<usize> = (0..2 * self.spec.n()).filter(|&x| x != old).collect();
            w[pos] = *choices.choose(&mut self.rng).unwrap();
            if self.is(&w, MembershipClass::Neither) {
                return w;
            }
        }
    }

    fn rebalance(&mut self) -> Option<Vec<usize>> {
        let n = self.spec.n();
        let core: Vec<usize> = if n == 1 {
            vec![self.spec.close(1), self.spec.open(1)]
        } else {
            let i = self.rng.gen_range(1..=n);
            let mut j = self.rng.gen_range(1..n);
            if j >= i {
                j += 1;
            }
            vec![self.spec.open(j), self.spec.close(i), self.spec.open(i), self.spec.close(j)]
        };
        if core.len() > self.max_len {
            return None;
        }
        let spare = (self.max_len - core.len()) / 2;
        let pairs = self.rng.gen_range(0..=spare);
        let before = self.rng.gen_range(0..=pairs);
        let mut w = self.balanced(2 * before);
        w.extend(core);
        let tail = self.balanced(2 * (pairs - before));
        w.extend(tail);
        Some(w)
    }

    fn is(&self, w: &[usize], class: MembershipClass) -> bool {
        classify(w, &self.spec).expect("generated symbols are in range") == class
    }
}

impl Iterator for WordGenerator {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        match self.class {
            MembershipClass::InDyck => {
                let len = 2 * self.rng.gen_range(0..=self.max_len / 2);
                Some(self.balanced(len))
            }
            MembershipClass::InPrefix => {
                if self.max_len == 0 {
                    return None;
                }
                let len = self.rng.gen_range(1..=self.max_len);
                Some(self.prefix(len))
            }
            MembershipClass::Neither => {
                if self.max_len == 0 {
                    return None;
                }
                let strategy = self.round % 3;
                self.round += 1;
                match strategy {
                    0 => Some(self.noise()),
                    1 => Some(self.corruption()),
                    _ => Some(self.rebalance().unwrap_or_else(|| self.noise())),
                }
            }
        }
    }
}

/// Uniformly random complete DFA with `states` states over the first
/// `symbols` letters of `a, b, c, ...`, each state accepting with
/// probability 1/2.
pub fn random_dfa<R: Rng>(rng: &mut R, states: usize, symbols: usize) -> Dfa {
    assert!((1..=26).contains(&symbols) && states >= 1);
    let alphabet = Alphabet::new((0..symbols).map(|i| ((b'a' + i as u8) as char).to_string())).unwrap();
    let delta = (0..states)
        .map(|_| (0..symbols).map(|_| rng.gen_range(0..states)).collect())
        .collect();
    let accepting = (0..states).map(|_| rng.gen_bool(0.5)).collect();
    Dfa::from_tables(alphabet, delta, 0, accepting).expect("random tables are valid")
}

/// All words over `k` symbols of length at most `max_len`, shortest first,
/// each length in lexicographic order.
pub fn all_words(k: usize, max_len: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..=max_len).flat_map(move |len| {
        let total = (k as u128).pow(len as u32);
        (0..total).map(move |mut code| {
            let mut w = vec![0; len];
            for slot in w.iter_mut().rev() {
                *slot = (code % k as u128) as usize;
                code /= k as u128;
            }
            w
        })
    })
}
