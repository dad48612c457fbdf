use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::alphabet::Alphabet;
use super::dfa::Dfa;
use crate::error::{Error, Result};
use crate::numerics::Rational;

/// The Dyck language over `n` parenthesis types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyckSpec {
    n: usize,
}

/// A decoded Dyck symbol. `kind` is the parenthesis type, `1..=n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Paren {
    pub open: bool,
    pub kind: usize,
}

impl DyckSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("Dyck languages need n >= 1".into()));
        }
        Ok(DyckSpec { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `2n + 1`, the base of the stack encoding.
    pub fn base(&self) -> i64 {
        2 * self.n as i64 + 1
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::dyck(self.n)
    }

    pub fn open(&self, kind: usize) -> usize {
        kind - 1
    }

    pub fn close(&self, kind: usize) -> usize {
        self.n + kind - 1
    }

    pub fn paren(&self, x: usize) -> Result<Paren> {
        if x < self.n {
            Ok(Paren { open: true, kind: x + 1 })
        } else if x < 2 * self.n {
            Ok(Paren {
                open: false,
                kind: x - self.n + 1,
            })
        } else {
            Err(Error::UnknownSymbol(format!("#{x}")))
        }
    }

    /// Index with the parenthesis type mirrored, `i -> n + 1 - i`.
    pub fn mirror(&self, x: usize) -> usize {
        let p = self.paren(x).expect("symbol checked by caller");
        let kind = self.n + 1 - p.kind;
        if p.open {
            self.open(kind)
        } else {
            self.close(kind)
        }
    }

    fn decode(&self, word: &[usize]) -> Result<Vec<Paren>> {
        word.iter().map(|&x| self.paren(x)).collect()
    }
}

/// Which of the three disjoint classes a word falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MembershipClass {
    /// Balanced.
    InDyck,
    /// Not balanced, but a proper prefix of a balanced word.
    InPrefix,
    Neither,
}

impl MembershipClass {
    pub const ALL: [MembershipClass; 3] = [MembershipClass::InDyck, MembershipClass::InPrefix, MembershipClass::Neither];
}

impl fmt::Display for MembershipClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MembershipClass::InDyck => "in-dyck",
            MembershipClass::InPrefix => "in-prefix",
            MembershipClass::Neither => "neither",
        };
        f.write_str(s)
    }
}

/// Outcome of running the parenthesis stack over a word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackRun {
    /// Open parenthesis types still on the stack, bottom first.
    pub stack: Vec<usize>,
    /// Index of the first symbol whose prefix is neither balanced nor a
    /// proper prefix of a balanced word.
    pub violation: Option<usize>,
}

pub fn stack_run(word: &[usize], spec: &DyckSpec) -> Result<StackRun> {
    let parens = spec.decode(word)?;
    let mut stack = Vec::new();
    for (t, p) in parens.iter().enumerate() {
        if p.open {
            stack.push(p.kind);
        } else if stack.last() == Some(&p.kind) {
            stack.pop();
        } else {
            return Ok(StackRun {
                stack,
                violation: Some(t),
            });
        }
    }
    Ok(StackRun { stack, violation: None })
}

pub fn classify(word: &[usize], spec: &DyckSpec) -> Result<MembershipClass> {
    let run = stack_run(word, spec)?;
    Ok(match (run.violation, run.stack.is_empty()) {
        (Some(_), _) => MembershipClass::Neither,
        (None, true) => MembershipClass::InDyck,
        (None, false) => MembershipClass::InPrefix,
    })
}

/// Index of the first symbol after which the prefix leaves `P_n ∪ D_n`.
pub fn violation_index(word: &[usize], spec: &DyckSpec) -> Result<Option<usize>> {
    Ok(stack_run(word, spec)?.violation)
}

/// Exact stack encodings `v_0 .. v_m` with the running counts of opening
/// (`a_t`) and closing (`b_t`) symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateTrace {
    pub values: Vec<Rational>,
    pub opens: Vec<usize>,
    pub closes: Vec<usize>,
}

impl StateTrace {
    pub fn last(&self) -> &Rational {
        self.values.last().expect("trace has t = 0")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn trace_with(
    word: &[usize],
    spec: &DyckSpec,
    mut step: impl FnMut(&Rational, Paren, usize) -> Rational,
) -> Result<StateTrace> {
    let parens = spec.decode(word)?;
    let mut values = vec![Rational::zero()];
    let (mut opens, mut closes) = (vec![0], vec![0]);
    for (t, p) in parens.into_iter().enumerate() {
        let next = step(values.last().unwrap(), p, t + 1);
        values.push(next);
        let (a, b) = (*opens.last().unwrap(), *closes.last().unwrap());
        opens.push(a + p.open as usize);
        closes.push(b + !p.open as usize);
    }
    Ok(StateTrace { values, opens, closes })
}

fn int(v: i64) -> Rational {
    Rational::from_i64(v)
}

/// `s_t`: `(i` maps `s` to `(s + 2i)/(2n+1)`, `)i` maps it to `(2n+1)s - 2i`.
pub fn state_trace(word: &[usize], spec: &DyckSpec) -> Result<StateTrace> {
    let m = int(spec.base());
    trace_with(word, spec, |s, p, _| {
        let two_i = int(2 * p.kind as i64);
        if p.open {
            (s + &two_i) / &m
        } else {
            s * &m - two_i
        }
    })
}

/// `s̄_t`: the same recurrence with every parenthesis type `i` replaced by
/// its mirror `n + 1 - i`.
pub fn state_trace_bar(word: &[usize], spec: &DyckSpec) -> Result<StateTrace> {
    spec.decode(word)?;
    let mirrored: Vec<usize> = word.iter().map(|&x| spec.mirror(x)).collect();
    state_trace(&mirrored, spec)
}

/// `s'_t = (2n+1)^(-kt) s_t`, computed by its own recurrence.
pub fn state_trace_prime(word: &[usize], spec: &DyckSpec, k: u32) -> Result<StateTrace> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    let m = int(spec.base());
    let k = k as i64;
    let open_scale = m.pow(-1 - k);
    let close_scale = m.pow(1 - k);
    trace_with(word, spec, |s, p, t| {
        let two_i = int(2 * p.kind as i64);
        if p.open {
            s * &open_scale + two_i * m.pow(-1 - k * t as i64)
        } else {
            s * &close_scale - two_i * m.pow(-k * t as i64)
        }
    })
}

/// The unique parenthesis type `j` that can close the last unmatched
/// opening symbol of a word in `P_n`, read off the stack encoding via
/// `2j/(2n+1) <= s_m < (2j+1)/(2n+1)`.
pub fn unique_closer(word: &[usize], spec: &DyckSpec) -> Result<usize> {
    if classify(word, spec)? != MembershipClass::InPrefix {
        return Err(Error::Precondition(
            "unique_closer needs a proper prefix of a balanced word".into(),
        ));
    }
    let s = state_trace(word, spec)?.last().clone();
    let j: BigInt = (s * int(spec.base()) / int(2)).floor();
    Ok(j.to_usize().expect("closer index is small"))
}

/// A shortest word of length at most `max_len` on which `dfa` (over the
/// Dyck alphabet) disagrees with `D_n`, found by breadth-first search over
/// pairs of automaton state and parenthesis stack.
pub fn shortest_dyck_disagreement(dfa: &Dfa, spec: &DyckSpec, max_len: usize) -> Result<Option<Vec<usize>>> {
    if *dfa.alphabet() != spec.alphabet() {
        return Err(Error::AlphabetMismatch("automaton is not over the Dyck alphabet".into()));
    }
    // Stack `None` is the sink for words that already left P_n ∪ D_n.
    type Node = (usize, Option<Vec<usize>>);
    let start: Node = (dfa.initial(), Some(Vec::new()));
    let mut parent: HashMap<Node, Option<(Node, usize)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((node, len)) = queue.pop_front() {
        let in_dyck = matches!(&node.1, Some(s) if s.is_empty());
        if dfa.is_accepting(node.0) != in_dyck {
            let mut word = Vec::new();
            let mut cur = node;
            while let Some(Some((prev, x))) = parent.get(&cur) {
                word.push(*x);
                cur = prev.clone();
            }
            word.reverse();
            return Ok(Some(word));
        }
        if len == max_len {
            continue;
        }
        for x in 0..2 * spec.n() {
            let p = spec.paren(x)?;
            let stack = match &node.1 {
                None => None,
                Some(s) if p.open => {
                    // A stack deeper than the remaining length cannot empty.
                    if s.len() + 1 > max_len - len - 1 {
                        None
                    } else {
                        let mut s = s.clone();
                        s.push(p.kind);
                        Some(s)
                    }
                }
                Some(s) if s.last() == Some(&p.kind) => Some(s[..s.len() - 1].to_vec()),
                Some(_) => None,
            };
            let next = (dfa.step(node.0, x), stack);
            if !parent.contains_key(&next) {
                parent.insert(next.clone(), Some((node.clone(), x)));
                queue.push_back((next, len + 1));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(spec: &DyckSpec, s: &str) -> Vec<usize> {
        spec.alphabet().parse_word(s).unwrap()
    }

    #[test]
    fn classifies_reference_words() {
        let d2 = DyckSpec::new(2).unwrap();
        assert_eq!(classify(&w(&d2, "(2 (1 )1 (2 (1 )1 )2 )2"), &d2).unwrap(), MembershipClass::InDyck);
        assert_eq!(classify(&w(&d2, ")1 (1"), &d2).unwrap(), MembershipClass::Neither);
        assert_eq!(classify(&w(&d2, "(2 )1 (1 )2"), &d2).unwrap(), MembershipClass::Neither);
        assert_eq!(classify(&[], &d2).unwrap(), MembershipClass::InDyck);
        assert_eq!(classify(&w(&d2, "(1 (2"), &d2).unwrap(), MembershipClass::InPrefix);
        assert!(classify(&[4], &d2).is_err());
    }

    #[test]
    fn stack_encoding_values() {
        let d2 = DyckSpec::new(2).unwrap();
        let t = state_trace(&w(&d2, "(2 (1"), &d2).unwrap();
        assert_eq!(t.values[1], Rational::ratio(4, 5));
        assert_eq!(t.values[2], Rational::ratio(14, 25));
        let p = state_trace_prime(&w(&d2, "(1"), &d2, 5).unwrap();
        assert_eq!(p.values[1], Rational::ratio(2, 15625));
        // ")1 (1" returns to zero without being balanced
        assert!(state_trace(&w(&d2, ")1 (1"), &d2).unwrap().last().is_zero());
    }

    #[test]
    fn mirrored_trace() {
        let d2 = DyckSpec::new(2).unwrap();
        let bar = state_trace_bar(&w(&d2, "(1"), &d2).unwrap();
        assert_eq!(bar.values[1], Rational::ratio(4, 5));
    }

    #[test]
    fn closers() {
        let d2 = DyckSpec::new(2).unwrap();
        assert_eq!(unique_closer(&w(&d2, "(2"), &d2).unwrap(), 2);
        assert_eq!(unique_closer(&w(&d2, "(2 (1"), &d2).unwrap(), 1);
        assert_eq!(unique_closer(&w(&d2, "(1 (2 )2"), &d2).unwrap(), 1);
        assert!(unique_closer(&w(&d2, "(1 )1"), &d2).is_err());
    }

    #[test]
    fn violation_positions() {
        let d2 = DyckSpec::new(2).unwrap();
        assert_eq!(violation_index(&w(&d2, "(2 )1 (1 )2"), &d2).unwrap(), Some(1));
        assert_eq!(violation_index(&w(&d2, "(2 (1"), &d2).unwrap(), None);
    }
}
