use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::alphabet::Alphabet;
use crate::error::{Error, Result};

/// A complete deterministic finite automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    states: Vec<String>,
    alphabet: Alphabet,
    /// `delta[q][x]`
    delta: Vec<Vec<usize>>,
    initial: usize,
    accepting: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct DfaJson {
    alphabet: Vec<String>,
    states: Vec<String>,
    initial: String,
    accepting: Vec<String>,
    transitions: BTreeMap<String, BTreeMap<String, String>>,
}

/// A state of the product automaton.
type Pair = (usize, usize);

impl Dfa {
    /// Builds a DFA from index tables. `delta[q][x]` is the successor of
    /// state `q` on symbol `x`.
    pub fn new(
        states: Vec<String>,
        alphabet: Alphabet,
        delta: Vec<Vec<usize>>,
        initial: usize,
        accepting: Vec<bool>,
    ) -> Result<Self> {
        let nq = states.len();
        if nq == 0 {
            return Err(Error::InvalidDfa("no states".into()));
        }
        let mut seen = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if seen.insert(s.as_str(), i).is_some() {
                return Err(Error::InvalidDfa(format!("state `{s}` appears twice")));
            }
        }
        if initial >= nq {
            return Err(Error::InvalidDfa(format!("initial state #{initial} does not exist")));
        }
        if accepting.len() != nq || delta.len() != nq {
            return Err(Error::InvalidDfa("table sizes do not match the state count".into()));
        }
        for (q, row) in delta.iter().enumerate() {
            if row.len() != alphabet.len() {
                return Err(Error::InvalidDfa(format!(
                    "state `{}` has {} transitions, expected {}",
                    states[q],
                    row.len(),
                    alphabet.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&t| t >= nq) {
                return Err(Error::InvalidDfa(format!("transition to missing state #{bad}")));
            }
        }
        Ok(Dfa {
            states,
            alphabet,
            delta,
            initial,
            accepting,
        })
    }

    /// States named `q0, q1, ...`.
    pub fn from_tables(alphabet: Alphabet, delta: Vec<Vec<usize>>, initial: usize, accepting: Vec<bool>) -> Result<Self> {
        let states = (0..delta.len()).map(|i| format!("q{i}")).collect();
        Dfa::new(states, alphabet, delta, initial, accepting)
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn step(&self, q: usize, x: usize) -> usize {
        self.delta[q][x]
    }

    /// Final state and verdict.
    pub fn run(&self, word: &[usize]) -> Result<(usize, bool)> {
        self.alphabet.check(word)?;
        let q = word.iter().fold(self.initial, |q, &x| self.delta[q][x]);
        Ok((q, self.accepting[q]))
    }

    /// `q_0, q_1, ..., q_m` along `word`.
    pub fn state_sequence(&self, word: &[usize]) -> Result<Vec<usize>> {
        self.alphabet.check(word)?;
        let mut out = Vec::with_capacity(word.len() + 1);
        let mut q = self.initial;
        out.push(q);
        for &x in word {
            q = self.delta[q][x];
            out.push(q);
        }
        Ok(out)
    }

    pub fn accepts(&self, word: &[usize]) -> Result<bool> {
        Ok(self.run(word)?.1)
    }

    /// A shortest word on which the two automata disagree, or `None` if
    /// their languages are equal. Both must share the same alphabet.
    pub fn distinguishing_word(&self, other: &Dfa) -> Result<Option<Vec<usize>>> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "{:?} vs {:?}",
                self.alphabet, other.alphabet
            )));
        }
        let start = (self.initial, other.initial);
        let mut parent: HashMap<Pair, Option<(Pair, usize)>> = HashMap::new();
        parent.insert(start, None);
        let mut queue = VecDeque::from([start]);
        while let Some(pair) = queue.pop_front() {
            if self.accepting[pair.0] != other.accepting[pair.1] {
                let mut word = Vec::new();
                let mut cur = pair;
                while let Some(Some((prev, x))) = parent.get(&cur) {
                    word.push(*x);
                    cur = *prev;
                }
                word.reverse();
                return Ok(Some(word));
            }
            for x in 0..self.alphabet.len() {
                let next = (self.delta[pair.0][x], other.delta[pair.1][x]);
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                    e.insert(Some((pair, x)));
                    queue.push_back(next);
                }
            }
        }
        Ok(None)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let j: DfaJson = serde_json::from_str(text)?;
        Self::from_json(j)
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<Self> {
        Self::from_json(serde_json::from_value(v)?)
    }

    fn from_json(j: DfaJson) -> Result<Self> {
        let alphabet = Alphabet::new(j.alphabet)?;
        let index: HashMap<&str, usize> = j.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| Error::InvalidDfa(format!("unknown state `{s}`")))
        };
        let initial = lookup(&j.initial)?;
        let mut accepting = vec![false; j.states.len()];
        for a in &j.accepting {
            accepting[lookup(a)?] = true;
        }
        for from in j.transitions.keys() {
            lookup(from)?;
        }
        let mut delta = Vec::with_capacity(j.states.len());
        for q in &j.states {
            let row = j
                .transitions
                .get(q)
                .ok_or_else(|| Error::InvalidDfa(format!("state `{q}` has no transitions")))?;
            for sym in row.keys() {
                alphabet.index_of(sym).map_err(|_| {
                    Error::InvalidDfa(format!("transition on unknown symbol `{sym}` from `{q}`"))
                })?;
            }
            let mut out = Vec::with_capacity(alphabet.len());
            for sym in alphabet.symbols() {
                let to = row
                    .get(sym)
                    .ok_or_else(|| Error::InvalidDfa(format!("missing transition from `{q}` on `{sym}`")))?;
                out.push(lookup(to)?);
            }
            delta.push(out);
        }
        Dfa::new(j.states, alphabet, delta, initial, accepting)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let j = DfaJson {
            alphabet: self.alphabet.symbols().to_vec(),
            states: self.states.clone(),
            initial: self.states[self.initial].clone(),
            accepting: (0..self.num_states())
                .filter(|&q| self.accepting[q])
                .map(|q| self.states[q].clone())
                .collect(),
            transitions: (0..self.num_states())
                .map(|q| {
                    let row = (0..self.alphabet.len())
                        .map(|x| (self.alphabet.symbol(x).to_string(), self.states[self.delta[q][x]].clone()))
                        .collect();
                    (self.states[q].clone(), row)
                })
                .collect(),
        };
        serde_json::to_value(j).expect("DFA serializes")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("DFA serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn parity() -> Dfa {
        // even number of a's
        Dfa::from_tables(
            Alphabet::new(["a", "b"]).unwrap(),
            vec![vec![1, 0], vec![0, 1]],
            0,
            vec![true, false],
        )
        .unwrap()
    }

    #[test]
    fn parity_runs() {
        let d = parity();
        let a = d.alphabet().clone();
        assert!(d.accepts(&a.parse_word("aa").unwrap()).unwrap());
        assert!(!d.accepts(&a.parse_word("ab").unwrap()).unwrap());
        assert!(d.accepts(&[]).unwrap());
        assert!(d.run(&[2]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let d = parity();
        let back = Dfa::from_json_str(&d.to_json_string()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn json_errors() {
        let missing = r#"{"alphabet":["a"],"states":["p"],"initial":"p","accepting":[],"transitions":{"p":{}}}"#;
        assert!(matches!(Dfa::from_json_str(missing), Err(Error::InvalidDfa(_))));
        let bad_init = r#"{"alphabet":["a"],"states":["p"],"initial":"x","accepting":[],"transitions":{"p":{"a":"p"}}}"#;
        assert!(Dfa::from_json_str(bad_init).is_err());
    }

    #[test]
    fn distinguishing_word_is_shortest() {
        let d = parity();
        let all = Dfa::from_tables(d.alphabet().clone(), vec![vec![0, 0]], 0, vec![true]).unwrap();
        assert_eq!(d.distinguishing_word(&all).unwrap(), Some(vec![0]));
        assert_eq!(d.distinguishing_word(&d).unwrap(), None);
    }
}
