#![allow(dead_code)]

use rnn_automata::automata::{Alphabet, Dfa, MembershipClass};

/// Words over {a, b} with an even number of `a`.
pub const PARITY: &str = r#"{
  "alphabet": ["a", "b"],
  "states": ["even", "odd"],
  "initial": "even",
  "accepting": ["even"],
  "transitions": {"even": {"a": "odd", "b": "even"}, "odd": {"a": "even", "b": "odd"}}
}"#;

/// Words over the two-parenthesis alphabet that never contain `(2 (2`
/// and end outside a `(2` run.
pub const NO_DOUBLE_OPEN2: &str = r#"{
  "alphabet": ["(1", "(2", ")1", ")2"],
  "states": ["s", "t", "dead"],
  "initial": "s",
  "accepting": ["s"],
  "transitions": {
    "s": {"(1": "s", "(2": "t", ")1": "s", ")2": "s"},
    "t": {"(1": "s", "(2": "dead", ")1": "s", ")2": "s"},
    "dead": {"(1": "dead", "(2": "dead", ")1": "dead", ")2": "dead"}
  }
}"#;

pub fn cfl_spec_json() -> String {
    format!(r#"{{"n": 2, "regular": {NO_DOUBLE_OPEN2}}}"#)
}

pub fn parity() -> Dfa {
    Dfa::from_json_str(PARITY).unwrap()
}

/// Membership by string matching on the symbol names, independent of the
/// library's stack code.
pub fn dyck_class(alphabet: &Alphabet, word: &[usize]) -> MembershipClass {
    let mut stack: Vec<&str> = Vec::new();
    for &x in word {
        let s = alphabet.symbol(x);
        if let Some(kind) = s.strip_prefix('(') {
            stack.push(kind);
        } else if stack.pop() != s.strip_prefix(')') {
            return MembershipClass::Neither;
        }
    }
    if stack.is_empty() {
        MembershipClass::InDyck
    } else {
        MembershipClass::InPrefix
    }
}

pub fn all_words(symbols: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for x in 0..symbols {
                let mut v: Vec<usize> = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}
