//! Constructions of simple RNNs: compiled DFAs, the six-node Dyck
//! recognizer and their composition for context-free languages.

use serde::{Deserialize, Serialize};

use crate::automata::{Dfa, DyckSpec};
use crate::error::{Error, Result};
use crate::numerics::{Matrix, Rational};
use crate::rnn::{AcceptanceSet, SimpleRnn};

/// A context-free language given as `D_n ∩ L(regular)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CflSpec {
    pub dyck: DyckSpec,
    pub regular: Dfa,
}

#[derive(Serialize, Deserialize)]
struct CflJson {
    n: usize,
    regular: serde_json::Value,
}

impl CflSpec {
    pub fn new(dyck: DyckSpec, regular: Dfa) -> Result<Self> {
        if *regular.alphabet() != dyck.alphabet() {
            return Err(Error::AlphabetMismatch(format!(
                "regular part is over [{}], expected [{}]",
                regular.alphabet().symbols().join(" "),
                dyck.alphabet().symbols().join(" ")
            )));
        }
        Ok(CflSpec { dyck, regular })
    }

    pub fn contains(&self, word: &[usize]) -> Result<bool> {
        Ok(crate::automata::classify(word, &self.dyck)? == crate::automata::MembershipClass::InDyck
            && self.regular.accepts(word)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::from_json_value(serde_json::from_str(text)?)
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<Self> {
        let j: CflJson = serde_json::from_value(v)?;
        CflSpec::new(DyckSpec::new(j.n)?, Dfa::from_json_value(j.regular)?)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(CflJson {
            n: self.dyck.n(),
            regular: self.regular.to_json_value(),
        })
        .expect("spec serializes")
    }
}

/// Index of hidden node `(x, q)`.
fn node(dfa: &Dfa, x: usize, q: usize) -> usize {
    x * dfa.num_states() + q
}

/// Hidden node `(x, q)` fires after reading `x` into state `q`. Every
/// output edge comes from a node whose state is rejecting, so the output
/// is `0` on accepted words and `1` otherwise.
pub fn compile_dfa_to_rnn(dfa: &Dfa) -> Result<(SimpleRnn, AcceptanceSet)> {
    let (nq, nx) = (dfa.num_states(), dfa.alphabet().len());
    let size = nq * nx;
    let one = Rational::one();
    let wx = Matrix::from_fn(size, nx, |i, x| if i / nq == x { one.clone() } else { Rational::zero() });
    let mut wh = Matrix::filled(size, size, Rational::zero());
    for x in 0..nx {
        for q in 0..nq {
            for x2 in 0..nx {
                wh.set(node(dfa, x2, dfa.step(q, x2)), node(dfa, x, q), one.clone());
            }
        }
    }
    let wo = (0..size)
        .map(|i| if dfa.is_accepting(i % nq) { Rational::zero() } else { one.clone() })
        .collect();
    let mut h0 = vec![Rational::zero(); size];
    h0[node(dfa, 0, dfa.initial())] = one;
    let rnn = SimpleRnn::new(
        dfa.alphabet().clone(),
        wx,
        wh,
        vec![Rational::from_i64(-1); size],
        wo,
        Rational::zero(),
        h0,
    )?;
    Ok((rnn, AcceptanceSet::ExactZero))
}

/// The six-node recognizer for `D_n`. Node 1 holds the stack in base
/// `2n+1`, nodes 2 and 5 measure how far a closer misses the top of the
/// stack, node 3 catches a closer on an empty stack, and nodes 4 and 6
/// latch the two error signals.
pub fn build_dyck_rnn(spec: &DyckSpec) -> Result<(SimpleRnn, AcceptanceSet)> {
    let n = spec.n();
    let m = spec.base();
    let r = Rational::from_i64;
    let z = Rational::zero;
    let mut wx = Matrix::filled(6, 2 * n, z());
    for i in 1..=n as i64 {
        let (o, c) = (spec.open(i as usize), spec.close(i as usize));
        wx.set(0, o, Rational::ratio(2 * i, m));
        wx.set(0, c, r(-m));
        wx.set(1, o, r(-m));
        wx.set(1, c, r(-2 * i));
        wx.set(2, c, r(2 * i));
        wx.set(4, o, r(-m));
        wx.set(4, c, r(-(2 * i + 1)));
    }
    let inv = Rational::ratio(1, m);
    let wh = Matrix::from_rows(vec![
        vec![inv.clone(), inv, z(), z(), z(), z()],
        vec![r(m), r(m), z(), z(), z(), z()],
        vec![r(-m), r(-m), z(), z(), z(), z()],
        vec![z(), z(), r(1), r(1), z(), z()],
        vec![r(m), r(m), z(), z(), z(), z()],
        vec![z(), z(), z(), z(), r(1), r(1)],
    ])?;
    let rnn = SimpleRnn::new(spec.alphabet(), wx, wh, vec![z(); 6], vec![r(1); 6], z(), vec![z(); 6])?;
    Ok((rnn, AcceptanceSet::ExactZero))
}

fn check_nonnegative_output(rnn: &SimpleRnn, what: &str) -> Result<()> {
    if rnn.bo().is_negative() || rnn.wo().iter().any(Rational::is_negative) {
        return Err(Error::NegativeOutput(format!("{what} has a negative output weight")));
    }
    Ok(())
}

/// Runs both networks side by side: stacked input weights, block-diagonal
/// recurrence and the sum of the two outputs. Both outputs are nonnegative,
/// so the sum is `0` exactly when both are.
pub fn compose_cfl_rnn(dyck_rnn: &SimpleRnn, dfa_rnn: &SimpleRnn) -> Result<(SimpleRnn, AcceptanceSet)> {
    if dyck_rnn.alphabet() != dfa_rnn.alphabet() {
        return Err(Error::AlphabetMismatch(format!(
            "[{}] vs [{}]",
            dyck_rnn.alphabet().symbols().join(" "),
            dfa_rnn.alphabet().symbols().join(" ")
        )));
    }
    check_nonnegative_output(dyck_rnn, "Dyck network")?;
    check_nonnegative_output(dfa_rnn, "regular network")?;
    let cat = |a: &[Rational], b: &[Rational]| [a, b].concat();
    let rnn = SimpleRnn::new(
        dyck_rnn.alphabet().clone(),
        Matrix::vstack(&[dyck_rnn.wx(), dfa_rnn.wx()])?,
        Matrix::block_diag(&[dyck_rnn.wh(), dfa_rnn.wh()], Rational::zero()),
        cat(dyck_rnn.bh(), dfa_rnn.bh()),
        cat(dyck_rnn.wo(), dfa_rnn.wo()),
        dyck_rnn.bo() + dfa_rnn.bo(),
        cat(dyck_rnn.h0(), dfa_rnn.h0()),
    )?;
    Ok((rnn, AcceptanceSet::ExactZero))
}

/// [`build_dyck_rnn`] composed with the compiled regular part.
pub fn compile_cfl_rnn(spec: &CflSpec) -> Result<(SimpleRnn, AcceptanceSet)> {
    let (dyck, _) = build_dyck_rnn(&spec.dyck)?;
    let (reg, _) = compile_dfa_to_rnn(&spec.regular)?;
    compose_cfl_rnn(&dyck, &reg)
}
