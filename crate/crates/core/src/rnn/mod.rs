//! Simple ReLU recurrent networks over exact rationals, their fixed-point
//! counterparts, and DFA extraction from the latter.
//!
//! `h_t = ReLU(W_x x_t + W_h h_{t-1} + b_h)` and `o_t = W_o h_t + b_o`,
//! with `x_t` the one-hot encoding of the `t`-th symbol.

mod acceptance;
mod scaled;

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use acceptance::AcceptanceSet;
use scaled::{IntWeights, ScaledVec};

use crate::automata::{Alphabet, Dfa};
use crate::error::{Error, Result};
use crate::numerics::{FixedSpec, Matrix, Rational};

/// A simple RNN with exact rational weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleRnn {
    alphabet: Alphabet,
    wx: Matrix<Rational>,
    wh: Matrix<Rational>,
    bh: Vec<Rational>,
    wo: Vec<Rational>,
    bo: Rational,
    h0: Vec<Rational>,
    int: IntWeights,
}

/// A hidden state held as integers over a shared denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RnnState(ScaledVec);

impl RnnState {
    pub fn values(&self) -> Vec<Rational> {
        self.0.to_rationals()
    }
}

/// One row of an [`RnnTrace`]. `symbol` is `None` at `t = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RnnTraceStep {
    pub t: usize,
    pub symbol: Option<usize>,
    pub h: Vec<Rational>,
    pub o: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RnnTrace {
    pub steps: Vec<RnnTraceStep>,
}

impl RnnTrace {
    pub fn output(&self) -> &Rational {
        &self.steps.last().expect("trace has t = 0").o
    }

    /// `h_t = [..]` for every step, then `o_m = ..`, values as exact
    /// decimals where they have a finite expansion.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        for st in &self.steps {
            let v: Vec<String> = st.h.iter().map(Rational::to_decimal_or_fraction).collect();
            let _ = writeln!(s, "h_{} = [{}]", st.t, v.join(" "));
        }
        let last = self.steps.last().expect("trace has t = 0");
        let _ = writeln!(s, "o_{} = {}", last.t, last.o.to_decimal_or_fraction());
        s
    }
}

fn dims(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::DimensionMismatch(format!("{what} has size {got}, expected {want}")));
    }
    Ok(())
}

impl SimpleRnn {
    pub fn new(
        alphabet: Alphabet,
        wx: Matrix<Rational>,
        wh: Matrix<Rational>,
        bh: Vec<Rational>,
        wo: Vec<Rational>,
        bo: Rational,
        h0: Vec<Rational>,
    ) -> Result<Self> {
        let m = wh.rows();
        dims("W_h column count", wh.cols(), m)?;
        dims("W_x row count", wx.rows(), m)?;
        dims("W_x column count", wx.cols(), alphabet.len())?;
        dims("b_h", bh.len(), m)?;
        dims("W_o", wo.len(), m)?;
        dims("h_0", h0.len(), m)?;
        let int = IntWeights::new(&wx, &wh, &bh, &wo, &bo);
        Ok(SimpleRnn {
            alphabet,
            wx,
            wh,
            bh,
            wo,
            bo,
            h0,
            int,
        })
    }

    pub fn hidden_size(&self) -> usize {
        self.h0.len()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn wx(&self) -> &Matrix<Rational> {
        &self.wx
    }

    pub fn wh(&self) -> &Matrix<Rational> {
        &self.wh
    }

    pub fn bh(&self) -> &[Rational] {
        &self.bh
    }

    pub fn wo(&self) -> &[Rational] {
        &self.wo
    }

    pub fn bo(&self) -> &Rational {
        &self.bo
    }

    pub fn h0(&self) -> &[Rational] {
        &self.h0
    }

    /// One step of the recurrence.
    pub fn step(&self, h: &[Rational], x: usize) -> Result<Vec<Rational>> {
        dims("hidden state", h.len(), self.hidden_size())?;
        self.alphabet.check(&[x])?;
        Ok(self.int.step(&ScaledVec::from_rationals(h), x).to_rationals())
    }

    /// `W_o h + b_o`.
    pub fn output(&self, h: &[Rational]) -> Rational {
        let mut acc = self.bo.clone();
        for (w, v) in self.wo.iter().zip(h) {
            if !w.is_zero() && !v.is_zero() {
                acc = acc + w * v;
            }
        }
        acc
    }

    /// `h_0` in the internal representation used by [`SimpleRnn::advance`].
    pub fn initial_state(&self) -> RnnState {
        RnnState(ScaledVec::from_rationals(&self.h0))
    }

    /// One step on the internal representation; `x` must be a valid symbol
    /// index.
    pub fn advance(&self, h: &RnnState, x: usize) -> RnnState {
        assert!(x < self.alphabet.len(), "symbol index {x} out of range");
        RnnState(self.int.step(&h.0, x))
    }

    pub fn state_output(&self, h: &RnnState) -> Rational {
        self.int.output(&h.0)
    }

    /// Final hidden state, without recording a trace.
    pub fn final_state(&self, word: &[usize]) -> Result<Vec<Rational>> {
        self.alphabet.check(word)?;
        let mut h = ScaledVec::from_rationals(&self.h0);
        for &x in word {
            h = self.int.step(&h, x);
        }
        Ok(h.to_rationals())
    }

    pub fn run(&self, word: &[usize]) -> Result<(Rational, RnnTrace)> {
        self.alphabet.check(word)?;
        let mut h = ScaledVec::from_rationals(&self.h0);
        let mut steps = vec![RnnTraceStep {
            t: 0,
            symbol: None,
            o: self.output(&self.h0),
            h: self.h0.clone(),
        }];
        for (t, &x) in word.iter().enumerate() {
            h = self.int.step(&h, x);
            let v = h.to_rationals();
            steps.push(RnnTraceStep {
                t: t + 1,
                symbol: Some(x),
                o: self.output(&v),
                h: v,
            });
        }
        let o = steps.last().unwrap().o.clone();
        Ok((o, RnnTrace { steps }))
    }

    pub fn accepts(&self, s: &AcceptanceSet, word: &[usize]) -> Result<bool> {
        self.alphabet.check(word)?;
        let h = word.iter().fold(self.initial_state(), |h, &x| self.advance(&h, x));
        Ok(s.contains(&self.state_output(&h)))
    }

    fn quantize_vec(&self, v: &[Rational], spec: &FixedSpec) -> Vec<Rational> {
        v.iter().map(|r| spec.quantize(r).to_rational()).collect()
    }

    /// One step with the hidden state stored in `spec`: the pre-activation
    /// is exact, ReLU is applied, then every component is quantized.
    pub fn step_quantized(&self, h: &[Rational], x: usize, spec: &FixedSpec) -> Result<Vec<Rational>> {
        Ok(self.quantize_vec(&self.step(h, x)?, spec))
    }

    /// Runs with the hidden state (including `h_0`) quantized after every
    /// step. Outputs are computed exactly from the stored state.
    pub fn run_quantized(&self, word: &[usize], spec: &FixedSpec) -> Result<(Rational, RnnTrace)> {
        self.alphabet.check(word)?;
        let mut h = self.quantize_vec(&self.h0, spec);
        let mut steps = vec![RnnTraceStep {
            t: 0,
            symbol: None,
            o: self.output(&h),
            h: h.clone(),
        }];
        for (t, &x) in word.iter().enumerate() {
            h = self.step_quantized(&h, x, spec)?;
            steps.push(RnnTraceStep {
                t: t + 1,
                symbol: Some(x),
                o: self.output(&h),
                h: h.clone(),
            });
        }
        let o = steps.last().unwrap().o.clone();
        Ok((o, RnnTrace { steps }))
    }

    /// The automaton whose states are the quantized hidden vectors
    /// reachable from `h_0`, explored breadth first. States are named
    /// `q0, q1, ...` in discovery order; a state accepts when its output
    /// lies in `s`.
    pub fn extract_dfa(&self, spec: &FixedSpec, s: &AcceptanceSet, max_states: usize) -> Result<Dfa> {
        let key = |h: &[Rational]| -> Vec<i128> { h.iter().map(|r| spec.quantize(r).raw()).collect() };
        let start = self.quantize_vec(&self.h0, spec);
        let mut index: HashMap<Vec<i128>, usize> = HashMap::new();
        let mut states = vec![start.clone()];
        index.insert(key(&start), 0);
        let mut delta: Vec<Vec<usize>> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(q) = queue.pop_front() {
            let mut row = Vec::with_capacity(self.alphabet.len());
            for x in 0..self.alphabet.len() {
                let next = self.step_quantized(&states[q], x, spec)?;
                let k = key(&next);
                let id = match index.get(&k) {
                    Some(&id) => id,
                    None => {
                        if states.len() == max_states {
                            return Err(Error::StateBudgetExceeded(max_states));
                        }
                        let id = states.len();
                        index.insert(k, id);
                        states.push(next);
                        queue.push_back(id);
                        id
                    }
                };
                row.push(id);
            }
            if delta.len() <= q {
                delta.resize(q + 1, Vec::new());
            }
            delta[q] = row;
        }
        let accepting = states.iter().map(|h| s.contains(&self.output(h))).collect();
        Dfa::from_tables(self.alphabet.clone(), delta, 0, accepting)
    }

    pub fn to_json_value(&self, acceptance: &AcceptanceSet) -> serde_json::Value {
        let strs = |v: &[Rational]| v.iter().map(Rational::to_string).collect::<Vec<_>>();
        let mat = |m: &Matrix<Rational>| (0..m.rows()).map(|i| strs(m.row(i))).collect::<Vec<_>>();
        let j = RnnJson {
            model: "simple_rnn".into(),
            alphabet: self.alphabet.symbols().to_vec(),
            wx: mat(&self.wx),
            wh: mat(&self.wh),
            bh: strs(&self.bh),
            wo: vec![strs(&self.wo)],
            bo: self.bo.to_string(),
            h0: strs(&self.h0),
            acceptance: acceptance.to_json_value(),
        };
        serde_json::to_value(j).expect("network serializes")
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<(Self, AcceptanceSet)> {
        let j: RnnJson = serde_json::from_value(v)?;
        if j.model != "simple_rnn" {
            return Err(Error::Parse(format!("expected model simple_rnn, found {}", j.model)));
        }
        let vec = |v: &[String]| v.iter().map(|s| Rational::parse(s)).collect::<Result<Vec<_>>>();
        let alphabet = Alphabet::new(j.alphabet)?;
        let m = j.h0.len();
        let mat = |rows: &[Vec<String>], cols: usize| -> Result<Matrix<Rational>> {
            Matrix::from_rows_with_cols(rows.iter().map(|r| vec(r)).collect::<Result<_>>()?, cols)
        };
        if j.wo.len() != 1 {
            return Err(Error::DimensionMismatch(format!("W_o has {} rows, expected 1", j.wo.len())));
        }
        let rnn = SimpleRnn::new(
            alphabet.clone(),
            mat(&j.wx, alphabet.len())?,
            mat(&j.wh, m)?,
            vec(&j.bh)?,
            vec(&j.wo[0])?,
            Rational::parse(&j.bo)?,
            vec(&j.h0)?,
        )?;
        Ok((rnn, AcceptanceSet::from_json_value(j.acceptance)?))
    }
}

#[derive(Serialize, Deserialize)]
struct RnnJson {
    model: String,
    alphabet: Vec<String>,
    #[serde(rename = "Wx")]
    wx: Vec<Vec<String>>,
    #[serde(rename = "Wh")]
    wh: Vec<Vec<String>>,
    bh: Vec<String>,
    #[serde(rename = "Wo")]
    wo: Vec<Vec<String>>,
    bo: String,
    h0: Vec<String>,
    acceptance: serde_json::Value,
}

/// `ReLU(W_x x + W_h h + b_h)`.
pub fn rnn_step(rnn: &SimpleRnn, h: &[Rational], x: usize) -> Result<Vec<Rational>> {
    rnn.step(h, x)
}

pub fn rnn_run(rnn: &SimpleRnn, word: &[usize]) -> Result<(Rational, RnnTrace)> {
    rnn.run(word)
}

pub fn rnn_accepts(rnn: &SimpleRnn, s: &AcceptanceSet, word: &[usize]) -> Result<bool> {
    rnn.accepts(s, word)
}

pub fn rnn_run_quantized(rnn: &SimpleRnn, word: &[usize], spec: &FixedSpec) -> Result<(Rational, RnnTrace)> {
    rnn.run_quantized(word, spec)
}

pub fn extract_dfa(rnn: &SimpleRnn, spec: &FixedSpec, s: &AcceptanceSet, max_states: usize) -> Result<Dfa> {
    rnn.extract_dfa(spec, s, max_states)
}
