//! Gated recurrent units over [`BigFloat`], with gate weights that may be
//! infinite:
//!
//! ```text
//! z_t = σ(W_z x_t + U_z h_{t-1} + b_z)
//! r_t = σ(W_r x_t + U_r h_{t-1} + b_r)
//! h_t = z_t ∘ h_{t-1} + (1 - z_t) ∘ tanh(W_h x_t + U_h (r_t ∘ h_{t-1}) + b_h)
//! o_t = f(h_t)
//! ```

mod bound;
mod json;
mod precision;

use std::fmt::Write as _;

pub use bound::{check_error_bound, error_bound, error_trace, ErrorTrace};
pub use precision::{check_k, required_precision};

use crate::automata::Alphabet;
use crate::error::{Error, Result};
use crate::numerics::elementary::{sigmoid_prec, tanh_prec};
use crate::numerics::{extended_add, sigmoid_extended, weight_times, BigFloat, ExtendedValue, ExtendedWeight, Matrix};
use crate::rnn::AcceptanceSet;

/// Readout applied to the hidden state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OutputFunctional {
    /// `W_o h + b_o`.
    Linear { wo: Vec<BigFloat>, bo: BigFloat },
    /// `|h_1|/h_2 - h_4 - h_8 + 2` on the eight nodes starting at `offset`.
    DyckReadout { offset: usize },
    Sum(Vec<OutputFunctional>),
}

impl OutputFunctional {
    fn check(&self, m: usize) -> Result<()> {
        match self {
            OutputFunctional::Linear { wo, .. } if wo.len() != m => Err(Error::DimensionMismatch(format!(
                "W_o has {} entries, hidden size is {m}",
                wo.len()
            ))),
            OutputFunctional::DyckReadout { offset } if offset + 8 > m => Err(Error::DimensionMismatch(format!(
                "Dyck readout at offset {offset} needs 8 nodes, hidden size is {m}"
            ))),
            OutputFunctional::Sum(terms) => terms.iter().try_for_each(|t| t.check(m)),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, h: &[BigFloat], prec: u32) -> Result<BigFloat> {
        match self {
            OutputFunctional::Linear { wo, bo } => Ok(wo
                .iter()
                .zip(h)
                .filter(|(w, v)| !w.is_zero() && !v.is_zero())
                .fold(bo.with_prec(prec), |acc, (w, v)| acc.add_prec(&w.mul_prec(v, prec), prec))),
            OutputFunctional::DyckReadout { offset } => {
                let h = &h[*offset..*offset + 8];
                if h[1].is_zero() {
                    return Err(Error::DivisionByZero("Dyck readout with h_2 = 0"));
                }
                let q = h[0].abs().div_prec(&h[1], prec);
                Ok(q.sub_prec(&h[3], prec)
                    .sub_prec(&h[7], prec)
                    .add_prec(&BigFloat::from_i64(2, prec), prec))
            }
            OutputFunctional::Sum(terms) => terms
                .iter()
                .try_fold(BigFloat::zero(prec), |acc, t| Ok(acc.add_prec(&t.eval(h, prec)?, prec))),
        }
    }
}

/// How a network was built; carried through its JSON form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Construction {
    pub kind: String,
    pub n: Option<usize>,
    pub k: Option<u32>,
    pub max_len: Option<usize>,
}

/// Per-symbol gate and candidate values for rows whose recurrent weights are
/// all zero.
#[derive(Clone, Debug, PartialEq, Eq)]
struct SymbolCache {
    z: Vec<Option<BigFloat>>,
    r: Vec<Option<BigFloat>>,
    cand: Vec<Option<BigFloat>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GruWeights {
    pub wz: Matrix<BigFloat>,
    pub uz: Matrix<ExtendedWeight>,
    pub wr: Matrix<BigFloat>,
    pub ur: Matrix<BigFloat>,
    pub wh: Matrix<BigFloat>,
    pub uh: Matrix<BigFloat>,
    pub bz: Vec<BigFloat>,
    pub br: Vec<BigFloat>,
    pub bh: Vec<BigFloat>,
}

impl GruWeights {
    /// All-zero weights for `m` hidden nodes and `symbols` inputs.
    pub fn zeros(m: usize, symbols: usize, prec: u32) -> Self {
        let z = BigFloat::zero(prec);
        GruWeights {
            wz: Matrix::filled(m, symbols, z.clone()),
            uz: Matrix::filled(m, m, ExtendedWeight::Finite(z.clone())),
            wr: Matrix::filled(m, symbols, z.clone()),
            ur: Matrix::filled(m, m, z.clone()),
            wh: Matrix::filled(m, symbols, z.clone()),
            uh: Matrix::filled(m, m, z.clone()),
            bz: vec![z.clone(); m],
            br: vec![z.clone(); m],
            bh: vec![z; m],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gru {
    alphabet: Alphabet,
    prec: u32,
    w: GruWeights,
    h0: Vec<BigFloat>,
    output: OutputFunctional,
    construction: Option<Construction>,
    cache: Vec<SymbolCache>,
    uz_rows: Vec<Vec<(usize, ExtendedWeight)>>,
    ur_rows: Vec<Vec<(usize, BigFloat)>>,
    uh_rows: Vec<Vec<(usize, BigFloat)>>,
}

fn sparse<T: Clone>(m: &Matrix<T>, is_zero: impl Fn(&T) -> bool) -> Vec<Vec<(usize, T)>> {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .enumerate()
                .filter(|(_, v)| !is_zero(v))
                .map(|(j, v)| (j, v.clone()))
                .collect()
        })
        .collect()
}

/// One row of a [`GruTrace`]; `symbol` is `None` at `t = 0`, where `z` and
/// `r` are empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GruTraceStep {
    pub t: usize,
    pub symbol: Option<usize>,
    pub z: Vec<BigFloat>,
    pub r: Vec<BigFloat>,
    pub h: Vec<BigFloat>,
    pub o: Option<BigFloat>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GruTrace {
    pub steps: Vec<GruTraceStep>,
}

/// Three significant digits, `0` for zero and `1.0` style for values that
/// are exactly one.
pub fn format_value(v: &BigFloat) -> String {
    if v.is_zero() {
        "0".into()
    } else {
        v.to_sci_string(3)
    }
}

impl GruTrace {
    pub fn output(&self) -> Option<&BigFloat> {
        self.steps.last().and_then(|s| s.o.as_ref())
    }

    /// `h_t = [..]` per step in scientific notation, then `o_m = ..`.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        for st in &self.steps {
            let v: Vec<String> = st.h.iter().map(format_value).collect();
            let _ = writeln!(s, "h_{} = [{}]", st.t, v.join(" "));
        }
        let last = self.steps.last().expect("trace has t = 0");
        if let Some(o) = &last.o {
            let _ = writeln!(s, "o_{} = {}", last.t, format_value(o));
        }
        s
    }
}

impl Gru {
    pub fn new(
        alphabet: Alphabet,
        prec: u32,
        w: GruWeights,
        h0: Vec<BigFloat>,
        output: OutputFunctional,
    ) -> Result<Self> {
        let m = h0.len();
        let sx = alphabet.len();
        for (name, mat) in [("W_z", &w.wz), ("W_r", &w.wr), ("W_h", &w.wh)] {
            if mat.rows() != m || mat.cols() != sx {
                return Err(Error::DimensionMismatch(format!(
                    "{name} is {}x{}, expected {m}x{sx}",
                    mat.rows(),
                    mat.cols()
                )));
            }
        }
        let square = [("U_z", w.uz.rows(), w.uz.cols()), ("U_r", w.ur.rows(), w.ur.cols()), ("U_h", w.uh.rows(), w.uh.cols())];
        for (name, r, c) in square {
            if r != m || c != m {
                return Err(Error::DimensionMismatch(format!("{name} is {r}x{c}, expected {m}x{m}")));
            }
        }
        for (name, b) in [("b_z", &w.bz), ("b_r", &w.br), ("b_h", &w.bh)] {
            if b.len() != m {
                return Err(Error::DimensionMismatch(format!("{name} has {} entries, expected {m}", b.len())));
            }
        }
        output.check(m)?;
        let uz_rows = sparse(&w.uz, ExtendedWeight::is_zero);
        let ur_rows = sparse(&w.ur, BigFloat::is_zero);
        let uh_rows = sparse(&w.uh, BigFloat::is_zero);
        let cache = (0..sx)
            .map(|x| SymbolCache {
                z: (0..m)
                    .map(|i| {
                        uz_rows[i]
                            .is_empty()
                            .then(|| sigmoid_prec(&w.wz.get(i, x).add_prec(&w.bz[i], prec), prec))
                    })
                    .collect(),
                r: (0..m)
                    .map(|i| {
                        ur_rows[i]
                            .is_empty()
                            .then(|| sigmoid_prec(&w.wr.get(i, x).add_prec(&w.br[i], prec), prec))
                    })
                    .collect(),
                cand: (0..m)
                    .map(|i| {
                        uh_rows[i]
                            .is_empty()
                            .then(|| tanh_prec(&w.wh.get(i, x).add_prec(&w.bh[i], prec), prec))
                    })
                    .collect(),
            })
            .collect();
        Ok(Gru {
            alphabet,
            prec,
            w,
            h0,
            output,
            construction: None,
            cache,
            uz_rows,
            ur_rows,
            uh_rows,
        })
    }

    pub fn with_construction(mut self, c: Construction) -> Self {
        self.construction = Some(c);
        self
    }

    pub fn construction(&self) -> Option<&Construction> {
        self.construction.as_ref()
    }

    pub fn hidden_size(&self) -> usize {
        self.h0.len()
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn weights(&self) -> &GruWeights {
        &self.w
    }

    pub fn h0(&self) -> &[BigFloat] {
        &self.h0
    }

    pub fn output_functional(&self) -> &OutputFunctional {
        &self.output
    }

    pub fn output(&self, h: &[BigFloat]) -> Result<BigFloat> {
        self.output.eval(h, self.prec)
    }

    /// One step from `h` on symbol `x`, returning `(z, r, h')`. `step` is
    /// the time index reported in [`Error::GateDegenerate`].
    pub fn step_at(&self, h: &[BigFloat], x: usize, step: usize) -> Result<(Vec<BigFloat>, Vec<BigFloat>, Vec<BigFloat>)> {
        let m = self.hidden_size();
        if h.len() != m {
            return Err(Error::DimensionMismatch(format!("hidden state has size {}, expected {m}", h.len())));
        }
        self.alphabet.check(&[x])?;
        let p = self.prec;
        let cache = &self.cache[x];
        let mut z = Vec::with_capacity(m);
        for i in 0..m {
            z.push(match &cache.z[i] {
                Some(v) => v.clone(),
                None => {
                    let mut acc = ExtendedValue::Finite(self.w.wz.get(i, x).add_prec(&self.w.bz[i], p));
                    for (j, wt) in &self.uz_rows[i] {
                        acc = extended_add(acc, weight_times(wt, &h[*j], p, step, i)?, p, i)?;
                    }
                    sigmoid_extended(&acc, p)
                }
            });
        }
        let mut r = Vec::with_capacity(m);
        for i in 0..m {
            r.push(match &cache.r[i] {
                Some(v) => v.clone(),
                None => {
                    let acc = self.ur_rows[i].iter().fold(
                        self.w.wr.get(i, x).add_prec(&self.w.br[i], p),
                        |acc, (j, wt)| acc.add_prec(&wt.mul_prec(&h[*j], p), p),
                    );
                    sigmoid_prec(&acc, p)
                }
            });
        }
        let one = BigFloat::one(p);
        let mut out = Vec::with_capacity(m);
        for i in 0..m {
            if z[i] == one {
                out.push(h[i].clone());
                continue;
            }
            let c = match &cache.cand[i] {
                Some(v) => v.clone(),
                None => {
                    let acc = self.uh_rows[i].iter().fold(
                        self.w.wh.get(i, x).add_prec(&self.w.bh[i], p),
                        |acc, (j, wt)| acc.add_prec(&wt.mul_prec(&r[*j].mul_prec(&h[*j], p), p), p),
                    );
                    tanh_prec(&acc, p)
                }
            };
            out.push(if z[i].is_zero() {
                c
            } else {
                z[i].mul_prec(&h[i], p)
                    .add_prec(&one.sub_prec(&z[i], p).mul_prec(&c, p), p)
            });
        }
        Ok((z, r, out))
    }

    pub fn step(&self, h: &[BigFloat], x: usize) -> Result<(Vec<BigFloat>, Vec<BigFloat>, Vec<BigFloat>)> {
        self.step_at(h, x, 0)
    }

    pub fn final_state(&self, word: &[usize]) -> Result<Vec<BigFloat>> {
        self.alphabet.check(word)?;
        let mut h = self.h0.clone();
        for (t, &x) in word.iter().enumerate() {
            h = self.step_at(&h, x, t + 1)?.2;
        }
        Ok(h)
    }

    /// Runs the word, recording every step. Outputs at intermediate steps
    /// are recorded when defined.
    pub fn run(&self, word: &[usize]) -> Result<(BigFloat, GruTrace)> {
        self.alphabet.check(word)?;
        let mut h = self.h0.clone();
        let mut steps = vec![GruTraceStep {
            t: 0,
            symbol: None,
            z: Vec::new(),
            r: Vec::new(),
            o: self.output(&h).ok(),
            h: h.clone(),
        }];
        for (t, &x) in word.iter().enumerate() {
            let (z, r, next) = self.step_at(&h, x, t + 1)?;
            h = next;
            steps.push(GruTraceStep {
                t: t + 1,
                symbol: Some(x),
                z,
                r,
                o: self.output(&h).ok(),
                h: h.clone(),
            });
        }
        let o = self.output(&h)?;
        steps.last_mut().unwrap().o = Some(o.clone());
        Ok((o, GruTrace { steps }))
    }

    pub fn accepts(&self, s: &AcceptanceSet, word: &[usize]) -> Result<bool> {
        Ok(s.contains_float(&self.output(&self.final_state(word)?)?))
    }
}

/// `(z, r, h')` for one step.
pub fn gru_step(gru: &Gru, h: &[BigFloat], x: usize) -> Result<(Vec<BigFloat>, Vec<BigFloat>, Vec<BigFloat>)> {
    gru.step(h, x)
}

pub fn gru_run(gru: &Gru, word: &[usize]) -> Result<(BigFloat, GruTrace)> {
    gru.run(word)
}
