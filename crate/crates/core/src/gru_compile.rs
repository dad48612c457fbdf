//! Constructions of GRUs: compiled DFAs, the eight-node Dyck recognizer,
//! its three-node stack tracker and the composition of the two.

use crate::automata::{Alphabet, Dfa, DyckSpec};
use crate::error::{Error, Result};
use crate::gru::{check_k, Construction, Gru, GruWeights, OutputFunctional};
use crate::numerics::elementary::{atanh_prec, sigmoid_inv_prec};
use crate::numerics::{BigFloat, ExtendedWeight, Matrix, Rational};
use crate::rnn::AcceptanceSet;
use crate::rnn_compile::CflSpec;

/// The vectors `s_i ∈ {0, 1/4}^N`, `N = |Σ||Q|`, standing for the DFA
/// states: `s_i` is `1/4` on the `i`-th block of `|Σ|` coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateEmbedding {
    states: usize,
    symbols: usize,
}

impl StateEmbedding {
    pub fn new(states: usize, symbols: usize) -> Self {
        StateEmbedding { states, symbols }
    }

    pub fn for_dfa(dfa: &Dfa) -> Self {
        Self::new(dfa.num_states(), dfa.alphabet().len())
    }

    pub fn dim(&self) -> usize {
        self.states * self.symbols
    }

    pub fn num_states(&self) -> usize {
        self.states
    }

    pub fn vector(&self, i: usize) -> Vec<Rational> {
        let quarter = Rational::ratio(1, 4);
        (0..self.dim())
            .map(|k| if k / self.symbols == i { quarter.clone() } else { Rational::zero() })
            .collect()
    }

    /// Gate value `r(x)_k`: `0.8` when `k ≡ x (mod |Σ|)`, `0.4` otherwise.
    pub fn gate(&self, x: usize) -> Vec<Rational> {
        (0..self.dim())
            .map(|k| if k % self.symbols == x { Rational::ratio(4, 5) } else { Rational::ratio(2, 5) })
            .collect()
    }

    /// The matrix whose `(i, x)` column is `r(x) ∘ s_i`.
    pub fn gate_matrix(&self) -> Matrix<Rational> {
        let cols: Vec<Vec<Rational>> = (0..self.states)
            .flat_map(|i| (0..self.symbols).map(move |x| (i, x)))
            .map(|(i, x)| self.gate(x).iter().zip(self.vector(i)).map(|(a, b)| a * &b).collect())
            .collect();
        Matrix::from_rows(cols).expect("square").transpose()
    }

    /// `0.1^N (|Σ|+1)^{|Q|}`.
    pub fn expected_det(&self) -> Rational {
        Rational::ratio(1, 10).pow(self.dim() as i64) * Rational::from_i64(self.symbols as i64 + 1).pow(self.states as i64)
    }
}

fn sigmoid_inv_rational(y: &Rational, prec: u32) -> Result<BigFloat> {
    sigmoid_inv_prec(&BigFloat::from_rational(y, prec + 8), prec)
}

/// Compiles `dfa` into a GRU with `|Σ||Q|` hidden nodes whose state after
/// any word is (up to rounding) the embedding of the DFA's state. The
/// update gate is constantly `1/2`, so `h' = (h + tanh(U_h (r ∘ h)))/2`,
/// and `U_h` solves `U_h (r(x) ∘ s_i) = atanh(2 s_{δ(i,x)} - s_i)` for all
/// pairs `(i, x)`.
pub fn compile_dfa_to_gru(dfa: &Dfa, prec: u32) -> Result<(Gru, AcceptanceSet)> {
    let emb = StateEmbedding::for_dfa(dfa);
    let (nq, nx, n) = (emb.states, emb.symbols, emb.dim());
    let c = emb.gate_matrix();
    let det = c.det()?;
    if det != emb.expected_det() {
        return Err(Error::Singular { det: det.to_string() });
    }
    let c_inv = c.inverse()?.map(|v| BigFloat::from_rational(v, prec));
    let two = Rational::from_i64(2);
    let mut b = Matrix::filled(n, n, BigFloat::zero(prec));
    for i in 0..nq {
        let si = emb.vector(i);
        for x in 0..nx {
            let sj = emb.vector(dfa.step(i, x));
            for k in 0..n {
                let y = &(&two * &sj[k]) - &si[k];
                b.set(k, i * nx + x, atanh_prec(&BigFloat::from_rational(&y, prec), prec)?);
            }
        }
    }
    let uh = b.mul(&c_inv)?;
    let mut w = GruWeights::zeros(n, nx, prec);
    w.uh = uh;
    w.wr = Matrix::from_fn(n, nx, |_, _| BigFloat::zero(prec));
    for x in 0..nx {
        for (k, r) in emb.gate(x).iter().enumerate() {
            w.wr.set(k, x, sigmoid_inv_rational(r, prec)?);
        }
    }
    let weight = Rational::ratio(4, nx as i64);
    let wo = (0..n)
        .map(|k| {
            if dfa.is_accepting(k / nx) {
                BigFloat::zero(prec)
            } else {
                BigFloat::from_rational(&weight, prec)
            }
        })
        .collect();
    let h0 = emb.vector(dfa.initial()).iter().map(|v| BigFloat::from_rational(v, prec)).collect();
    let out = OutputFunctional::Linear {
        wo,
        bo: BigFloat::zero(prec),
    };
    let gru = Gru::new(dfa.alphabet().clone(), prec, w, h0, out)?.with_construction(Construction {
        kind: "dfa-gru".into(),
        n: None,
        k: None,
        max_len: None,
    });
    Ok((gru, dfa_gru_acceptance()))
}

/// `|o| < 2^-16`.
pub fn dfa_gru_acceptance() -> AcceptanceSet {
    let eps = Rational::ratio(1, 1 << 16);
    AcceptanceSet::OpenInterval(-&eps, eps)
}

/// Largest `|U_h (σ(W_r e_x) ∘ s_i) - atanh(2 s_{δ(i,x)} - s_i)|` over all
/// pairs `(i, x)` and coordinates, evaluated at the network's precision.
pub fn resubstitution_residual(gru: &Gru, dfa: &Dfa) -> Result<BigFloat> {
    let emb = StateEmbedding::for_dfa(dfa);
    let p = gru.precision();
    if gru.hidden_size() != emb.dim() {
        return Err(Error::DimensionMismatch("network does not match the automaton".into()));
    }
    let two = Rational::from_i64(2);
    let mut worst = BigFloat::zero(p);
    for i in 0..emb.states {
        let si: Vec<BigFloat> = emb.vector(i).iter().map(|v| BigFloat::from_rational(v, p)).collect();
        for x in 0..emb.symbols {
            let (_, r, _) = gru.step(&si, x)?;
            let c: Vec<BigFloat> = r.iter().zip(&si).map(|(a, b)| a.mul_prec(b, p)).collect();
            let lhs = gru.weights().uh.mul_vec(&c)?;
            let sj = emb.vector(dfa.step(i, x));
            let si_r = emb.vector(i);
            for k in 0..emb.dim() {
                let y = &(&two * &sj[k]) - &si_r[k];
                let rhs = atanh_prec(&BigFloat::from_rational(&y, p), p)?;
                let d = lhs[k].sub_prec(&rhs, p).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
    }
    Ok(worst)
}

/// The state whose embedding is nearest to `h` in the max norm, with that
/// distance. Fails with [`Error::Ambiguous`] when the two nearest
/// embeddings are within `2^-32` of each other.
pub fn decode_state(h: &[BigFloat], emb: &StateEmbedding) -> Result<(usize, BigFloat)> {
    if h.len() != emb.dim() {
        return Err(Error::DimensionMismatch(format!(
            "hidden state has size {}, expected {}",
            h.len(),
            emb.dim()
        )));
    }
    let prec = h.first().map_or(64, BigFloat::prec);
    let mut dist: Vec<(BigFloat, usize)> = (0..emb.states)
        .map(|i| {
            let d = emb
                .vector(i)
                .iter()
                .zip(h)
                .map(|(s, v)| v.sub_prec(&BigFloat::from_rational(s, prec), prec).abs())
                .max()
                .unwrap_or_else(|| BigFloat::zero(prec));
            (d, i)
        })
        .collect();
    dist.sort();
    if dist.len() > 1 && dist[1].0.sub_prec(&dist[0].0, prec) <= BigFloat::pow2(-32, prec) {
        return Err(Error::Ambiguous(format!("state {}", dist[0].1), format!("state {}", dist[1].1)));
    }
    let (d, i) = dist.swap_remove(0);
    Ok((i, d))
}

fn pow_m(m: i64, e: i64) -> Rational {
    Rational::from_i64(m).pow(e)
}

/// `3(2n+1)^{7-2k}`, the starting value of the two stack nodes.
pub fn dyck_h10(n: usize, k: u32) -> Rational {
    Rational::from_i64(3) * pow_m(2 * n as i64 + 1, 7 - 2 * k as i64)
}

/// Gate rows shared by the eight-node network and the stack tracker:
/// update gates for the stack and scale nodes and the reset gates that
/// read the stack operations off the scale nodes.
struct DyckGates {
    open_z: BigFloat,
    close_z: BigFloat,
    scale_z: BigFloat,
    /// `(open, close)` reset values for parenthesis type `i`, at index
    /// `i - 1`.
    reset: Vec<(BigFloat, BigFloat)>,
}

fn dyck_gates(spec: &DyckSpec, k: u32, prec: u32) -> Result<DyckGates> {
    let n = spec.n() as i64;
    let m = spec.base();
    let k = k as i64;
    let half = Rational::ratio(1, 2);
    let open_den = &pow_m(m, k + 1) - &Rational::one();
    let close_den = &pow_m(m, k) - &Rational::from_i64(m);
    let reset = (1..=n)
        .map(|i| {
            let two_i = Rational::from_i64(2 * i);
            Ok((
                sigmoid_inv_rational(&(&half - &(&two_i / &open_den)), prec)?,
                sigmoid_inv_rational(&(&half + &(&two_i / &close_den)), prec)?,
            ))
        })
        .collect::<Result<_>>()?;
    Ok(DyckGates {
        open_z: sigmoid_inv_rational(&pow_m(m, -1 - k), prec)?,
        close_z: sigmoid_inv_rational(&pow_m(m, 1 - k), prec)?,
        scale_z: sigmoid_inv_rational(&pow_m(m, -k), prec)?,
        reset,
    })
}

/// Fills the stack block starting at node `base`: stack node, two scale
/// nodes, and the reset row reading parenthesis type `kind(i)`.
fn stack_block(w: &mut GruWeights, spec: &DyckSpec, g: &DyckGates, base: usize, kind: impl Fn(usize) -> usize, prec: u32) {
    for i in 1..=spec.n() {
        let (o, c) = (spec.open(i), spec.close(i));
        w.wz.set(base, o, g.open_z.clone());
        w.wz.set(base, c, g.close_z.clone());
        for row in [base + 1, base + 2] {
            w.wz.set(row, o, g.scale_z.clone());
            w.wz.set(row, c, g.scale_z.clone());
        }
        let (ro, rc) = &g.reset[kind(i) - 1];
        w.wr.set(base + 2, o, ro.clone());
        w.wr.set(base + 2, c, rc.clone());
    }
    w.uh.set(base, base + 1, BigFloat::one(prec));
    w.uh.set(base, base + 2, BigFloat::from_i64(-1, prec));
}

/// The eight-node GRU whose `(0, 1/(2n+1))`-language is `D_n`, with
/// the stack nodes starting at `3(2n+1)^{7-2k}`.
pub fn build_dyck_gru(spec: &DyckSpec, k: u32, prec: u32) -> Result<(Gru, AcceptanceSet)> {
    build_dyck_gru_with_h10(spec, k, prec, &dyck_h10(spec.n(), k))
}

/// [`build_dyck_gru`] with a chosen starting value for the stack nodes.
pub fn build_dyck_gru_with_h10(spec: &DyckSpec, k: u32, prec: u32, h10: &Rational) -> Result<(Gru, AcceptanceSet)> {
    check_k(spec.n(), k)?;
    let g = dyck_gates(spec, k, prec)?;
    let mut w = GruWeights::zeros(8, 2 * spec.n(), prec);
    stack_block(&mut w, spec, &g, 0, |i| i, prec);
    stack_block(&mut w, spec, &g, 4, |i| spec.n() + 1 - i, prec);
    w.uz.set(3, 0, ExtendedWeight::PlusInf);
    w.uz.set(7, 4, ExtendedWeight::PlusInf);
    let start = BigFloat::from_rational(h10, prec);
    let one = BigFloat::one(prec);
    let h0 = vec![
        start.clone(),
        one.clone(),
        one.clone(),
        one.clone(),
        start,
        one.clone(),
        one.clone(),
        one,
    ];
    let gru = Gru::new(spec.alphabet(), prec, w, h0, OutputFunctional::DyckReadout { offset: 0 })?
        .with_construction(Construction {
            kind: "dyck-gru".into(),
            n: Some(spec.n()),
            k: Some(k),
            max_len: None,
        });
    Ok((gru, dyck_acceptance(spec)))
}

/// `(0, 1/(2n+1))`.
pub fn dyck_acceptance(spec: &DyckSpec) -> AcceptanceSet {
    AcceptanceSet::OpenInterval(Rational::zero(), Rational::ratio(1, spec.base()))
}

/// The first three nodes of the Dyck GRU on their own: the stack node
/// (starting at `h10`) and its two scale nodes. The output is the stack
/// node.
pub fn build_stack_gru(spec: &DyckSpec, k: u32, prec: u32, h10: &Rational) -> Result<Gru> {
    check_k(spec.n(), k)?;
    let g = dyck_gates(spec, k, prec)?;
    let mut w = GruWeights::zeros(3, 2 * spec.n(), prec);
    stack_block(&mut w, spec, &g, 0, |i| i, prec);
    let one = BigFloat::one(prec);
    let out = OutputFunctional::Linear {
        wo: vec![one.clone(), BigFloat::zero(prec), BigFloat::zero(prec)],
        bo: BigFloat::zero(prec),
    };
    Ok(Gru::new(spec.alphabet(), prec, w, vec![BigFloat::from_rational(h10, prec), one.clone(), one], out)?
        .with_construction(Construction {
            kind: "stack-gru".into(),
            n: Some(spec.n()),
            k: Some(k),
            max_len: None,
        }))
}

fn dyck_n(alphabet: &Alphabet) -> Result<DyckSpec> {
    let spec = DyckSpec::new(alphabet.len() / 2)?;
    if *alphabet != spec.alphabet() {
        return Err(Error::AlphabetMismatch(format!(
            "[{}] is not a Dyck alphabet",
            alphabet.symbols().join(" ")
        )));
    }
    Ok(spec)
}

/// Runs the two networks side by side and adds their outputs. The regular
/// part must have a linear readout.
pub fn compose_cfl_gru(dyck_gru: &Gru, dfa_gru: &Gru) -> Result<(Gru, AcceptanceSet)> {
    if dyck_gru.alphabet() != dfa_gru.alphabet() {
        return Err(Error::AlphabetMismatch(format!(
            "[{}] vs [{}]",
            dyck_gru.alphabet().symbols().join(" "),
            dfa_gru.alphabet().symbols().join(" ")
        )));
    }
    let spec = dyck_n(dyck_gru.alphabet())?;
    let OutputFunctional::Linear { wo, bo } = dfa_gru.output_functional() else {
        return Err(Error::Precondition("the regular part needs a linear readout".into()));
    };
    let prec = dyck_gru.precision().max(dfa_gru.precision());
    let m1 = dyck_gru.hidden_size();
    let (a, b) = (dyck_gru.weights(), dfa_gru.weights());
    let zero = BigFloat::zero(prec);
    let cat = |x: &[BigFloat], y: &[BigFloat]| [x, y].concat();
    let w = GruWeights {
        wz: Matrix::vstack(&[&a.wz, &b.wz])?,
        uz: Matrix::block_diag(&[&a.uz, &b.uz], ExtendedWeight::Finite(zero.clone())),
        wr: Matrix::vstack(&[&a.wr, &b.wr])?,
        ur: Matrix::block_diag(&[&a.ur, &b.ur], zero.clone()),
        wh: Matrix::vstack(&[&a.wh, &b.wh])?,
        uh: Matrix::block_diag(&[&a.uh, &b.uh], zero.clone()),
        bz: cat(&a.bz, &b.bz),
        br: cat(&a.br, &b.br),
        bh: cat(&a.bh, &b.bh),
    };
    let padded = OutputFunctional::Linear {
        wo: cat(&vec![zero; m1], wo),
        bo: bo.clone(),
    };
    let out = OutputFunctional::Sum(vec![dyck_gru.output_functional().clone(), padded]);
    let mut gru = Gru::new(dyck_gru.alphabet().clone(), prec, w, cat(dyck_gru.h0(), dfa_gru.h0()), out)?;
    if let Some(c) = dyck_gru.construction() {
        gru = gru.with_construction(Construction {
            kind: "cfl-gru".into(),
            ..c.clone()
        });
    }
    Ok((gru, dyck_acceptance(&spec)))
}

/// [`build_dyck_gru`] composed with the compiled regular part.
pub fn compile_cfl_gru(spec: &CflSpec, k: u32, prec: u32) -> Result<(Gru, AcceptanceSet)> {
    let (dyck, _) = build_dyck_gru(&spec.dyck, k, prec)?;
    let (reg, _) = compile_dfa_to_gru(&spec.regular, prec)?;
    compose_cfl_gru(&dyck, &reg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parity() -> Dfa {
        let a = Alphabet::new(["a", "b"]).unwrap();
        Dfa::from_tables(a, vec![vec![1, 0], vec![0, 1]], 0, vec![true, false]).unwrap()
    }

    #[test]
    fn embedding_blocks() {
        let e = StateEmbedding::new(2, 2);
        let q = Rational::ratio(1, 4);
        assert_eq!(e.vector(0), vec![q.clone(), q, Rational::zero(), Rational::zero()]);
        assert_eq!(e.expected_det(), Rational::parse("0.0009").unwrap());
        assert_eq!(e.gate_matrix().det().unwrap(), e.expected_det());
    }

    #[test]
    fn parity_gru_tracks_states() {
        let dfa = parity();
        let (gru, s) = compile_dfa_to_gru(&dfa, 128).unwrap();
        let emb = StateEmbedding::for_dfa(&dfa);
        for w in crate::automata::all_words(2, 6) {
            let h = gru.final_state(&w).unwrap();
            let (q, _) = decode_state(&h, &emb).unwrap();
            assert_eq!(q, dfa.run(&w).unwrap().0);
            assert_eq!(gru.accepts(&s, &w).unwrap(), dfa.accepts(&w).unwrap());
        }
        let res = resubstitution_residual(&gru, &dfa).unwrap();
        assert!(res <= BigFloat::pow2(16 - 128, 128));
    }

    #[test]
    fn decode_exact_and_ambiguous() {
        let emb = StateEmbedding::new(3, 2);
        let h: Vec<BigFloat> = emb.vector(2).iter().map(|v| BigFloat::from_rational(v, 64)).collect();
        let (q, d) = decode_state(&h, &emb).unwrap();
        assert_eq!((q, d.is_zero()), (2, true));
        let mid = vec![BigFloat::from_f64(0.125, 64); 6];
        assert!(matches!(decode_state(&mid, &emb), Err(Error::Ambiguous(..))));
    }

    #[test]
    fn dyck_gru_start_and_size() {
        let spec = DyckSpec::new(2).unwrap();
        let (g, s) = build_dyck_gru(&spec, 5, 69).unwrap();
        assert_eq!(g.h0()[0].to_shortest_string(), "0.024");
        assert_eq!(s, AcceptanceSet::OpenInterval(Rational::zero(), Rational::ratio(1, 5)));
        assert!(matches!(build_dyck_gru(&spec, 4, 69), Err(Error::KTooSmall { .. })));
        let regular = Dfa::from_tables(spec.alphabet(), vec![vec![1, 1, 1, 1], vec![2; 4], vec![2; 4]], 0, vec![true; 3]).unwrap();
        let (c, _) = compile_cfl_gru(&CflSpec::new(spec, regular).unwrap(), 5, 69).unwrap();
        assert_eq!(c.hidden_size(), 20);
    }
}
