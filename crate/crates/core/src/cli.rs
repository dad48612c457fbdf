//! The command-line surface: loading weight files, compiling, running,
//! tracing, extraction and differential verification.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::automata::{classify, gen_words, shortest_dyck_disagreement, Dfa, DyckSpec, MembershipClass};
use crate::error::{Error, Result};
use crate::gru::{format_value, required_precision, Gru};
use crate::gru_compile::{build_dyck_gru, compile_cfl_gru, compile_dfa_to_gru};
use crate::numerics::FixedSpec;
use crate::rnn::{AcceptanceSet, SimpleRnn};
use crate::rnn_compile::{build_dyck_rnn, compile_cfl_rnn, compile_dfa_to_rnn, CflSpec};

/// Default `k` for the Dyck GRU.
pub const DEFAULT_K: u32 = 5;
/// Word length used to pick the default precision of Dyck and CFL GRUs.
pub const DEFAULT_MAX_LEN: usize = 64;
/// Default precision of compiled DFA GRUs.
pub const DFA_GRU_PRECISION: u32 = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompileKind {
    DfaRnn,
    DyckRnn,
    CflRnn,
    DfaGru,
    DyckGru,
    CflGru,
}

impl std::str::FromStr for CompileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "dfa-rnn" => CompileKind::DfaRnn,
            "dyck-rnn" => CompileKind::DyckRnn,
            "cfl-rnn" => CompileKind::CflRnn,
            "dfa-gru" => CompileKind::DfaGru,
            "dyck-gru" => CompileKind::DyckGru,
            "cfl-gru" => CompileKind::CflGru,
            other => return Err(Error::Parse(format!("unknown network kind {other}"))),
        })
    }
}

/// A network loaded from a weights file.
#[derive(Clone, Debug)]
pub enum Network {
    Rnn(SimpleRnn, AcceptanceSet),
    Gru(Gru, AcceptanceSet),
}

/// Final output and verdict of one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub output: String,
    pub accept: bool,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "o = {} {}", self.output, if self.accept { "ACCEPT" } else { "REJECT" })
    }
}

impl Network {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        match v.get("model").and_then(|m| m.as_str()) {
            Some("simple_rnn") => {
                let (r, s) = SimpleRnn::from_json_value(v)?;
                Ok(Network::Rnn(r, s))
            }
            Some("gru") => {
                let (g, s) = Gru::from_json_value(v)?;
                Ok(Network::Gru(g, s))
            }
            Some(other) => Err(Error::Parse(format!("unknown model {other}"))),
            None => Err(Error::Parse("weights file has no \"model\" field".into())),
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        match self {
            Network::Rnn(r, s) => r.to_json_value(s),
            Network::Gru(g, s) => g.to_json_value(s),
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("json");
        s.push('\n');
        s
    }

    pub fn alphabet(&self) -> &crate::automata::Alphabet {
        match self {
            Network::Rnn(r, _) => r.alphabet(),
            Network::Gru(g, _) => g.alphabet(),
        }
    }

    pub fn hidden_size(&self) -> usize {
        match self {
            Network::Rnn(r, _) => r.hidden_size(),
            Network::Gru(g, _) => g.hidden_size(),
        }
    }

    /// The same network at another working precision. Dyck GRUs are
    /// rebuilt from their construction parameters; other GRUs re-read their
    /// stored weights at the new precision. RNNs are exact and unchanged.
    pub fn with_precision(self, prec: u32) -> Result<Self> {
        match self {
            Network::Gru(g, s) => {
                if let Some(c) = g.construction() {
                    if let (true, Some(n), Some(k)) = (c.kind == "dyck-gru", c.n, c.k) {
                        let (g2, s2) = build_dyck_gru(&DyckSpec::new(n)?, k, prec)?;
                        let max_len = c.max_len;
                        return Ok(Network::Gru(with_max_len(g2, max_len), s2));
                    }
                }
                let mut v = g.to_json_value(&s);
                v["precision_bits"] = prec.into();
                let (g2, s2) = Gru::from_json_value(v)?;
                Ok(Network::Gru(g2, s2))
            }
            rnn => Ok(rnn),
        }
    }

    pub fn run(&self, word: &[usize]) -> Result<Verdict> {
        Ok(match self {
            Network::Rnn(r, s) => {
                r.alphabet().check(word)?;
                let h = word.iter().fold(r.initial_state(), |h, &x| r.advance(&h, x));
                let o = r.state_output(&h);
                Verdict {
                    output: o.to_decimal_or_fraction(),
                    accept: s.contains(&o),
                }
            }
            Network::Gru(g, s) => {
                let o = g.output(&g.final_state(word)?)?;
                Verdict {
                    output: plain_value(&o),
                    accept: s.contains_float(&o),
                }
            }
        })
    }

    /// Per-step table followed by the verdict line.
    pub fn trace(&self, word: &[usize]) -> Result<String> {
        let mut out = match self {
            Network::Rnn(r, _) => r.run(word)?.1.to_table(),
            Network::Gru(g, _) => g.run(word)?.1.to_table(),
        };
        out.push_str(&self.run(word)?.to_string());
        out.push('\n');
        Ok(out)
    }
}

/// Three significant digits; plain notation for magnitudes in `[1e-4, 10)`.
fn plain_value(v: &crate::numerics::BigFloat) -> String {
    let sci = format_value(v);
    let Some((mant, exp)) = sci.split_once('e') else {
        return sci;
    };
    let exp: i32 = exp.parse().unwrap_or(i32::MIN);
    if !(-4..=0).contains(&exp) {
        return sci;
    }
    let (sign, mant) = mant.strip_prefix('-').map_or(("", mant), |m| ("-", m));
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let body = if exp == 0 {
        format!("{}.{}", &digits[..1], &digits[1..])
    } else {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    };
    let body = body.trim_end_matches('0').trim_end_matches('.');
    format!("{sign}{body}")
}

fn with_max_len(g: Gru, max_len: Option<usize>) -> Gru {
    match g.construction().cloned() {
        Some(mut c) => {
            c.max_len = max_len;
            g.with_construction(c)
        }
        None => g,
    }
}

/// Options of `compile`.
#[derive(Clone, Debug, Default)]
pub struct CompileOptions {
    pub n: Option<usize>,
    pub k: Option<u32>,
    pub precision: Option<u32>,
    pub max_len: Option<usize>,
}

/// Builds the network of the given kind. `spec` is the DFA JSON for
/// `dfa-*` and the CFL JSON for `cfl-*`; `dyck-*` take `--n` instead.
pub fn cmd_compile(kind: CompileKind, spec: Option<&str>, opts: &CompileOptions) -> Result<Network> {
    let need_spec = || spec.ok_or_else(|| Error::Parse("this kind needs a spec file".into()));
    let need_n = || -> Result<DyckSpec> {
        DyckSpec::new(opts.n.ok_or_else(|| Error::Parse("this kind needs --n".into()))?)
    };
    let k = opts.k.unwrap_or(DEFAULT_K);
    let max_len = opts.max_len.unwrap_or(DEFAULT_MAX_LEN);
    let gru_prec = |n: usize| opts.precision.unwrap_or_else(|| required_precision(n, k, max_len));
    Ok(match kind {
        CompileKind::DfaRnn => {
            let (r, s) = compile_dfa_to_rnn(&Dfa::from_json_str(need_spec()?)?)?;
            Network::Rnn(r, s)
        }
        CompileKind::DyckRnn => {
            let (r, s) = build_dyck_rnn(&need_n()?)?;
            Network::Rnn(r, s)
        }
        CompileKind::CflRnn => {
            let (r, s) = compile_cfl_rnn(&CflSpec::from_json_str(need_spec()?)?)?;
            Network::Rnn(r, s)
        }
        CompileKind::DfaGru => {
            let prec = opts.precision.unwrap_or(DFA_GRU_PRECISION);
            let (g, s) = compile_dfa_to_gru(&Dfa::from_json_str(need_spec()?)?, prec)?;
            Network::Gru(g, s)
        }
        CompileKind::DyckGru => {
            let spec = need_n()?;
            let (g, s) = build_dyck_gru(&spec, k, gru_prec(spec.n()))?;
            Network::Gru(with_max_len(g, Some(max_len)), s)
        }
        CompileKind::CflGru => {
            let cfl = CflSpec::from_json_str(need_spec()?)?;
            let (g, s) = compile_cfl_gru(&cfl, k, gru_prec(cfl.dyck.n()))?;
            Network::Gru(with_max_len(g, Some(max_len)), s)
        }
    })
}

/// Oracle for `verify`.
#[derive(Clone, Debug)]
pub enum Oracle {
    Dyck(DyckSpec),
    Dfa(Dfa),
    Cfl(CflSpec),
}

impl Oracle {
    pub fn accepts(&self, word: &[usize]) -> Result<bool> {
        match self {
            Oracle::Dyck(spec) => Ok(classify(word, spec)? == MembershipClass::InDyck),
            Oracle::Dfa(d) => d.accepts(word),
            Oracle::Cfl(c) => c.contains(word),
        }
    }

    fn alphabet(&self) -> crate::automata::Alphabet {
        match self {
            Oracle::Dyck(s) => s.alphabet(),
            Oracle::Dfa(d) => d.alphabet().clone(),
            Oracle::Cfl(c) => c.dyck.alphabet(),
        }
    }

    fn dyck(&self) -> Option<DyckSpec> {
        match self {
            Oracle::Dyck(s) => Some(*s),
            Oracle::Cfl(c) => Some(c.dyck),
            Oracle::Dfa(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub word: String,
    pub expected: bool,
    pub network: bool,
    pub output: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub trials: usize,
    pub mismatches: Vec<Mismatch>,
    /// Trials per word class; `random` for uniformly drawn words.
    pub class_counts: BTreeMap<String, usize>,
    pub seed: u64,
    pub elapsed_secs: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "trials: {}\nseed: {}\nelapsed: {:.3} s\n",
            self.trials, self.seed, self.elapsed_secs
        );
        for (class, count) in &self.class_counts {
            s.push_str(&format!("  {class}: {count}\n"));
        }
        s.push_str(&format!("mismatches: {}\n", self.mismatches.len()));
        for m in &self.mismatches {
            s.push_str(&format!(
                "  \"{}\": expected {}, network {} (o = {})\n",
                m.word,
                verdict_word(m.expected),
                verdict_word(m.network),
                m.output
            ));
        }
        s
    }
}

fn verdict_word(b: bool) -> &'static str {
    if b {
        "ACCEPT"
    } else {
        "REJECT"
    }
}

/// Draws `trials` words and compares the network's verdict with the
/// oracle's. Dyck and CFL oracles draw evenly from the three membership
/// classes of the underlying Dyck language (CFL oracles also add uniform
/// words); DFA oracles draw uniform words of length `0..=max_len`.
pub fn cmd_verify(net: &Network, oracle: &Oracle, trials: usize, max_len: usize, seed: u64) -> Result<VerifyReport> {
    if *net.alphabet() != oracle.alphabet() {
        return Err(Error::AlphabetMismatch(format!(
            "network over [{}], oracle over [{}]",
            net.alphabet().symbols().join(" "),
            oracle.alphabet().symbols().join(" ")
        )));
    }
    let start = Instant::now();
    let mut words: Vec<(String, Vec<usize>)> = Vec::with_capacity(trials);
    let sx = net.alphabet().len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let uniform = |rng: &mut ChaCha8Rng| -> Vec<usize> {
        let len = rng.gen_range(0..=max_len);
        (0..len).map(|_| rng.gen_range(0..sx)).collect()
    };
    match oracle.dyck() {
        Some(spec) => {
            let groups = if matches!(oracle, Oracle::Cfl(_)) { 4 } else { 3 };
            for (ci, class) in MembershipClass::ALL.into_iter().enumerate() {
                let quota = trials / groups + usize::from(ci < trials % groups);
                let sub_seed = seed.wrapping_mul(31).wrapping_add(ci as u64 + 1);
                words.extend(gen_words(spec, class, max_len, sub_seed).take(quota).map(|w| (class.to_string(), w)));
            }
            while words.len() < trials {
                words.push(("random".into(), uniform(&mut rng)));
            }
        }
        None => {
            for _ in 0..trials {
                words.push(("random".into(), uniform(&mut rng)));
            }
        }
    }
    let mut class_counts = BTreeMap::new();
    let mut mismatches = Vec::new();
    for (class, w) in &words {
        *class_counts.entry(class.clone()).or_insert(0) += 1;
        let expected = oracle.accepts(w)?;
        let v = net.run(w)?;
        if v.accept != expected {
            mismatches.push(Mismatch {
                word: net.alphabet().format_word(w),
                expected,
                network: v.accept,
                output: v.output,
            });
        }
    }
    mismatches.sort_by(|a, b| (a.word.len(), &a.word).cmp(&(b.word.len(), &b.word)));
    mismatches.dedup();
    Ok(VerifyReport {
        trials: words.len(),
        mismatches,
        class_counts,
        seed,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

/// Result of `extract`.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub dfa: Dfa,
    /// For networks over a Dyck alphabet: a shortest word of length at most
    /// 20 on which the extracted automaton and `D_n` disagree.
    pub dyck_divergence: Option<Option<String>>,
}

pub fn cmd_extract(net: &Network, spec: FixedSpec, max_states: usize) -> Result<Extraction> {
    let Network::Rnn(rnn, s) = net else {
        return Err(Error::Precondition("extraction is defined for simple RNNs".into()));
    };
    let dfa = rnn.extract_dfa(&spec, s, max_states)?;
    let n = rnn.alphabet().len() / 2;
    let dyck_divergence = match DyckSpec::new(n) {
        Ok(d) if d.alphabet() == *rnn.alphabet() => Some(
            shortest_dyck_disagreement(&dfa, &d, 20)?.map(|w| rnn.alphabet().format_word(&w)),
        ),
        _ => None,
    };
    Ok(Extraction { dfa, dyck_divergence })
}
