use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rnn_automata::automata::{Dfa, DyckSpec};
use rnn_automata::cli::{cmd_compile, cmd_extract, cmd_verify, CompileKind, CompileOptions, Network, Oracle};
use rnn_automata::numerics::FixedSpec;
use rnn_automata::rnn_compile::CflSpec;
use rnn_automata::{Error, Result};

#[derive(Parser)]
#[command(name = "rnn-automata", version, about = "Compile automata into RNN and GRU weights and check them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    DfaRnn,
    DyckRnn,
    CflRnn,
    DfaGru,
    DyckGru,
    CflGru,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpecKind {
    Dyck,
    Dfa,
    Cfl,
}

#[derive(Subcommand)]
enum Command {
    /// Build a weights file.
    Compile {
        #[arg(value_enum)]
        kind: Kind,
        /// DFA (dfa-*) or CFL (cfl-*) spec file.
        spec: Option<PathBuf>,
        /// Number of parenthesis types (dyck-*).
        #[arg(long)]
        n: Option<usize>,
        /// Scale exponent of the Dyck GRU.
        #[arg(long)]
        k: Option<u32>,
        /// Working precision of GRUs in bits.
        #[arg(long)]
        precision: Option<u32>,
        /// Longest word the default GRU precision must cover.
        #[arg(long)]
        max_len: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the final output and verdict.
    Run {
        weights: PathBuf,
        word: String,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Print the hidden state after every symbol, then the verdict.
    Trace {
        weights: PathBuf,
        word: String,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Compare the network with a language oracle on random words.
    Verify {
        weights: PathBuf,
        #[arg(long, value_enum)]
        spec: SpecKind,
        /// Oracle file: a DFA for `dfa`, a CFL spec for `cfl`.
        #[arg(long)]
        oracle: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 30)]
        max_len: usize,
        #[arg(long, env = "SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Quantize the hidden states and read off the reachable automaton.
    Extract {
        weights: PathBuf,
        #[arg(long, default_value_t = 8)]
        int_bits: u32,
        #[arg(long, default_value_t = 8)]
        frac_bits: u32,
        #[arg(long, default_value_t = 100_000)]
        max_states: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load(path: &Path, precision: Option<u32>) -> Result<Network> {
    let net = Network::from_json_str(&read(path)?)?;
    match precision {
        Some(p) => net.with_precision(p),
        None => Ok(net),
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Compile {
            kind,
            spec,
            n,
            k,
            precision,
            max_len,
            output,
        } => {
            let kind = match kind {
                Kind::DfaRnn => CompileKind::DfaRnn,
                Kind::DyckRnn => CompileKind::DyckRnn,
                Kind::CflRnn => CompileKind::CflRnn,
                Kind::DfaGru => CompileKind::DfaGru,
                Kind::DyckGru => CompileKind::DyckGru,
                Kind::CflGru => CompileKind::CflGru,
            };
            let text = spec.as_deref().map(read).transpose()?;
            let opts = CompileOptions {
                n,
                k,
                precision,
                max_len,
            };
            let net = cmd_compile(kind, text.as_deref(), &opts)?;
            emit(&net.to_json_string(), output.as_deref())?;
            if output.is_some() {
                eprintln!("{} hidden nodes", net.hidden_size());
            }
            Ok(true)
        }
        Command::Run {
            weights,
            word,
            precision,
        } => {
            let net = load(&weights, precision)?;
            let w = net.alphabet().parse_word(&word)?;
            println!("{}", net.run(&w)?);
            Ok(true)
        }
        Command::Trace {
            weights,
            word,
            precision,
        } => {
            let net = load(&weights, precision)?;
            let w = net.alphabet().parse_word(&word)?;
            print!("{}", net.trace(&w)?);
            Ok(true)
        }
        Command::Verify {
            weights,
            spec,
            oracle,
            trials,
            max_len,
            seed,
            json,
        } => {
            let net = load(&weights, None)?;
            let need = || oracle.as_deref().ok_or_else(|| Error::Parse("--oracle is required".into()));
            let oracle = match spec {
                SpecKind::Dyck => Oracle::Dyck(DyckSpec::new(net.alphabet().len() / 2)?),
                SpecKind::Dfa => Oracle::Dfa(Dfa::from_json_str(&read(need()?)?)?),
                SpecKind::Cfl => Oracle::Cfl(CflSpec::from_json_str(&read(need()?)?)?),
            };
            let report = cmd_verify(&net, &oracle, trials, max_len, seed)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", report.to_text());
            }
            Ok(report.passed())
        }
        Command::Extract {
            weights,
            int_bits,
            frac_bits,
            max_states,
            output,
        } => {
            let net = load(&weights, None)?;
            let ex = cmd_extract(&net, FixedSpec::new(int_bits, frac_bits)?, max_states)?;
            let mut text = serde_json::to_string_pretty(&ex.dfa.to_json_value())?;
            text.push('\n');
            emit(&text, output.as_deref())?;
            eprintln!("{} states", ex.dfa.num_states());
            match ex.dyck_divergence {
                Some(Some(w)) => eprintln!("first divergence from the Dyck language: \"{w}\""),
                Some(None) => eprintln!("no divergence from the Dyck language up to length 20"),
                None => {}
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
