mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

use rnn_automata::automata::Dfa;
use rnn_automata::cli::{cmd_compile, CompileKind, CompileOptions, Network};

const GOLDEN_WORDS: [&str; 3] = ["(2 (1 )1 (1 (2 )2 )1 )2", "(1 )1 (2 (1 )1", "(2 )1 (1 )2 )2"];

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rnn-automata"))
        .args(args)
        .env_remove("SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    }

    fn compile(&self, name: &str, args: &[&str]) -> String {
        let p = self.path(name);
        let p = p.to_str().unwrap().to_string();
        let mut all = vec!["compile"];
        all.extend_from_slice(args);
        all.extend_from_slice(&["-o", &p]);
        let o = bin(&all);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        p
    }
}

fn golden(name: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn dyck_rnn_compiles_and_runs() {
    let ws = Workspace::new();
    let d2 = ws.compile("d2.json", &["dyck-rnn", "--n", "2"]);
    let net = Network::from_json_str(&std::fs::read_to_string(&d2).unwrap()).unwrap();
    assert_eq!(net.hidden_size(), 6);
    assert_eq!(stdout(&bin(&["run", &d2, "(2 (1 )1 (1 (2 )2 )1 )2"])), "o = 0 ACCEPT\n");
    assert_eq!(stdout(&bin(&["run", &d2, ""])), "o = 0 ACCEPT\n");
    assert!(stdout(&bin(&["run", &d2, "(1 )2"])).ends_with("REJECT\n"));
}

#[test]
fn compile_output_is_deterministic() {
    let a = bin(&["compile", "dyck-gru", "--n", "2", "--k", "5"]);
    let b = bin(&["compile", "dyck-gru", "--n", "2", "--k", "5"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["h0"][0].as_str().unwrap().starts_with("0.024"));
}

#[test]
fn parity_compiles_to_four_nodes_and_extracts_back() {
    let ws = Workspace::new();
    let spec = ws.write("parity.json", common::PARITY);
    let rnn = ws.compile("parity_rnn.json", &["dfa-rnn", &spec]);
    let net = Network::from_json_str(&std::fs::read_to_string(&rnn).unwrap()).unwrap();
    assert_eq!(net.hidden_size(), 4);

    let out = ws.path("extracted.json");
    let o = bin(&["extract", &rnn, "--int-bits", "4", "--frac-bits", "4", "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let x = Dfa::from_json_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    let d = common::parity();
    for w in common::all_words(2, 10) {
        assert_eq!(x.accepts(&w).unwrap(), d.accepts(&w).unwrap());
    }
}

#[test]
fn coarse_extraction_of_the_dyck_rnn_reports_a_divergence() {
    let ws = Workspace::new();
    let d2 = ws.compile("d2.json", &["dyck-rnn", "--n", "2"]);
    let o = bin(&["extract", &d2, "--int-bits", "4", "--frac-bits", "4"]);
    assert_eq!(code(&o), 0);
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains("first divergence from the Dyck language"), "{err}");
    Dfa::from_json_str(&stdout(&o)).unwrap();
}

#[test]
fn rnn_traces_match_golden_files() {
    let ws = Workspace::new();
    let d2 = ws.compile("d2.json", &["dyck-rnn", "--n", "2"]);
    for (i, w) in GOLDEN_WORDS.iter().enumerate() {
        let o = bin(&["trace", &d2, w]);
        assert_eq!(stdout(&o), golden(&format!("dyck_rnn_trace_{}.txt", i + 1)), "{w}");
    }
}

#[test]
fn gru_traces_match_golden_files() {
    let ws = Workspace::new();
    let g = ws.compile("d2gru.json", &["dyck-gru", "--n", "2", "--k", "5"]);
    for (i, w) in GOLDEN_WORDS.iter().enumerate() {
        let o = bin(&["trace", &g, w]);
        assert_eq!(stdout(&o), golden(&format!("dyck_gru_trace_{}.txt", i + 1)), "{w}");
    }
    let last = stdout(&bin(&["trace", &g, GOLDEN_WORDS[1]]));
    assert!(last.ends_with("o = 0.805 REJECT\n"), "{last}");
}

#[test]
fn precision_override_keeps_verdicts() {
    let ws = Workspace::new();
    let g = ws.compile("d2gru.json", &["dyck-gru", "--n", "2", "--k", "5"]);
    for w in GOLDEN_WORDS {
        let a = stdout(&bin(&["run", &g, w]));
        let b = stdout(&bin(&["run", &g, w, "--precision", "256"]));
        assert_eq!(a, b);
    }
}

#[test]
fn verify_dyck_networks() {
    let ws = Workspace::new();
    let d2 = ws.compile("d2.json", &["dyck-rnn", "--n", "2"]);
    let o = bin(&["verify", &d2, "--spec", "dyck", "--trials", "10000", "--max-len", "60"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("mismatches: 0"));

    let g = ws.compile("d2gru.json", &["dyck-gru", "--n", "2", "--k", "5"]);
    let o = bin(&["verify", &g, "--spec", "dyck", "--trials", "1000", "--max-len", "30", "--json"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["trials"], 1000);
    assert_eq!(report["mismatches"].as_array().unwrap().len(), 0);
    assert_eq!(report["class_counts"]["in-dyck"], 334);
}

#[test]
fn verify_automaton_and_cfl_networks() {
    let ws = Workspace::new();
    let spec = ws.write("parity.json", common::PARITY);
    let g = ws.compile("parity_gru.json", &["dfa-gru", &spec]);
    let o = bin(&["verify", &g, "--spec", "dfa", "--oracle", &spec, "--trials", "300", "--max-len", "20"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let cfl = ws.write("cfl.json", &common::cfl_spec_json());
    let r = ws.compile("cfl_rnn.json", &["cfl-rnn", &cfl]);
    let o = bin(&["verify", &r, "--spec", "cfl", "--oracle", &cfl, "--trials", "2000", "--max-len", "24"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let g = ws.compile("cfl_gru.json", &["cfl-gru", &cfl, "--max-len", "16"]);
    let o = bin(&["verify", &g, "--spec", "cfl", "--oracle", &cfl, "--trials", "200", "--max-len", "16"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn corrupted_weights_are_caught() {
    let ws = Workspace::new();
    let d2 = ws.compile("d2.json", &["dyck-rnn", "--n", "2"]);
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&d2).unwrap()).unwrap();
    v["bo"] = "1".into();
    let bad = ws.write("bad.json", &v.to_string());
    let o = bin(&["verify", &bad, "--spec", "dyck", "--trials", "300", "--json"]);
    assert_eq!(code(&o), 1);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!report["mismatches"].as_array().unwrap().is_empty());
}

#[test]
fn verify_is_reproducible_from_the_seed_variable() {
    let ws = Workspace::new();
    let d2 = ws.compile("d2.json", &["dyck-rnn", "--n", "2"]);
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&d2).unwrap()).unwrap();
    v["bo"] = "1".into();
    let bad = ws.write("bad.json", &v.to_string());
    let run = |seed: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_rnn-automata"))
            .args(["verify", bad.as_str(), "--spec", "dyck", "--trials", "200", "--json"])
            .env("SEED", seed)
            .output()
            .unwrap();
        let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        (r["seed"].clone(), r["mismatches"].clone())
    };
    let (s1, m1) = run("17");
    let (_, m2) = run("17");
    let (_, m3) = run("18");
    assert_eq!(s1, 17);
    assert_eq!(m1, m2);
    assert_ne!(m1, m3);
}

#[test]
fn exit_codes() {
    let ws = Workspace::new();
    assert_eq!(code(&bin(&["compile", "dyck-gru", "--n", "2", "--k", "4"])), 3);
    assert_eq!(code(&bin(&["compile", "dyck-rnn"])), 2);
    assert_eq!(code(&bin(&["compile", "bogus"])), 2);
    assert_eq!(code(&bin(&["run", ws.path("missing.json").to_str().unwrap(), ""])), 2);

    let d2 = ws.compile("d2.json", &["dyck-rnn", "--n", "2"]);
    assert_eq!(code(&bin(&["run", &d2, "(3"])), 2);

    let parity = ws.write("parity.json", common::PARITY);
    assert_eq!(code(&bin(&["verify", &d2, "--spec", "dfa", "--oracle", &parity])), 2);

    // A zero first node meets the infinite gate weight at the first step.
    let g = ws.compile("d2gru.json", &["dyck-gru", "--n", "2", "--k", "5"]);
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&g).unwrap()).unwrap();
    v["h0"][0] = "0".into();
    let degenerate = ws.write("degenerate.json", &v.to_string());
    let o = bin(&["run", &degenerate, "(1"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn written_and_in_memory_networks_agree() {
    let ws = Workspace::new();
    let cfl_text = common::cfl_spec_json();
    let parity = ws.write("parity.json", common::PARITY);
    let cfl = ws.write("cfl.json", &cfl_text);
    let cases: [(&str, CompileKind, Option<&str>, &str, CompileOptions); 4] = [
        ("dfa-rnn", CompileKind::DfaRnn, Some(common::PARITY), &parity, CompileOptions::default()),
        ("dfa-gru", CompileKind::DfaGru, Some(common::PARITY), &parity, CompileOptions::default()),
        ("cfl-rnn", CompileKind::CflRnn, Some(&cfl_text), &cfl, CompileOptions::default()),
        (
            "dyck-gru",
            CompileKind::DyckGru,
            None,
            "",
            CompileOptions {
                n: Some(2),
                ..Default::default()
            },
        ),
    ];
    for (name, kind, spec, path, opts) in cases {
        let mem = cmd_compile(kind, spec, &opts).unwrap();
        let file = if path.is_empty() {
            ws.compile(&format!("{name}.json"), &[name, "--n", "2"])
        } else {
            ws.compile(&format!("{name}.json"), &[name, path])
        };
        let loaded = Network::from_json_str(&std::fs::read_to_string(file).unwrap()).unwrap();
        assert_eq!(loaded.to_json_string(), mem.to_json_string());
        let symbols = mem.alphabet().len();
        for w in common::all_words(symbols, if symbols == 2 { 8 } else { 4 }) {
            assert_eq!(loaded.run(&w).unwrap(), mem.run(&w).unwrap(), "{name} {w:?}");
        }
    }
}
