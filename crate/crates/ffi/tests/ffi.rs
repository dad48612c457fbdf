use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use rnn_automata_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    ra_string_free(s);
    out
}

unsafe fn compile_dyck(kind: &str) -> *mut RaNetwork {
    let mut net = ptr::null_mut();
    assert_eq!(ra_network_compile(c(kind).as_ptr(), ptr::null(), 2, 5, 0, 0, &mut net), RaStatus::RaOk);
    assert!(!net.is_null());
    net
}

unsafe fn run(net: *const RaNetwork, word: &str) -> (RaStatus, bool, Option<String>) {
    let mut accept = false;
    let mut out = ptr::null_mut();
    let st = ra_network_run(net, c(word).as_ptr(), &mut accept, &mut out);
    let text = (!out.is_null()).then(|| take(out));
    (st, accept, text)
}

#[test]
fn compile_and_run_the_dyck_rnn() {
    unsafe {
        let net = compile_dyck("dyck-rnn");
        assert_eq!(ra_network_hidden_size(net), 6);
        assert_eq!(run(net, "(2 (1 )1 (1 (2 )2 )1 )2"), (RaStatus::RaOk, true, Some("0".into())));
        assert_eq!(run(net, ""), (RaStatus::RaOk, true, Some("0".into())));
        let (st, accept, _) = run(net, "(1 )2");
        assert_eq!((st, accept), (RaStatus::RaOk, false));
        ra_network_free(net);
    }
}

#[test]
fn gru_trace_and_json_round_trip() {
    unsafe {
        let net = compile_dyck("dyck-gru");
        assert_eq!(ra_network_hidden_size(net), 8);
        let mut out = ptr::null_mut();
        assert_eq!(ra_network_trace(net, c("(1 )1 (2 (1 )1").as_ptr(), &mut out), RaStatus::RaOk);
        assert!(take(out).ends_with("o = 0.805 REJECT\n"));

        assert_eq!(ra_network_to_json(net, &mut out), RaStatus::RaOk);
        let json = c(&take(out));
        let mut back = ptr::null_mut();
        assert_eq!(ra_network_from_json(json.as_ptr(), &mut back), RaStatus::RaOk);
        for w in ["(2 (1 )1 (1 (2 )2 )1 )2", "(1 )1 (2 (1 )1", "(2 )1 (1 )2 )2"] {
            assert_eq!(run(net, w), run(back, w));
        }
        ra_network_free(back);
        ra_network_free(net);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let net = compile_dyck("dyck-rnn");
        let (st, _, _) = run(net, "(3");
        assert_eq!(st, RaStatus::RaUnknownSymbol);
        let msg = CStr::from_ptr(ra_last_error()).to_str().unwrap();
        assert!(msg.contains("(3"), "{msg}");
        ra_network_free(net);

        let mut out = ptr::null_mut();
        let st = ra_network_compile(c("dyck-gru").as_ptr(), ptr::null(), 2, 4, 0, 0, &mut out);
        assert_eq!(st, RaStatus::RaNumeric);
        assert!(out.is_null());
        assert_eq!(ra_network_compile(c("nope").as_ptr(), ptr::null(), 2, 0, 0, 0, &mut out), RaStatus::RaParse);
        assert_eq!(ra_network_compile(c("dfa-rnn").as_ptr(), ptr::null(), 0, 0, 0, 0, &mut out), RaStatus::RaParse);
        assert_eq!(ra_network_from_json(c("{}").as_ptr(), &mut out), RaStatus::RaParse);
        assert_eq!(ra_network_from_json(ptr::null(), &mut out), RaStatus::RaNullPointer);

        let mut accept = false;
        assert_eq!(ra_network_run(ptr::null(), c("").as_ptr(), &mut accept, ptr::null_mut()), RaStatus::RaNullPointer);
        assert_eq!(ra_network_hidden_size(ptr::null()), 0);
        ra_network_free(ptr::null_mut());
        ra_string_free(ptr::null_mut());
    }
}

#[test]
fn compile_from_an_automaton() {
    let parity = r#"{"alphabet": ["a", "b"], "states": ["e", "o"], "initial": "e", "accepting": ["e"],
                     "transitions": {"e": {"a": "o", "b": "e"}, "o": {"a": "e", "b": "o"}}}"#;
    unsafe {
        for kind in ["dfa-rnn", "dfa-gru"] {
            let mut net = ptr::null_mut();
            assert_eq!(ra_network_compile(c(kind).as_ptr(), c(parity).as_ptr(), 0, 0, 0, 0, &mut net), RaStatus::RaOk);
            assert_eq!(ra_network_hidden_size(net), 4);
            assert!(run(net, "a a b").1);
            assert!(!run(net, "a b b").1);
            ra_network_free(net);
        }
    }
}

fn target_dir() -> PathBuf {
    // tests/ffi-<hash> lives in target/<profile>/deps.
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_static_library() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("librnn_automata_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library");
        return;
    }
    let dir = scratch_dir();
    let exe = dir.join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "o = 0 ACCEPT\n6\n");
    let _ = std::fs::remove_dir_all(dir);
}

fn scratch_dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("rnn-automata-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
