mod common;

use rnn_automata::automata::{Dfa, DyckSpec, MembershipClass};
use rnn_automata::gru::{check_error_bound, required_precision, Gru};
use rnn_automata::gru_compile::{
    build_dyck_gru, compile_cfl_gru, compile_dfa_to_gru, decode_state, resubstitution_residual, StateEmbedding,
};
use rnn_automata::numerics::{BigFloat, Rational};
use rnn_automata::rnn::AcceptanceSet;
use rnn_automata::rnn_compile::CflSpec;
use rnn_automata::Error;

#[test]
fn parity_gru_tracks_the_automaton() {
    let d = common::parity();
    let (gru, s) = compile_dfa_to_gru(&d, 128).unwrap();
    assert_eq!(gru.hidden_size(), 4);
    let residual = resubstitution_residual(&gru, &d).unwrap();
    assert!(residual.to_rational() < Rational::parse("1e-30").unwrap());
    let emb = StateEmbedding::for_dfa(&d);
    for w in common::all_words(2, 8) {
        assert_eq!(gru.accepts(&s, &w).unwrap(), d.accepts(&w).unwrap());
        let (q, _) = decode_state(&gru.final_state(&w).unwrap(), &emb).unwrap();
        assert_eq!(q, d.run(&w).unwrap().0);
    }
}

#[test]
fn three_state_automaton_over_three_symbols() {
    let d = Dfa::from_json_str(
        r#"{"alphabet": ["x", "y", "z"], "states": ["p", "q", "r"], "initial": "p", "accepting": ["r"],
            "transitions": {"p": {"x": "q", "y": "p", "z": "r"}, "q": {"x": "r", "y": "p", "z": "q"},
                            "r": {"x": "r", "y": "q", "z": "p"}}}"#,
    )
    .unwrap();
    let (gru, s) = compile_dfa_to_gru(&d, 128).unwrap();
    assert_eq!(gru.hidden_size(), 9);
    for w in common::all_words(3, 6) {
        assert_eq!(gru.accepts(&s, &w).unwrap(), d.accepts(&w).unwrap());
    }
}

#[test]
fn dyck_gru_matches_the_oracle() {
    for (n, max_len) in [(1, 10), (2, 6)] {
        let spec = DyckSpec::new(n).unwrap();
        let a = spec.alphabet();
        let (gru, s) = build_dyck_gru(&spec, 5, required_precision(n, 5, max_len)).unwrap();
        assert_eq!(gru.hidden_size(), 8);
        for w in common::all_words(a.len(), max_len) {
            let want = common::dyck_class(&a, &w) == MembershipClass::InDyck;
            assert_eq!(gru.accepts(&s, &w).unwrap(), want, "{}", a.format_word(&w));
        }
    }
}

#[test]
fn dyck_gru_starting_state() {
    let (gru, s) = build_dyck_gru(&DyckSpec::new(2).unwrap(), 5, 69).unwrap();
    assert_eq!(gru.h0()[0].to_shortest_string(), "0.024");
    assert_eq!(s, AcceptanceSet::OpenInterval(Rational::zero(), Rational::ratio(1, 5)));
}

#[test]
fn small_k_is_rejected() {
    let r = build_dyck_gru(&DyckSpec::new(2).unwrap(), 4, 128);
    assert!(matches!(r, Err(Error::KTooSmall { n: 2, k: 4, .. })));
    assert_eq!(Error::KTooSmall { n: 2, k: 4, reason: String::new() }.exit_code(), 3);
}

#[test]
fn error_bound_holds_on_sample_words() {
    let spec = DyckSpec::new(2).unwrap();
    let a = spec.alphabet();
    let (gru, _) = build_dyck_gru(&spec, 5, required_precision(2, 5, 16)).unwrap();
    for text in ["(2 (1 )1 (1 (2 )2 )1 )2", "(1 )1 (2 (1 )1", "(1 (1 (2 (2 )2 )2"] {
        let w = a.parse_word(text).unwrap();
        check_error_bound(&gru, &spec, 5, &w).unwrap();
    }
    let bad = a.parse_word("(1 )2").unwrap();
    assert!(matches!(check_error_bound(&gru, &spec, 5, &bad), Err(Error::Precondition(_))));
}

#[test]
fn json_round_trip_keeps_outputs() {
    let spec = DyckSpec::new(2).unwrap();
    let (gru, s) = build_dyck_gru(&spec, 5, 96).unwrap();
    let (back, s2) = Gru::from_json_value(gru.to_json_value(&s)).unwrap();
    assert_eq!(s, s2);
    for w in common::all_words(4, 4) {
        let o1 = gru.output(&gru.final_state(&w).unwrap()).unwrap();
        let o2 = back.output(&back.final_state(&w).unwrap()).unwrap();
        assert_eq!(o1, o2);
    }
}

#[test]
fn cfl_gru_recognizes_the_intersection() {
    let cfl = CflSpec::from_json_str(&common::cfl_spec_json()).unwrap();
    let (gru, s) = compile_cfl_gru(&cfl, 5, required_precision(2, 5, 6)).unwrap();
    assert_eq!(gru.hidden_size(), 8 + 3 * 4);
    let a = cfl.dyck.alphabet();
    for w in common::all_words(4, 6) {
        let want = common::dyck_class(&a, &w) == MembershipClass::InDyck && cfl.regular.accepts(&w).unwrap();
        assert_eq!(gru.accepts(&s, &w).unwrap(), want, "{}", a.format_word(&w));
    }
}

/// `(1^a (2^b )2^b )1^a`, the intersection of the two-parenthesis Dyck
/// language with `(1* (2* )2* )1*`.
fn nested_two(w: &[usize]) -> bool {
    let runs = |w: &[usize], sym: usize| w.iter().take_while(|&&x| x == sym).count();
    let a = runs(w, 0);
    let b = runs(&w[a..], 1);
    let c = runs(&w[a + b..], 3);
    let d = runs(&w[a + b + c..], 2);
    a + b + c + d == w.len() && a == d && b == c
}

fn walk(gru: &Gru, s: &AcceptanceSet, w: &mut Vec<usize>, h: &[BigFloat], depth: usize) -> usize {
    let o = gru.output(h).unwrap();
    assert_eq!(s.contains_float(&o), nested_two(w), "{w:?}");
    let mut count = 1;
    if depth > 0 {
        for x in 0..4 {
            let next = gru.step_at(h, x, w.len() + 1).unwrap().2;
            w.push(x);
            count += walk(gru, s, w, &next, depth - 1);
            w.pop();
        }
    }
    count
}

const NESTED_SHAPE: &str = r#"{"alphabet": ["(1", "(2", ")1", ")2"], "states": ["o1", "o2", "c2", "c1", "sink"],
  "initial": "o1", "accepting": ["o1", "o2", "c2", "c1"],
  "transitions": {
    "o1": {"(1": "o1", "(2": "o2", ")2": "c2", ")1": "c1"},
    "o2": {"(1": "sink", "(2": "o2", ")2": "c2", ")1": "c1"},
    "c2": {"(1": "sink", "(2": "sink", ")2": "c2", ")1": "c1"},
    "c1": {"(1": "sink", "(2": "sink", ")2": "sink", ")1": "c1"},
    "sink": {"(1": "sink", "(2": "sink", ")2": "sink", ")1": "sink"}}}"#;

fn check_nested_two(max_len: usize) -> usize {
    let cfl = CflSpec::new(DyckSpec::new(2).unwrap(), Dfa::from_json_str(NESTED_SHAPE).unwrap()).unwrap();
    let (gru, s) = compile_cfl_gru(&cfl, 5, required_precision(2, 5, max_len)).unwrap();
    walk(&gru, &s, &mut Vec::new(), gru.h0(), max_len)
}

#[test]
fn cfl_gru_two_parentheses_exhaustive_to_5() {
    assert_eq!(check_nested_two(5), 1365);
}

/// Every word of length at most 12 (about 22 million arbitrary-precision
/// runs); takes hours on one core.
#[test]
#[ignore]
fn cfl_gru_two_parentheses_exhaustive_to_12() {
    assert_eq!(check_nested_two(12), (0..=12).map(|l| 4usize.pow(l)).sum::<usize>());
}
