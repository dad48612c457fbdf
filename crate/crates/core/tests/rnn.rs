mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rnn_automata::automata::{random_dfa, DyckSpec, MembershipClass};
use rnn_automata::numerics::{FixedSpec, Matrix, Rational};
use rnn_automata::rnn::{AcceptanceSet, SimpleRnn};
use rnn_automata::rnn_compile::{build_dyck_rnn, compile_cfl_rnn, compile_dfa_to_rnn, compose_cfl_rnn, CflSpec};
use rnn_automata::Error;

#[test]
fn parity_rnn_has_one_node_per_state_symbol_pair() {
    let d = common::parity();
    let (rnn, s) = compile_dfa_to_rnn(&d).unwrap();
    assert_eq!(rnn.hidden_size(), 4);
    for w in common::all_words(2, 10) {
        assert_eq!(rnn.accepts(&s, &w).unwrap(), d.accepts(&w).unwrap());
    }
}

#[test]
fn random_automata_are_reproduced() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for states in 1..=5 {
        for symbols in 1..=3 {
            let d = random_dfa(&mut rng, states, symbols);
            let (rnn, s) = compile_dfa_to_rnn(&d).unwrap();
            assert_eq!(rnn.hidden_size(), states * symbols);
            for w in common::all_words(symbols, 6) {
                assert_eq!(rnn.accepts(&s, &w).unwrap(), d.accepts(&w).unwrap());
            }
        }
    }
}

#[test]
fn dyck_rnn_matches_the_oracle() {
    for n in 1..=3 {
        let spec = DyckSpec::new(n).unwrap();
        let a = spec.alphabet();
        let (rnn, s) = build_dyck_rnn(&spec).unwrap();
        assert_eq!(rnn.hidden_size(), 6);
        let max_len = if n == 3 { 6 } else { 8 };
        for w in common::all_words(a.len(), max_len) {
            let want = common::dyck_class(&a, &w) == MembershipClass::InDyck;
            assert_eq!(rnn.accepts(&s, &w).unwrap(), want, "{}", a.format_word(&w));
        }
    }
}

#[test]
fn exact_and_fast_paths_agree() {
    let spec = DyckSpec::new(2).unwrap();
    let a = spec.alphabet();
    let (rnn, _) = build_dyck_rnn(&spec).unwrap();
    for text in ["(2 (1 )1 (1 (2 )2 )1 )2", "(1 )1 (2 (1 )1", "(2 )1 (1 )2 )2", ""] {
        let w = a.parse_word(text).unwrap();
        let (o, trace) = rnn.run(&w).unwrap();
        let h = w.iter().fold(rnn.initial_state(), |h, &x| rnn.advance(&h, x));
        assert_eq!(rnn.state_output(&h), o);
        assert_eq!(h.values(), rnn.final_state(&w).unwrap());
        assert_eq!(trace.steps.len(), w.len() + 1);
        assert_eq!(trace.output(), &o);
    }
}

#[test]
fn cfl_rnn_recognizes_the_intersection() {
    let cfl = CflSpec::from_json_str(&common::cfl_spec_json()).unwrap();
    let (rnn, s) = compile_cfl_rnn(&cfl).unwrap();
    assert_eq!(rnn.hidden_size(), 6 + 3 * 4);
    let a = cfl.dyck.alphabet();
    for w in common::all_words(4, 7) {
        let want = common::dyck_class(&a, &w) == MembershipClass::InDyck && cfl.regular.accepts(&w).unwrap();
        assert_eq!(rnn.accepts(&s, &w).unwrap(), want, "{}", a.format_word(&w));
    }
}

#[test]
fn composition_requires_matching_alphabets_and_nonnegative_outputs() {
    let (dyck, _) = build_dyck_rnn(&DyckSpec::new(2).unwrap()).unwrap();
    let (parity, _) = compile_dfa_to_rnn(&common::parity()).unwrap();
    assert!(matches!(compose_cfl_rnn(&dyck, &parity), Err(Error::AlphabetMismatch(_))));

    let a = dyck.alphabet().clone();
    let neg = SimpleRnn::new(
        a.clone(),
        Matrix::filled(1, a.len(), Rational::zero()),
        Matrix::filled(1, 1, Rational::zero()),
        vec![Rational::zero()],
        vec![Rational::from_i64(-1)],
        Rational::zero(),
        vec![Rational::zero()],
    )
    .unwrap();
    assert!(matches!(compose_cfl_rnn(&dyck, &neg), Err(Error::NegativeOutput(_))));
}

#[test]
fn json_round_trip_keeps_verdicts() {
    let spec = DyckSpec::new(2).unwrap();
    let (rnn, s) = build_dyck_rnn(&spec).unwrap();
    let (back, s2) = SimpleRnn::from_json_value(rnn.to_json_value(&s)).unwrap();
    assert_eq!(s, s2);
    for w in common::all_words(4, 6) {
        assert_eq!(rnn.run(&w).unwrap().0, back.run(&w).unwrap().0);
    }
}

#[test]
fn parity_extraction_is_equivalent() {
    let d = common::parity();
    let (rnn, s) = compile_dfa_to_rnn(&d).unwrap();
    let x = rnn.extract_dfa(&FixedSpec::new(4, 4).unwrap(), &s, 1000).unwrap();
    for w in common::all_words(2, 10) {
        assert_eq!(x.accepts(&w).unwrap(), d.accepts(&w).unwrap());
    }
}

#[test]
fn zero_rnn_extracts_to_at_most_two_states() {
    let a = common::parity().alphabet().clone();
    let z = |r, c| Matrix::filled(r, c, Rational::zero());
    let rnn = SimpleRnn::new(a, z(3, 2), z(3, 3), vec![Rational::zero(); 3], vec![Rational::one(); 3], Rational::zero(), vec![Rational::one(); 3]).unwrap();
    let x = rnn.extract_dfa(&FixedSpec::new(4, 4).unwrap(), &AcceptanceSet::ExactZero, 10).unwrap();
    assert!(x.num_states() <= 2);
    assert!(!x.accepts(&[]).unwrap());
    assert!(x.accepts(&[0, 1]).unwrap());
}

#[test]
fn coarse_quantization_breaks_the_dyck_rnn() {
    let spec = DyckSpec::new(2).unwrap();
    let (rnn, s) = build_dyck_rnn(&spec).unwrap();
    let q = FixedSpec::new(4, 2).unwrap();
    let a = spec.alphabet();
    let w = a.parse_word("(1 )1").unwrap();
    assert!(rnn.accepts(&s, &w).unwrap());
    let (o, _) = rnn.run_quantized(&w, &q).unwrap();
    assert!(!s.contains(&o));
}

#[test]
fn unknown_symbols_are_rejected() {
    let (rnn, _) = build_dyck_rnn(&DyckSpec::new(1).unwrap()).unwrap();
    assert!(matches!(rnn.run(&[2]), Err(Error::UnknownSymbol(_))));
}
