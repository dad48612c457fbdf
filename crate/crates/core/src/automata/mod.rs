//! Classical ground truth: alphabets, DFAs, the Dyck languages, their exact
//! stack encodings, and word generators.

mod alphabet;
mod dfa;
mod dyck;
mod generate;

pub use alphabet::Alphabet;
pub use dfa::Dfa;
pub use dyck::{
    classify, shortest_dyck_disagreement, stack_run, state_trace, state_trace_bar, state_trace_prime, unique_closer,
    violation_index, DyckSpec, MembershipClass, Paren, StackRun, StateTrace,
};
pub use generate::{all_words, gen_words, random_dfa, WordGenerator};

/// Runs `dfa` on `word`: final state index and verdict.
pub fn run_dfa(dfa: &Dfa, word: &[usize]) -> crate::Result<(usize, bool)> {
    dfa.run(word)
}
