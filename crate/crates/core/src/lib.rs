//! Compile classical automata into recurrent network weights and run them.
//!
//! The crate builds simple ReLU RNNs and GRUs whose acceptance behaviour
//! matches a DFA or a Dyck language (and intersections of the two), runs
//! them in exact rational, arbitrary-precision float and fixed-point
//! arithmetic, and checks them against classical membership oracles.

pub mod automata;
pub mod cli;
pub mod error;
pub mod gru;
pub mod gru_compile;
pub mod numerics;
pub mod rnn;
pub mod rnn_compile;

pub use error::{Error, Result};
