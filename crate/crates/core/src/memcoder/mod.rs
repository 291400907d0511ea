//! Universal coding with and without a memorized context.
//!
//! A source is a first-order Markov chain with unknown parameters. The coder
//! predicts each symbol with the KT (add-1/2) estimator conditioned on the
//! previous symbol. "With memory" means encoder and decoder have both seen an
//! earlier sequence `y` from the same source, which only pre-loads the
//! estimator counts; no bits are charged for it.

mod arith;
mod gain;
mod model;
mod source;

pub use arith::{decode, encode, roundtrip, Codeword, RoundTrip, MAX_CODER_TOTAL};
pub use gain::{
    estimate_g, estimate_q, estimate_q_detailed, GainEstimate, GainParams, MemoryDraw, QEstimate,
};
pub use model::{
    codelength_no_mem, codelength_with_mem, kt_codelength, CodelengthReport, ContextModel,
    ContextOrder,
};
pub use source::{sample_source, stationary_distribution, MarkovSource, MAX_SOURCE_ATTEMPTS};

use thiserror::Error;

pub type Symbol = u32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoderError {
    #[error("alphabet size must be >= 2, got {0}")]
    AlphabetTooSmall(usize),
    #[error("symbol {symbol} out of range for alphabet of size {alphabet_size}")]
    SymbolOutOfRange {
        symbol: Symbol,
        alphabet_size: usize,
    },
    #[error("invalid source: {0}")]
    InvalidSource(String),
    #[error("no ergodic chain after {0} attempts")]
    NonErgodicChain(u32),
    #[error("decoded sequence differs from the input at position {position}")]
    DecodeMismatch { position: usize },
    #[error("coded {actual} bits, ideal {ideal:.3}, budget {budget:.3}")]
    OverheadBudgetExceeded {
        actual: u64,
        ideal: f64,
        budget: f64,
    },
    #[error("context total {0} exceeds the arithmetic coder limit")]
    TotalTooLarge(u64),
    #[error("alphabet mismatch: model has {model}, codeword has {codeword}")]
    AlphabetMismatch { model: usize, codeword: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub(crate) fn check_alphabet(alphabet_size: usize) -> Result<(), CoderError> {
    if alphabet_size < 2 {
        Err(CoderError::AlphabetTooSmall(alphabet_size))
    } else {
        Ok(())
    }
}
