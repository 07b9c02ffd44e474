//! Phrase-based translation of free-form robot commands into a small,
//! grounded robot command language.
//!
//! The crate is `no_std` (it needs `alloc`) and covers the whole learning
//! and decoding path:
//!
//! - [`text`] and [`corpus`]: tokenization and parallel `(s, t, r)` tuples,
//! - [`grammar`]: the robot language (concept inventories, realization,
//!   parsing, synthetic corpora),
//! - [`alignment`]: IBM Model 1 EM and grow-diag-final-and symmetrization,
//! - [`phrase_table`]: consistent phrase-pair extraction and relative
//!   frequency scoring,
//! - [`lm`]: an interpolated trigram language model,
//! - [`decoder`]: derivation scoring, stack-based beam search and an
//!   exhaustive oracle,
//! - [`eval`] and [`pipeline`]: metrics and end-to-end training.
//!
//! File formats, the command-line tool and the interactive teach loop live in
//! the `robolex-cli` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod alignment;
pub mod corpus;
pub mod decoder;
pub mod eval;
pub mod grammar;
pub mod lm;
pub mod phrase_table;
pub mod pipeline;
pub mod text;

pub use corpus::{Corpus, PairMode, PairView, ParallelTuple, SentencePair, Task};
pub use text::{tokenize, Sentence, Token};
