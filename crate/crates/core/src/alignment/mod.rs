//! Word alignment: IBM Model 1 trained by EM, Viterbi links, and
//! grow-diag-final-and symmetrization.

mod model1;
mod symmetrize;

use alloc::collections::BTreeSet;

use thiserror::Error;

pub use model1::{
    log_likelihood, train_model1, train_model1_traced, viterbi_align, TranslationTable,
    DEFAULT_ITERATIONS, PROB_FLOOR,
};
pub use symmetrize::symmetrize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlignError {
    #[error("no sentence pairs to train on")]
    EmptyCorpus,
    #[error("EM needs at least one iteration")]
    NoIterations,
    #[error("alignments cover {left:?} and {right:?} positions")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("link ({0}, {1}) outside the sentence pair")]
    OutOfBounds(usize, usize),
}

/// A set of `(source position, target position)` links, both 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AlignmentLinks {
    src_len: usize,
    tgt_len: usize,
    links: BTreeSet<(usize, usize)>,
}

impl AlignmentLinks {
    pub fn new(src_len: usize, tgt_len: usize) -> Self {
        AlignmentLinks {
            src_len,
            tgt_len,
            links: BTreeSet::new(),
        }
    }

    pub fn from_links(
        src_len: usize,
        tgt_len: usize,
        links: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, AlignError> {
        let mut out = Self::new(src_len, tgt_len);
        for (i, j) in links {
            out.insert(i, j)?;
        }
        Ok(out)
    }

    pub fn insert(&mut self, i: usize, j: usize) -> Result<bool, AlignError> {
        if i == 0 || j == 0 || i > self.src_len || j > self.tgt_len {
            return Err(AlignError::OutOfBounds(i, j));
        }
        Ok(self.links.insert((i, j)))
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.links.contains(&(i, j))
    }

    pub fn src_len(&self) -> usize {
        self.src_len
    }

    pub fn tgt_len(&self) -> usize {
        self.tgt_len
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.links.iter().copied()
    }

    pub fn links(&self) -> &BTreeSet<(usize, usize)> {
        &self.links
    }

    /// Swap the roles of source and target.
    pub fn transposed(&self) -> AlignmentLinks {
        AlignmentLinks {
            src_len: self.tgt_len,
            tgt_len: self.src_len,
            links: self.links.iter().map(|&(i, j)| (j, i)).collect(),
        }
    }
}
