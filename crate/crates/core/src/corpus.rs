//! Parallel `(s, t, r)` tuples and the sentence-pair views used for training.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grammar::{Grammar, GrammarError};
use crate::text::Sentence;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorpusError {
    #[error("duplicate tuple id {0:?}")]
    DuplicateId(String),
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error("no grammar loaded for task {0}")]
    MissingGrammar(Task),
    #[error("tuple {id}: robot command {r:?} violates the {task} grammar: {source}")]
    GrammarViolation {
        id: String,
        task: Task,
        r: String,
        source: GrammarError,
    },
    #[error("cannot split an empty corpus")]
    EmptyCorpus,
    #[error("test fraction {0} outside [0, 1]")]
    InvalidFraction(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Task {
    Navigation,
    Manipulation,
}

impl Task {
    pub const ALL: [Task; 2] = [Task::Navigation, Task::Manipulation];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Navigation => "navigation",
            Task::Manipulation => "manipulation",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "navigation" => Ok(Task::Navigation),
            "manipulation" => Ok(Task::Manipulation),
            other => Err(CorpusError::UnknownTask(other.into())),
        }
    }
}

/// One collected record: natural command `s`, paraphrase `t`, robot command `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelTuple {
    pub id: String,
    pub task: Task,
    pub s: Sentence,
    pub t: Sentence,
    pub r: Sentence,
}

/// An ordered collection of tuples with unique ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    tuples: Vec<ParallelTuple>,
}

impl Corpus {
    pub fn new(tuples: Vec<ParallelTuple>) -> Result<Self, CorpusError> {
        let mut seen = BTreeSet::new();
        for t in &tuples {
            if !seen.insert(t.id.as_str()) {
                return Err(CorpusError::DuplicateId(t.id.clone()));
            }
        }
        Ok(Corpus { tuples })
    }

    pub fn tuples(&self) -> &[ParallelTuple] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, ParallelTuple> {
        self.tuples.iter()
    }

    /// Tasks present, in sorted order.
    pub fn tasks(&self) -> Vec<Task> {
        let set: BTreeSet<Task> = self.tuples.iter().map(|t| t.task).collect();
        set.into_iter().collect()
    }

    /// Sub-corpus with the tuples of one task, order preserved.
    pub fn for_task(&self, task: Task) -> Corpus {
        Corpus {
            tuples: self
                .tuples
                .iter()
                .filter(|t| t.task == task)
                .cloned()
                .collect(),
        }
    }

    /// Check every `r` against the grammar of its task.
    pub fn validate(&self, grammars: &[Grammar]) -> Result<(), CorpusError> {
        for tuple in &self.tuples {
            let grammar = grammars
                .iter()
                .find(|g| g.task() == tuple.task)
                .ok_or(CorpusError::MissingGrammar(tuple.task))?;
            validate_tuple(tuple, grammar)?;
        }
        Ok(())
    }
}

pub fn validate_tuple(tuple: &ParallelTuple, grammar: &Grammar) -> Result<(), CorpusError> {
    grammar
        .validate_robot(&tuple.r)
        .map_err(|source| CorpusError::GrammarViolation {
            id: tuple.id.clone(),
            task: tuple.task,
            r: tuple.r.to_string(),
            source,
        })
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a ParallelTuple;
    type IntoIter = core::slice::Iter<'a, ParallelTuple>;

    fn into_iter(self) -> Self::IntoIter {
        self.tuples.iter()
    }
}

/// Deterministic train/test partition.
///
/// `|test| = round(test_fraction * |corpus|)`; both sides keep corpus order.
pub fn split(
    corpus: &Corpus,
    test_fraction: f64,
    seed: u64,
) -> Result<(Corpus, Corpus), CorpusError> {
    if corpus.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    if !(0.0..=1.0).contains(&test_fraction) {
        return Err(CorpusError::InvalidFraction(test_fraction));
    }
    let n = corpus.len();
    let n_test = libm::round(test_fraction * n as f64) as usize;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let test_idx: BTreeSet<usize> = order[..n_test].iter().copied().collect();
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (i, t) in corpus.tuples.iter().enumerate() {
        if test_idx.contains(&i) {
            test.push(t.clone());
        } else {
            train.push(t.clone());
        }
    }
    Ok((Corpus { tuples: train }, Corpus { tuples: test }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairMode {
    #[default]
    SToR,
    TToR,
    BothToR,
}

impl PairMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PairMode::SToR => "s",
            PairMode::TToR => "t",
            PairMode::BothToR => "both",
        }
    }
}

impl fmt::Display for PairMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PairMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "s" | "s_to_r" => Ok(PairMode::SToR),
            "t" | "t_to_r" => Ok(PairMode::TToR),
            "both" | "both_to_r" => Ok(PairMode::BothToR),
            other => Err(alloc::format!("unknown pipeline mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentencePair {
    pub source: Sentence,
    pub target: Sentence,
}

impl SentencePair {
    pub fn new(source: Sentence, target: Sentence) -> Self {
        SentencePair { source, target }
    }

    pub fn swapped(&self) -> SentencePair {
        SentencePair {
            source: self.target.clone(),
            target: self.source.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairView {
    pub mode: PairMode,
    pub pairs: Vec<SentencePair>,
}

impl PairView {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Sentence pairs for one training pipeline, in corpus order.
///
/// `BothToR` emits the `(s, r)` pair then the `(t, r)` pair of each tuple.
pub fn pair_view(corpus: &Corpus, mode: PairMode) -> PairView {
    let mut pairs = Vec::with_capacity(corpus.len() * 2);
    for tuple in corpus {
        if matches!(mode, PairMode::SToR | PairMode::BothToR) {
            pairs.push(SentencePair::new(tuple.s.clone(), tuple.r.clone()));
        }
        if matches!(mode, PairMode::TToR | PairMode::BothToR) {
            pairs.push(SentencePair::new(tuple.t.clone(), tuple.r.clone()));
        }
    }
    PairView { mode, pairs }
}
