use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::{AlignError, AlignmentLinks};
use crate::corpus::SentencePair;
use crate::text::{Sentence, Token};

pub const DEFAULT_ITERATIONS: usize = 5;
/// Floor applied to per-word likelihoods so unseen pairs stay finite.
pub const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Default)]
struct Vocab {
    words: Vec<Token>,
    index: BTreeMap<Token, usize>,
}

impl Vocab {
    fn intern(&mut self, t: &Token) -> usize {
        if let Some(&i) = self.index.get(t) {
            return i;
        }
        let i = self.words.len();
        self.words.push(t.clone());
        self.index.insert(t.clone(), i);
        i
    }

    fn get(&self, t: &Token) -> Option<usize> {
        self.index.get(t).copied()
    }

    fn len(&self) -> usize {
        self.words.len()
    }
}

/// Lexical translation probabilities `t(f | e)` for source word `f` given
/// target word `e` or NULL.
///
/// Stored densely; row 0 is NULL and row `k + 1` is the `k`th target word.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationTable {
    source: Vocab,
    target: Vocab,
    probs: Vec<f64>,
}

impl TranslationTable {
    fn row(&self, e: Option<usize>) -> usize {
        e.map_or(0, |k| k + 1)
    }

    fn at(&self, f: usize, e: Option<usize>) -> f64 {
        self.probs[self.row(e) * self.source.len() + f]
    }

    /// `t(f | e)`, with `e = None` meaning NULL. Unknown words give 0.
    pub fn prob(&self, f: &Token, e: Option<&Token>) -> f64 {
        let Some(fi) = self.source.get(f) else {
            return 0.0;
        };
        match e {
            None => self.at(fi, None),
            Some(e) => self.target.get(e).map_or(0.0, |ei| self.at(fi, Some(ei))),
        }
    }

    pub fn source_vocab(&self) -> &[Token] {
        &self.source.words
    }

    pub fn target_vocab(&self) -> &[Token] {
        &self.target.words
    }

    /// Conditioning rows: `(e, [(f, t(f|e))])`, NULL first. Zero entries skipped.
    pub fn rows(&self) -> impl Iterator<Item = (Option<&Token>, Vec<(&Token, f64)>)> + '_ {
        let nf = self.source.len();
        (0..=self.target.len()).map(move |r| {
            let e = r.checked_sub(1).map(|k| &self.target.words[k]);
            let row = (0..nf)
                .filter_map(|f| {
                    let p = self.probs[r * nf + f];
                    (p > 0.0).then(|| (&self.source.words[f], p))
                })
                .collect();
            (e, row)
        })
    }
}

/// Train IBM Model 1 with `iterations` EM steps.
///
/// `t(f|e)` starts uniform at `1/|source vocab|`; a NULL word is added to
/// every target sentence.
pub fn train_model1(pairs: &[SentencePair], iterations: usize) -> Result<TranslationTable, AlignError> {
    train_model1_traced(pairs, iterations).map(|(t, _)| t)
}

/// Like [`train_model1`], also returning the corpus log-likelihood before EM
/// and after each iteration (`iterations + 1` values).
pub fn train_model1_traced(
    pairs: &[SentencePair],
    iterations: usize,
) -> Result<(TranslationTable, Vec<f64>), AlignError> {
    if pairs.is_empty() {
        return Err(AlignError::EmptyCorpus);
    }
    if iterations == 0 {
        return Err(AlignError::NoIterations);
    }
    let mut source = Vocab::default();
    let mut target = Vocab::default();
    let encoded: Vec<(Vec<usize>, Vec<usize>)> = pairs
        .iter()
        .map(|p| {
            let f = p.source.tokens().iter().map(|t| source.intern(t)).collect();
            let e = p.target.tokens().iter().map(|t| target.intern(t)).collect();
            (f, e)
        })
        .collect();
    let nf = source.len();
    let rows = target.len() + 1;
    let mut table = TranslationTable {
        source,
        target,
        probs: vec![1.0 / nf as f64; rows * nf],
    };

    let mut trace = Vec::with_capacity(iterations + 1);
    trace.push(encoded_log_likelihood(&table, &encoded));
    let mut counts = vec![0.0; rows * nf];
    let mut totals = vec![0.0; rows];
    for _ in 0..iterations {
        counts.iter_mut().for_each(|c| *c = 0.0);
        totals.iter_mut().for_each(|c| *c = 0.0);
        for (fs, es) in &encoded {
            for &f in fs {
                let z = table.probs[f] + es.iter().map(|&e| table.probs[(e + 1) * nf + f]).sum::<f64>();
                for r in core::iter::once(0).chain(es.iter().map(|&e| e + 1)) {
                    let delta = table.probs[r * nf + f] / z;
                    counts[r * nf + f] += delta;
                    totals[r] += delta;
                }
            }
        }
        for r in 0..rows {
            if totals[r] > 0.0 {
                for f in 0..nf {
                    table.probs[r * nf + f] = counts[r * nf + f] / totals[r];
                }
            }
        }
        trace.push(encoded_log_likelihood(&table, &encoded));
    }
    Ok((table, trace))
}

fn encoded_log_likelihood(table: &TranslationTable, encoded: &[(Vec<usize>, Vec<usize>)]) -> f64 {
    let nf = table.source.len();
    let mut ll = 0.0;
    for (fs, es) in encoded {
        let norm = (es.len() + 1) as f64;
        for &f in fs {
            let sum = table.probs[f] + es.iter().map(|&e| table.probs[(e + 1) * nf + f]).sum::<f64>();
            ll += libm::log((sum / norm).max(PROB_FLOOR));
        }
    }
    ll
}

/// Corpus log-likelihood under Model 1 with uniform alignment priors:
/// `Σ_pairs Σ_j ln( (1/(l+1)) Σ_i t(f_j | e_i) )`, each term floored at 1e-12.
pub fn log_likelihood(table: &TranslationTable, pairs: &[SentencePair]) -> f64 {
    let mut ll = 0.0;
    for p in pairs {
        let es = p.target.tokens();
        let norm = (es.len() + 1) as f64;
        for f in p.source.tokens() {
            let sum = table.prob(f, None) + es.iter().map(|e| table.prob(f, Some(e))).sum::<f64>();
            ll += libm::log((sum / norm).max(PROB_FLOOR));
        }
    }
    ll
}

/// Link each source word to its most probable target word.
///
/// Ties go to the smaller target position. A word whose NULL probability is
/// strictly greater than every real target word stays unlinked.
pub fn viterbi_align(table: &TranslationTable, pair: &SentencePair) -> AlignmentLinks {
    viterbi_links(table, &pair.source, &pair.target)
}

fn viterbi_links(table: &TranslationTable, source: &Sentence, target: &Sentence) -> AlignmentLinks {
    let mut links = AlignmentLinks::new(source.len(), target.len());
    for (j, f) in source.tokens().iter().enumerate() {
        let mut best: Option<(usize, f64)> = None;
        for (i, e) in target.tokens().iter().enumerate() {
            let p = table.prob(f, Some(e));
            if best.is_none_or(|(_, b)| p > b) {
                best = Some((i, p));
            }
        }
        if let Some((i, p)) = best {
            if p > 0.0 && p >= table.prob(f, None) {
                links.insert(j + 1, i + 1).expect("positions within bounds");
            }
        }
    }
    links
}
