//! Derivations, their score, and the two searches over them.
//!
//! A derivation is an ordered sequence of phrase instances whose source spans
//! tile the input exactly once. Its score is
//!
//! ```text
//! f(y) = w_h · h(r(y)) + w_g · Σ_k g(p_k) + w_d · Σ_{k<L} |e(p_k) + 1 − b(p_{k+1})|
//! ```
//!
//! where `h` is the language-model log-probability of the concatenated target
//! (end marker included). There is no distortion term before the first
//! phrase. [`beam_search`] is the production search; [`exhaustive_search`]
//! enumerates every derivation and serves as its oracle.

mod beam;
mod exhaustive;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use thiserror::Error;

use crate::lm::TrigramModel;
use crate::phrase_table::PhraseTable;
use crate::text::{cmp_joined, Sentence, Token};

pub use beam::beam_search;
pub use exhaustive::exhaustive_search;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("no derivation covers the input")]
    NoDerivation,
    #[error("sentence of length {n} exceeds the exhaustive search limit {limit}")]
    OracleLimitExceeded { n: usize, limit: usize },
    #[error("invalid derivation: {0}")]
    InvalidDerivation(&'static str),
}

/// A lexical entry applied at a source span: `(b, e, r)` plus its score `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhraseInstance {
    pub b: usize,
    pub e: usize,
    pub target: Vec<Token>,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Derivation {
    pub phrases: Vec<PhraseInstance>,
}

impl Derivation {
    pub fn new(phrases: Vec<PhraseInstance>) -> Self {
        Derivation { phrases }
    }

    /// Concatenated targets in derivation order.
    pub fn target(&self) -> Vec<Token> {
        self.phrases.iter().flat_map(|p| p.target.iter().cloned()).collect()
    }

    pub fn target_sentence(&self) -> Option<Sentence> {
        Sentence::new(self.target()).ok()
    }

    pub fn spans(&self) -> Vec<(usize, usize)> {
        self.phrases.iter().map(|p| (p.b, p.e)).collect()
    }

    /// `Σ_k |e(p_k) + 1 − b(p_{k+1})|` over consecutive phrases.
    pub fn distortion(&self) -> usize {
        self.phrases
            .windows(2)
            .map(|w| (w[0].e + 1).abs_diff(w[1].b))
            .sum()
    }

    pub fn translation_score(&self) -> f64 {
        self.phrases.iter().map(|p| p.g).sum()
    }

    /// Spans are in bounds, pairwise disjoint, and cover `1..=n`.
    pub fn validate(&self, n: usize) -> Result<(), DecodeError> {
        if self.phrases.is_empty() {
            return Err(DecodeError::InvalidDerivation("no phrases"));
        }
        let mut covered = vec![false; n + 1];
        for p in &self.phrases {
            if p.b == 0 || p.b > p.e || p.e > n {
                return Err(DecodeError::InvalidDerivation("span out of bounds"));
            }
            for c in &mut covered[p.b..=p.e] {
                if *c {
                    return Err(DecodeError::InvalidDerivation("overlapping spans"));
                }
                *c = true;
            }
        }
        if covered[1..].iter().any(|c| !c) {
            return Err(DecodeError::InvalidDerivation("incomplete coverage"));
        }
        Ok(())
    }
}

/// `r(y)`: the concatenation of the phrase targets.
pub fn target_of(y: &Derivation) -> Vec<Token> {
    y.target()
}

/// `w_h`, `w_g`, `w_d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub lm: f64,
    pub tm: f64,
    pub distortion: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            lm: 1.0,
            tm: 1.0,
            distortion: -0.5,
        }
    }
}

impl Weights {
    pub fn new(lm: f64, tm: f64, distortion: f64) -> Self {
        Weights { lm, tm, distortion }
    }

    pub fn scaled(self, k: f64) -> Self {
        Weights::new(self.lm * k, self.tm * k, self.distortion * k)
    }
}

/// `f(y)`.
pub fn score_derivation(y: &Derivation, lm: &TrigramModel, w: Weights) -> f64 {
    w.lm * lm.score_tokens(&y.target()) + w.tm * y.translation_score() + w.distortion * y.distortion() as f64
}

/// How source words without any single-word table entry are handled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnknownPolicy {
    /// Copy the word to the output with translation score `penalty`.
    PassThrough { penalty: f64 },
    /// No option is added; uncoverable inputs fail with `NoDerivation`.
    Disabled,
}

pub const DEFAULT_UNK_PENALTY: f64 = -10.0;

impl Default for UnknownPolicy {
    fn default() -> Self {
        UnknownPolicy::PassThrough {
            penalty: DEFAULT_UNK_PENALTY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderConfig {
    pub beam_size: usize,
    /// Largest permitted jump between consecutive phrases; `None` is unlimited.
    pub distortion_limit: Option<usize>,
    pub weights: Weights,
    pub unknown: UnknownPolicy,
    /// Longest input the exhaustive search accepts.
    pub oracle_limit: usize,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            beam_size: 100,
            distortion_limit: None,
            weights: Weights::default(),
            unknown: UnknownPolicy::default(),
            oracle_limit: 8,
        }
    }
}

/// One way to translate a span.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanOption {
    pub target: Vec<Token>,
    pub g: f64,
    pub pass_through: bool,
}

/// Every translation option of an input, keyed by 1-based span.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TranslationOptions {
    n: usize,
    spans: BTreeMap<(usize, usize), Vec<SpanOption>>,
}

impl TranslationOptions {
    /// Options from exact surface matches in `table`, plus pass-through for
    /// positions whose single word has no entry (unless disabled).
    pub fn collect(sent: &Sentence, table: &PhraseTable, unknown: UnknownPolicy) -> Result<Self, DecodeError> {
        let n = sent.len();
        let max_len = table.max_source_len().max(1);
        let mut spans = BTreeMap::new();
        for b in 1..=n {
            for e in b..=n.min(b + max_len - 1) {
                let cands = table.lookup(sent, b, e).expect("span within sentence");
                if !cands.is_empty() {
                    let opts = cands
                        .iter()
                        .map(|c| SpanOption {
                            target: c.target.clone(),
                            g: c.g,
                            pass_through: false,
                        })
                        .collect();
                    spans.insert((b, e), opts);
                }
            }
            if let UnknownPolicy::PassThrough { penalty } = unknown {
                spans.entry((b, b)).or_insert_with(|| {
                    let tok = sent.get(b).expect("position within sentence").clone();
                    vec![SpanOption {
                        target: vec![tok],
                        g: penalty,
                        pass_through: true,
                    }]
                });
            }
        }
        let options = TranslationOptions { n, spans };
        options.check_coverable()?;
        Ok(options)
    }

    /// Options given directly, for hand-built or generated instances.
    pub fn from_spans(n: usize, spans: BTreeMap<(usize, usize), Vec<SpanOption>>) -> Self {
        let spans = spans
            .into_iter()
            .filter(|((b, e), opts)| *b >= 1 && b <= e && *e <= n && !opts.is_empty())
            .collect();
        TranslationOptions { n, spans }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, b: usize, e: usize) -> &[SpanOption] {
        self.spans.get(&(b, e)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &[SpanOption])> {
        self.spans.iter().map(|(k, v)| (*k, v.as_slice()))
    }

    fn check_coverable(&self) -> Result<(), DecodeError> {
        let mut covered = vec![false; self.n + 1];
        for &(b, e) in self.spans.keys() {
            covered[b..=e].iter_mut().for_each(|c| *c = true);
        }
        if self.n == 0 || covered[1..].iter().any(|c| !c) {
            return Err(DecodeError::NoDerivation);
        }
        Ok(())
    }

    fn instance(&self, span: (usize, usize), idx: usize) -> PhraseInstance {
        let opt = &self.spans[&span][idx];
        PhraseInstance {
            b: span.0,
            e: span.1,
            target: opt.target.clone(),
            g: opt.g,
        }
    }
}

/// Total order on finished derivations: higher score first, then the
/// lexicographically smaller target string, then the smaller `(b, e)` sequence.
pub(crate) fn rank(a: (f64, &Derivation), b: (f64, &Derivation)) -> Ordering {
    b.0.partial_cmp(&a.0)
        .unwrap_or(Ordering::Equal)
        .then_with(|| cmp_joined(&a.1.target(), &b.1.target()))
        .then_with(|| a.1.spans().cmp(&b.1.spans()))
}

/// A decoded sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct Translation {
    pub derivation: Derivation,
    pub score: f64,
}

impl Translation {
    pub fn target(&self) -> Vec<Token> {
        self.derivation.target()
    }

    /// Pass-through words copied from the input.
    pub fn unknown_words(&self, options: &TranslationOptions) -> usize {
        self.derivation
            .phrases
            .iter()
            .filter(|p| options.get(p.b, p.e).iter().any(|o| o.pass_through && o.target == p.target))
            .count()
    }
}

/// Beam search over the table's options for `sent`.
pub fn beam_decode(
    sent: &Sentence,
    table: &PhraseTable,
    lm: &TrigramModel,
    config: &DecoderConfig,
) -> Result<Translation, DecodeError> {
    let options = TranslationOptions::collect(sent, table, config.unknown)?;
    beam_search(&options, lm, config)
}

/// Exhaustive search over the table's options for `sent`.
pub fn exhaustive_decode(
    sent: &Sentence,
    table: &PhraseTable,
    lm: &TrigramModel,
    config: &DecoderConfig,
) -> Result<Translation, DecodeError> {
    if sent.len() > config.oracle_limit {
        return Err(DecodeError::OracleLimitExceeded {
            n: sent.len(),
            limit: config.oracle_limit,
        });
    }
    let options = TranslationOptions::collect(sent, table, config.unknown)?;
    exhaustive_search(&options, lm, config)
}
