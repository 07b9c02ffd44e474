//! Interpolated trigram language model over robot-language tokens.
//!
//! ```text
//! P(w | u, v) = λ3·p̂(w|u,v) + λ2·p̂(w|v) + λ1·p̂(w) + λ0 / (|V| + 2)
//! ```
//!
//! The `p̂` terms are maximum-likelihood estimates over sentences padded as
//! `<s> <s> w1 .. wn </s>`. The event space is `V ∪ {</s>, <unk>}`. When a
//! context was never observed its weight moves down to the next lower order,
//! so every conditional distribution sums to one, seen context or not.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::text::{Sentence, Token};

/// Smallest uniform weight accepted at training time.
pub const MIN_UNIFORM_WEIGHT: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LmError {
    #[error("no sentences to train on")]
    EmptyCorpus,
    #[error("interpolation weights {0:?} must be non-negative and sum to 1")]
    InvalidLambda([f64; 4]),
    #[error("n-gram of order {0} has the wrong length")]
    BadNgram(usize),
}

/// Symbol ids: begin and end markers, the unknown class, then vocabulary words.
pub type Sym = u32;
pub const BOS: Sym = 0;
pub const EOS: Sym = 1;
pub const UNK: Sym = 2;
const FIRST_WORD: Sym = 3;

pub const BOS_TEXT: &str = "<s>";
pub const EOS_TEXT: &str = "</s>";
pub const UNK_TEXT: &str = "<unk>";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lambdas {
    pub trigram: f64,
    pub bigram: f64,
    pub unigram: f64,
    pub uniform: f64,
}

impl Default for Lambdas {
    fn default() -> Self {
        Lambdas {
            trigram: 0.7,
            bigram: 0.2,
            unigram: 0.09,
            uniform: 0.01,
        }
    }
}

impl Lambdas {
    pub fn new(trigram: f64, bigram: f64, unigram: f64, uniform: f64) -> Self {
        Lambdas {
            trigram,
            bigram,
            unigram,
            uniform,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.trigram, self.bigram, self.unigram, self.uniform]
    }

    fn validate(&self) -> Result<(), LmError> {
        let a = self.as_array();
        let sum: f64 = a.iter().sum();
        if a.iter().any(|x| !x.is_finite() || *x < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(LmError::InvalidLambda(a));
        }
        Ok(())
    }

    /// Raise the uniform weight to at least [`MIN_UNIFORM_WEIGHT`], scaling the
    /// other three down so the sum stays one.
    fn clamped(self) -> Self {
        if self.uniform >= MIN_UNIFORM_WEIGHT {
            return self;
        }
        let rest = self.trigram + self.bigram + self.unigram;
        let scale = (1.0 - MIN_UNIFORM_WEIGHT) / rest;
        Lambdas {
            trigram: self.trigram * scale,
            bigram: self.bigram * scale,
            unigram: self.unigram * scale,
            uniform: MIN_UNIFORM_WEIGHT,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrigramModel {
    lambdas: Lambdas,
    words: Vec<Token>,
    index: BTreeMap<Token, Sym>,
    unigrams: BTreeMap<Sym, u64>,
    bigrams: BTreeMap<(Sym, Sym), u64>,
    trigrams: BTreeMap<(Sym, Sym, Sym), u64>,
    bigram_ctx: BTreeMap<Sym, u64>,
    trigram_ctx: BTreeMap<(Sym, Sym), u64>,
    total: u64,
}

/// One stored n-gram count, in surface form, for dumps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramCount {
    pub order: usize,
    pub words: Vec<String>,
    pub count: u64,
}

impl TrigramModel {
    /// Count n-grams over padded sentences.
    ///
    /// The uniform weight is clamped to at least 1e-4 so scores stay finite.
    pub fn train(sentences: &[Sentence], lambdas: Lambdas) -> Result<Self, LmError> {
        if sentences.is_empty() {
            return Err(LmError::EmptyCorpus);
        }
        lambdas.validate()?;
        let mut model = TrigramModel::empty(lambdas.clamped());
        for s in sentences {
            let syms: Vec<Sym> = s.tokens().iter().map(|t| model.intern(t)).collect();
            let mut u = BOS;
            let mut v = BOS;
            for w in syms.into_iter().chain(core::iter::once(EOS)) {
                *model.trigrams.entry((u, v, w)).or_default() += 1;
                *model.bigrams.entry((v, w)).or_default() += 1;
                *model.unigrams.entry(w).or_default() += 1;
                u = v;
                v = w;
            }
        }
        model.derive_totals();
        Ok(model)
    }

    /// Rebuild from dumped counts. `lambdas` are used as given after validation.
    pub fn from_counts(lambdas: Lambdas, counts: &[NgramCount]) -> Result<Self, LmError> {
        lambdas.validate()?;
        let mut model = TrigramModel::empty(lambdas.clamped());
        for c in counts {
            if c.words.len() != c.order || !(1..=3).contains(&c.order) {
                return Err(LmError::BadNgram(c.order));
            }
            let syms: Vec<Sym> = c.words.iter().map(|w| model.intern_text(w)).collect();
            match syms.as_slice() {
                [w] => *model.unigrams.entry(*w).or_default() += c.count,
                [v, w] => *model.bigrams.entry((*v, *w)).or_default() += c.count,
                [u, v, w] => *model.trigrams.entry((*u, *v, *w)).or_default() += c.count,
                _ => unreachable!(),
            }
        }
        if model.unigrams.is_empty() {
            return Err(LmError::EmptyCorpus);
        }
        model.derive_totals();
        Ok(model)
    }

    fn empty(lambdas: Lambdas) -> Self {
        TrigramModel {
            lambdas,
            words: Vec::new(),
            index: BTreeMap::new(),
            unigrams: BTreeMap::new(),
            bigrams: BTreeMap::new(),
            trigrams: BTreeMap::new(),
            bigram_ctx: BTreeMap::new(),
            trigram_ctx: BTreeMap::new(),
            total: 0,
        }
    }

    fn intern(&mut self, t: &Token) -> Sym {
        if let Some(&s) = self.index.get(t) {
            return s;
        }
        let s = FIRST_WORD + self.words.len() as Sym;
        self.words.push(t.clone());
        self.index.insert(t.clone(), s);
        s
    }

    fn intern_text(&mut self, w: &str) -> Sym {
        match w {
            BOS_TEXT => BOS,
            EOS_TEXT => EOS,
            UNK_TEXT => UNK,
            other => self.intern(&Token::new(other).expect("dumped tokens are valid")),
        }
    }

    fn derive_totals(&mut self) {
        self.bigram_ctx.clear();
        self.trigram_ctx.clear();
        for (&(v, _), &c) in &self.bigrams {
            *self.bigram_ctx.entry(v).or_default() += c;
        }
        for (&(u, v, _), &c) in &self.trigrams {
            *self.trigram_ctx.entry((u, v)).or_default() += c;
        }
        self.total = self.unigrams.values().sum();
    }

    pub fn lambdas(&self) -> Lambdas {
        self.lambdas
    }

    /// Vocabulary size `|V|`, markers excluded.
    pub fn vocab_size(&self) -> usize {
        self.words.len()
    }

    pub fn vocab(&self) -> &[Token] {
        &self.words
    }

    /// Symbol for a token; out-of-vocabulary words map to [`UNK`].
    pub fn sym(&self, t: &Token) -> Sym {
        self.index.get(t).copied().unwrap_or(UNK)
    }

    pub fn sym_text(&self, s: Sym) -> &str {
        match s {
            BOS => BOS_TEXT,
            EOS => EOS_TEXT,
            UNK => UNK_TEXT,
            w => self.words[(w - FIRST_WORD) as usize].as_str(),
        }
    }

    /// Every event `w` can take: vocabulary, end marker, unknown class.
    pub fn events(&self) -> impl Iterator<Item = Sym> + '_ {
        (FIRST_WORD..FIRST_WORD + self.words.len() as Sym).chain([EOS, UNK])
    }

    /// `P(w | u, v)`.
    pub fn prob(&self, w: Sym, u: Sym, v: Sym) -> f64 {
        let l = &self.lambdas;
        let (mut l3, mut l2, mut l1) = (l.trigram, l.bigram, l.unigram);
        let ctx3 = self.trigram_ctx.get(&(u, v)).copied().unwrap_or(0);
        if ctx3 == 0 {
            l2 += l3;
            l3 = 0.0;
        }
        let ctx2 = self.bigram_ctx.get(&v).copied().unwrap_or(0);
        if ctx2 == 0 {
            l1 += l2;
            l2 = 0.0;
        }
        let uniform = l.uniform / (self.words.len() + 2) as f64;
        let mut p = uniform;
        if self.total > 0 {
            p += l1 * self.unigrams.get(&w).copied().unwrap_or(0) as f64 / self.total as f64;
        }
        if l2 > 0.0 {
            p += l2 * self.bigrams.get(&(v, w)).copied().unwrap_or(0) as f64 / ctx2 as f64;
        }
        if l3 > 0.0 {
            p += l3 * self.trigrams.get(&(u, v, w)).copied().unwrap_or(0) as f64 / ctx3 as f64;
        }
        p
    }

    /// `ln P(w | u, v)`.
    pub fn log_prob(&self, w: Sym, u: Sym, v: Sym) -> f64 {
        libm::log(self.prob(w, u, v))
    }

    /// Maximum-likelihood trigram estimate `p̂(w | u, v)`, 0 for unseen contexts.
    pub fn ml_trigram(&self, w: Sym, u: Sym, v: Sym) -> f64 {
        match self.trigram_ctx.get(&(u, v)) {
            Some(&ctx) if ctx > 0 => {
                self.trigrams.get(&(u, v, w)).copied().unwrap_or(0) as f64 / ctx as f64
            }
            _ => 0.0,
        }
    }

    /// Sum of `ln P` over `tokens` followed by the end marker.
    pub fn score_tokens(&self, tokens: &[Token]) -> f64 {
        let mut u = BOS;
        let mut v = BOS;
        let mut total = 0.0;
        for w in tokens.iter().map(|t| self.sym(t)).chain(core::iter::once(EOS)) {
            total += self.log_prob(w, u, v);
            u = v;
            v = w;
        }
        total
    }

    pub fn score_sequence(&self, sent: &Sentence) -> f64 {
        self.score_tokens(sent.tokens())
    }

    /// Stored counts as surface n-grams: unigrams, bigrams, trigrams.
    pub fn counts(&self) -> Vec<NgramCount> {
        let text = |s: Sym| self.sym_text(s).to_string();
        let mut out = Vec::new();
        for (&w, &count) in &self.unigrams {
            out.push(NgramCount {
                order: 1,
                words: alloc::vec![text(w)],
                count,
            });
        }
        for (&(v, w), &count) in &self.bigrams {
            out.push(NgramCount {
                order: 2,
                words: alloc::vec![text(v), text(w)],
                count,
            });
        }
        for (&(u, v, w), &count) in &self.trigrams {
            out.push(NgramCount {
                order: 3,
                words: alloc::vec![text(u), text(v), text(w)],
                count,
            });
        }
        out
    }
}

/// Interpolated trigram model trained on `sentences` (see [`TrigramModel::train`]).
pub fn train_lm(sentences: &[Sentence], lambdas: Lambdas) -> Result<TrigramModel, LmError> {
    TrigramModel::train(sentences, lambdas)
}
