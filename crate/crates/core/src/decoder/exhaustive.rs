use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{rank, score_derivation, DecodeError, DecoderConfig, Derivation, Translation, TranslationOptions};
use crate::lm::TrigramModel;

/// Enumerate every derivation over `options` and return a maximizer of
/// `f(y)`, ties broken by [`rank`].
///
/// All segmentations and all phrase orders are visited; the distortion limit
/// is not applied.
pub fn exhaustive_search(
    options: &TranslationOptions,
    lm: &TrigramModel,
    config: &DecoderConfig,
) -> Result<Translation, DecodeError> {
    let n = options.len();
    if n > config.oracle_limit {
        return Err(DecodeError::OracleLimitExceeded {
            n,
            limit: config.oracle_limit,
        });
    }
    let spans: Vec<((usize, usize), usize)> = options.iter().map(|(span, opts)| (span, opts.len())).collect();
    let mut search = Search {
        options,
        lm,
        config,
        spans,
        covered: vec![false; n + 1],
        remaining: n,
        current: Vec::new(),
        best: None,
    };
    search.visit();
    search
        .best
        .map(|(score, derivation)| Translation { derivation, score })
        .ok_or(DecodeError::NoDerivation)
}

struct Search<'a> {
    options: &'a TranslationOptions,
    lm: &'a TrigramModel,
    config: &'a DecoderConfig,
    spans: Vec<((usize, usize), usize)>,
    covered: Vec<bool>,
    remaining: usize,
    current: Vec<((usize, usize), usize)>,
    best: Option<(f64, Derivation)>,
}

impl Search<'_> {
    fn visit(&mut self) {
        if self.remaining == 0 {
            if self.current.is_empty() {
                return;
            }
            let y = Derivation::new(
                self.current
                    .iter()
                    .map(|&(span, i)| self.options.instance(span, i))
                    .collect(),
            );
            let f = score_derivation(&y, self.lm, self.config.weights);
            let better = match &self.best {
                None => true,
                Some((bf, by)) => rank((f, &y), (*bf, by)) == Ordering::Less,
            };
            if better {
                self.best = Some((f, y));
            }
            return;
        }
        for k in 0..self.spans.len() {
            let ((b, e), count) = self.spans[k];
            if self.covered[b..=e].iter().any(|&c| c) {
                continue;
            }
            self.covered[b..=e].iter_mut().for_each(|c| *c = true);
            self.remaining -= e - b + 1;
            for i in 0..count {
                self.current.push(((b, e), i));
                self.visit();
                self.current.pop();
            }
            self.remaining += e - b + 1;
            self.covered[b..=e].iter_mut().for_each(|c| *c = false);
        }
    }
}
