//! Phrase-pair extraction and the relative-frequency phrase table.

mod extract;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use thiserror::Error;

use crate::text::{cmp_joined, Sentence, Token};

pub use extract::{extract_phrases, extract_spans, SpanPair};

/// Longest phrase, in tokens, extracted by default on either side.
pub const DEFAULT_MAX_LEN: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("span ({b}, {e}) outside a sentence of length {n}")]
    SpanOutOfBounds { b: usize, e: usize, n: usize },
    #[error("phrase pair has zero count")]
    ZeroCount,
    #[error("phrase pair has an empty side")]
    EmptyPhrase,
}

/// A surface phrase pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhrasePair {
    pub src: Vec<Token>,
    pub tgt: Vec<Token>,
}

/// One translation candidate of a source phrase.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetEntry {
    pub target: Vec<Token>,
    pub count: u64,
    /// `ln(count(src, tgt) / count(src))`.
    pub g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TableStats {
    /// Distinct `(src, tgt)` types.
    pub entries: usize,
    /// Distinct source phrases.
    pub sources: usize,
}

/// Source phrase to scored target candidates.
///
/// Candidates of a source phrase are ordered by descending `g`, then by
/// target string.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhraseTable {
    entries: BTreeMap<Vec<Token>, Vec<TargetEntry>>,
    source_counts: BTreeMap<Vec<Token>, u64>,
    max_source_len: usize,
}

impl PhraseTable {
    /// Relative-frequency table over a multiset of extracted pairs.
    pub fn build<I>(extracted: I) -> Self
    where
        I: IntoIterator<Item = PhrasePair>,
    {
        Self::from_counts(extracted.into_iter().map(|p| (p.src, p.tgt, 1)))
            .expect("extracted pairs are non-empty with unit counts")
    }

    /// Table from `(src, tgt, count)` triples; repeated pairs are summed.
    pub fn from_counts<I>(counts: I) -> Result<Self, TableError>
    where
        I: IntoIterator<Item = (Vec<Token>, Vec<Token>, u64)>,
    {
        let mut joint: BTreeMap<Vec<Token>, BTreeMap<Vec<Token>, u64>> = BTreeMap::new();
        for (src, tgt, count) in counts {
            if count == 0 {
                return Err(TableError::ZeroCount);
            }
            if src.is_empty() || tgt.is_empty() {
                return Err(TableError::EmptyPhrase);
            }
            *joint.entry(src).or_default().entry(tgt).or_default() += count;
        }
        let mut table = PhraseTable::default();
        for (src, targets) in joint {
            let total: u64 = targets.values().sum();
            let mut cands: Vec<TargetEntry> = targets
                .into_iter()
                .map(|(target, count)| TargetEntry {
                    g: libm::log(count as f64 / total as f64),
                    target,
                    count,
                })
                .collect();
            cands.sort_by(|a, b| {
                b.g.partial_cmp(&a.g)
                    .unwrap_or(Ordering::Equal)
                    .then_with(|| cmp_joined(&a.target, &b.target))
            });
            table.max_source_len = table.max_source_len.max(src.len());
            table.source_counts.insert(src.clone(), total);
            table.entries.insert(src, cands);
        }
        Ok(table)
    }

    /// Candidates for the surface phrase `s_b .. s_e` (1-based, inclusive).
    pub fn lookup(&self, sent: &Sentence, b: usize, e: usize) -> Result<&[TargetEntry], TableError> {
        let span = sent.span(b, e).ok_or(TableError::SpanOutOfBounds {
            b,
            e,
            n: sent.len(),
        })?;
        Ok(self.candidates(span))
    }

    pub fn candidates(&self, src: &[Token]) -> &[TargetEntry] {
        self.entries.get(src).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn source_count(&self, src: &[Token]) -> u64 {
        self.source_counts.get(src).copied().unwrap_or(0)
    }

    pub fn max_source_len(&self) -> usize {
        self.max_source_len
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All entries, sources in sorted order and candidates in table order.
    pub fn iter(&self) -> impl Iterator<Item = (&[Token], &TargetEntry)> {
        self.entries
            .iter()
            .flat_map(|(src, cands)| cands.iter().map(move |c| (src.as_slice(), c)))
    }

    pub fn sources(&self) -> impl Iterator<Item = (&[Token], &[TargetEntry])> {
        self.entries.iter().map(|(s, c)| (s.as_slice(), c.as_slice()))
    }

    pub fn stats(&self) -> TableStats {
        TableStats {
            entries: self.entries.values().map(Vec::len).sum(),
            sources: self.entries.len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::words;
    use alloc::vec;

    fn pp(s: &str, t: &str) -> PhrasePair {
        PhrasePair {
            src: words(s).unwrap(),
            tgt: words(t).unwrap(),
        }
    }

    #[test]
    fn relative_frequency() {
        let table = PhraseTable::build(vec![pp("a", "x"), pp("a", "x"), pp("a", "y"), pp("a", "x")]);
        let c = table.candidates(&words("a").unwrap());
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].target, words("x").unwrap());
        assert!((c[0].g - libm::log(0.75)).abs() < 1e-15);
        assert!((c[1].g - libm::log(0.25)).abs() < 1e-15);
        assert_eq!(c[0].count, 3);

        let single = PhraseTable::build(vec![pp("b", "z")]);
        assert_eq!(single.candidates(&words("b").unwrap())[0].g, 0.0);
    }

    #[test]
    fn ties_sorted_by_target_string() {
        let table = PhraseTable::build(vec![pp("a", "y"), pp("a", "x z"), pp("a", "x")]);
        let targets: Vec<_> = table
            .candidates(&words("a").unwrap())
            .iter()
            .map(|c| crate::text::join(&c.target))
            .collect();
        assert_eq!(targets, ["x", "x z", "y"]);
    }

    #[test]
    fn lookup_bounds_and_misses() {
        let table = PhraseTable::build(vec![pp("find the car", "to the car")]);
        let sent = Sentence::from_words("please find the car").unwrap();
        let c = table.lookup(&sent, 2, 4).unwrap();
        assert_eq!(c[0].target, words("to the car").unwrap());
        assert!(table.lookup(&sent, 1, 1).unwrap().is_empty());
        assert_eq!(
            table.lookup(&sent, 0, 1),
            Err(TableError::SpanOutOfBounds { b: 0, e: 1, n: 4 })
        );
        assert!(table.lookup(&sent, 3, 5).is_err());
    }

    #[test]
    fn stats_count_types() {
        assert_eq!(PhraseTable::default().stats(), TableStats::default());
        let table = PhraseTable::build(vec![pp("a", "x"), pp("a", "y"), pp("b", "x"), pp("b", "x")]);
        assert_eq!(table.stats(), TableStats { entries: 3, sources: 2 });
    }

    #[test]
    fn from_counts_rejects_zero() {
        let r = PhraseTable::from_counts(vec![(words("a").unwrap(), words("x").unwrap(), 0)]);
        assert_eq!(r, Err(TableError::ZeroCount));
    }
}
