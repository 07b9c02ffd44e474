use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::PhrasePair;
use crate::alignment::AlignmentLinks;
use crate::corpus::SentencePair;

/// Source span and target span, 1-based inclusive `(start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpanPair {
    pub src: (usize, usize),
    pub tgt: (usize, usize),
}

/// All alignment-consistent span pairs with both sides at most `max_len` long.
///
/// A pair is consistent when at least one link joins the two spans and no link
/// connects a word inside either span to a word outside the other. Unaligned
/// target words at the edges produce the usual extra variants.
pub fn extract_spans(links: &AlignmentLinks, max_len: usize) -> BTreeSet<SpanPair> {
    let (n, m) = (links.src_len(), links.tgt_len());
    let mut out = BTreeSet::new();
    if max_len == 0 {
        return out;
    }
    let mut tgt_aligned = vec![false; m + 2];
    let mut by_src: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    let mut by_tgt: Vec<Vec<usize>> = vec![Vec::new(); m + 1];
    for (i, j) in links.iter() {
        tgt_aligned[j] = true;
        by_src[i].push(j);
        by_tgt[j].push(i);
    }

    for b in 1..=n {
        for e in b..=n.min(b + max_len - 1) {
            let mut bounds: Option<(usize, usize)> = None;
            for j in (b..=e).flat_map(|i| by_src[i].iter().copied()) {
                bounds = Some(bounds.map_or((j, j), |(lo, hi)| (lo.min(j), hi.max(j))));
            }
            let Some((fmin, fmax)) = bounds else {
                continue;
            };
            if fmax - fmin + 1 > max_len {
                continue;
            }
            let leaks = (fmin..=fmax).any(|j| by_tgt[j].iter().any(|&i| i < b || i > e));
            if leaks {
                continue;
            }
            let mut fs = fmin;
            loop {
                let mut fe = fmax;
                while fe <= m && fe + 1 - fs <= max_len {
                    out.insert(SpanPair {
                        src: (b, e),
                        tgt: (fs, fe),
                    });
                    fe += 1;
                    if fe > m || tgt_aligned[fe] {
                        break;
                    }
                }
                if fs == 1 || tgt_aligned[fs - 1] {
                    break;
                }
                fs -= 1;
                if fmax + 1 - fs > max_len {
                    break;
                }
            }
        }
    }
    out
}

/// Surface phrase pairs for every consistent span pair, in span order.
///
/// The same surface pair can occur more than once when it is extracted from
/// different positions; callers counting relative frequencies want that.
pub fn extract_phrases(pair: &SentencePair, links: &AlignmentLinks, max_len: usize) -> Vec<PhrasePair> {
    extract_spans(links, max_len)
        .into_iter()
        .map(|sp| PhrasePair {
            src: pair.source.span(sp.src.0, sp.src.1).expect("span in bounds").to_vec(),
            tgt: pair.target.span(sp.tgt.0, sp.tgt.1).expect("span in bounds").to_vec(),
        })
        .collect()
}
