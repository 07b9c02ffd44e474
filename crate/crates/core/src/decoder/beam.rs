use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{rank, score_derivation, DecodeError, DecoderConfig, Derivation, PhraseInstance, Translation, TranslationOptions};
use crate::lm::{Sym, TrigramModel, BOS, EOS};
use crate::text::cmp_joined;

/// Covered source positions, bit `i - 1` for position `i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Coverage(Vec<u64>);

impl Coverage {
    fn new(n: usize) -> Self {
        Coverage(vec![0; n.div_ceil(64).max(1)])
    }

    fn is_free(&self, b: usize, e: usize) -> bool {
        (b..=e).all(|i| self.0[(i - 1) / 64] & (1 << ((i - 1) % 64)) == 0)
    }

    fn with(&self, b: usize, e: usize) -> Self {
        let mut next = self.clone();
        for i in b..=e {
            next.0[(i - 1) / 64] |= 1 << ((i - 1) % 64);
        }
        next
    }
}

/// Hypotheses sharing a key have identical futures.
type Key = (Coverage, Sym, Sym, usize);

struct Hyp {
    coverage: Coverage,
    u: Sym,
    v: Sym,
    /// End of the last phrase; 0 before the first.
    end: usize,
    score: f64,
    back: Option<(usize, (usize, usize), usize)>,
}

/// Stack decoding over `options`.
///
/// Stack `k` holds partial derivations covering `k` source words. Each stack
/// is recombined on coverage, the last two target words, and the end of the
/// last phrase, then pruned to `beam_size` before it is expanded. The final
/// stack is not pruned; its survivors are rescored in one pass with
/// [`score_derivation`] and the best one under [`rank`] is returned.
pub fn beam_search(
    options: &TranslationOptions,
    lm: &TrigramModel,
    config: &DecoderConfig,
) -> Result<Translation, DecodeError> {
    let n = options.len();
    if n == 0 {
        return Err(DecodeError::NoDerivation);
    }
    let w = config.weights;
    let beam = config.beam_size.max(1);
    let spans: Vec<((usize, usize), usize)> = options.iter().map(|(s, o)| (s, o.len())).collect();

    let mut arena = vec![Hyp {
        coverage: Coverage::new(n),
        u: BOS,
        v: BOS,
        end: 0,
        score: 0.0,
        back: None,
    }];
    let mut stacks: Vec<BTreeMap<Key, usize>> = (0..=n).map(|_| BTreeMap::new()).collect();
    stacks[0].insert((arena[0].coverage.clone(), BOS, BOS, 0), 0);

    for k in 0..n {
        let mut ids: Vec<usize> = core::mem::take(&mut stacks[k]).into_values().collect();
        ids.sort_by(|&a, &b| compare_partial(&arena, options, a, b));
        ids.truncate(beam);
        for id in ids {
            for &((b, e), count) in &spans {
                if !arena[id].coverage.is_free(b, e) {
                    continue;
                }
                let jump = if arena[id].end == 0 {
                    0
                } else {
                    (arena[id].end + 1).abs_diff(b)
                };
                if config.distortion_limit.is_some_and(|d| jump > d) {
                    continue;
                }
                let covered = k + e - b + 1;
                for oi in 0..count {
                    let opt = &options.get(b, e)[oi];
                    let (mut u, mut v) = (arena[id].u, arena[id].v);
                    let mut h = 0.0;
                    for t in &opt.target {
                        let s = lm.sym(t);
                        h += lm.log_prob(s, u, v);
                        u = v;
                        v = s;
                    }
                    if covered == n {
                        h += lm.log_prob(EOS, u, v);
                    }
                    let score = arena[id].score + w.lm * h + w.tm * opt.g + w.distortion * jump as f64;
                    let coverage = arena[id].coverage.with(b, e);
                    let key = (coverage.clone(), u, v, e);
                    arena.push(Hyp {
                        coverage,
                        u,
                        v,
                        end: e,
                        score,
                        back: Some((id, (b, e), oi)),
                    });
                    let new = arena.len() - 1;
                    match stacks[covered].get(&key) {
                        Some(&old) if compare_partial(&arena, options, new, old) != Ordering::Less => {}
                        _ => {
                            stacks[covered].insert(key, new);
                        }
                    }
                }
            }
        }
    }

    let mut best: Option<(f64, Derivation)> = None;
    for &id in stacks[n].values() {
        let y = derivation(&arena, options, id);
        let f = score_derivation(&y, lm, w);
        let better = match &best {
            None => true,
            Some((bf, by)) => rank((f, &y), (*bf, by)) == Ordering::Less,
        };
        if better {
            best = Some((f, y));
        }
    }
    best.map(|(score, derivation)| Translation { derivation, score })
        .ok_or(DecodeError::NoDerivation)
}

fn derivation(arena: &[Hyp], options: &TranslationOptions, mut id: usize) -> Derivation {
    let mut phrases: Vec<PhraseInstance> = Vec::new();
    while let Some((prev, span, oi)) = arena[id].back {
        phrases.push(options.instance(span, oi));
        id = prev;
    }
    phrases.reverse();
    Derivation::new(phrases)
}

/// Higher running score first; ties go to the smaller partial target, then
/// the smaller span sequence, so pruning and recombination are deterministic.
fn compare_partial(arena: &[Hyp], options: &TranslationOptions, a: usize, b: usize) -> Ordering {
    match arena[b].score.partial_cmp(&arena[a].score) {
        Some(Ordering::Equal) | None => {
            let ya = derivation(arena, options, a);
            let yb = derivation(arena, options, b);
            cmp_joined(&ya.target(), &yb.target()).then_with(|| ya.spans().cmp(&yb.spans()))
        }
        Some(o) => o,
    }
}

#[cfg(test)]
mod tests {
    use super::super::{exhaustive_search, SpanOption, Weights};
    use super::*;
    use crate::lm::Lambdas;
    use crate::text::{words, Sentence};
    use proptest::prelude::*;

    fn lm() -> TrigramModel {
        TrigramModel::train(
            &[
                Sentence::from_words("navigate to the car").unwrap(),
                Sentence::from_words("navigate to the car that is behind the building").unwrap(),
            ],
            Lambdas::default(),
        )
        .unwrap()
    }

    fn opt(t: &str, g: f64) -> SpanOption {
        SpanOption {
            target: words(t).unwrap(),
            g,
            pass_through: false,
        }
    }

    fn two_word_options() -> TranslationOptions {
        let mut spans = BTreeMap::new();
        spans.insert((1, 1), vec![opt("car", -0.1), opt("the car", -0.7)]);
        spans.insert((2, 2), vec![opt("navigate to", -0.2)]);
        spans.insert((1, 2), vec![opt("navigate to the car", -1.5)]);
        TranslationOptions::from_spans(2, spans)
    }

    #[test]
    fn two_word_input_by_hand() {
        let model = lm();
        let options = two_word_options();
        let cfg = DecoderConfig::default();
        let w = cfg.weights;
        // Every derivation written out.
        let cands = [
            vec![((1, 1), 0), ((2, 2), 0)],
            vec![((1, 1), 1), ((2, 2), 0)],
            vec![((2, 2), 0), ((1, 1), 0)],
            vec![((2, 2), 0), ((1, 1), 1)],
            vec![((1, 2), 0)],
        ];
        let mut best: Option<(f64, Derivation)> = None;
        for c in cands {
            let y = Derivation::new(c.iter().map(|&(s, i)| options.instance(s, i)).collect());
            let f = score_derivation(&y, &model, w);
            if best.as_ref().is_none_or(|(bf, _)| f > *bf) {
                best = Some((f, y));
            }
        }
        let (bf, by) = best.unwrap();
        let ex = exhaustive_search(&options, &model, &cfg).unwrap();
        let bm = beam_search(&options, &model, &cfg).unwrap();
        assert_eq!(ex.score, bf);
        assert_eq!(ex.derivation, by);
        assert_eq!(bm.score, bf);
        assert_eq!(bm.derivation, by);
        assert_eq!(crate::text::join(&by.target()), "navigate to the car");
    }

    #[test]
    fn incremental_score_matches_batch() {
        let model = lm();
        let options = two_word_options();
        let cfg = DecoderConfig::default();
        let t = beam_search(&options, &model, &cfg).unwrap();
        // Replay the winning derivation through the incremental update.
        let mut score = 0.0;
        let (mut u, mut v, mut end) = (BOS, BOS, 0usize);
        for (k, p) in t.derivation.phrases.iter().enumerate() {
            let jump = if end == 0 { 0 } else { (end + 1).abs_diff(p.b) };
            let mut h = 0.0;
            for tok in &p.target {
                let s = model.sym(tok);
                h += model.log_prob(s, u, v);
                u = v;
                v = s;
            }
            if k + 1 == t.derivation.phrases.len() {
                h += model.log_prob(EOS, u, v);
            }
            score += cfg.weights.lm * h + cfg.weights.tm * p.g + cfg.weights.distortion * jump as f64;
            end = p.e;
        }
        assert!((score - t.score).abs() < 1e-9);
    }

    #[test]
    fn uncoverable_input_fails() {
        let mut spans = BTreeMap::new();
        spans.insert((1, 1), vec![opt("a", 0.0)]);
        let options = TranslationOptions::from_spans(2, spans);
        let cfg = DecoderConfig::default();
        assert_eq!(beam_search(&options, &lm(), &cfg), Err(DecodeError::NoDerivation));
        assert_eq!(exhaustive_search(&options, &lm(), &cfg), Err(DecodeError::NoDerivation));
    }

    #[test]
    fn distortion_limit_forces_monotone() {
        let model = lm();
        let mut spans = BTreeMap::new();
        spans.insert((1, 1), vec![opt("the car", 0.0)]);
        spans.insert((2, 2), vec![opt("the building", 0.0)]);
        spans.insert((3, 3), vec![opt("navigate to", 0.0)]);
        let options = TranslationOptions::from_spans(3, spans);
        let cfg = DecoderConfig {
            distortion_limit: Some(0),
            ..DecoderConfig::default()
        };
        let t = beam_search(&options, &model, &cfg).unwrap();
        assert_eq!(t.derivation.spans(), vec![(1, 1), (2, 2), (3, 3)]);
    }

    fn arb_options() -> impl Strategy<Value = TranslationOptions> {
        let vocab = ["navigate", "to", "the", "car", "building", "behind", "that", "is", "x"];
        (1usize..=4).prop_flat_map(move |n| {
            let spans: Vec<(usize, usize)> = (1..=n).flat_map(|b| (b..=n).map(move |e| (b, e))).collect();
            let per_span = prop::collection::vec(
                prop::collection::vec((prop::collection::vec(0..vocab.len(), 1..3), -3.0f64..0.0), 0..3),
                spans.len(),
            );
            per_span.prop_map(move |all| {
                let mut map = BTreeMap::new();
                for (span, opts) in spans.iter().zip(all) {
                    let opts: Vec<SpanOption> = opts
                        .into_iter()
                        .map(|(ws, g)| {
                            let t: Vec<&str> = ws.iter().map(|&i| vocab[i]).collect();
                            opt(&t.join(" "), g)
                        })
                        .collect();
                    map.insert(*span, opts);
                }
                for i in 1..=n {
                    map.entry((i, i)).or_insert_with(Vec::new).push(opt(vocab[i], -5.0));
                }
                TranslationOptions::from_spans(n, map)
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn wide_beam_matches_exhaustive(options in arb_options()) {
            let model = lm();
            let cfg = DecoderConfig { beam_size: 10_000, ..DecoderConfig::default() };
            let ex = exhaustive_search(&options, &model, &cfg).unwrap();
            let bm = beam_search(&options, &model, &cfg).unwrap();
            prop_assert_eq!(ex.score, bm.score);
            prop_assert_eq!(ex.derivation, bm.derivation);
        }

        #[test]
        fn argmax_invariant_under_weight_scaling(options in arb_options(), k in 0.1f64..10.0) {
            let model = lm();
            let cfg = DecoderConfig::default();
            let scaled = DecoderConfig { weights: cfg.weights.scaled(k), ..cfg };
            let a = exhaustive_search(&options, &model, &cfg).unwrap();
            let b = exhaustive_search(&options, &model, &scaled).unwrap();
            prop_assert!((b.score - k * a.score).abs() < 1e-9 * (1.0 + b.score.abs()));
            // Scaling can only reorder exact float ties, never a clear winner.
            let rescored = score_derivation(&b.derivation, &model, cfg.weights);
            prop_assert!((rescored - a.score).abs() < 1e-9 * (1.0 + a.score.abs()));
        }
    }

    #[test]
    fn weights_scale() {
        assert_eq!(Weights::new(1.0, 2.0, -0.5).scaled(2.0), Weights::new(2.0, 4.0, -1.0));
    }
}
