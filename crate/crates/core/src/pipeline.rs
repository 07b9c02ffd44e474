//! End-to-end training and the side-by-side (s, r) / (t, r) comparison.

use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::alignment::{symmetrize, train_model1, viterbi_align, AlignError, DEFAULT_ITERATIONS};
use crate::corpus::{pair_view, split, Corpus, CorpusError, PairMode, SentencePair, Task};
use crate::decoder::{beam_decode, DecodeError, DecoderConfig, Translation};
use crate::eval::{evaluate, EvalError, EvalReport};
use crate::grammar::{Grammar, Slot};
use crate::lm::{Lambdas, LmError, TrigramModel};
use crate::phrase_table::{extract_phrases, PhraseTable, TableStats, DEFAULT_MAX_LEN};
use crate::text::Sentence;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Align(#[from] AlignError),
    #[error(transparent)]
    Lm(#[from] LmError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("no grammar for task {0}")]
    MissingGrammar(Task),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub align_iterations: usize,
    pub max_phrase_len: usize,
    pub lambdas: Lambdas,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            align_iterations: DEFAULT_ITERATIONS,
            max_phrase_len: DEFAULT_MAX_LEN,
            lambdas: Lambdas::default(),
        }
    }
}

/// A phrase table and a target-side language model.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub table: PhraseTable,
    pub lm: TrigramModel,
}

impl TrainedModel {
    pub fn translate(&self, sent: &Sentence, config: &DecoderConfig) -> Result<Translation, DecodeError> {
        beam_decode(sent, &self.table, &self.lm, config)
    }
}

/// Align in both directions, symmetrize, extract, count, and train the LM on
/// the target sides.
pub fn train(pairs: &[SentencePair], config: &TrainConfig) -> Result<TrainedModel, PipelineError> {
    let fwd_model = train_model1(pairs, config.align_iterations)?;
    let swapped: Vec<SentencePair> = pairs.iter().map(SentencePair::swapped).collect();
    let rev_model = train_model1(&swapped, config.align_iterations)?;

    let mut extracted = Vec::new();
    for (pair, back) in pairs.iter().zip(&swapped) {
        let fwd = viterbi_align(&fwd_model, pair);
        let rev = viterbi_align(&rev_model, back).transposed();
        let links = symmetrize(&fwd, &rev)?;
        extracted.extend(extract_phrases(pair, &links, config.max_phrase_len));
    }
    let table = PhraseTable::build(extracted);
    let targets: Vec<Sentence> = pairs.iter().map(|p| p.target.clone()).collect();
    let lm = TrigramModel::train(&targets, config.lambdas)?;
    Ok(TrainedModel { table, lm })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareConfig {
    pub train: TrainConfig,
    pub decoder: DecoderConfig,
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            train: TrainConfig::default(),
            decoder: DecoderConfig::default(),
            test_fraction: 0.2,
            seed: 0,
        }
    }
}

/// One trained direction evaluated on the held-out tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult {
    pub mode: PairMode,
    pub stats: TableStats,
    pub eval: EvalReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub task: Task,
    pub train_size: usize,
    pub test_size: usize,
    pub s_to_r: PipelineResult,
    pub t_to_r: PipelineResult,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
}

/// Train and evaluate one direction on a fixed split.
pub fn run_mode(
    train_part: &Corpus,
    test_part: &Corpus,
    mode: PairMode,
    grammar: &Grammar,
    config: &CompareConfig,
) -> Result<PipelineResult, PipelineError> {
    let model = train(&pair_view(train_part, mode).pairs, &config.train)?;
    let tests = pair_view(test_part, mode).pairs;
    let hyps: Vec<Option<Sentence>> = tests
        .iter()
        .map(|p| {
            model
                .translate(&p.source, &config.decoder)
                .ok()
                .and_then(|t| t.derivation.target_sentence())
        })
        .collect();
    let refs: Vec<Sentence> = tests.iter().map(|p| p.target.clone()).collect();
    let hyp_refs: Vec<Option<&Sentence>> = hyps.iter().map(Option::as_ref).collect();
    let eval = evaluate(&hyp_refs, &refs, grammar)?;
    Ok(PipelineResult {
        mode,
        stats: model.table.stats(),
        eval,
    })
}

/// For every task in `corpus`: split once, then train and evaluate an s→r and
/// a t→r pipeline on the same split.
pub fn compare_pipelines(
    corpus: &Corpus,
    grammars: &[Grammar],
    config: &CompareConfig,
) -> Result<ComparisonReport, PipelineError> {
    let mut rows = Vec::new();
    for task in corpus.tasks() {
        let grammar = grammars
            .iter()
            .find(|g| g.task() == task)
            .ok_or(PipelineError::MissingGrammar(task))?;
        let (train_part, test_part) = split(&corpus.for_task(task), config.test_fraction, config.seed)?;
        rows.push(ComparisonRow {
            task,
            train_size: train_part.len(),
            test_size: test_part.len(),
            s_to_r: run_mode(&train_part, &test_part, PairMode::SToR, grammar, config)?,
            t_to_r: run_mode(&train_part, &test_part, PairMode::TToR, grammar, config)?,
        });
    }
    Ok(ComparisonReport { rows })
}

impl ComparisonReport {
    /// One `key=value` metric per line.
    pub fn key_values(&self) -> KeyValues<'_> {
        KeyValues(self)
    }
}

/// Aligned text table: one row per task, lexicon sizes side by side, then
/// the held-out scores of each direction.
impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let header = [
            "",
            "#phrase from (s,r)",
            "#phrase from (t,r)",
            "exact (s,r)",
            "exact (t,r)",
            "concept F1 (s,r)",
            "concept F1 (t,r)",
        ];
        let mut lines: Vec<[alloc::string::String; 7]> = Vec::new();
        for row in &self.rows {
            lines.push([
                capitalized(row.task.as_str()),
                alloc::format!("{}", row.s_to_r.stats.entries),
                alloc::format!("{}", row.t_to_r.stats.entries),
                alloc::format!("{:.3}", row.s_to_r.eval.exact_match_rate),
                alloc::format!("{:.3}", row.t_to_r.eval.exact_match_rate),
                alloc::format!("{:.3}", mean_f1(&row.s_to_r.eval)),
                alloc::format!("{:.3}", mean_f1(&row.t_to_r.eval)),
            ]);
        }
        let mut widths = header.map(str::len);
        for l in &lines {
            for (w, c) in widths.iter_mut().zip(l) {
                *w = (*w).max(c.len());
            }
        }
        let rule: alloc::string::String = widths.iter().map(|w| alloc::format!("+{}", "-".repeat(w + 2))).collect();
        writeln!(f, "{rule}+")?;
        for (k, (h, w)) in header.iter().zip(widths).enumerate() {
            if k == 0 {
                write!(f, "| {h:<w$} ")?;
            } else {
                write!(f, "| {h:>w$} ")?;
            }
        }
        writeln!(f, "|")?;
        writeln!(f, "{rule}+")?;
        for l in &lines {
            for (k, (c, w)) in l.iter().zip(widths).enumerate() {
                if k == 0 {
                    write!(f, "| {c:<w$} ")?;
                } else {
                    write!(f, "| {c:>w$} ")?;
                }
            }
            writeln!(f, "|")?;
        }
        writeln!(f, "{rule}+")
    }
}

fn capitalized(s: &str) -> alloc::string::String {
    let mut out = alloc::string::String::new();
    let mut chars = s.chars();
    if let Some(c) = chars.next() {
        out.extend(c.to_uppercase());
    }
    out.push_str(chars.as_str());
    out
}

/// Unweighted mean of the three slot F1 scores.
pub fn mean_f1(report: &EvalReport) -> f64 {
    (report.action.f1() + report.object.f1() + report.relation.f1()) / 3.0
}

pub struct KeyValues<'a>(&'a ComparisonReport);

impl fmt::Display for KeyValues<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.0.rows {
            let task = row.task.as_str();
            writeln!(f, "{task}.train_tuples={}", row.train_size)?;
            writeln!(f, "{task}.test_tuples={}", row.test_size)?;
            for result in [&row.s_to_r, &row.t_to_r] {
                let p = alloc::format!("{task}.{}_to_r", result.mode.as_str());
                writeln!(f, "{p}.entries={}", result.stats.entries)?;
                writeln!(f, "{p}.sources={}", result.stats.sources)?;
                write_eval(f, &p, &result.eval)?;
            }
        }
        Ok(())
    }
}

/// Evaluation metrics as `prefix.metric=value` lines.
pub fn write_eval(f: &mut dyn fmt::Write, prefix: &str, eval: &EvalReport) -> fmt::Result {
    writeln!(f, "{prefix}.sentences={}", eval.sentences)?;
    writeln!(f, "{prefix}.exact_match={:.6}", eval.exact_match_rate)?;
    for slot in [Slot::Action, Slot::Object, Slot::Relation] {
        let s = eval.slot(slot);
        let name = slot.as_str();
        writeln!(f, "{prefix}.{name}.precision={:.6}", s.precision())?;
        writeln!(f, "{prefix}.{name}.recall={:.6}", s.recall())?;
        writeln!(f, "{prefix}.{name}.f1={:.6}", s.f1())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ParallelTuple;
    use crate::grammar::gen_synthetic;
    use crate::text::join;
    use alloc::string::ToString;
    use alloc::vec;

    fn s(t: &str) -> Sentence {
        Sentence::from_words(t).unwrap()
    }

    #[test]
    fn identity_corpus_learns_identity() {
        let g = Grammar::navigation();
        let pairs: Vec<SentencePair> = g
            .enumerate_commands()
            .iter()
            .map(|c| {
                let r = g.realize(c).unwrap();
                SentencePair::new(r.clone(), r)
            })
            .collect();
        let model = train(&pairs, &TrainConfig::default()).unwrap();
        let src = s("navigate to the car that is behind the building");
        assert!(!model.table.lookup(&src, 1, 2).unwrap().is_empty());
        let t = model.translate(&src, &DecoderConfig::default()).unwrap();
        assert_eq!(join(&t.target()), join(src.tokens()));
    }

    #[test]
    fn compare_is_deterministic() {
        let g = Grammar::navigation();
        let syn = gen_synthetic(&g, g.bank().unwrap(), 2, 5).unwrap();
        let cfg = CompareConfig {
            seed: 3,
            ..CompareConfig::default()
        };
        let a = compare_pipelines(&syn.corpus, std::slice::from_ref(&g), &cfg).unwrap();
        let b = compare_pipelines(&syn.corpus, &[g], &cfg).unwrap();
        assert_eq!(a.to_string(), b.to_string());
        assert_eq!(a.key_values().to_string(), b.key_values().to_string());
        assert_eq!(a.rows.len(), 1);
        assert!(a.to_string().contains("#phrase from (t,r)"));
        assert!(a.key_values().to_string().contains("navigation.t_to_r.entries="));
    }

    #[test]
    fn t_equal_r_scores_perfectly() {
        let g = Grammar::navigation();
        let syn = gen_synthetic(&g, g.bank().unwrap(), 4, 1).unwrap();
        let tuples: Vec<ParallelTuple> = syn
            .corpus
            .iter()
            .map(|t| ParallelTuple {
                t: t.r.clone(),
                ..t.clone()
            })
            .collect();
        let corpus = Corpus::new(tuples).unwrap();
        let cfg = CompareConfig::default();
        let report = compare_pipelines(&corpus, &[g], &cfg).unwrap();
        assert_eq!(report.rows[0].t_to_r.eval.exact_match_rate, 1.0);
    }

    #[test]
    fn missing_grammar() {
        let tuple = ParallelTuple {
            id: "m1".into(),
            task: Task::Manipulation,
            s: s("pick the cup"),
            t: s("pick the cup"),
            r: s("grasp the cup"),
        };
        let corpus = Corpus::new(vec![tuple]).unwrap();
        assert_eq!(
            compare_pipelines(&corpus, &[Grammar::navigation()], &CompareConfig::default()),
            Err(PipelineError::MissingGrammar(Task::Manipulation))
        );
    }
}
