//! Subcommand implementations, generic over their input and output streams.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;

use robolex::corpus::{pair_view, split, CorpusError};
use robolex::decoder::DecodeError;
use robolex::eval::evaluate;
use robolex::grammar::{gen_synthetic, Grammar, GrammarError};
use robolex::pipeline::{compare_pipelines, train, write_eval, PipelineError, TrainedModel};
use robolex::{tokenize, Corpus, Sentence};
use thiserror::Error;

use crate::config::{ConfigFileError, RunConfig};
use crate::corpus_io::{format_tsv, load_corpus, CorpusFileError};
use crate::grammar_io::{load_grammar, GrammarFileError};
use crate::manifest::{sha256_hex, Manifest};
use crate::model_io::{load_model, save_model, ModelFileError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigFileError),
    #[error(transparent)]
    Corpus(#[from] CorpusFileError),
    #[error(transparent)]
    Grammar(#[from] GrammarFileError),
    #[error(transparent)]
    Model(#[from] ModelFileError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Synth(#[from] GrammarError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::Corpus(e.into())
    }
}

impl CliError {
    /// 2 for missing inputs and bad configuration, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_)
            | CliError::Usage(_)
            | CliError::Corpus(CorpusFileError::NotFound(_))
            | CliError::Grammar(GrammarFileError::NotFound(_))
            | CliError::Model(ModelFileError::NotFound(_)) => 2,
            _ => 1,
        }
    }
}

pub fn load_grammars(cfg: &RunConfig) -> Result<Vec<Grammar>, CliError> {
    Ok(cfg.grammars.iter().map(|g| load_grammar(g)).collect::<Result<_, _>>()?)
}

fn corpus_path(cfg: &RunConfig) -> Result<&Path, CliError> {
    cfg.corpus
        .as_deref()
        .ok_or_else(|| CliError::Usage("no corpus configured (set `corpus = <path>`)".into()))
}

/// Train on the training side of the configured split and write the table,
/// the language model and a manifest to `model_dir`.
pub fn cmd_train(cfg: &RunConfig, log: &mut dyn Write) -> Result<TrainedModel, CliError> {
    let grammars = load_grammars(cfg)?;
    let path = corpus_path(cfg)?;
    let corpus = load_corpus(path, &grammars)?;
    let checksum = sha256_hex(&fs::read(path)?);
    let (train_part, _) = split(&corpus, cfg.test_fraction, cfg.seed)?;
    let pairs = pair_view(&train_part, cfg.mode).pairs;
    let model = train(&pairs, &cfg.train)?;
    save_model(&cfg.model_dir, &model)?;
    let stats = model.table.stats();
    Manifest {
        config: cfg.clone(),
        corpus_sha256: checksum,
        train_pairs: pairs.len(),
        stats,
    }
    .write(&cfg.model_dir)?;
    writeln!(
        log,
        "trained on {} pairs ({} tuples, mode {}): {} phrase pairs, {} source phrases",
        pairs.len(),
        train_part.len(),
        cfg.mode,
        stats.entries,
        stats.sources
    )?;
    Ok(model)
}

/// `ok` when some grammar parses the whole sentence, `residue` otherwise.
pub fn parse_status(grammars: &[Grammar], sent: &Sentence) -> &'static str {
    let complete = grammars
        .iter()
        .any(|g| g.parse(sent).is_ok_and(|p| p.is_complete() && !p.commands.is_empty()));
    if complete {
        "ok"
    } else {
        "residue"
    }
}

/// A translated line before formatting.
#[derive(Debug, Clone, PartialEq)]
pub enum LineResult {
    Translated {
        target: String,
        score: f64,
        status: &'static str,
        source_len: usize,
    },
    Failed(String),
}

impl LineResult {
    pub fn render(&self) -> String {
        match self {
            LineResult::Translated {
                target, score, status, ..
            } => format!("{target}\t{score:.6}\t{status}"),
            LineResult::Failed(msg) => format!("\t\terror: {msg}"),
        }
    }
}

pub fn translate_line(model: &TrainedModel, grammars: &[Grammar], cfg: &RunConfig, line: &str) -> LineResult {
    let sent = match tokenize(line) {
        Ok(s) => s,
        Err(e) => return LineResult::Failed(e.to_string()),
    };
    match model.translate(&sent, &cfg.decoder) {
        Ok(t) => {
            let tokens = t.target();
            let (target, status) = match Sentence::new(tokens) {
                Ok(s) => (s.to_string(), parse_status(grammars, &s)),
                Err(_) => (String::new(), "residue"),
            };
            LineResult::Translated {
                target,
                score: t.score,
                status,
                source_len: sent.len(),
            }
        }
        Err(DecodeError::NoDerivation) => LineResult::Failed("no derivation".into()),
        Err(e) => LineResult::Failed(e.to_string()),
    }
}

/// One line read as lossy UTF-8 without its line ending; `None` at end of input.
pub fn read_line(input: &mut dyn BufRead) -> io::Result<Option<String>> {
    let mut buf = Vec::new();
    if input.read_until(b'\n', &mut buf)? == 0 {
        return Ok(None);
    }
    while matches!(buf.last(), Some(b'\n' | b'\r')) {
        buf.pop();
    }
    Ok(Some(String::from_utf8_lossy(&buf).into_owned()))
}

/// `target<TAB>score<TAB>status` for every input line.
pub fn cmd_translate(cfg: &RunConfig, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<(), CliError> {
    let model = load_model(&cfg.model_dir)?;
    let grammars = load_grammars(cfg)?;
    translate_stream(&model, &grammars, cfg, input, out)
}

pub fn translate_stream(
    model: &TrainedModel,
    grammars: &[Grammar],
    cfg: &RunConfig,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    while let Some(line) = read_line(input)? {
        writeln!(out, "{}", translate_line(model, grammars, cfg, &line).render())?;
    }
    out.flush()?;
    Ok(())
}

/// Score the saved model on the held-out side of the configured split.
pub fn cmd_evaluate(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let model = load_model(&cfg.model_dir)?;
    let grammars = load_grammars(cfg)?;
    let corpus = load_corpus(corpus_path(cfg)?, &grammars)?;
    let (_, test_part) = split(&corpus, cfg.test_fraction, cfg.seed)?;
    let mut text = String::new();
    for task in test_part.tasks() {
        let grammar = grammars
            .iter()
            .find(|g| g.task() == task)
            .ok_or(PipelineError::MissingGrammar(task))?;
        let pairs = pair_view(&test_part.for_task(task), cfg.mode).pairs;
        let hyps: Vec<Option<Sentence>> = pairs
            .iter()
            .map(|p| {
                model
                    .translate(&p.source, &cfg.decoder)
                    .ok()
                    .and_then(|t| t.derivation.target_sentence())
            })
            .collect();
        let hyp_refs: Vec<Option<&Sentence>> = hyps.iter().map(Option::as_ref).collect();
        let refs: Vec<Sentence> = pairs.iter().map(|p| p.target.clone()).collect();
        let report = evaluate(&hyp_refs, &refs, grammar).map_err(PipelineError::from)?;
        write_eval(&mut text, &format!("{task}.{}_to_r", cfg.mode), &report).expect("writing to a String");
    }
    out.write_all(text.as_bytes())?;
    Ok(())
}

/// Side-by-side (s, r) and (t, r) comparison per task.
pub fn cmd_stats(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let grammars = load_grammars(cfg)?;
    let corpus = load_corpus(corpus_path(cfg)?, &grammars)?;
    let report = compare_pipelines(&corpus, &grammars, &cfg.compare())?;
    write!(out, "{report}\n{}", report.key_values())?;
    Ok(())
}

/// Synthetic tuples for every configured grammar that has a paraphrase bank.
pub fn cmd_gen(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let grammars = load_grammars(cfg)?;
    let mut tuples = Vec::new();
    for g in &grammars {
        if let Some(bank) = g.bank() {
            let syn = gen_synthetic(g, bank, cfg.n_per_command, cfg.seed)?;
            tuples.extend(syn.corpus.tuples().iter().cloned());
        }
    }
    if tuples.is_empty() {
        return Err(CliError::Usage("no configured grammar has a paraphrase bank".into()));
    }
    out.write_all(format_tsv(&Corpus::new(tuples)?).as_bytes())?;
    Ok(())
}
