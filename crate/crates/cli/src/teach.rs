//! Interactive teaching loop.
//!
//! Each input line is translated and shown with its score. When the score
//! per source token falls below the threshold, or the output is not a
//! complete robot command, the user is asked for a paraphrase and the
//! intended robot command; the resulting `(s, t, r)` tuple is appended to the
//! session file straight away. `:retrain` rebuilds the model from the corpus
//! plus the session, `:quit` ends the loop.

use std::fs::{self, OpenOptions};
use std::io::{self, BufRead, Write};
use std::path::Path;

use robolex::corpus::pair_view;
use robolex::grammar::Grammar;
use robolex::pipeline::{train, TrainedModel};
use robolex::{tokenize, Corpus, ParallelTuple};

use crate::commands::{load_grammars, read_line, translate_line, CliError, LineResult};
use crate::config::RunConfig;
use crate::corpus_io::{format_tuple, read_tuples, CorpusFileError};
use crate::manifest::{sha256_hex, Manifest};
use crate::model_io::{load_model, save_model};

const PROMPT: &str = "> ";
const PARAPHRASE_PROMPT: &str = "paraphrase> ";
const ROBOT_PROMPT: &str = "robot> ";

pub struct Teacher<'a> {
    cfg: &'a RunConfig,
    grammars: Vec<Grammar>,
    model: TrainedModel,
    next_id: usize,
    appended: usize,
}

fn read_session(path: &Path) -> Result<Vec<ParallelTuple>, CliError> {
    match read_tuples(path) {
        Ok(t) => Ok(t),
        Err(CorpusFileError::NotFound(_)) => Ok(Vec::new()),
        Err(e) => Err(e.into()),
    }
}

impl<'a> Teacher<'a> {
    pub fn new(cfg: &'a RunConfig) -> Result<Self, CliError> {
        let model = load_model(&cfg.model_dir)?;
        let grammars = load_grammars(cfg)?;
        let next_id = read_session(&cfg.session)?.len() + 1;
        Ok(Teacher {
            cfg,
            grammars,
            model,
            next_id,
            appended: 0,
        })
    }

    /// Tuples appended during this run.
    pub fn appended(&self) -> usize {
        self.appended
    }

    pub fn model(&self) -> &TrainedModel {
        &self.model
    }

    /// Whether `result` is trusted without asking the user.
    pub fn confident(&self, result: &LineResult) -> bool {
        match result {
            LineResult::Translated {
                score,
                status,
                source_len,
                ..
            } => *status == "ok" && score / (*source_len).max(1) as f64 >= self.cfg.teach_threshold,
            LineResult::Failed(_) => false,
        }
    }

    pub fn run(&mut self, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<(), CliError> {
        loop {
            write!(out, "{PROMPT}")?;
            out.flush()?;
            let Some(line) = read_line(input)? else { break };
            let line = line.trim();
            match line {
                "" => continue,
                ":quit" => break,
                ":retrain" => {
                    let n = self.retrain()?;
                    writeln!(out, "retrained on {n} pairs")?;
                    continue;
                }
                _ => {}
            }
            let result = translate_line(&self.model, &self.grammars, self.cfg, line);
            writeln!(out, "{}", result.render())?;
            if self.confident(&result) {
                continue;
            }
            if !self.ask(line, input, out)? {
                break;
            }
        }
        if self.cfg.retrain_on_exit && self.appended > 0 {
            let n = self.retrain()?;
            writeln!(out, "retrained on {n} pairs")?;
        }
        Ok(())
    }

    /// Prompt for a paraphrase and a robot command. Returns `false` at end of
    /// input.
    fn ask(&mut self, source: &str, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<bool, CliError> {
        let Ok(s) = tokenize(source) else {
            return Ok(true);
        };
        write!(out, "{PARAPHRASE_PROMPT}")?;
        out.flush()?;
        let Some(paraphrase) = read_line(input)? else {
            return Ok(false);
        };
        let Ok(t) = tokenize(&paraphrase) else {
            writeln!(out, "skipped")?;
            return Ok(true);
        };
        loop {
            write!(out, "{ROBOT_PROMPT}")?;
            out.flush()?;
            let Some(robot) = read_line(input)? else {
                return Ok(false);
            };
            if robot.trim().is_empty() {
                writeln!(out, "skipped")?;
                return Ok(true);
            }
            let Ok(r) = tokenize(&robot) else { continue };
            match self.grammars.iter().find(|g| g.validate_robot(&r).is_ok()) {
                Some(g) => {
                    let tuple = ParallelTuple {
                        id: format!("session-{:04}", self.next_id),
                        task: g.task(),
                        s,
                        t,
                        r,
                    };
                    self.append(&tuple)?;
                    writeln!(out, "saved {}", tuple.id)?;
                    return Ok(true);
                }
                None => writeln!(out, "not a valid robot command: {robot}")?,
            }
        }
    }

    fn append(&mut self, tuple: &ParallelTuple) -> Result<(), CliError> {
        let mut file = OpenOptions::new().create(true).append(true).open(&self.cfg.session)?;
        file.write_all(format_tuple(tuple).as_bytes())?;
        file.sync_data()?;
        self.next_id += 1;
        self.appended += 1;
        Ok(())
    }

    /// Train on the configured corpus plus every session tuple, save the
    /// model, and return the number of training pairs.
    pub fn retrain(&mut self) -> Result<usize, CliError> {
        let mut bytes = Vec::new();
        let mut tuples = Vec::new();
        if let Some(path) = &self.cfg.corpus {
            bytes.extend(fs::read(path).map_err(|e| match e.kind() {
                io::ErrorKind::NotFound => CorpusFileError::NotFound(path.display().to_string()),
                _ => e.into(),
            })?);
            tuples.extend(read_tuples(path)?);
        }
        if let Ok(session) = fs::read(&self.cfg.session) {
            bytes.extend(session);
        }
        tuples.extend(read_session(&self.cfg.session)?);
        let corpus = Corpus::new(tuples)?;
        corpus.validate(&self.grammars)?;
        let pairs = pair_view(&corpus, self.cfg.mode).pairs;
        let model = train(&pairs, &self.cfg.train)?;
        save_model(&self.cfg.model_dir, &model)?;
        Manifest {
            config: self.cfg.clone(),
            corpus_sha256: sha256_hex(&bytes),
            train_pairs: pairs.len(),
            stats: model.table.stats(),
        }
        .write(&self.cfg.model_dir)?;
        self.model = model;
        Ok(pairs.len())
    }
}

pub fn cmd_teach(cfg: &RunConfig, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<(), CliError> {
    Teacher::new(cfg)?.run(input, out)
}
