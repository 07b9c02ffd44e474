//! Run configuration: flat `key = value` text, one setting per line.
//!
//! ```text
//! corpus = data/nav.tsv
//! grammars = navigation, grammars/kitchen.grammar
//! mode = both
//! beam_size = 200
//! distortion_limit = none
//! lambda = 0.7 0.2 0.09 0.01
//! ```
//!
//! Unknown keys are errors. [`RunConfig::render`] writes every key in a fixed
//! order.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use robolex::decoder::{DecoderConfig, UnknownPolicy, Weights, DEFAULT_UNK_PENALTY};
use robolex::lm::Lambdas;
use robolex::pipeline::{CompareConfig, TrainConfig};
use robolex::PairMode;
use thiserror::Error;

pub const DEFAULT_TEACH_THRESHOLD: f64 = -3.0;

#[derive(Debug, Error)]
pub enum ConfigFileError {
    #[error("config not found: {0}")]
    NotFound(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{key}: {msg}")]
    Value { key: String, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub grammars: Vec<String>,
    pub model_dir: PathBuf,
    pub mode: PairMode,
    pub seed: u64,
    pub test_fraction: f64,
    pub train: TrainConfig,
    pub decoder: DecoderConfig,
    /// Per-source-token score below which teach mode asks for a paraphrase.
    pub teach_threshold: f64,
    pub session: PathBuf,
    pub retrain_on_exit: bool,
    pub n_per_command: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus: None,
            grammars: vec!["navigation".into()],
            model_dir: PathBuf::from("model"),
            mode: PairMode::SToR,
            seed: 0,
            test_fraction: 0.2,
            train: TrainConfig::default(),
            decoder: DecoderConfig::default(),
            teach_threshold: DEFAULT_TEACH_THRESHOLD,
            session: PathBuf::from("session.tsv"),
            retrain_on_exit: false,
            n_per_command: 4,
        }
    }
}

fn value_err(key: &str, msg: impl ToString) -> ConfigFileError {
    ConfigFileError::Value {
        key: key.into(),
        msg: msg.to_string(),
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigFileError>
where
    T::Err: ToString,
{
    value.parse().map_err(|e: T::Err| value_err(key, e.to_string()))
}

fn finite(key: &str, value: &str) -> Result<f64, ConfigFileError> {
    let x: f64 = num(key, value)?;
    if !x.is_finite() {
        return Err(value_err(key, "must be finite"));
    }
    Ok(x)
}

fn positive(key: &str, value: &str) -> Result<usize, ConfigFileError> {
    let x: usize = num(key, value)?;
    if x == 0 {
        return Err(value_err(key, "must be at least 1"));
    }
    Ok(x)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigFileError> {
        let mut cfg = RunConfig::default();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigFileError::Syntax {
                line: k + 1,
                msg: format!("expected `key = value`, found {line:?}"),
            })?;
            cfg.set(key.trim(), value.trim()).map_err(|e| ConfigFileError::Syntax {
                line: k + 1,
                msg: e.to_string(),
            })?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigFileError> {
        match fs::read_to_string(path) {
            Ok(text) => Self::parse(&text),
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                Err(ConfigFileError::NotFound(path.display().to_string()))
            }
            Err(e) => Err(e.into()),
        }
    }

    /// Apply one setting, validating its range.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigFileError> {
        match key {
            "corpus" => self.corpus = (!value.is_empty()).then(|| PathBuf::from(value)),
            "grammars" => {
                let list: Vec<String> = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect();
                if list.is_empty() {
                    return Err(value_err(key, "needs at least one grammar"));
                }
                self.grammars = list;
            }
            "model_dir" => self.model_dir = PathBuf::from(value),
            "mode" => self.mode = value.parse().map_err(|e: String| value_err(key, e))?,
            "seed" => self.seed = num(key, value)?,
            "test_fraction" => {
                let x = finite(key, value)?;
                if !(0.0..1.0).contains(&x) {
                    return Err(value_err(key, "must be in [0, 1)"));
                }
                self.test_fraction = x;
            }
            "align_iterations" => self.train.align_iterations = positive(key, value)?,
            "max_phrase_len" => self.train.max_phrase_len = positive(key, value)?,
            "lambda" => {
                let parts: Vec<f64> = value
                    .split_whitespace()
                    .map(|v| finite(key, v))
                    .collect::<Result<_, _>>()?;
                let [a, b, c, d] = parts[..] else {
                    return Err(value_err(key, "expects four weights"));
                };
                let sum = a + b + c + d;
                if parts.iter().any(|x| *x < 0.0) || (sum - 1.0).abs() > 1e-9 {
                    return Err(value_err(key, "weights must be non-negative and sum to 1"));
                }
                self.train.lambdas = Lambdas::new(a, b, c, d);
            }
            "beam_size" => self.decoder.beam_size = positive(key, value)?,
            "distortion_limit" => {
                self.decoder.distortion_limit = match value {
                    "none" | "" => None,
                    v => Some(num(key, v)?),
                }
            }
            "w_h" => self.decoder.weights.lm = finite(key, value)?,
            "w_g" => self.decoder.weights.tm = finite(key, value)?,
            "w_d" => self.decoder.weights.distortion = finite(key, value)?,
            "unknown" => {
                self.decoder.unknown = match value {
                    "pass" | "pass_through" => UnknownPolicy::PassThrough {
                        penalty: self.unk_penalty().unwrap_or(DEFAULT_UNK_PENALTY),
                    },
                    "none" | "disabled" => UnknownPolicy::Disabled,
                    other => return Err(value_err(key, format!("unknown policy {other:?}"))),
                }
            }
            "unk_penalty" => {
                let penalty = finite(key, value)?;
                if let UnknownPolicy::PassThrough { penalty: p } = &mut self.decoder.unknown {
                    *p = penalty;
                } else {
                    return Err(value_err(key, "pass-through is disabled"));
                }
            }
            "oracle_limit" => self.decoder.oracle_limit = num(key, value)?,
            "teach_threshold" => self.teach_threshold = finite(key, value)?,
            "session" => self.session = PathBuf::from(value),
            "retrain_on_exit" => self.retrain_on_exit = num(key, value)?,
            "n_per_command" => self.n_per_command = positive(key, value)?,
            other => return Err(value_err(other, "unknown key")),
        }
        Ok(())
    }

    fn unk_penalty(&self) -> Option<f64> {
        match self.decoder.unknown {
            UnknownPolicy::PassThrough { penalty } => Some(penalty),
            UnknownPolicy::Disabled => None,
        }
    }

    pub fn compare(&self) -> CompareConfig {
        CompareConfig {
            train: self.train,
            decoder: self.decoder,
            test_fraction: self.test_fraction,
            seed: self.seed,
        }
    }

    /// Every setting, one per line, in a fixed order; parses back to `self`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            writeln!(out, "{k} = {v}").expect("writing to a String");
        };
        kv("corpus", self.corpus.as_ref().map(|p| p.display().to_string()).unwrap_or_default());
        kv("grammars", self.grammars.join(", "));
        kv("model_dir", self.model_dir.display().to_string());
        kv("mode", self.mode.to_string());
        kv("seed", self.seed.to_string());
        kv("test_fraction", self.test_fraction.to_string());
        kv("align_iterations", self.train.align_iterations.to_string());
        kv("max_phrase_len", self.train.max_phrase_len.to_string());
        let l = self.train.lambdas;
        kv("lambda", format!("{} {} {} {}", l.trigram, l.bigram, l.unigram, l.uniform));
        kv("beam_size", self.decoder.beam_size.to_string());
        kv(
            "distortion_limit",
            self.decoder.distortion_limit.map_or("none".into(), |d| d.to_string()),
        );
        let Weights { lm, tm, distortion } = self.decoder.weights;
        kv("w_h", lm.to_string());
        kv("w_g", tm.to_string());
        kv("w_d", distortion.to_string());
        match self.unk_penalty() {
            Some(p) => {
                kv("unknown", "pass".into());
                kv("unk_penalty", p.to_string());
            }
            None => kv("unknown", "none".into()),
        }
        kv("oracle_limit", self.decoder.oracle_limit.to_string());
        kv("teach_threshold", self.teach_threshold.to_string());
        kv("session", self.session.display().to_string());
        kv("retrain_on_exit", self.retrain_on_exit.to_string());
        kv("n_per_command", self.n_per_command.to_string());
        out
    }
}
