//! Text dumps of trained models.
//!
//! Phrase table, one pair per line:
//!
//! ```text
//! to the left of ||| on the left of ||| 3 ||| -0.287682072452
//! ```
//!
//! The last field is informational; scores are recomputed from the counts on
//! load. The language model dump starts with a `lambda` line followed by
//! `order<TAB>ngram<TAB>count` rows.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use robolex::lm::{Lambdas, NgramCount, TrigramModel};
use robolex::phrase_table::PhraseTable;
use robolex::pipeline::TrainedModel;
use robolex::text::{join, words, Token};
use thiserror::Error;

pub const TABLE_FILE: &str = "phrases.txt";
pub const LM_FILE: &str = "lm.txt";

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("model not found: {0}")]
    NotFound(String),
    #[error("{file}:{line}: {msg}")]
    Format { file: &'static str, line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn format_err(file: &'static str, line: usize, msg: impl ToString) -> ModelFileError {
    ModelFileError::Format {
        file,
        line,
        msg: msg.to_string(),
    }
}

pub fn write_table(table: &PhraseTable) -> String {
    let mut out = String::new();
    for (src, entry) in table.iter() {
        writeln!(out, "{} ||| {} ||| {} ||| {:.12}", join(src), join(&entry.target), entry.count, entry.g)
            .expect("writing to a String");
    }
    out
}

pub fn parse_table(text: &str) -> Result<PhraseTable, ModelFileError> {
    let mut counts: Vec<(Vec<Token>, Vec<Token>, u64)> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| format_err(TABLE_FILE, k + 1, msg);
        let fields: Vec<&str> = line.split("|||").map(str::trim).collect();
        if fields.len() != 4 {
            return Err(err(format!("expected 4 `|||`-separated fields, found {}", fields.len())));
        }
        let src = words(fields[0]).map_err(|e| err(e.to_string()))?;
        let tgt = words(fields[1]).map_err(|e| err(e.to_string()))?;
        let count = fields[2]
            .parse::<u64>()
            .map_err(|e| err(format!("count {:?}: {e}", fields[2])))?;
        counts.push((src, tgt, count));
    }
    PhraseTable::from_counts(counts).map_err(|e| format_err(TABLE_FILE, 0, e))
}

pub fn write_lm(lm: &TrigramModel) -> String {
    let l = lm.lambdas();
    let mut out = format!("lambda\t{}\t{}\t{}\t{}\n", l.trigram, l.bigram, l.unigram, l.uniform);
    for c in lm.counts() {
        writeln!(out, "{}\t{}\t{}", c.order, c.words.join(" "), c.count).expect("writing to a String");
    }
    out
}

pub fn parse_lm(text: &str) -> Result<TrigramModel, ModelFileError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| format_err(LM_FILE, 1, "empty file"))?;
    let fields: Vec<&str> = header.split('\t').collect();
    if fields.len() != 5 || fields[0] != "lambda" {
        return Err(format_err(LM_FILE, 1, "expected `lambda` header with four weights"));
    }
    let mut l = [0.0; 4];
    for (slot, f) in l.iter_mut().zip(&fields[1..]) {
        *slot = f
            .parse()
            .map_err(|e| format_err(LM_FILE, 1, format!("weight {f:?}: {e}")))?;
    }
    let mut counts = Vec::new();
    for (k, line) in lines {
        let err = |msg: String| format_err(LM_FILE, k + 1, msg);
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(err(format!("expected 3 tab-separated fields, found {}", fields.len())));
        }
        let order = fields[0].parse().map_err(|e| err(format!("order: {e}")))?;
        let count = fields[2].parse().map_err(|e| err(format!("count: {e}")))?;
        counts.push(NgramCount {
            order,
            words: fields[1].split(' ').map(str::to_string).collect(),
            count,
        });
    }
    TrigramModel::from_counts(Lambdas::new(l[0], l[1], l[2], l[3]), &counts).map_err(|e| format_err(LM_FILE, 0, e))
}

pub fn save_model(dir: &Path, model: &TrainedModel) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(TABLE_FILE), write_table(&model.table))?;
    fs::write(dir.join(LM_FILE), write_lm(&model.lm))
}

fn read(dir: &Path, name: &str) -> Result<String, ModelFileError> {
    let path = dir.join(name);
    fs::read_to_string(&path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => ModelFileError::NotFound(path.display().to_string()),
        _ => e.into(),
    })
}

pub fn load_model(dir: &Path) -> Result<TrainedModel, ModelFileError> {
    Ok(TrainedModel {
        table: parse_table(&read(dir, TABLE_FILE)?)?,
        lm: parse_lm(&read(dir, LM_FILE)?)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use robolex::corpus::{pair_view, PairMode};
    use robolex::grammar::{gen_synthetic, Grammar};
    use robolex::pipeline::{train, TrainConfig};

    fn model() -> TrainedModel {
        let g = Grammar::navigation();
        let syn = gen_synthetic(&g, g.bank().unwrap(), 1, 3).unwrap();
        train(&pair_view(&syn.corpus, PairMode::SToR).pairs, &TrainConfig::default()).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let m = model();
        let dir = tempfile::tempdir().unwrap();
        save_model(dir.path(), &m).unwrap();
        let back = load_model(dir.path()).unwrap();
        assert_eq!(back.table, m.table);
        assert_eq!(back.lm, m.lm);
        assert_eq!(write_table(&back.table), write_table(&m.table));
    }

    #[test]
    fn table_scores_recomputed() {
        let t = parse_table("a b ||| x ||| 1 ||| 0\na b ||| y ||| 3 ||| 0\n").unwrap();
        let src = words("a b").unwrap();
        let c = t.candidates(&src);
        assert_eq!(join(&c[0].target), "y");
        assert!((c[0].g - (0.75f64).ln()).abs() < 1e-15);
    }

    #[test]
    fn bad_lines_report_position() {
        let err = parse_table("a ||| b ||| 1 ||| 0\na ||| b ||| x ||| 0\n").unwrap_err();
        assert!(matches!(err, ModelFileError::Format { line: 2, .. }));
        let err = parse_lm("lambda\t0.7\t0.2\t0.09\t0.01\n1\tcar\n").unwrap_err();
        assert!(matches!(err, ModelFileError::Format { line: 2, .. }));
        let err = parse_lm("lambda\t0.5\t0.2\t0.09\t0.01\n1\tcar\t2\n").unwrap_err();
        assert!(matches!(err, ModelFileError::Format { line: 0, .. }));
    }

    #[test]
    fn missing_model_dir() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_model(dir.path()), Err(ModelFileError::NotFound(_))));
    }
}
