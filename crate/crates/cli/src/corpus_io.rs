//! Corpus files: tab-separated `id task s t r` records, or JSON lines with the
//! same keys.

use std::fs;
use std::io;
use std::path::Path;

use robolex::corpus::CorpusError;
use robolex::grammar::Grammar;
use robolex::{tokenize, Corpus, ParallelTuple, Task};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusFileError {
    #[error("corpus not found: {0}")]
    NotFound(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    id: String,
    task: String,
    s: String,
    t: String,
    r: String,
}

fn record_to_tuple(rec: Record, line: usize) -> Result<ParallelTuple, CorpusFileError> {
    let err = |msg: String| CorpusFileError::Parse { line, msg };
    if rec.id.trim().is_empty() {
        return Err(err("empty id".into()));
    }
    let task: Task = rec.task.trim().parse().map_err(|e: CorpusError| err(e.to_string()))?;
    let field = |name: &str, text: &str| tokenize(text).map_err(|e| err(format!("field {name}: {e}")));
    Ok(ParallelTuple {
        id: rec.id.trim().to_string(),
        task,
        s: field("s", &rec.s)?,
        t: field("t", &rec.t)?,
        r: field("r", &rec.r)?,
    })
}

/// Tab-separated records; blank lines are skipped, line numbers are 1-based.
pub fn parse_tsv(text: &str) -> Result<Vec<ParallelTuple>, CorpusFileError> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(CorpusFileError::Parse {
                line: k + 1,
                msg: format!("expected 5 tab-separated fields, found {}", fields.len()),
            });
        }
        let rec = Record {
            id: fields[0].into(),
            task: fields[1].into(),
            s: fields[2].into(),
            t: fields[3].into(),
            r: fields[4].into(),
        };
        out.push(record_to_tuple(rec, k + 1)?);
    }
    Ok(out)
}

pub fn parse_jsonl(text: &str) -> Result<Vec<ParallelTuple>, CorpusFileError> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(line).map_err(|e| CorpusFileError::Parse {
            line: k + 1,
            msg: e.to_string(),
        })?;
        out.push(record_to_tuple(rec, k + 1)?);
    }
    Ok(out)
}

/// One record per line in the tab-separated format.
pub fn format_tuple(t: &ParallelTuple) -> String {
    format!("{}\t{}\t{}\t{}\t{}\n", t.id, t.task, t.s, t.t, t.r)
}

pub fn format_tsv(corpus: &Corpus) -> String {
    corpus.iter().map(format_tuple).collect()
}

pub fn format_jsonl(corpus: &Corpus) -> String {
    let mut out = String::new();
    for t in corpus {
        let rec = Record {
            id: t.id.clone(),
            task: t.task.to_string(),
            s: t.s.to_string(),
            t: t.t.to_string(),
            r: t.r.to_string(),
        };
        out.push_str(&serde_json::to_string(&rec).expect("plain strings serialize"));
        out.push('\n');
    }
    out
}

/// Parse by extension (`.jsonl` or `.json` for JSON lines, anything else
/// tab-separated) without grammar checks.
pub fn read_tuples(path: &Path) -> Result<Vec<ParallelTuple>, CorpusFileError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            return Err(CorpusFileError::NotFound(path.display().to_string()))
        }
        Err(e) => return Err(e.into()),
    };
    match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl" | "json") => parse_jsonl(&text),
        _ => parse_tsv(&text),
    }
}

/// Read a corpus file and validate every `r` against its task's grammar.
pub fn load_corpus(path: &Path, grammars: &[Grammar]) -> Result<Corpus, CorpusFileError> {
    let corpus = Corpus::new(read_tuples(path)?)?;
    corpus.validate(grammars)?;
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;

    const NAV: &str = "n1\tnavigation\tGo to the Car.\tnavigate to the car\tnavigate to the car\n\
                       \n\
                       n2\tnavigation\tfind the house\tgo to the building\tnavigate to the building\n";

    #[test]
    fn tsv_round_trip() {
        let tuples = parse_tsv(NAV).unwrap();
        assert_eq!(tuples.len(), 2);
        assert_eq!(tuples[0].s.to_string(), "go to the car .");
        let corpus = Corpus::new(tuples).unwrap();
        let text = format_tsv(&corpus);
        assert_eq!(parse_tsv(&text).unwrap(), corpus.tuples());
        assert_eq!(format_tsv(&Corpus::new(parse_tsv(&text).unwrap()).unwrap()), text);
    }

    #[test]
    fn jsonl_matches_tsv() {
        let corpus = Corpus::new(parse_tsv(NAV).unwrap()).unwrap();
        let json = format_jsonl(&corpus);
        assert_eq!(parse_jsonl(&json).unwrap(), corpus.tuples());
    }

    #[test]
    fn four_fields_is_a_parse_error() {
        let err = parse_tsv("a\tnavigation\tx\ty\n").unwrap_err();
        assert!(matches!(err, CorpusFileError::Parse { line: 1, .. }));
        let err = parse_tsv("\n\nb\tcooking\tx\ty\tz\n").unwrap_err();
        assert!(matches!(err, CorpusFileError::Parse { line: 3, .. }));
    }

    #[test]
    fn empty_file_is_empty_corpus() {
        assert!(parse_tsv("").unwrap().is_empty());
        assert!(parse_tsv("\n  \n").unwrap().is_empty());
    }

    #[test]
    fn invalid_r_is_rejected_on_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.tsv");
        fs::write(&path, "x\tnavigation\tgo\tgo\tnavigate to the moon\n").unwrap();
        let err = load_corpus(&path, &[Grammar::navigation()]).unwrap_err();
        match err {
            CorpusFileError::Corpus(CorpusError::GrammarViolation { r, .. }) => {
                assert_eq!(r, "navigate to the moon")
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_file() {
        let err = load_corpus(Path::new("/nonexistent/c.tsv"), &[]).unwrap_err();
        assert!(err.to_string().starts_with("corpus not found"));
    }
}
