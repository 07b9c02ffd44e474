//! Grammar config files.
//!
//! ```text
//! task = navigation
//!
//! [frame]
//! suffix = to
//! determiner = the
//! relative = that is
//!
//! [actions]
//! navigate
//!
//! [objects]
//! traffic barrel
//! car
//!
//! [relations]
//! back
//!
//! [surfaces]
//! back = behind
//! back = on the back of
//!
//! [paraphrase_bank]
//! action navigate = go to
//! object car = the vehicle
//! relation back = at the back of
//! ```
//!
//! Lists hold one lowercase phrase per line. The first surface listed for a
//! relation is its canonical realization. Leaving out `[relations]` disables
//! relational commands; `#` starts a comment.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use robolex::grammar::{Concept, ConceptInventory, ConfigError, Grammar, ParaphraseBank, Slot, SurfaceTemplate};
use robolex::text::{words, Token};
use robolex::Task;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GrammarFileError {
    #[error("grammar not found: {0}")]
    NotFound(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Top,
    Frame,
    Actions,
    Objects,
    Relations,
    Surfaces,
    Bank,
}

fn phrase(text: &str, line: usize) -> Result<Vec<Token>, GrammarFileError> {
    words(text).map_err(|e| GrammarFileError::Syntax {
        line,
        msg: e.to_string(),
    })
}

fn concept(text: &str, line: usize) -> Result<Concept, GrammarFileError> {
    Concept::new(text).map_err(|e| GrammarFileError::Syntax {
        line,
        msg: e.to_string(),
    })
}

fn key_value(text: &str, line: usize) -> Result<(&str, &str), GrammarFileError> {
    let (k, v) = text.split_once('=').ok_or(GrammarFileError::Syntax {
        line,
        msg: format!("expected `key = value`, found {text:?}"),
    })?;
    Ok((k.trim(), v.trim()))
}

pub fn parse_grammar(text: &str) -> Result<Grammar, GrammarFileError> {
    let mut section = Section::Top;
    let mut task = None;
    let (mut suffix, mut determiner, mut relative) = (None, None, None);
    let (mut actions, mut objects) = (Vec::new(), Vec::new());
    let mut relations: Option<Vec<Concept>> = None;
    let mut surfaces: BTreeMap<Concept, Vec<Vec<Token>>> = BTreeMap::new();
    let mut bank = ParaphraseBank::new();
    let mut has_bank = false;

    for (k, raw) in text.lines().enumerate() {
        let n = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = match name.trim() {
                "frame" => Section::Frame,
                "actions" => Section::Actions,
                "objects" => Section::Objects,
                "relations" => {
                    relations.get_or_insert_with(Vec::new);
                    Section::Relations
                }
                "surfaces" => Section::Surfaces,
                "paraphrase_bank" => {
                    has_bank = true;
                    Section::Bank
                }
                other => {
                    return Err(GrammarFileError::Syntax {
                        line: n,
                        msg: format!("unknown section [{other}]"),
                    })
                }
            };
            continue;
        }
        match section {
            Section::Top => {
                let (key, value) = key_value(line, n)?;
                if key != "task" {
                    return Err(GrammarFileError::Syntax {
                        line: n,
                        msg: format!("unknown key {key:?}"),
                    });
                }
                task = Some(value.parse::<Task>().map_err(|e| GrammarFileError::Syntax {
                    line: n,
                    msg: e.to_string(),
                })?);
            }
            Section::Frame => {
                let (key, value) = key_value(line, n)?;
                let tokens = if value.is_empty() { Vec::new() } else { phrase(value, n)? };
                match key {
                    "suffix" => suffix = Some(tokens),
                    "determiner" => determiner = Some(tokens),
                    "relative" => relative = Some(tokens),
                    other => {
                        return Err(GrammarFileError::Syntax {
                            line: n,
                            msg: format!("unknown frame key {other:?}"),
                        })
                    }
                }
            }
            Section::Actions => actions.push(concept(line, n)?),
            Section::Objects => objects.push(concept(line, n)?),
            Section::Relations => relations.get_or_insert_with(Vec::new).push(concept(line, n)?),
            Section::Surfaces => {
                let (rel, surface) = key_value(line, n)?;
                surfaces.entry(concept(rel, n)?).or_default().push(phrase(surface, n)?);
            }
            Section::Bank => {
                let (lhs, variant) = key_value(line, n)?;
                let (slot, name) = lhs.split_once(char::is_whitespace).ok_or(GrammarFileError::Syntax {
                    line: n,
                    msg: format!("expected `<slot> <concept> = <variant>`, found {line:?}"),
                })?;
                let slot = match slot {
                    "action" => Slot::Action,
                    "object" => Slot::Object,
                    "relation" => Slot::Relation,
                    other => {
                        return Err(GrammarFileError::Syntax {
                            line: n,
                            msg: format!("unknown slot {other:?}"),
                        })
                    }
                };
                bank.add(slot, concept(name, n)?, phrase(variant, n)?);
            }
        }
    }

    let task = task.ok_or(GrammarFileError::Syntax {
        line: 0,
        msg: "missing `task = ...`".into(),
    })?;
    let inventory = ConceptInventory::new(task, actions, objects, relations)?;
    let mut template = SurfaceTemplate::new(surfaces);
    if let Some(s) = suffix {
        template.action_suffix = s;
    }
    if let Some(d) = determiner {
        template.determiner = d;
    }
    if let Some(r) = relative {
        template.relative = r;
    }
    Ok(Grammar::new(inventory, template, has_bank.then_some(bank))?)
}

const MANIPULATION: &str = include_str!("../grammars/manipulation.grammar");

/// A built-in grammar name (`navigation`, `manipulation`) or the path of a
/// grammar file.
pub fn load_grammar(name: &str) -> Result<Grammar, GrammarFileError> {
    if let Ok(g) = Grammar::builtin(name) {
        return Ok(g);
    }
    if name == "manipulation" {
        return parse_grammar(MANIPULATION);
    }
    let path = Path::new(name);
    match fs::read_to_string(path) {
        Ok(text) => parse_grammar(&text),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Err(GrammarFileError::NotFound(name.into())),
        Err(e) => Err(e.into()),
    }
}
