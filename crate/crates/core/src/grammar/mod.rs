//! The robot command language.
//!
//! A task grammar is a [`ConceptInventory`] (actions, objects, relations)
//! plus a [`SurfaceTemplate`] that fixes how commands are written out. Every
//! command has exactly one canonical realization:
//!
//! ```text
//! <action> to the <object1>
//! <action> to the <object1> that is <relation phrase> the <object2>
//! ```
//!
//! Parsing accepts the canonical phrases and any relation synonyms listed in
//! the template, so `parse(realize(c)) == [c]` for every enumerable command.

mod parse;
mod synth;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::corpus::Task;
use crate::text::{self, Sentence, Token};

pub use parse::{parse_robot, RobotParse};
pub use synth::{gen_synthetic, Fragment, ParaphraseBank, Slot, SyntheticCorpus};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("concept list [{0}] is empty")]
    EmptyList(&'static str),
    #[error("concept {0:?} listed more than once")]
    DuplicateConcept(String),
    #[error("relation {0:?} has no surface phrase")]
    MissingSurface(String),
    #[error("surface phrase {0:?} maps to more than one relation")]
    AmbiguousSurface(String),
    #[error("surface given for unknown relation {0:?}")]
    SurfaceForUnknownRelation(String),
    #[error("invalid concept text {0:?}")]
    InvalidConcept(String),
    #[error("no built-in grammar named {0:?}")]
    UnknownBuiltin(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("concept {0:?} is not in the inventory")]
    UnknownConcept(String),
    #[error("no command frame matches")]
    NoParse,
    #[error("unparsed trailing tokens {0:?}")]
    Residue(String),
    #[error("paraphrase bank has no variants for {0}")]
    BankGap(String),
}

/// A concept name: a short lowercase token sequence such as `traffic barrel`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Concept(Vec<Token>);

impl Concept {
    pub fn new(text: &str) -> Result<Self, ConfigError> {
        text::words(text)
            .map(Concept)
            .map_err(|_| ConfigError::InvalidConcept(text.to_string()))
    }

    pub fn tokens(&self) -> &[Token] {
        &self.0
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::join(&self.0))
    }
}

/// The key concepts of one task domain.
///
/// `relations` is `None` when the task has no relational frame at all; a
/// present-but-empty relation list is a configuration error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptInventory {
    task: Task,
    actions: Vec<Concept>,
    objects: Vec<Concept>,
    relations: Option<Vec<Concept>>,
}

impl ConceptInventory {
    pub fn new(
        task: Task,
        actions: Vec<Concept>,
        objects: Vec<Concept>,
        relations: Option<Vec<Concept>>,
    ) -> Result<Self, ConfigError> {
        if actions.is_empty() {
            return Err(ConfigError::EmptyList("actions"));
        }
        if objects.is_empty() {
            return Err(ConfigError::EmptyList("objects"));
        }
        if relations.as_ref().is_some_and(Vec::is_empty) {
            return Err(ConfigError::EmptyList("relations"));
        }
        let mut seen = BTreeSet::new();
        let all = actions
            .iter()
            .chain(&objects)
            .chain(relations.iter().flatten());
        for c in all {
            if !seen.insert(c) {
                return Err(ConfigError::DuplicateConcept(c.to_string()));
            }
        }
        Ok(ConceptInventory {
            task,
            actions,
            objects,
            relations,
        })
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn actions(&self) -> &[Concept] {
        &self.actions
    }

    pub fn objects(&self) -> &[Concept] {
        &self.objects
    }

    /// Relation concepts; empty when relational commands are disabled.
    pub fn relations(&self) -> &[Concept] {
        self.relations.as_deref().unwrap_or(&[])
    }

    pub fn has_relations(&self) -> bool {
        self.relations.is_some()
    }

    pub fn contains_action(&self, c: &Concept) -> bool {
        self.actions.contains(c)
    }

    pub fn contains_object(&self, c: &Concept) -> bool {
        self.objects.contains(c)
    }

    pub fn contains_relation(&self, c: &Concept) -> bool {
        self.relations().contains(c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationClause {
    pub relation: Concept,
    pub object: Concept,
}

/// `(action, object1, relation?, object2?)`; relation and object2 come as a pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RobotCommand {
    pub action: Concept,
    pub object: Concept,
    pub clause: Option<RelationClause>,
}

impl RobotCommand {
    pub fn simple(action: Concept, object: Concept) -> Self {
        RobotCommand {
            action,
            object,
            clause: None,
        }
    }

    pub fn relational(action: Concept, object: Concept, relation: Concept, other: Concept) -> Self {
        RobotCommand {
            action,
            object,
            clause: Some(RelationClause {
                relation,
                object: other,
            }),
        }
    }

    pub fn relation(&self) -> Option<&Concept> {
        self.clause.as_ref().map(|c| &c.relation)
    }

    pub fn object2(&self) -> Option<&Concept> {
        self.clause.as_ref().map(|c| &c.object)
    }
}

impl fmt::Display for RobotCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.clause {
            Some(c) => write!(
                f,
                "({}, {}, {}, {})",
                self.action, self.object, c.relation, c.object
            ),
            None => write!(f, "({}, {}, -, -)", self.action, self.object),
        }
    }
}

/// Frame words and relation surface phrases.
///
/// The first phrase listed for a relation is its canonical realization; any
/// further phrases are accepted only when parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceTemplate {
    pub action_suffix: Vec<Token>,
    pub determiner: Vec<Token>,
    pub relative: Vec<Token>,
    surfaces: BTreeMap<Concept, Vec<Vec<Token>>>,
}

impl SurfaceTemplate {
    /// Template with the standard frame words `to`, `the`, `that is`.
    pub fn new(surfaces: BTreeMap<Concept, Vec<Vec<Token>>>) -> Self {
        SurfaceTemplate {
            action_suffix: vec![tok("to")],
            determiner: vec![tok("the")],
            relative: vec![tok("that"), tok("is")],
            surfaces,
        }
    }

    pub fn canonical(&self, relation: &Concept) -> Option<&[Token]> {
        self.surfaces
            .get(relation)
            .and_then(|v| v.first())
            .map(Vec::as_slice)
    }

    pub fn surfaces(&self) -> &BTreeMap<Concept, Vec<Vec<Token>>> {
        &self.surfaces
    }

    fn check(&self, inventory: &ConceptInventory) -> Result<(), ConfigError> {
        for rel in inventory.relations() {
            if self.surfaces.get(rel).is_none_or(Vec::is_empty) {
                return Err(ConfigError::MissingSurface(rel.to_string()));
            }
        }
        let mut owner: BTreeMap<&[Token], &Concept> = BTreeMap::new();
        for (rel, phrases) in &self.surfaces {
            if !inventory.contains_relation(rel) {
                return Err(ConfigError::SurfaceForUnknownRelation(rel.to_string()));
            }
            for p in phrases {
                if let Some(prev) = owner.insert(p.as_slice(), rel) {
                    if prev != rel {
                        return Err(ConfigError::AmbiguousSurface(text::join(p)));
                    }
                }
            }
        }
        Ok(())
    }
}

fn tok(s: &str) -> Token {
    Token::new(s).expect("static token")
}

fn phrase(s: &str) -> Vec<Token> {
    text::words(s).expect("static phrase")
}

fn concept(s: &str) -> Concept {
    Concept::new(s).expect("static concept")
}

/// Inventory, template, and optionally a paraphrase bank for one task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    inventory: ConceptInventory,
    template: SurfaceTemplate,
    bank: Option<ParaphraseBank>,
}

impl Grammar {
    pub fn new(
        inventory: ConceptInventory,
        template: SurfaceTemplate,
        bank: Option<ParaphraseBank>,
    ) -> Result<Self, ConfigError> {
        template.check(&inventory)?;
        Ok(Grammar {
            inventory,
            template,
            bank,
        })
    }

    /// Built-in grammars by name. Only `navigation` ships built in.
    pub fn builtin(name: &str) -> Result<Self, ConfigError> {
        match name {
            "navigation" => Ok(Self::navigation()),
            other => Err(ConfigError::UnknownBuiltin(other.to_string())),
        }
    }

    /// Navigation: navigate; traffic barrel, building, car; left, right, front, back.
    pub fn navigation() -> Self {
        let inventory = ConceptInventory::new(
            Task::Navigation,
            vec![concept("navigate")],
            vec![concept("traffic barrel"), concept("building"), concept("car")],
            Some(vec![
                concept("left"),
                concept("right"),
                concept("front"),
                concept("back"),
            ]),
        )
        .expect("navigation inventory");
        let mut surfaces = BTreeMap::new();
        surfaces.insert(
            concept("left"),
            vec![phrase("on the left of"), phrase("to the left of")],
        );
        surfaces.insert(
            concept("right"),
            vec![phrase("on the right of"), phrase("to the right of")],
        );
        surfaces.insert(
            concept("front"),
            vec![
                phrase("in front of"),
                phrase("before"),
                phrase("on the front of"),
            ],
        );
        surfaces.insert(
            concept("back"),
            vec![phrase("behind"), phrase("on the back of")],
        );
        let template = SurfaceTemplate::new(surfaces);
        Grammar::new(inventory, template, Some(synth::navigation_bank())).expect("navigation grammar")
    }

    pub fn task(&self) -> Task {
        self.inventory.task
    }

    pub fn inventory(&self) -> &ConceptInventory {
        &self.inventory
    }

    pub fn template(&self) -> &SurfaceTemplate {
        &self.template
    }

    pub fn bank(&self) -> Option<&ParaphraseBank> {
        self.bank.as_ref()
    }

    pub fn realize(&self, cmd: &RobotCommand) -> Result<Sentence, GrammarError> {
        realize(cmd, &self.inventory, &self.template)
    }

    pub fn parse(&self, sent: &Sentence) -> Result<RobotParse, GrammarError> {
        parse_robot(sent, &self.inventory, &self.template)
    }

    /// A valid robot-language string parses completely, with no residue.
    pub fn validate_robot(&self, sent: &Sentence) -> Result<(), GrammarError> {
        let parse = self.parse(sent)?;
        if parse.residue.is_empty() {
            Ok(())
        } else {
            Err(GrammarError::Residue(text::join(&parse.residue)))
        }
    }

    pub fn enumerate_commands(&self) -> Vec<RobotCommand> {
        enumerate_commands(&self.inventory)
    }
}

/// Write a command out in its canonical form.
pub fn realize(
    cmd: &RobotCommand,
    inventory: &ConceptInventory,
    tmpl: &SurfaceTemplate,
) -> Result<Sentence, GrammarError> {
    let unknown = |c: &Concept| GrammarError::UnknownConcept(c.to_string());
    if !inventory.contains_action(&cmd.action) {
        return Err(unknown(&cmd.action));
    }
    if !inventory.contains_object(&cmd.object) {
        return Err(unknown(&cmd.object));
    }
    let mut out: Vec<Token> = Vec::new();
    out.extend_from_slice(cmd.action.tokens());
    out.extend_from_slice(&tmpl.action_suffix);
    out.extend_from_slice(&tmpl.determiner);
    out.extend_from_slice(cmd.object.tokens());
    if let Some(clause) = &cmd.clause {
        if !inventory.contains_relation(&clause.relation) {
            return Err(unknown(&clause.relation));
        }
        if !inventory.contains_object(&clause.object) {
            return Err(unknown(&clause.object));
        }
        let surface = tmpl
            .canonical(&clause.relation)
            .ok_or_else(|| unknown(&clause.relation))?;
        out.extend_from_slice(&tmpl.relative);
        out.extend_from_slice(surface);
        out.extend_from_slice(&tmpl.determiner);
        out.extend_from_slice(clause.object.tokens());
    }
    Ok(Sentence::new(out).expect("realization is non-empty"))
}

/// Every command the inventory can express: `|A|·|O|` simple commands plus
/// `|A|·|O|·|R|·|O|` relational ones (object1 may equal object2).
pub fn enumerate_commands(inventory: &ConceptInventory) -> Vec<RobotCommand> {
    let mut out = Vec::new();
    for a in inventory.actions() {
        for o1 in inventory.objects() {
            out.push(RobotCommand::simple(a.clone(), o1.clone()));
            for r in inventory.relations() {
                for o2 in inventory.objects() {
                    out.push(RobotCommand::relational(
                        a.clone(),
                        o1.clone(),
                        r.clone(),
                        o2.clone(),
                    ));
                }
            }
        }
    }
    out
}
