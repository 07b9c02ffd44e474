//! Synthetic `(s, t, r)` corpora built from a paraphrase bank.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{concept, phrase, Concept, Grammar, GrammarError, RobotCommand};
use crate::corpus::{Corpus, ParallelTuple};
use crate::text::{Sentence, Token};

/// Probability that a paraphrase slot uses the robot-language wording.
const T_CANONICAL_RATE: f64 = 0.75;
const DISTINCT_RETRIES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Action,
    Object,
    Relation,
}

impl Slot {
    pub fn as_str(self) -> &'static str {
        match self {
            Slot::Action => "action",
            Slot::Object => "object",
            Slot::Relation => "relation",
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Natural-language variants for each concept.
///
/// A variant is a whole slot fragment: an action variant includes whatever
/// leads into the object ("move forward to"), an object variant includes its
/// article ("a car"), and a relation variant includes the relative clause
/// opener ("located at the right hand side of").
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParaphraseBank {
    variants: BTreeMap<(Slot, Concept), Vec<Vec<Token>>>,
}

impl ParaphraseBank {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, slot: Slot, concept: Concept, variant: Vec<Token>) {
        let list = self.variants.entry((slot, concept)).or_default();
        if !list.contains(&variant) {
            list.push(variant);
        }
    }

    pub fn variants(&self, slot: Slot, concept: &Concept) -> &[Vec<Token>] {
        self.variants
            .get(&(slot, concept.clone()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Slot, &Concept, &[Vec<Token>])> {
        self.variants
            .iter()
            .map(|((slot, c), v)| (*slot, c, v.as_slice()))
    }

    fn check(&self, grammar: &Grammar) -> Result<(), GrammarError> {
        let inv = grammar.inventory();
        let wanted = inv
            .actions()
            .iter()
            .map(|c| (Slot::Action, c))
            .chain(inv.objects().iter().map(|c| (Slot::Object, c)))
            .chain(inv.relations().iter().map(|c| (Slot::Relation, c)));
        for (slot, c) in wanted {
            if self.variants(slot, c).is_empty() {
                return Err(GrammarError::BankGap(format!("{slot} {c}")));
            }
        }
        Ok(())
    }
}

/// One slot fragment used when composing a sentence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fragment {
    pub slot: Slot,
    pub concept: Concept,
    pub words: Vec<Token>,
}

/// A generated corpus with the fragments each `s` was composed from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticCorpus {
    pub corpus: Corpus,
    pub s_fragments: Vec<Vec<Fragment>>,
}

/// Generate `n_per_command` tuples for every enumerable command.
///
/// `r` is the canonical realization. `s` picks a bank variant for every slot;
/// `t` keeps the robot-language wording of a slot with probability 0.75 and
/// otherwise picks a bank variant, and is redrawn until it differs from `s`
/// (bounded retries).
pub fn gen_synthetic(
    grammar: &Grammar,
    bank: &ParaphraseBank,
    n_per_command: usize,
    seed: u64,
) -> Result<SyntheticCorpus, GrammarError> {
    bank.check(grammar)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tuples = Vec::new();
    let mut s_fragments = Vec::new();
    let task = grammar.task();
    for cmd in grammar.enumerate_commands() {
        let r = grammar.realize(&cmd)?;
        let slots = slots_of(&cmd);
        for _ in 0..n_per_command {
            let s_frags: Vec<Fragment> = slots
                .iter()
                .map(|(slot, c)| pick(bank, *slot, c, &mut rng))
                .collect();
            let s = compose(&s_frags);
            let mut t = s.clone();
            for _ in 0..DISTINCT_RETRIES {
                let frags: Vec<Fragment> = slots
                    .iter()
                    .map(|(slot, c)| {
                        if rng.gen_bool(T_CANONICAL_RATE) {
                            canonical_fragment(grammar, *slot, c)
                        } else {
                            pick(bank, *slot, c, &mut rng)
                        }
                    })
                    .collect();
                t = compose(&frags);
                if t != s {
                    break;
                }
            }
            tuples.push(ParallelTuple {
                id: format!("{}-{:04}", task, tuples.len() + 1),
                task,
                s,
                t,
                r: r.clone(),
            });
            s_fragments.push(s_frags);
        }
    }
    let corpus = Corpus::new(tuples).expect("generated ids are unique");
    Ok(SyntheticCorpus {
        corpus,
        s_fragments,
    })
}

fn slots_of(cmd: &RobotCommand) -> Vec<(Slot, Concept)> {
    let mut out = Vec::with_capacity(4);
    out.push((Slot::Action, cmd.action.clone()));
    out.push((Slot::Object, cmd.object.clone()));
    if let Some(c) = &cmd.clause {
        out.push((Slot::Relation, c.relation.clone()));
        out.push((Slot::Object, c.object.clone()));
    }
    out
}

fn pick(bank: &ParaphraseBank, slot: Slot, c: &Concept, rng: &mut ChaCha8Rng) -> Fragment {
    let words = bank
        .variants(slot, c)
        .choose(rng)
        .expect("bank checked for gaps")
        .clone();
    Fragment {
        slot,
        concept: c.clone(),
        words,
    }
}

fn canonical_fragment(grammar: &Grammar, slot: Slot, c: &Concept) -> Fragment {
    let tmpl = grammar.template();
    let mut words = Vec::new();
    match slot {
        Slot::Action => {
            words.extend_from_slice(c.tokens());
            words.extend_from_slice(&tmpl.action_suffix);
        }
        Slot::Object => {
            words.extend_from_slice(&tmpl.determiner);
            words.extend_from_slice(c.tokens());
        }
        Slot::Relation => {
            words.extend_from_slice(&tmpl.relative);
            words.extend_from_slice(tmpl.canonical(c).unwrap_or(c.tokens()));
        }
    }
    Fragment {
        slot,
        concept: c.clone(),
        words,
    }
}

fn compose(frags: &[Fragment]) -> Sentence {
    let tokens: Vec<Token> = frags.iter().flat_map(|f| f.words.iter().cloned()).collect();
    Sentence::new(tokens).expect("fragments are non-empty")
}

/// Variants for the built-in navigation grammar.
pub(super) fn navigation_bank() -> ParaphraseBank {
    let mut bank = ParaphraseBank::new();
    let entries: &[(Slot, &str, &[&str])] = &[
        (
            Slot::Action,
            "navigate",
            &[
                "go to",
                "move forward to",
                "go straight until you reach",
                "head to",
                "drive to",
                "find",
            ],
        ),
        (
            Slot::Object,
            "traffic barrel",
            &["the traffic barrel", "a traffic barrel", "the orange barrel"],
        ),
        (Slot::Object, "building", &["the building", "a building", "the house"]),
        (Slot::Object, "car", &["the car", "a car", "the vehicle"]),
        (
            Slot::Relation,
            "left",
            &[
                "that is located on the left hand side of",
                "to the left of",
                "which is at the left side of",
            ],
        ),
        (
            Slot::Relation,
            "right",
            &[
                "that is located on the right hand side of",
                "located at the right hand side of",
                "to the right of",
                "which is on the right side of",
            ],
        ),
        (
            Slot::Relation,
            "front",
            &["which stands before", "in front of", "that is facing"],
        ),
        (
            Slot::Relation,
            "back",
            &["behind", "which is at the backyard of", "at the back of"],
        ),
    ];
    for (slot, c, variants) in entries {
        for v in *variants {
            bank.add(*slot, concept(c), phrase(v));
        }
    }
    bank
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}={}",
            self.slot,
            self.concept,
            crate::text::join(&self.words)
        )
    }
}
