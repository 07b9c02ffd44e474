use alloc::vec::Vec;

use super::{Concept, ConceptInventory, GrammarError, RobotCommand, SurfaceTemplate};
use crate::text::{Sentence, Token};

/// Commands recognized left to right, plus any trailing tokens that no frame
/// matched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RobotParse {
    pub commands: Vec<RobotCommand>,
    pub residue: Vec<Token>,
}

impl RobotParse {
    pub fn is_complete(&self) -> bool {
        self.residue.is_empty()
    }
}

/// Greedy left-to-right frame matching.
///
/// Concept and surface alternatives are tried longest first. Repeated frames
/// yield several commands; parsing stops at the first position where no frame
/// starts and the rest is returned as residue.
pub fn parse_robot(
    sent: &Sentence,
    inventory: &ConceptInventory,
    tmpl: &SurfaceTemplate,
) -> Result<RobotParse, GrammarError> {
    let toks = sent.tokens();
    let parser = Parser {
        toks,
        inventory,
        tmpl,
    };
    let mut commands = Vec::new();
    let mut pos = 0;
    while pos < toks.len() {
        match parser.command(pos) {
            Some((cmd, next)) => {
                commands.push(cmd);
                pos = next;
            }
            None => break,
        }
    }
    if commands.is_empty() {
        return Err(GrammarError::NoParse);
    }
    Ok(RobotParse {
        commands,
        residue: toks[pos..].to_vec(),
    })
}

struct Parser<'a> {
    toks: &'a [Token],
    inventory: &'a ConceptInventory,
    tmpl: &'a SurfaceTemplate,
}

impl<'a> Parser<'a> {
    fn literal(&self, pos: usize, words: &[Token]) -> Option<usize> {
        let end = pos + words.len();
        (self.toks.get(pos..end)? == words).then_some(end)
    }

    /// Concepts whose tokens start at `pos`, longest first.
    fn concepts(&self, pos: usize, options: &'a [Concept]) -> Vec<(&'a Concept, usize)> {
        let mut found: Vec<_> = options
            .iter()
            .filter_map(|c| self.literal(pos, c.tokens()).map(|end| (c, end)))
            .collect();
        found.sort_by_key(|f| core::cmp::Reverse(f.1));
        found
    }

    fn surfaces(&self, pos: usize) -> Vec<(&'a Concept, usize)> {
        let mut found: Vec<_> = self
            .tmpl
            .surfaces()
            .iter()
            .flat_map(|(rel, phrases)| phrases.iter().map(move |p| (rel, p)))
            .filter_map(|(rel, p)| self.literal(pos, p).map(|end| (rel, end)))
            .collect();
        found.sort_by_key(|f| core::cmp::Reverse(f.1));
        found
    }

    /// `<det> <object>`
    fn noun_phrases(&self, pos: usize) -> Vec<(&'a Concept, usize)> {
        match self.literal(pos, &self.tmpl.determiner) {
            Some(p) => self.concepts(p, self.inventory.objects()),
            None => Vec::new(),
        }
    }

    fn clause(&self, pos: usize) -> Option<(Concept, Concept, usize)> {
        if !self.inventory.has_relations() {
            return None;
        }
        let p = self.literal(pos, &self.tmpl.relative)?;
        for (rel, q) in self.surfaces(p) {
            if let Some(&(obj, end)) = self.noun_phrases(q).first() {
                return Some((rel.clone(), obj.clone(), end));
            }
        }
        None
    }

    fn command(&self, pos: usize) -> Option<(RobotCommand, usize)> {
        for (action, p) in self.concepts(pos, self.inventory.actions()) {
            let Some(p) = self.literal(p, &self.tmpl.action_suffix) else {
                continue;
            };
            if let Some(&(object, q)) = self.noun_phrases(p).first() {
                return Some(match self.clause(q) {
                    Some((rel, other, end)) => (
                        RobotCommand::relational(action.clone(), object.clone(), rel, other),
                        end,
                    ),
                    None => (RobotCommand::simple(action.clone(), object.clone()), q),
                });
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::super::Grammar;
    use super::*;
    use crate::text::join;

    fn parse(s: &str) -> Result<RobotParse, GrammarError> {
        Grammar::navigation().parse(&Sentence::from_words(s).unwrap())
    }

    #[test]
    fn parses_relational_and_simple_frames() {
        let p = parse("navigate to the traffic barrel that is on the right of the building").unwrap();
        assert!(p.is_complete());
        assert_eq!(p.commands.len(), 1);
        assert_eq!(
            alloc::format!("{}", p.commands[0]),
            "(navigate, traffic barrel, right, building)"
        );
        let p = parse("navigate to the car").unwrap();
        assert_eq!(alloc::format!("{}", p.commands[0]), "(navigate, car, -, -)");
    }

    #[test]
    fn accepts_relation_synonyms() {
        let a = parse("navigate to the car that is behind the building").unwrap();
        let b = parse("navigate to the car that is on the back of the building").unwrap();
        assert_eq!(a.commands, b.commands);
        let c = parse("navigate to the car that is before the building").unwrap();
        let d = parse("navigate to the car that is in front of the building").unwrap();
        assert_eq!(c.commands, d.commands);
    }

    #[test]
    fn repeated_frames_and_residue() {
        let p = parse("navigate to the car navigate to the building that is behind the car").unwrap();
        assert_eq!(p.commands.len(), 2);
        assert!(p.is_complete());

        // Concatenated output with a dangling relative clause.
        let p = parse("navigate to the building that is navigate to the car that is behind the building")
            .unwrap();
        assert_eq!(p.commands.len(), 1);
        assert_eq!(
            join(&p.residue),
            "that is navigate to the car that is behind the building"
        );
    }

    #[test]
    fn no_frame_is_no_parse() {
        assert_eq!(parse("go to the car"), Err(GrammarError::NoParse));
        assert_eq!(parse("navigate to the house"), Err(GrammarError::NoParse));
    }

    #[test]
    fn round_trip_every_command() {
        let g = Grammar::navigation();
        for cmd in g.enumerate_commands() {
            let parsed = g.parse(&g.realize(&cmd).unwrap()).unwrap();
            assert!(parsed.is_complete());
            assert_eq!(parsed.commands, alloc::vec![cmd]);
        }
    }
}
