//! Tokens, sentences and the tokenizer.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use thiserror::Error;

/// Characters split off into their own tokens.
pub const PUNCTUATION: [char; 6] = ['.', ',', ';', ':', '!', '?'];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("input contains no tokens")]
    EmptyInput,
    #[error("invalid token {0:?}")]
    InvalidToken(String),
}

/// A lowercase word with no whitespace in it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token(String);

impl Token {
    pub fn new(text: &str) -> Result<Self, TextError> {
        if text.is_empty() || text.chars().any(char::is_whitespace) {
            return Err(TextError::InvalidToken(text.to_string()));
        }
        Ok(Token(text.to_lowercase()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Parse a space-separated phrase into tokens without punctuation splitting.
///
/// Used for phrase-table keys and concept names, which are stored already
/// tokenized.
pub fn words(text: &str) -> Result<Vec<Token>, TextError> {
    let toks = text
        .split_whitespace()
        .map(Token::new)
        .collect::<Result<Vec<_>, _>>()?;
    if toks.is_empty() {
        return Err(TextError::EmptyInput);
    }
    Ok(toks)
}

/// Join tokens with single spaces.
pub fn join(tokens: &[Token]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(t.as_str());
    }
    out
}

/// Compare two token sequences as their space-joined strings would compare.
pub fn cmp_joined(a: &[Token], b: &[Token]) -> Ordering {
    let sa = a.iter().enumerate().flat_map(|(i, t)| {
        (if i > 0 { Some(' ') } else { None })
            .into_iter()
            .chain(t.as_str().chars())
    });
    let sb = b.iter().enumerate().flat_map(|(i, t)| {
        (if i > 0 { Some(' ') } else { None })
            .into_iter()
            .chain(t.as_str().chars())
    });
    sa.cmp(sb)
}

/// A non-empty token sequence. Positions are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sentence {
    tokens: Vec<Token>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Result<Self, TextError> {
        if tokens.is_empty() {
            return Err(TextError::EmptyInput);
        }
        Ok(Sentence { tokens })
    }

    /// Build from already-tokenized, space-separated words.
    pub fn from_words(text: &str) -> Result<Self, TextError> {
        Ok(Sentence {
            tokens: words(text)?,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn into_tokens(self) -> Vec<Token> {
        self.tokens
    }

    /// Token at 1-based position `pos`.
    pub fn get(&self, pos: usize) -> Option<&Token> {
        pos.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    /// Tokens `b..=e`, 1-based and inclusive.
    pub fn span(&self, b: usize, e: usize) -> Option<&[Token]> {
        if b == 0 || b > e || e > self.tokens.len() {
            return None;
        }
        Some(&self.tokens[b - 1..e])
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join(&self.tokens))
    }
}

/// Lowercase, split on whitespace, and isolate `. , ; : ! ?` as tokens.
pub fn tokenize(raw: &str) -> Result<Sentence, TextError> {
    let mut tokens = Vec::new();
    for chunk in raw.split_whitespace() {
        let lower = chunk.to_lowercase();
        let mut word = String::new();
        for c in lower.chars() {
            if PUNCTUATION.contains(&c) {
                if !word.is_empty() {
                    tokens.push(Token(core::mem::take(&mut word)));
                }
                tokens.push(Token(c.to_string()));
            } else {
                word.push(c);
            }
        }
        if !word.is_empty() {
            tokens.push(Token(word));
        }
    }
    Sentence::new(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn strs(s: &Sentence) -> Vec<&str> {
        s.tokens().iter().map(Token::as_str).collect()
    }

    #[test]
    fn tokenize_lowercases_and_splits_punctuation() {
        let s = tokenize("Go to the Car.").unwrap();
        assert_eq!(strs(&s), vec!["go", "to", "the", "car", "."]);
        assert_eq!(strs(&tokenize("navigate").unwrap()), vec!["navigate"]);
        assert_eq!(
            strs(&tokenize("backyard of the building").unwrap()),
            vec!["backyard", "of", "the", "building"]
        );
        assert_eq!(
            strs(&tokenize("wait,stop!?").unwrap()),
            vec!["wait", ",", "stop", "!", "?"]
        );
    }

    #[test]
    fn tokenize_rejects_blank() {
        assert_eq!(tokenize(" \t\n"), Err(TextError::EmptyInput));
        assert_eq!(tokenize(""), Err(TextError::EmptyInput));
    }

    #[test]
    fn positions_are_one_based() {
        let s = Sentence::from_words("a b c").unwrap();
        assert_eq!(s.get(0), None);
        assert_eq!(s.get(1).unwrap().as_str(), "a");
        assert_eq!(s.span(2, 3).unwrap().len(), 2);
        assert!(s.span(0, 1).is_none());
        assert!(s.span(3, 4).is_none());
    }

    #[test]
    fn cmp_joined_matches_string_order() {
        let a = words("a b").unwrap();
        let b = words("ab").unwrap();
        assert_eq!(cmp_joined(&a, &b), join(&a).cmp(&join(&b)));
    }

    proptest! {
        #[test]
        fn tokenize_is_idempotent(raw in "[A-Za-z.,;:!? \t]{0,40}") {
            if let Ok(s) = tokenize(&raw) {
                let again = tokenize(&s.to_string()).unwrap();
                prop_assert_eq!(again, s);
            }
        }

        #[test]
        fn cmp_joined_agrees_with_join(a in prop::collection::vec("[a-c]{1,3}", 1..4),
                                       b in prop::collection::vec("[a-c]{1,3}", 1..4)) {
            let ta: Vec<Token> = a.iter().map(|w| Token::new(w).unwrap()).collect();
            let tb: Vec<Token> = b.iter().map(|w| Token::new(w).unwrap()).collect();
            prop_assert_eq!(cmp_joined(&ta, &tb), join(&ta).cmp(&join(&tb)));
        }
    }
}
