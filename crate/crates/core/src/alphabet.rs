//! Letters, words and their textual form.
//!
//! Letters are stored as indices into an [`Alphabet`], so the derived ordering
//! on words is the lexicographic order induced by the declared letter order.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Letter = u8;
pub type Word = Vec<Letter>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphabetError {
    #[error("letter {0:?} is not in the alphabet")]
    UnknownLetter(char),
    #[error("duplicate letter {0:?}")]
    Duplicate(char),
    #[error("letter names must be a single character, got {0:?}")]
    BadName(String),
    #[error("alphabet is empty")]
    Empty,
    #[error("alphabet has more than 250 letters")]
    TooLarge,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    letters: Vec<char>,
}

impl Alphabet {
    pub fn new(letters: Vec<char>) -> Result<Self, AlphabetError> {
        if letters.is_empty() {
            return Err(AlphabetError::Empty);
        }
        if letters.len() > 250 {
            return Err(AlphabetError::TooLarge);
        }
        let mut seen = BTreeSet::new();
        for &c in &letters {
            if !seen.insert(c) {
                return Err(AlphabetError::Duplicate(c));
            }
        }
        Ok(Alphabet { letters })
    }

    /// Alphabet from the characters of a string, in order.
    pub fn from_chars(s: &str) -> Self {
        Alphabet::new(s.chars().collect()).expect("invalid alphabet literal")
    }

    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self, AlphabetError> {
        let mut letters = Vec::with_capacity(names.len());
        for n in names {
            letters.push(single_char(n.as_ref())?);
        }
        Alphabet::new(letters)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn chars(&self) -> &[char] {
        &self.letters
    }

    pub fn char_of(&self, l: Letter) -> char {
        self.letters[l as usize]
    }

    pub fn index_of(&self, c: char) -> Result<Letter, AlphabetError> {
        self.letters
            .iter()
            .position(|&x| x == c)
            .map(|i| i as Letter)
            .ok_or(AlphabetError::UnknownLetter(c))
    }

    pub fn letter(&self, name: &str) -> Result<Letter, AlphabetError> {
        self.index_of(single_char(name)?)
    }

    pub fn parse(&self, s: &str) -> Result<Word, AlphabetError> {
        s.chars().map(|c| self.index_of(c)).collect()
    }

    pub fn render(&self, w: &[Letter]) -> String {
        w.iter().map(|&l| self.char_of(l)).collect()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.letters.len()).map(|i| i as Letter)
    }

    pub fn names(&self) -> Vec<String> {
        self.letters.iter().map(|c| c.to_string()).collect()
    }

    /// Alphabet with `extra` appended, skipping letters already present.
    pub fn extended(&self, extra: &[char]) -> Self {
        let mut letters = self.letters.clone();
        for &c in extra {
            if !letters.contains(&c) {
                letters.push(c);
            }
        }
        Alphabet::new(letters).expect("extended alphabet")
    }

    pub fn render_set<'a, I: IntoIterator<Item = &'a Letter>>(&self, it: I) -> String {
        let mut s = String::from("{");
        for (i, l) in it.into_iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push(self.char_of(*l));
        }
        s.push('}');
        s
    }
}

fn single_char(s: &str) -> Result<char, AlphabetError> {
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(AlphabetError::BadName(s.to_string())),
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alphabet({})", self.letters.iter().collect::<String>())
    }
}

impl Serialize for Alphabet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.names().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Alphabet {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let names = Vec::<String>::deserialize(de)?;
        Alphabet::from_names(&names).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_render_roundtrip() {
        let a = Alphabet::from_chars("abcd");
        let w = a.parse("dacb").unwrap();
        assert_eq!(w, vec![3, 0, 2, 1]);
        assert_eq!(a.render(&w), "dacb");
        assert_eq!(a.parse("ax").unwrap_err(), AlphabetError::UnknownLetter('x'));
    }

    #[test]
    fn word_order_follows_declared_letter_order() {
        let a = Alphabet::from_chars("21");
        let mut ws = [a.parse("12").unwrap(), a.parse("21").unwrap(), a.parse("11").unwrap()];
        ws.sort();
        let shown: Vec<String> = ws.iter().map(|w| a.render(w)).collect();
        assert_eq!(shown, vec!["21", "12", "11"]);
    }

    #[test]
    fn rejects_duplicates_and_long_names() {
        assert!(Alphabet::from_names(&["1", "1"]).is_err());
        assert!(Alphabet::from_names(&["12"]).is_err());
    }
}
