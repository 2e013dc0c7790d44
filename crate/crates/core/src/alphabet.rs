//! Level alphabets.

use std::collections::HashMap;
use std::fmt;

/// Index of a letter inside its level alphabet.
pub type Letter = usize;

/// A word over one level alphabet, stored as letter indices.
pub type Word = Vec<Letter>;

/// Name of the single letter of level 0.
pub const ROOT: &str = "@";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlphabetError {
    #[error("letter name {0:?} is not a valid token")]
    BadName(String),
    #[error("letter {0:?} is declared twice")]
    Duplicate(String),
    #[error("alphabet is empty")]
    Empty,
}

/// True when `name` can be written as a single token in the text formats.
pub fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, ';' | '=' | ':' | '#'))
}

/// Ordered, duplicate-free list of letter names.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, Letter>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, AlphabetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(AlphabetError::Empty);
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if !valid_name(n) {
                return Err(AlphabetError::BadName(n.clone()));
            }
            if index.insert(n.clone(), i).is_some() {
                return Err(AlphabetError::Duplicate(n.clone()));
            }
        }
        Ok(Alphabet { names, index })
    }

    pub fn root() -> Self {
        Alphabet::new([ROOT]).expect("root alphabet")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, a: Letter) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// Parses whitespace-separated letter names into a word.
    pub fn parse_word(&self, text: &str) -> Result<Word, String> {
        text.split_whitespace()
            .map(|tok| self.letter(tok).ok_or_else(|| tok.to_string()))
            .collect()
    }

    /// Space-separated rendering of a word.
    pub fn render(&self, word: &[Letter]) -> String {
        let parts: Vec<&str> = word.iter().map(|&a| self.name(a)).collect();
        parts.join(" ")
    }

    /// Concatenated rendering; unambiguous only for single-character names.
    pub fn render_compact(&self, word: &[Letter]) -> String {
        if self.names.iter().all(|n| n.chars().count() == 1) {
            word.iter().map(|&a| self.name(a)).collect()
        } else {
            self.render(word)
        }
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.names).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_and_duplicate_names() {
        assert_eq!(Alphabet::new(["x", "x"]), Err(AlphabetError::Duplicate("x".into())));
        assert!(matches!(Alphabet::new(["a;b"]), Err(AlphabetError::BadName(_))));
        assert!(matches!(Alphabet::new(Vec::<String>::new()), Err(AlphabetError::Empty)));
    }

    #[test]
    fn words_round_trip() {
        let a = Alphabet::new(["x", "y"]).unwrap();
        let w = a.parse_word("x x y").unwrap();
        assert_eq!(w, vec![0, 0, 1]);
        assert_eq!(a.render(&w), "x x y");
        assert_eq!(a.render_compact(&w), "xxy");
        assert_eq!(a.parse_word("x z"), Err("z".to_string()));
    }
}
