//! Circuit symbols and traversal words.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A traversal of the loop `e_n` or of the long circuit `c_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    E,
    C,
}

impl Symbol {
    pub fn as_char(self) -> char {
        match self {
            Symbol::E => 'E',
            Symbol::C => 'C',
        }
    }

    pub fn from_char(ch: char) -> Result<Self> {
        match ch {
            'E' | 'e' => Ok(Symbol::E),
            'C' | 'c' => Ok(Symbol::C),
            other => Err(Error::ForeignLetter(other)),
        }
    }
}

pub fn parse_word(s: &str) -> Result<Vec<Symbol>> {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(Symbol::from_char)
        .collect()
}

pub fn render_word(w: &[Symbol]) -> String {
    w.iter().map(|s| s.as_char()).collect()
}

/// Level-n factorization of a higher circuit, as a sequence of traversals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitWord {
    pub level: usize,
    pub symbols: Vec<Symbol>,
    /// `(m, n)` when the word is `c_{m,n}` or `d_{m,n}`.
    pub provenance: Option<(usize, usize)>,
}

impl CircuitWord {
    pub fn count(&self, sym: Symbol) -> usize {
        self.symbols.iter().filter(|&&s| s == sym).count()
    }

    /// Edge count of the walk this word traverses at a level with `l_n = len_c`.
    pub fn vertex_length(&self, len_c: u64) -> u128 {
        self.count(Symbol::E) as u128 + self.count(Symbol::C) as u128 * len_c as u128
    }
}

impl fmt::Display for CircuitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_word(&self.symbols))
    }
}

impl Serialize for CircuitWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CircuitWord", 3)?;
        st.serialize_field("level", &self.level)?;
        st.serialize_field("word", &render_word(&self.symbols))?;
        st.serialize_field("provenance", &self.provenance)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for CircuitWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            level: usize,
            word: String,
            provenance: Option<(usize, usize)>,
        }
        let raw = Raw::deserialize(d)?;
        let symbols = parse_word(&raw.word).map_err(serde::de::Error::custom)?;
        Ok(CircuitWord { level: raw.level, symbols, provenance: raw.provenance })
    }
}
