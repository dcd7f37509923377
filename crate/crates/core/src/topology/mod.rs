//! Exact topology for the two space backends.
//!
//! A [`Space`] is either a finite discrete set `{0, .., n-1}` or the Cantor
//! space `Σ^ω` of infinite words over a finite alphabet. Open sets of the
//! Cantor backend are unions of cylinders `[w] = wΣ^ω` over a regular
//! language `L` of finite words. They are stored as the minimal automaton of
//! the *full* language `{w : [w] ⊆ U}`, which depends only on the open set,
//! so set equality is structural equality.
//!
//! Sets in the Boolean algebra generated by these open sets
//! ([`ConstructibleSet`]) are stored through their difference chain
//! `F1 ⊋ F2 ⊋ ...` of closed sets, `S = (F1∖F2) ∪ (F3∖F4) ∪ ...`, with
//! `F1 = cl(S)`, `F2 = cl(F1∖S)`, `F3 = cl(F2∩S)`, and so on. The chain is
//! determined by `S`, so it is also a canonical form.
//!
//! Points are the ultimately periodic words `u·v^ω` ([`UPPoint`]).

mod constructible;
pub(crate) mod dfa;
mod open;
mod point;
mod refine;
mod regex;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use constructible::{ConstructibleSet, SetOp};
pub use open::OpenSet;
pub use point::UPPoint;
pub use refine::{atoms, Atom, Refinement};

/// A finite word, stored as symbol indices into the alphabet.
pub type Word = Vec<u8>;

/// Letters of a Cantor space, in their fixed order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet(Arc<[char]>);

impl Alphabet {
    pub fn new(letters: &str) -> Result<Self> {
        let chars: Vec<char> = letters.chars().collect();
        if chars.len() < 2 {
            return Err(Error::Parse("an alphabet needs at least two letters".into()));
        }
        if chars.len() > u8::MAX as usize {
            return Err(Error::Parse("alphabet too large".into()));
        }
        for (i, c) in chars.iter().enumerate() {
            if chars[..i].contains(c) {
                return Err(Error::Parse(format!("letter {c:?} repeated in alphabet")));
            }
            if "()|*+?.,{}-> ε∅".contains(*c) {
                return Err(Error::Parse(format!("letter {c:?} is reserved")));
            }
        }
        Ok(Alphabet(chars.into()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[char] {
        &self.0
    }

    pub fn index_of(&self, c: char) -> Option<u8> {
        self.0.iter().position(|&l| l == c).map(|i| i as u8)
    }

    /// Parses a word; `ε` or the empty string denote the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text == "ε" {
            return Ok(Vec::new());
        }
        text.chars()
            .map(|c| {
                self.index_of(c)
                    .ok_or_else(|| Error::Parse(format!("letter {c:?} is not in the alphabet")))
            })
            .collect()
    }

    pub fn format_word(&self, word: &[u8]) -> String {
        if word.is_empty() {
            return "ε".to_string();
        }
        word.iter().map(|&s| self.0[s as usize]).collect()
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.iter().collect::<String>())
    }
}

/// The underlying space of a system.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Space {
    /// Discrete space with the given (positive) number of points.
    Finite(usize),
    /// `Σ^ω` over the alphabet.
    Cantor(Alphabet),
}

impl Space {
    pub fn finite(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parse("a finite space needs at least one point".into()));
        }
        Ok(Space::Finite(n))
    }

    pub fn cantor(letters: &str) -> Result<Self> {
        Ok(Space::Cantor(Alphabet::new(letters)?))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Space::Finite(_))
    }

    pub fn alphabet(&self) -> Option<&Alphabet> {
        match self {
            Space::Cantor(a) => Some(a),
            Space::Finite(_) => None,
        }
    }

    pub(crate) fn check_same(&self, other: &Space) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// All points of a finite space.
    pub fn points(&self) -> Option<Vec<UPPoint>> {
        match self {
            Space::Finite(n) => Some((0..*n).map(UPPoint::Index).collect()),
            Space::Cantor(_) => None,
        }
    }

    pub fn parse_point(&self, text: &str) -> Result<UPPoint> {
        UPPoint::parse(self, text)
    }

    pub fn format_point(&self, p: &UPPoint) -> String {
        p.display(self).to_string()
    }
}
