//! Words over the construction's generators.
//!
//! A word `g0 g1^-1` denotes the composition applied right to left: first
//! the inverse of generator 1, then generator 0.

use std::fmt;
use std::str::FromStr;

use crate::error::WordParseError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub exp: Sign,
}

impl Letter {
    pub fn new(gen: usize, exp: Sign) -> Self {
        Letter { gen, exp }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IsoWord {
    pub letters: Vec<Letter>,
}

impl IsoWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        IsoWord { letters }
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Letters in the order they act on an address.
    pub fn application_order(&self) -> impl Iterator<Item = &Letter> {
        self.letters.iter().rev()
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.letters.iter().map(|l| l.gen).max()
    }
}

pub fn word_invert(w: &IsoWord) -> IsoWord {
    IsoWord {
        letters: w
            .letters
            .iter()
            .rev()
            .map(|l| Letter::new(l.gen, l.exp.flip()))
            .collect(),
    }
}

impl fmt::Display for IsoWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "g{}", l.gen)?;
            if l.exp == Sign::Minus {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}

impl FromStr for IsoWord {
    type Err = WordParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = s
            .split_whitespace()
            .map(|tok| {
                let bad = || WordParseError::BadLetter(tok.to_string());
                let body = tok.strip_prefix('g').ok_or_else(bad)?;
                let (num, exp) = match body.strip_suffix("^-1") {
                    Some(n) => (n, Sign::Minus),
                    None => (body, Sign::Plus),
                };
                if num.is_empty() || !num.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad());
                }
                Ok(Letter::new(num.parse().map_err(|_| bad())?, exp))
            })
            .collect::<Result<_, _>>()?;
        Ok(IsoWord { letters })
    }
}
