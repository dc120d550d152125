use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Gen {
    X,
    Y,
    Z,
}

impl Gen {
    pub const ALL: [Gen; 3] = [Gen::X, Gen::Y, Gen::Z];

    fn symbol(self) -> char {
        match self {
            Gen::X => 'x',
            Gen::Y => 'y',
            Gen::Z => 'z',
        }
    }
}

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub gen: Gen,
    pub inverse: bool,
}

impl Letter {
    /// Fixed enumeration order: x, x^-1, y, y^-1, z, z^-1.
    pub const ALL: [Letter; 6] = [
        Letter::new(Gen::X, false),
        Letter::new(Gen::X, true),
        Letter::new(Gen::Y, false),
        Letter::new(Gen::Y, true),
        Letter::new(Gen::Z, false),
        Letter::new(Gen::Z, true),
    ];

    pub const fn new(gen: Gen, inverse: bool) -> Letter {
        Letter { gen, inverse }
    }

    pub fn inv(self) -> Letter {
        Letter::new(self.gen, !self.inverse)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("word syntax error at byte {position}: {message}")]
pub struct WordParseError {
    pub position: usize,
    pub message: String,
}

/// A freely reduced word in `x, y, z` and their inverses.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Word {
        Word::default()
    }

    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Word {
        let mut w = Word::empty();
        for l in letters {
            w.push(l);
        }
        w
    }

    /// `gen^exp` as a word.
    pub fn power(gen: Gen, exp: i64) -> Word {
        let l = Letter::new(gen, exp < 0);
        Word::new(std::iter::repeat_n(l, exp.unsigned_abs() as usize))
    }

    pub fn gen(gen: Gen) -> Word {
        Word::power(gen, 1)
    }

    /// Appends a letter, cancelling against the last one when inverse.
    pub fn push(&mut self, l: Letter) {
        if self.letters.last() == Some(&l.inv()) {
            self.letters.pop();
        } else {
            self.letters.push(l);
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &l in &other.letters {
            w.push(l);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word::new(self.letters.iter().rev().map(|l| l.inv()))
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut w = Word::empty();
        for _ in 0..n.unsigned_abs() {
            w = w.concat(&base);
        }
        w
    }
}

impl fmt::Display for Word {
    /// Runs of one letter print as `y^-2`; the empty word prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut j = i;
            while j < self.letters.len() && self.letters[j] == l {
                j += 1;
            }
            let n = (j - i) as i64 * if l.inverse { -1 } else { 1 };
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            if n == 1 {
                write!(f, "{}", l.gen.symbol())?;
            } else {
                write!(f, "{}^{}", l.gen.symbol(), n)?;
            }
            i = j;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = WordParseError;

    /// Whitespace-separated tokens `x`, `y^-2`, `z^3`. Exponent 0 is rejected.
    /// A lone `1` denotes the empty word.
    fn from_str(s: &str) -> Result<Word, WordParseError> {
        let mut w = Word::empty();
        let mut offset = 0;
        for token in s.split_whitespace() {
            let position = s[offset..]
                .find(token)
                .map(|i| i + offset)
                .unwrap_or(offset);
            offset = position + token.len();
            if token == "1" {
                continue;
            }
            let err = |message: &str| WordParseError {
                position,
                message: format!("{message} in token `{token}`"),
            };
            let mut chars = token.chars();
            let gen = match chars.next() {
                Some('x') => Gen::X,
                Some('y') => Gen::Y,
                Some('z') => Gen::Z,
                _ => return Err(err("expected generator x, y or z")),
            };
            let rest = chars.as_str();
            let exp: i64 = if rest.is_empty() {
                1
            } else if let Some(e) = rest.strip_prefix('^') {
                e.parse().map_err(|_| err("expected integer exponent"))?
            } else {
                return Err(err("expected `^` or whitespace after generator"));
            };
            if exp == 0 {
                return Err(err("exponent 0 is not allowed"));
            }
            w = w.concat(&Word::power(gen, exp));
        }
        Ok(w)
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Word, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_print() {
        let w: Word = "x y^-1".parse().unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w.to_string(), "x y^-1");
        let w: Word = "x y^-2".parse().unwrap();
        assert_eq!(w.to_string(), "x y^-2");
        assert_eq!("1".parse::<Word>().unwrap(), Word::empty());
        assert_eq!("".parse::<Word>().unwrap(), Word::empty());
    }

    #[test]
    fn parse_reduces() {
        let w: Word = "x y y^-1 x^-1 z".parse().unwrap();
        assert_eq!(w.to_string(), "z");
    }

    #[test]
    fn parse_errors_carry_position() {
        let e = "x  q".parse::<Word>().unwrap_err();
        assert_eq!(e.position, 3);
        let e = "x y^0".parse::<Word>().unwrap_err();
        assert_eq!(e.position, 2);
        assert!(e.message.contains("exponent 0"));
        assert!("x^".parse::<Word>().is_err());
        assert!("xy".parse::<Word>().is_err());
        assert!("x^1.5".parse::<Word>().is_err());
    }

    fn arb_word() -> impl Strategy<Value = Word> {
        proptest::collection::vec((0usize..6).prop_map(|i| Letter::ALL[i]), 0..12)
            .prop_map(Word::new)
    }

    proptest! {
        #[test]
        fn display_parse_roundtrip(w in arb_word()) {
            let back: Word = w.to_string().parse().unwrap();
            prop_assert_eq!(back, w);
        }

        #[test]
        fn inverse_cancels(w in arb_word()) {
            prop_assert!(w.concat(&w.inverse()).is_empty());
        }

        #[test]
        fn always_reduced(w in arb_word()) {
            for pair in w.letters().windows(2) {
                prop_assert_ne!(pair[0], pair[1].inv());
            }
        }
    }
}
