//! Recursive-descent parser for the presentation grammar:
//!
//! ```text
//! presentation := '<' names? '|' relators? '>'
//! names        := ident (',' ident)*
//! relators     := relator (',' relator)*
//! relator      := '1' | item+
//! item         := syllable | '[' syllable ',' syllable ']'
//! syllable     := ident ('^' '-'? digits)?
//! ident        := [A-Za-z][A-Za-z0-9_]*
//! ```
//!
//! Whitespace is insignificant between tokens. Positions in errors are byte
//! offsets into the input.

use super::{Presentation, Syllable, Word};
use crate::error::Error;

pub fn parse_presentation(text: &str) -> Result<Presentation, Error> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    p.presentation()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, Error> {
        Err(Error::Syntax { position: self.pos, message: message.into() })
    }

    fn expect(&mut self, c: u8) -> Result<(), Error> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => self.err(format!("expected `{}`, found `{}`", c as char, x as char)),
            None => self.err(format!("expected `{}`, found end of input", c as char)),
        }
    }

    fn ident(&mut self) -> Result<(String, usize), Error> {
        self.skip_ws();
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() => self.pos += 1,
            Some(c) => return self.err(format!("expected generator name, found `{}`", *c as char)),
            None => return self.err("expected generator name, found end of input"),
        }
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii").to_string();
        Ok((name, start))
    }

    fn presentation(&mut self) -> Result<Presentation, Error> {
        self.expect(b'<')?;
        let mut names = Vec::new();
        if self.peek() != Some(b'|') {
            loop {
                let (name, _) = self.ident()?;
                if names.contains(&name) {
                    return Err(Error::DuplicateGenerator(name));
                }
                names.push(name);
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    _ => break,
                }
            }
        }
        self.expect(b'|')?;
        let mut relators = Vec::new();
        if self.peek() != Some(b'>') {
            loop {
                relators.push(self.relator(&names)?);
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    _ => break,
                }
            }
        }
        self.expect(b'>')?;
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        Presentation::new(names, relators)
    }

    fn relator(&mut self, names: &[String]) -> Result<Word, Error> {
        if self.peek() == Some(b'1') {
            self.pos += 1;
            return Ok(Word::empty());
        }
        let mut syllables = Vec::new();
        loop {
            match self.peek() {
                Some(b'[') => {
                    self.pos += 1;
                    let a = self.syllable(names)?;
                    self.expect(b',')?;
                    let b = self.syllable(names)?;
                    self.expect(b']')?;
                    let c = Word::commutator(&Word::new([a]), &Word::new([b]));
                    syllables.extend_from_slice(c.syllables());
                }
                Some(c) if c.is_ascii_alphabetic() => syllables.push(self.syllable(names)?),
                _ => break,
            }
        }
        if syllables.is_empty() {
            return match self.peek() {
                Some(c) => self.err(format!("expected relator, found `{}`", c as char)),
                None => self.err("expected relator, found end of input"),
            };
        }
        Ok(Word::reduced(syllables))
    }

    fn syllable(&mut self, names: &[String]) -> Result<Syllable, Error> {
        let (name, at) = self.ident()?;
        let gen = names
            .iter()
            .position(|n| *n == name)
            .ok_or(Error::UnknownGenerator { name, position: at })?;
        let mut exp = 1i64;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let neg = if self.peek() == Some(b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            self.skip_ws();
            let start = self.pos;
            while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                self.pos += 1;
            }
            if start == self.pos {
                return self.err("expected exponent digits");
            }
            let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
            exp = match digits.parse::<i64>() {
                Ok(v) => v,
                Err(_) => {
                    self.pos = start;
                    return self.err("exponent out of range");
                }
            };
            if neg {
                exp = -exp;
            }
        }
        Ok(Syllable::new(gen, exp))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_rank_one() {
        let p = parse_presentation("< x | >").unwrap();
        assert_eq!(p.generator_count(), 1);
        assert_eq!(p.relator_count(), 0);
    }

    #[test]
    fn commutator_sugar_expands() {
        let p = parse_presentation("<x,y|[x,y]>").unwrap();
        assert_eq!(p.relator_count(), 1);
        assert_eq!(p.relators()[0], Word::from_pairs(&[(0, 1), (1, 1), (0, -1), (1, -1)]));
    }

    #[test]
    fn power_relator() {
        let p = parse_presentation("< a | a^5 >").unwrap();
        assert_eq!(p.relators()[0], Word::power(0, 5));
    }

    #[test]
    fn juxtaposition_and_negative_exponents() {
        let p = parse_presentation("< x, y | x^2y^-4 x y x^-1 >").unwrap();
        assert_eq!(p.relators()[0], Word::from_pairs(&[(0, 2), (1, -4), (0, 1), (1, 1), (0, -1)]));
        let p = parse_presentation("< x1, x_2 | x1 x1^-1 >").unwrap();
        assert!(p.relators()[0].is_empty());
    }

    #[test]
    fn errors_report_positions() {
        match parse_presentation("< x | y >") {
            Err(Error::UnknownGenerator { name, position }) => {
                assert_eq!(name, "y");
                assert_eq!(position, 6);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_presentation("< x, x | >"),
            Err(Error::DuplicateGenerator(_))
        ));
        assert!(matches!(
            parse_presentation("< x | x^ >"),
            Err(Error::Syntax { position: 9, .. })
        ));
        assert!(matches!(parse_presentation("x | x"), Err(Error::Syntax { position: 0, .. })));
        assert!(matches!(parse_presentation("< x | x, >"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_presentation("< x | x > junk"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_presentation("< 9 | >"), Err(Error::Syntax { .. })));
        assert!(matches!(
            parse_presentation("< x | x^99999999999999999999 >"),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn trivial_group_parses() {
        let p = parse_presentation("<|>").unwrap();
        assert_eq!(p.generator_count(), 0);
        assert_eq!(p.relator_count(), 0);
    }
}
