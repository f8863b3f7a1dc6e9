use std::fmt;

use serde::Serialize;

/// A maximal power `x_gen^exp` inside a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Syllable {
    pub gen: usize,
    pub exp: i64,
}

impl Syllable {
    pub fn new(gen: usize, exp: i64) -> Self {
        Syllable { gen, exp }
    }
}

/// A word in a free group, stored as a list of syllables with nonzero
/// exponents.
///
/// Words built through [`Word::new`] keep their syllables as given (apart from
/// dropping zero exponents); [`Word::reduced`] and [`free_reduce`] produce the
/// normalized form in which adjacent syllables use distinct generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Word {
    syllables: Vec<Syllable>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn new(syllables: impl IntoIterator<Item = Syllable>) -> Self {
        Word { syllables: syllables.into_iter().filter(|s| s.exp != 0).collect() }
    }

    /// Builds the free reduction of the given syllables.
    pub fn reduced(syllables: impl IntoIterator<Item = Syllable>) -> Self {
        let mut out: Vec<Syllable> = Vec::new();
        for s in syllables {
            push_reducing(&mut out, s);
        }
        Word { syllables: out }
    }

    /// Convenience constructor from `(generator, exponent)` pairs; reduces.
    pub fn from_pairs(pairs: &[(usize, i64)]) -> Self {
        Word::reduced(pairs.iter().map(|&(g, e)| Syllable::new(g, e)))
    }

    pub fn generator(gen: usize) -> Self {
        Word::power(gen, 1)
    }

    pub fn power(gen: usize, exp: i64) -> Self {
        Word::new([Syllable::new(gen, exp)])
    }

    /// `[a, b] = a b a^-1 b^-1`
    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.concat(b).concat(&a.inverse()).concat(&b.inverse())
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.syllables.iter().all(|s| s.exp != 0)
            && self.syllables.windows(2).all(|w| w[0].gen != w[1].gen)
    }

    /// Number of syllables, i.e. maximal powers; `x5^3 y1 y2^2` has length 3.
    pub fn syllable_length(&self) -> usize {
        self.syllables.len()
    }

    /// Number of letters counted with multiplicity.
    pub fn letter_count(&self) -> u64 {
        self.syllables.iter().map(|s| s.exp.unsigned_abs()).sum()
    }

    pub fn exponent_sum(&self, gen: usize) -> i64 {
        self.syllables.iter().filter(|s| s.gen == gen).map(|s| s.exp).sum()
    }

    /// Letters of `gen` counted with multiplicity and ignoring sign.
    pub fn occurrences(&self, gen: usize) -> u64 {
        self.syllables
            .iter()
            .filter(|s| s.gen == gen)
            .map(|s| s.exp.unsigned_abs())
            .sum()
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.syllables.iter().map(|s| s.gen).max()
    }

    pub fn is_positive(&self) -> bool {
        self.syllables.iter().all(|s| s.exp > 0)
    }

    pub fn inverse(&self) -> Word {
        Word {
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|s| Syllable::new(s.gen, -s.exp))
                .collect(),
        }
    }

    /// Reduced product `self * other`.
    pub fn concat(&self, other: &Word) -> Word {
        Word::reduced(self.syllables.iter().chain(other.syllables.iter()).copied())
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..n.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// `x w x^-1`
    pub fn conjugate_by(&self, x: &Word) -> Word {
        x.concat(self).concat(&x.inverse())
    }

    /// Replaces each occurrence of `gen^e` by `replacement^e` and reduces.
    pub fn substitute(&self, gen: usize, replacement: &Word) -> Word {
        let mut out: Vec<Syllable> = Vec::new();
        for s in &self.syllables {
            if s.gen == gen {
                let piece = replacement.pow(s.exp);
                for p in piece.syllables {
                    push_reducing(&mut out, p);
                }
            } else {
                push_reducing(&mut out, *s);
            }
        }
        Word { syllables: out }
    }

    /// Renames generators; `f` returning `None` deletes that generator
    /// (sends it to the identity).
    pub fn map_generators(&self, mut f: impl FnMut(usize) -> Option<usize>) -> Word {
        Word::reduced(
            self.syllables
                .iter()
                .filter_map(|s| f(s.gen).map(|g| Syllable::new(g, s.exp))),
        )
    }

    /// Renders the word with the given generator names in the presentation
    /// grammar (`1` for the empty word).
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        WordDisplay { word: self, names }
    }
}

fn push_reducing(out: &mut Vec<Syllable>, s: Syllable) {
    if s.exp == 0 {
        return;
    }
    match out.last_mut() {
        Some(top) if top.gen == s.gen => {
            top.exp += s.exp;
            if top.exp == 0 {
                out.pop();
            }
        }
        _ => out.push(s),
    }
}

/// Free reduction: merges adjacent powers of the same generator and cancels
/// inverse pairs. Idempotent.
pub fn free_reduce(w: &Word) -> Word {
    Word::reduced(w.syllables.iter().copied())
}

/// Syllable count of a word; see [`Word::syllable_length`].
pub fn syllable_length(w: &Word) -> usize {
    w.syllable_length()
}

struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "1");
        }
        for (i, s) in self.word.syllables.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match self.names.get(s.gen) {
                Some(name) => write!(f, "{name}")?,
                None => write!(f, "g{}", s.gen)?,
            }
            if s.exp != 1 {
                write!(f, "^{}", s.exp)?;
            }
        }
        Ok(())
    }
}
