//! Positive rewriting of a presentation and double indexing of the rewritten
//! relators.
//!
//! The rewrite doubles the generators: every `x_j^-a` (a > 0) becomes
//! `y_j^a`, and pairing relators `x_i y_i` restore the group. Double indexing
//! then stamps each syllable of the rewritten relators with a second index
//! that increases strictly across the whole relator list.

use std::fmt;

use serde::Serialize;

use super::{Presentation, Syllable, Word};
use crate::error::Error;

/// Generator layout of the doubled presentation: `x_i` sits at `2i`, `y_i`
/// at `2i + 1`.
pub fn x_index(i: usize) -> usize {
    2 * i
}

pub fn y_index(i: usize) -> usize {
    2 * i + 1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PositiveRewrite {
    /// The doubled generating set `x_1, y_1, ..., x_g, y_g`, with no relators.
    pub base: Presentation,
    /// `x_i y_i` for each original generator.
    pub pairing_relations: Vec<Word>,
    /// The rewritten relators, all exponents positive.
    pub rewritten_relations: Vec<Word>,
}

impl PositiveRewrite {
    /// Wraps already-positive words over `2 * pairs` generators.
    pub fn from_positive_words(pairs: usize, words: Vec<Word>) -> Result<Self, Error> {
        for w in &words {
            if !w.is_positive() {
                return Err(Error::InvalidParams(
                    "rewritten relators must have positive exponents".into(),
                ));
            }
        }
        let names = (1..=pairs).flat_map(|i| [format!("x{i}"), format!("y{i}")]).collect();
        let base = Presentation::new(names, vec![])?;
        let rewritten = words.into_iter().map(|w| super::free_reduce(&w)).collect::<Vec<_>>();
        for w in &rewritten {
            if let Some(m) = w.max_generator() {
                if m >= 2 * pairs {
                    return Err(Error::GeneratorOutOfRange { index: m, count: 2 * pairs });
                }
            }
        }
        Ok(PositiveRewrite {
            base,
            pairing_relations: pairing(pairs),
            rewritten_relations: rewritten,
        })
    }

    pub fn pair_count(&self) -> usize {
        self.base.generator_count() / 2
    }

    /// Doubled presentation with pairing and rewritten relators.
    pub fn full_presentation(&self) -> Presentation {
        self.base
            .with_relators(
                self.pairing_relations
                    .iter()
                    .chain(self.rewritten_relations.iter())
                    .cloned(),
            )
            .expect("indices validated at construction")
    }

    /// Sends `y_i -> x_i^-1` and renumbers `x_i -> i`, giving a word over the
    /// original generators.
    pub fn back_substitute(w: &Word) -> Word {
        Word::reduced(w.syllables().iter().map(|s| {
            if s.gen % 2 == 0 {
                Syllable::new(s.gen / 2, s.exp)
            } else {
                Syllable::new(s.gen / 2, -s.exp)
            }
        }))
    }
}

fn pairing(pairs: usize) -> Vec<Word> {
    (0..pairs)
        .map(|i| Word::from_pairs(&[(x_index(i), 1), (y_index(i), 1)]))
        .collect()
}

fn fresh_name(base: &str, taken: &[String]) -> String {
    let mut name = format!("{base}_inv");
    while taken.iter().any(|t| *t == name) {
        name.push('_');
    }
    name
}

/// Replaces negative powers `x_j^-a` by `y_j^a` in every relator.
pub fn positive_rewrite(p: &Presentation) -> PositiveRewrite {
    let g = p.generator_count();
    let mut names = Vec::with_capacity(2 * g);
    for n in p.names() {
        names.push(n.clone());
    }
    let mut doubled = Vec::with_capacity(2 * g);
    for n in p.names() {
        let y = fresh_name(n, &names);
        names.push(y.clone());
        doubled.push(n.clone());
        doubled.push(y);
    }
    let rewritten = p
        .relators()
        .iter()
        .map(|w| {
            Word::reduced(w.syllables().iter().map(|s| {
                if s.exp > 0 {
                    Syllable::new(x_index(s.gen), s.exp)
                } else {
                    Syllable::new(y_index(s.gen), -s.exp)
                }
            }))
        })
        .collect();
    PositiveRewrite {
        base: Presentation::new(doubled, vec![]).expect("fresh names are distinct"),
        pairing_relations: pairing(g),
        rewritten_relations: rewritten,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LetterKind {
    X,
    Y,
}

/// One syllable of a doubly indexed word: `x_{pair, index}^exp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IndexedLetter {
    pub kind: LetterKind,
    /// Zero-based generator pair.
    pub pair: usize,
    /// One-based second index.
    pub index: usize,
    pub exp: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexedRelationSet {
    pub words: Vec<Vec<IndexedLetter>>,
    /// One more than the total syllable count.
    pub n: usize,
}

impl IndexedRelationSet {
    /// Drops second indices, recovering the positive words over the doubled
    /// generators.
    pub fn erase(&self) -> Vec<Word> {
        self.words
            .iter()
            .map(|w| {
                Word::new(w.iter().map(|l| {
                    let gen = match l.kind {
                        LetterKind::X => x_index(l.pair),
                        LetterKind::Y => y_index(l.pair),
                    };
                    Syllable::new(gen, l.exp as i64)
                }))
            })
            .collect()
    }

    /// Second indices read left to right across all words.
    pub fn second_indices(&self) -> Vec<usize> {
        self.words.iter().flatten().map(|l| l.index).collect()
    }
}

impl fmt::Display for IndexedLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            LetterKind::X => 'x',
            LetterKind::Y => 'y',
        };
        write!(f, "{k}_{{{},{}}}", self.pair + 1, self.index)?;
        if self.exp != 1 {
            write!(f, "^{}", self.exp)?;
        }
        Ok(())
    }
}

impl fmt::Display for IndexedRelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, w) in self.words.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            for l in w {
                write!(f, "{l}")?;
            }
        }
        write!(f, ")")
    }
}

/// Assigns second indices `1, 2, ...` to the syllables of the rewritten
/// relators in reading order.
pub fn double_index(pr: &PositiveRewrite) -> IndexedRelationSet {
    let mut next = 1;
    let words = pr
        .rewritten_relations
        .iter()
        .map(|w| {
            w.syllables()
                .iter()
                .map(|s| {
                    debug_assert!(s.exp > 0);
                    let letter = IndexedLetter {
                        kind: if s.gen % 2 == 0 { LetterKind::X } else { LetterKind::Y },
                        pair: s.gen / 2,
                        index: next,
                        exp: s.exp as u64,
                    };
                    next += 1;
                    letter
                })
                .collect()
        })
        .collect();
    IndexedRelationSet { words, n: next }
}
