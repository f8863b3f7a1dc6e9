//! Finitely presented groups: words, presentations, the text grammar, and the
//! positive rewriting and double indexing used by the fibered construction.

mod parse;
mod rewrite;
mod tietze;
mod word;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::Error;
use num_bigint::BigInt;
use num_traits::Zero;

use crate::linalg::{sparse_cokernel_invariants, IntMatrix};

pub use crate::linalg::AbelianInvariants;
pub use parse::parse_presentation;
pub use rewrite::{
    double_index, positive_rewrite, IndexedLetter, IndexedRelationSet, LetterKind,
    PositiveRewrite,
};
pub use tietze::{simplify, Elimination};
pub use word::{free_reduce, syllable_length, Syllable, Word};

/// Generators and relators of a finitely presented group.
///
/// Relators are stored free-reduced but not cyclically reduced. A relator may
/// reduce to the empty word; it still counts toward the relator total.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Presentation {
    names: Vec<String>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(names: Vec<String>, relators: Vec<Word>) -> Result<Self, Error> {
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::DuplicateGenerator(n.clone()));
            }
        }
        for r in &relators {
            if let Some(m) = r.max_generator() {
                if m >= names.len() {
                    return Err(Error::GeneratorOutOfRange { index: m, count: names.len() });
                }
            }
        }
        Ok(Presentation { names, relators: relators.iter().map(free_reduce).collect() })
    }

    /// Generators named `prefix1, prefix2, ...`.
    pub fn with_numbered_generators(prefix: &str, count: usize, relators: Vec<Word>) -> Result<Self, Error> {
        Self::new((1..=count).map(|i| format!("{prefix}{i}")).collect(), relators)
    }

    pub fn trivial() -> Self {
        Presentation { names: Vec::new(), relators: Vec::new() }
    }

    pub fn free(n: usize) -> Self {
        Self::with_numbered_generators("x", n, Vec::new()).expect("valid")
    }

    /// `< a | a^n >`
    pub fn cyclic(n: u64) -> Self {
        let rel = if n == 0 { vec![] } else { vec![Word::power(0, n as i64)] };
        Self::new(vec!["a".into()], rel).expect("valid")
    }

    /// `< x1..xn | [xi, xj] for i < j >`
    pub fn free_abelian(n: usize) -> Self {
        let mut rels = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                rels.push(Word::commutator(&Word::generator(i), &Word::generator(j)));
            }
        }
        Self::with_numbered_generators("x", n, rels).expect("valid")
    }

    /// `< a1, b1, ..., ag, bg | [a1,b1]...[ag,bg] >`
    pub fn surface(genus: usize) -> Self {
        let names = (1..=genus).flat_map(|i| [format!("a{i}"), format!("b{i}")]).collect();
        let rel = surface_relator(genus, |i| 2 * i, |i| 2 * i + 1);
        let rels = if genus == 0 { vec![] } else { vec![rel] };
        Self::new(names, rels).expect("valid")
    }

    pub fn generator_count(&self) -> usize {
        self.names.len()
    }

    pub fn relator_count(&self) -> usize {
        self.relators.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Returns a copy with extra relators appended.
    pub fn with_relators(&self, extra: impl IntoIterator<Item = Word>) -> Result<Self, Error> {
        let mut rels = self.relators.clone();
        rels.extend(extra);
        Self::new(self.names.clone(), rels)
    }

    /// Exponent-sum matrix: one row per relator, one column per generator.
    pub fn exponent_sum_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zero(self.relators.len(), self.names.len());
        for (r, w) in self.relators.iter().enumerate() {
            for s in w.syllables() {
                let cur = m.get(r, s.gen).clone();
                m.set(r, s.gen, cur + s.exp);
            }
        }
        m
    }

    pub fn abelianize(&self) -> AbelianInvariants {
        let rows = self
            .relators
            .iter()
            .map(|w| {
                let mut row = BTreeMap::new();
                for s in w.syllables() {
                    *row.entry(s.gen).or_insert_with(BigInt::zero) += s.exp;
                }
                row
            })
            .collect();
        sparse_cokernel_invariants(self.names.len(), rows)
    }

    /// Generators minus relators of this particular presentation.
    pub fn deficiency(&self) -> i64 {
        self.names.len() as i64 - self.relators.len() as i64
    }
}

/// Builds `prod_i [x(i), y(i)]` over `i < genus`.
pub(crate) fn surface_relator(
    genus: usize,
    x: impl Fn(usize) -> usize,
    y: impl Fn(usize) -> usize,
) -> Word {
    (0..genus).fold(Word::empty(), |acc, i| {
        acc.concat(&Word::commutator(&Word::generator(x(i)), &Word::generator(y(i))))
    })
}

/// Abelian invariants of the group presented by `p`.
pub fn abelianize(p: &Presentation) -> AbelianInvariants {
    p.abelianize()
}

pub fn deficiency(p: &Presentation) -> i64 {
    p.deficiency()
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "< {} | ", self.names.join(", "))?;
        for (i, r) in self.relators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", r.display_with(&self.names))?;
        }
        write!(f, " >")
    }
}

impl Serialize for Presentation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
