//! Symbolic fundamental-group descriptors.

use std::fmt;

use num_bigint::BigInt;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::Error;
use crate::linalg::{cokernel_invariants, AbelianInvariants, IntMatrix};
use crate::presentation::{Presentation, Word};

use super::Tri;

/// A fundamental group, kept as a named family when possible and as an
/// explicit presentation otherwise.
///
/// Constructors normalize degenerate members, so ℤ is always
/// `FreeAbelian(1)` and the trivial group is always `Trivial`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pi1 {
    Trivial,
    /// Free group of rank at least 2.
    Free(usize),
    /// ℤ/n with n at least 2.
    Cyclic(u64),
    FreeAbelian(usize),
    /// Any other finitely generated abelian group.
    Abelian(AbelianInvariants),
    /// Closed orientable surface group of genus at least 2.
    SurfaceGroup(usize),
    Explicit(Presentation),
    /// Free product of at least two nontrivial factors, flattened.
    FreeProduct(Vec<Pi1>),
}

/// Result of killing words in a descriptor. When the generators were
/// renumbered, `renumber[g]` gives the new index of old generator `g`.
pub(crate) struct Killed {
    pub pi1: Pi1,
    pub renumber: Option<Vec<Option<usize>>>,
}

impl Pi1 {
    pub fn free(n: usize) -> Pi1 {
        match n {
            0 => Pi1::Trivial,
            1 => Pi1::FreeAbelian(1),
            n => Pi1::Free(n),
        }
    }

    pub fn cyclic(n: u64) -> Pi1 {
        match n {
            0 => Pi1::FreeAbelian(1),
            1 => Pi1::Trivial,
            n => Pi1::Cyclic(n),
        }
    }

    pub fn free_abelian(n: usize) -> Pi1 {
        if n == 0 {
            Pi1::Trivial
        } else {
            Pi1::FreeAbelian(n)
        }
    }

    pub fn surface(genus: usize) -> Pi1 {
        match genus {
            0 => Pi1::Trivial,
            1 => Pi1::FreeAbelian(2),
            g => Pi1::SurfaceGroup(g),
        }
    }

    pub fn abelian(inv: AbelianInvariants) -> Pi1 {
        if inv.torsion.is_empty() {
            return Pi1::free_abelian(inv.rank);
        }
        if inv.rank == 0 && inv.torsion.len() == 1 {
            if let Ok(n) = u64::try_from(&inv.torsion[0]) {
                return Pi1::Cyclic(n);
            }
        }
        Pi1::Abelian(inv)
    }

    pub fn free_product(factors: impl IntoIterator<Item = Pi1>) -> Pi1 {
        let mut flat = Vec::new();
        for f in factors {
            match f {
                Pi1::Trivial => {}
                Pi1::FreeProduct(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        // ℤ * ... * ℤ is free
        if flat.len() >= 2 && flat.iter().all(|f| matches!(f, Pi1::FreeAbelian(1) | Pi1::Free(_))) {
            let rank = flat
                .iter()
                .map(|f| match f {
                    Pi1::Free(n) => *n,
                    _ => 1,
                })
                .sum();
            return Pi1::free(rank);
        }
        match flat.len() {
            0 => Pi1::Trivial,
            1 => flat.pop().expect("one factor"),
            _ => Pi1::FreeProduct(flat),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Pi1::Trivial => "trivial",
            Pi1::Free(_) => "free",
            Pi1::Cyclic(_) => "cyclic",
            Pi1::FreeAbelian(_) => "free_abelian",
            Pi1::Abelian(_) => "abelian",
            Pi1::SurfaceGroup(_) => "surface",
            Pi1::Explicit(_) => "presentation",
            Pi1::FreeProduct(_) => "free_product",
        }
    }

    pub fn abelianization(&self) -> AbelianInvariants {
        match self {
            Pi1::Trivial => AbelianInvariants::trivial(),
            Pi1::Free(n) | Pi1::FreeAbelian(n) => AbelianInvariants::free(*n),
            Pi1::Cyclic(n) => AbelianInvariants::from_cyclic_orders(&[*n]),
            Pi1::Abelian(inv) => inv.clone(),
            Pi1::SurfaceGroup(g) => AbelianInvariants::free(2 * g),
            Pi1::Explicit(p) => p.abelianize(),
            Pi1::FreeProduct(fs) => {
                let parts: Vec<AbelianInvariants> = fs.iter().map(Pi1::abelianization).collect();
                direct_sum(&parts)
            }
        }
    }

    pub fn b1(&self) -> usize {
        self.abelianization().rank
    }

    /// Whether this is the fundamental group of a closed orientable surface
    /// (genus 0 and 1 included).
    pub fn is_surface_group(&self) -> Tri {
        match self {
            Pi1::Trivial | Pi1::SurfaceGroup(_) => Tri::Yes,
            Pi1::FreeAbelian(n) => Tri::from_bool(*n == 2),
            Pi1::Free(_) | Pi1::Cyclic(_) | Pi1::Abelian(_) | Pi1::FreeProduct(_) => Tri::No,
            Pi1::Explicit(p) => {
                let ab = p.abelianize();
                if !ab.torsion.is_empty() || ab.rank % 2 == 1 {
                    Tri::No
                } else {
                    Tri::Unknown
                }
            }
        }
    }

    /// A presentation of the group. For family tags the generator indices
    /// are the ones marked tori refer to.
    pub fn to_presentation(&self) -> Presentation {
        match self {
            Pi1::Trivial => Presentation::trivial(),
            Pi1::Free(n) => Presentation::free(*n),
            Pi1::Cyclic(n) => Presentation::cyclic(*n),
            Pi1::FreeAbelian(n) => Presentation::free_abelian(*n),
            Pi1::SurfaceGroup(g) => Presentation::surface(*g),
            Pi1::Explicit(p) => p.clone(),
            Pi1::Abelian(inv) => {
                let k = inv.rank + inv.torsion.len();
                let names = (1..=inv.rank)
                    .map(|i| format!("z{i}"))
                    .chain((1..=inv.torsion.len()).map(|i| format!("u{i}")))
                    .collect();
                let mut rels = Vec::new();
                for (i, t) in inv.torsion.iter().enumerate() {
                    let e = i64::try_from(t).expect("torsion order fits in i64");
                    rels.push(Word::power(inv.rank + i, e));
                }
                for i in 0..k {
                    for j in i + 1..k {
                        rels.push(Word::commutator(&Word::generator(i), &Word::generator(j)));
                    }
                }
                Presentation::new(names, rels).expect("valid")
            }
            Pi1::FreeProduct(fs) => {
                let mut names: Vec<String> = Vec::new();
                let mut rels = Vec::new();
                for (k, f) in fs.iter().enumerate() {
                    let p = f.to_presentation();
                    let off = names.len();
                    for n in p.names() {
                        let mut name = n.clone();
                        if names.contains(&name) {
                            name = format!("{n}_{}", k + 1);
                        }
                        while names.contains(&name) {
                            name.push('_');
                        }
                        names.push(name);
                    }
                    rels.extend(p.relators().iter().map(|w| w.map_generators(|g| Some(g + off))));
                }
                Presentation::new(names, rels).expect("valid")
            }
        }
    }

    /// Quotient by the normal closure of `words`.
    pub(crate) fn kill(&self, words: &[Word]) -> Result<Killed, Error> {
        let words: Vec<&Word> = words.iter().filter(|w| !w.is_empty()).collect();
        if words.is_empty() || *self == Pi1::Trivial {
            return Ok(Killed { pi1: self.clone(), renumber: None });
        }
        let single: Option<Vec<usize>> = words
            .iter()
            .map(|w| match w.syllables() {
                [s] if s.exp.abs() == 1 => Some(s.gen),
                _ => None,
            })
            .collect();
        if let (Some(gens), Pi1::Free(n) | Pi1::FreeAbelian(n)) = (&single, self) {
            let n = *n;
            let mut renumber = vec![None; n];
            let mut next = 0;
            for (g, slot) in renumber.iter_mut().enumerate() {
                if !gens.contains(&g) {
                    *slot = Some(next);
                    next += 1;
                }
            }
            let pi1 = match self {
                Pi1::Free(_) => Pi1::free(next),
                _ => Pi1::free_abelian(next),
            };
            return Ok(Killed { pi1, renumber: Some(renumber) });
        }
        let p = self.to_presentation();
        for w in &words {
            if w.max_generator().is_some_and(|m| m >= p.generator_count()) {
                return Err(Error::NotExpressible(format!(
                    "torus image refers to a generator outside {}",
                    self
                )));
            }
        }
        let q = p.with_relators(words.into_iter().cloned())?;
        Ok(Killed { pi1: Pi1::Explicit(q), renumber: None })
    }
}

/// ℤ^a ⊕ T_a  ⊕  ℤ^b ⊕ T_b  ⊕ ...
pub(crate) fn direct_sum(parts: &[AbelianInvariants]) -> AbelianInvariants {
    let rank = parts.iter().map(|p| p.rank).sum();
    let torsion: Vec<&BigInt> = parts.iter().flat_map(|p| p.torsion.iter()).collect();
    let mut m = IntMatrix::zero(torsion.len(), torsion.len());
    for (i, t) in torsion.iter().enumerate() {
        m.set(i, i, (*t).clone());
    }
    let t = cokernel_invariants(&m);
    AbelianInvariants { rank, torsion: t.torsion }
}

impl fmt::Display for Pi1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pi1::Trivial => write!(f, "1"),
            Pi1::Free(n) => write!(f, "F{n}"),
            Pi1::Cyclic(n) => write!(f, "Z/{n}"),
            Pi1::FreeAbelian(1) => write!(f, "Z"),
            Pi1::FreeAbelian(n) => write!(f, "Z^{n}"),
            Pi1::Abelian(inv) => write!(f, "{inv}"),
            Pi1::SurfaceGroup(g) => write!(f, "pi1(Sigma_{g})"),
            Pi1::Explicit(p) => write!(f, "{p}"),
            Pi1::FreeProduct(fs) => {
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " * ")?;
                    }
                    match x {
                        Pi1::Abelian(_) => write!(f, "({x})")?,
                        _ => write!(f, "{x}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

impl Serialize for Pi1 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Pi1", 3)?;
        st.serialize_field("kind", self.kind())?;
        st.serialize_field("text", &self.to_string())?;
        st.serialize_field("abelianization", &self.abelianization())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_normalize() {
        assert_eq!(Pi1::cyclic(0), Pi1::FreeAbelian(1));
        assert_eq!(Pi1::cyclic(1), Pi1::Trivial);
        assert_eq!(Pi1::free(1), Pi1::FreeAbelian(1));
        assert_eq!(Pi1::surface(1), Pi1::FreeAbelian(2));
        assert_eq!(Pi1::abelian(AbelianInvariants::from_cyclic_orders(&[5])), Pi1::Cyclic(5));
        assert_eq!(Pi1::free_product([Pi1::Trivial, Pi1::Cyclic(3)]), Pi1::Cyclic(3));
        assert_eq!(Pi1::free_product([Pi1::free(1), Pi1::free(2)]), Pi1::Free(3));
    }

    #[test]
    fn free_product_abelianizes_to_direct_sum() {
        let g = Pi1::free_product([Pi1::Cyclic(4), Pi1::Cyclic(6), Pi1::FreeAbelian(1)]);
        let ab = g.abelianization();
        assert_eq!(ab.to_string(), "Z + Z/2 + Z/12");
        assert_eq!(g.to_presentation().abelianize(), ab);
    }

    #[test]
    fn killing_coordinate_generators_renumbers() {
        let k = Pi1::FreeAbelian(4).kill(&[Word::generator(3)]).unwrap();
        assert_eq!(k.pi1, Pi1::FreeAbelian(3));
        assert_eq!(k.renumber.unwrap(), vec![Some(0), Some(1), Some(2), None]);
        let k = Pi1::FreeAbelian(2).kill(&[Word::power(0, 3)]).unwrap();
        assert_eq!(k.pi1.abelianization().to_string(), "Z + Z/3");
    }

    #[test]
    fn surface_group_detection() {
        assert_eq!(Pi1::SurfaceGroup(3).is_surface_group(), Tri::Yes);
        assert_eq!(Pi1::FreeAbelian(4).is_surface_group(), Tri::No);
        assert_eq!(Pi1::Explicit(Presentation::surface(2)).is_surface_group(), Tri::Unknown);
        assert_eq!(Pi1::Explicit(Presentation::cyclic(3)).is_surface_group(), Tri::No);
    }
}
