//! Generator elimination by Tietze moves.
//!
//! A relator in which some generator occurs exactly once can be solved for
//! that generator; substituting the solution everywhere and deleting both the
//! generator and the relator yields an isomorphic presentation.

use serde::Serialize;

use super::{Presentation, Word};

/// Record of one eliminated generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Elimination {
    pub generator: String,
    /// The solution, written over the generators present at that moment.
    pub solution: String,
}

/// Repeatedly eliminates generators that occur exactly once in some
/// relator, and drops relators that reduce to the empty word.
///
/// Among candidate relators the one with fewest letters wins; inside it the
/// highest-indexed singly occurring generator is removed, so lower-indexed
/// generators tend to survive.
pub fn simplify(p: &Presentation) -> (Presentation, Vec<Elimination>) {
    let mut names: Vec<String> = p.names().to_vec();
    let mut rels: Vec<Word> = p.relators().iter().filter(|w| !w.is_empty()).cloned().collect();
    let mut log = Vec::new();

    loop {
        let mut best: Option<(usize, usize, u64)> = None;
        for (ri, r) in rels.iter().enumerate() {
            let len = r.letter_count();
            if best.is_some_and(|(_, _, l)| l <= len) {
                continue;
            }
            let candidate = r
                .syllables()
                .iter()
                .filter(|s| s.exp.abs() == 1 && r.occurrences(s.gen) == 1)
                .map(|s| s.gen)
                .max();
            if let Some(g) = candidate {
                best = Some((ri, g, len));
            }
        }
        let Some((ri, gen, _)) = best else { break };

        let rel = rels.swap_remove(ri);
        let solution = solve_for(&rel, gen);
        log.push(Elimination {
            generator: names[gen].clone(),
            solution: solution.display_with(&names).to_string(),
        });
        let renumber = |g: usize| -> Option<usize> {
            match g.cmp(&gen) {
                std::cmp::Ordering::Less => Some(g),
                std::cmp::Ordering::Equal => None,
                std::cmp::Ordering::Greater => Some(g - 1),
            }
        };
        rels = rels
            .iter()
            .map(|w| w.substitute(gen, &solution).map_generators(renumber))
            .filter(|w| !w.is_empty())
            .collect();
        names.remove(gen);
    }

    let out = Presentation::new(names, rels).expect("elimination preserves validity");
    (out, log)
}

/// Solves `rel = 1` for the single occurrence of `gen`.
fn solve_for(rel: &Word, gen: usize) -> Word {
    let syl = rel.syllables();
    let at = syl.iter().position(|s| s.gen == gen).expect("generator occurs");
    let u = Word::new(syl[..at].iter().copied());
    let v = Word::new(syl[at + 1..].iter().copied());
    // u x v = 1  =>  x = u^-1 v^-1 ;  u x^-1 v = 1  =>  x = v u
    if syl[at].exp == 1 {
        u.inverse().concat(&v.inverse())
    } else {
        v.concat(&u)
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    #[test]
    fn eliminates_defined_generators() {
        let p = parse_presentation("< a, b, c | c a^-1 b^-1, [a,b] >").unwrap();
        let (q, log) = simplify(&p);
        assert_eq!(q.generator_count(), 2);
        assert_eq!(q.relator_count(), 1);
        assert_eq!(log.len(), 1);
        assert_eq!(log[0].generator, "c");
        assert_eq!(q.abelianize(), p.abelianize());
    }

    #[test]
    fn solution_handles_inverse_occurrence() {
        // a b^-1 c = 1 => b = c a
        let w = Word::from_pairs(&[(0, 1), (1, -1), (2, 1)]);
        let s = solve_for(&w, 1);
        assert_eq!(s, Word::from_pairs(&[(2, 1), (0, 1)]));
        assert!(w.substitute(1, &s).is_empty());
    }

    #[test]
    fn killing_everything_gives_trivial_group() {
        let p = parse_presentation("< a, b | a, b a^3 >").unwrap();
        let (q, _) = simplify(&p);
        assert_eq!(q, Presentation::trivial());
    }

    #[test]
    fn leaves_irreducible_presentations_alone() {
        let p = parse_presentation("< a, b | a^2 b^2, [a,b] >").unwrap();
        let (q, log) = simplify(&p);
        assert!(log.is_empty());
        assert_eq!(q, p);
    }
}
