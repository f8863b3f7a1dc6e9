use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;

use fourgeo::bounds::{family_report, free_abelian_chi_lower, hopf_lower, thm1_upper, BoundOptions, GroupFamily, Target};
use fourgeo::geography::{concavity_check, upper_envelope, Interval, Witness};
use fourgeo::linalg::{determinant_divisors, smith_normal_form, IntMatrix};
use fourgeo::manifold::{atomic, derived_checks, Atom, CheckStatus};
use fourgeo::presentation::{parse_presentation, Presentation, Syllable, Word};
use fourgeo::rational::{frac, int, Q};

fn matrix() -> impl Strategy<Value = IntMatrix> {
    (1..=6usize, 1..=6usize).prop_flat_map(|(r, c)| {
        prop::collection::vec(-20i64..=20, r * c)
            .prop_map(move |v| IntMatrix::new(r, c, v.into_iter().map(BigInt::from).collect()).unwrap())
    })
}

fn witnesses() -> impl Strategy<Value = Vec<Witness>> {
    prop::collection::vec((-60i64..=60, -40i64..=40), 1..10).prop_map(|v| {
        v.into_iter().enumerate().map(|(i, (c, s))| Witness::new(format!("w{i}"), c, s)).collect()
    })
}

fn rational() -> impl Strategy<Value = Q> {
    (-200i64..=200, 1i64..=12).prop_map(|(n, d)| frac(n, d))
}

fn presentation() -> impl Strategy<Value = Presentation> {
    (0..=4usize).prop_flat_map(|g| {
        let word = prop::collection::vec((0..g.max(1), prop_oneof![-3i64..=-1, 1i64..=3]), 0..7);
        prop::collection::vec(word, 0..4).prop_map(move |rels| {
            let names = (0..g).map(|i| format!("g{i}")).collect();
            let words = if g == 0 {
                Vec::new()
            } else {
                rels.into_iter().map(|w| Word::reduced(w.into_iter().map(|(a, e)| Syllable::new(a, e)))).collect()
            };
            Presentation::new(names, words).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smith_form_matches_divisors(m in matrix()) {
        let s = smith_normal_form(&m);
        prop_assert!(s.divisibility_chain_holds());
        for k in 0..=s.rank {
            prop_assert_eq!(s.leading_product(k), determinant_divisors(&m, k).unwrap().abs());
        }
        prop_assert_eq!(smith_normal_form(&m.transpose()).invariant_factors, s.invariant_factors);
    }

    #[test]
    fn envelope_is_concave_and_tight(ws in witnesses(), lo in rational(), width in 1i64..=50, b_frac in 0i64..=100) {
        let hi = &lo + int(width);
        let f = upper_envelope(&ws, &Interval::closed(lo.clone(), hi.clone())).unwrap();
        prop_assert!(concavity_check(&f));
        let b = &lo + (&hi - &lo) * frac(b_frac, 100);
        let v = f.eval(&b).finite().cloned().unwrap();
        prop_assert!(ws.iter().all(|w| v <= w.value(&b)));
        prop_assert!(ws.iter().any(|w| v == w.value(&b)));
    }

    #[test]
    fn envelope_is_monotone_in_witness_set(ws in witnesses(), extra in witnesses(), b in rational()) {
        let all: Vec<Witness> = ws.iter().chain(&extra).cloned().collect();
        let small = upper_envelope(&ws, &Interval::all()).unwrap();
        let big = upper_envelope(&all, &Interval::all()).unwrap();
        prop_assert!(big.eval(&b).finite().unwrap() <= small.eval(&b).finite().unwrap());
    }

    #[test]
    fn envelope_scales(ws in witnesses(), a in 1i64..=9, b in rational()) {
        // min_w (a chi + b sigma) = a * f(1, b/a)
        let f = upper_envelope(&ws, &Interval::all()).unwrap();
        let direct = ws.iter().map(|w| int(a) * int(w.chi) + &b * int(w.sigma)).min().unwrap();
        let scaled = int(a) * f.eval(&(&b / int(a))).finite().cloned().unwrap();
        prop_assert_eq!(direct, scaled);
    }

    #[test]
    fn thm1_upper_strictly_increasing(g in 0u64..50, r in 0u64..50) {
        prop_assert!(thm1_upper(g + 1, r).0 > thm1_upper(g, r).0);
        prop_assert!(thm1_upper(g, r + 1).0 > thm1_upper(g, r).0);
    }

    #[test]
    fn presentation_text_round_trips(p in presentation()) {
        let q = parse_presentation(&p.to_string()).unwrap();
        prop_assert_eq!(q.abelianize(), p.abelianize());
        prop_assert_eq!(q.to_string(), p.to_string());
    }
}

fn check_family(f: &GroupFamily) {
    for target in [Target::Chi, Target::ChiPlusSigma] {
        let r = family_report(f, target, BoundOptions::default()).unwrap_or_else(|e| panic!("{f}: {e}"));
        if let (Some(l), Some(u)) = (r.lower, r.upper) {
            assert!(l <= u, "{f} {target}: {l} > {u}");
        }
        if r.exact {
            let ws = r.upper_witnesses();
            assert!(!ws.is_empty(), "{f} {target}: exact without witness");
            for w in ws {
                let d = derived_checks(w);
                assert!(d.failures().is_empty(), "{f}: witness {} fails {:?}", w.name(), d.failures());
            }
        }
        for w in r.witnesses() {
            assert!(derived_checks(w).failures().is_empty(), "{f}: witness {}", w.name());
        }
    }
}

#[test]
fn family_scans_are_consistent() {
    for n in 0..=20 {
        check_family(&GroupFamily::Free(n).normalized());
        check_family(&GroupFamily::FreeAbelian(n).normalized());
    }
    for n in 0..=100 {
        check_family(&GroupFamily::Cyclic(n).normalized());
    }
    for g in 0..=6 {
        check_family(&GroupFamily::SurfaceGroup(g).normalized());
    }
    let orders = [2u64, 3, 4, 6, 12];
    for rank in 0..=3u64 {
        for len in 0..=3usize {
            let mut idx = vec![0usize; len];
            loop {
                let torsion: Vec<u64> = idx.iter().map(|&i| orders[i]).collect();
                check_family(&GroupFamily::AbelianSum { rank, torsion }.normalized());
                let mut k = 0;
                while k < len && idx[k] == orders.len() - 1 {
                    idx[k] = 0;
                    k += 1;
                }
                if k == len {
                    break;
                }
                idx[k] += 1;
            }
        }
    }
}

#[test]
fn free_abelian_lower_versus_hopf() {
    for n in 0..=40u64 {
        let lower = free_abelian_chi_lower(n);
        let hopf = hopf_lower(n, n * n.saturating_sub(1) / 2);
        match n {
            0 => assert_eq!(lower, 3),
            1 => assert_eq!(lower, 2),
            3 => assert_eq!(lower, 3),
            5 => assert_eq!(lower, 7),
            _ if n % 8 == 1 || n % 8 == 4 => assert_eq!(lower, hopf, "n={n}"),
            _ => assert_eq!(lower, hopf + 1, "n={n}"),
        }
    }
}

#[test]
fn sym2_meets_exact_bound() {
    for g in (0..=19u64).filter(|g| matches!(g % 4, 0 | 1 | 3)) {
        let s = atomic(Atom::Sym2(g)).unwrap();
        assert_eq!(free_abelian_chi_lower(2 * g), s.chi, "g={g}");
        if g >= 1 {
            let r = family_report(&GroupFamily::FreeAbelian(2 * g), Target::Chi, BoundOptions::default()).unwrap();
            assert!(r.exact && r.upper == Some(s.chi), "g={g}");
        }
    }
    for g in (2..=18u64).filter(|g| g % 4 == 2) {
        let s = atomic(Atom::Sym2(g)).unwrap();
        let r = family_report(&GroupFamily::FreeAbelian(2 * g), Target::Chi, BoundOptions::default()).unwrap();
        assert_eq!(r.lower, Some(s.chi - 1), "g={g}");
        assert!(r.upper.unwrap() <= s.chi, "g={g}");
    }
}

#[test]
fn chi_plus_sigma_congruence_for_free_abelian() {
    for n in 0..=20 {
        let r = family_report(&GroupFamily::FreeAbelian(n).normalized(), Target::ChiPlusSigma, BoundOptions::default()).unwrap();
        for v in [r.lower, r.upper].into_iter().flatten() {
            assert_eq!(v.rem_euclid(4), 0, "n={n}");
        }
        for w in r.witnesses() {
            assert_eq!((w.chi + w.sigma).rem_euclid(4), 0, "n={n} {}", w.name());
            assert_eq!(derived_checks(w).status("chi_plus_sigma_mod_4"), Some(CheckStatus::Pass));
        }
    }
}
