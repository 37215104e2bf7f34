use std::collections::BTreeSet;

use cosetvir::certify::{
    certify, generate_relations, lambda_square_requirements, propagate_nonvanishing, triple_key, Branch, CertifyOptions,
    Status, Triple,
};
use cosetvir::braiding::RKey;
use cosetvir::certify::supplementary_requirements;
use cosetvir::tower::{coset_modules, FusionTable};

/// Admissible coset triples straight from the triangle and sum conditions.
fn admissible(k: u32, a: u32, b: u32, c: u32) -> bool {
    let p = k + 6;
    let odd = |x: u32| x % 2 == 1 && x < p;
    odd(a) && odd(b) && odd(c) && a.abs_diff(b) < c && c < a + b && a + b + c < 2 * p
}

#[test]
fn fusion_table_matches_the_triangle_rule() {
    for k in 1..=8 {
        let table = FusionTable::new(k).unwrap();
        let ms = coset_modules(k);
        for &a in &ms {
            for &b in &ms {
                for &c in &ms {
                    assert_eq!(table.n(a, b, c), admissible(k, a, b, c), "k={k} ({a},{b},{c})");
                }
            }
        }
    }
}

#[test]
fn relations_have_equal_sides() {
    for k in 1..=8 {
        for r in generate_relations(k).unwrap() {
            assert_eq!(r.left.len(), r.right.len(), "k={k} {:?}", r.quadruple);
        }
    }
}

#[test]
fn propagation_marks_every_triple() {
    let expected = [6, 9, 11, 15, 18, 23, 27, 34];
    for k in 1..=8u32 {
        let prop = propagate_nonvanishing(k).unwrap();
        assert_eq!(prop.triples.len(), expected[k as usize - 1], "k={k}");
        assert!(prop.all_nonzero(), "k={k}: {:?}", prop.undecided());
        assert!(prop.rank_check, "k={k}");
        assert_eq!(prop.m, k + 4);
        assert_eq!(prop.branch, if k % 2 == 1 { Branch::Odd } else { Branch::Even });
        for t in &prop.triples {
            assert!(t.provenance.is_some_and(|i| i < prop.log.len()));
            let [a, b, c] = t.indices;
            for (x, y, z) in [(a, b, c), (b, a, c), (c, b, a), (b, c, a)] {
                assert_eq!(prop.status(x, y, z), Status::Nonzero);
            }
        }
        assert!(prop.log.iter().any(|s| s.lemma == "vacuum"));
        assert!(prop.log.iter().any(|s| s.lemma == "recursion"));
    }
}

#[test]
fn certificates_for_small_towers() {
    let c1 = certify(1, &CertifyOptions::default()).unwrap();
    assert!(c1.verdict.is_unique(), "{:?}", c1.verdict);
    assert_eq!(c1.supplementary.len(), 4);
    assert!(c1.supplementary.iter().all(|e| !e.is_zero));

    let c2 = certify(2, &CertifyOptions::default()).unwrap();
    assert!(c2.verdict.is_unique());
    assert_eq!(c2.triples().len(), 11);
    assert!(c2.sigma.consistent());
}

#[test]
fn vanishing_entries_make_k4_inconclusive() {
    let c = certify(4, &CertifyOptions::default()).unwrap();
    assert!(!c.verdict.is_unique());
    let zeros: BTreeSet<Triple> = c.elements.iter().filter(|e| e.is_zero).filter_map(|e| e.requirement.triple).collect();
    let expect: BTreeSet<Triple> = [[3, 5, 5], [5, 3, 5], [5, 5, 3], [5, 5, 7], [5, 7, 5], [7, 5, 5]].into_iter().collect();
    assert_eq!(zeros, expect);
    // the matrices themselves still invert
    assert!(c.sigma.matrices.iter().all(|m| m.inverse_verified));
}

#[test]
fn verdicts_through_k8() {
    for k in [3, 5, 6, 7] {
        let c = certify(k, &CertifyOptions::default()).unwrap();
        assert!(c.verdict.is_unique(), "k={k}: {:?}", c.verdict);
    }
    let c = certify(8, &CertifyOptions::default()).unwrap();
    assert_eq!(c.elements.iter().filter(|e| e.is_zero).count(), 19);
    assert!(!c.verdict.is_unique());
}

#[test]
fn certificates_are_deterministic() {
    for k in 1..=3 {
        let a = certify(k, &CertifyOptions::default()).unwrap().to_json().to_string();
        let b = certify(k, &CertifyOptions::default()).unwrap().to_json().to_string();
        assert_eq!(a, b);
    }
}

#[test]
fn zeroing_any_required_element_flips_the_verdict() {
    for k in 1..=2 {
        for req in lambda_square_requirements(k).unwrap() {
            let tr = req.triple.unwrap();
            let c = certify(k, &CertifyOptions { zeroed: vec![tr], ..Default::default() }).unwrap();
            assert!(!c.verdict.is_unique(), "k={k} {tr:?}");
        }
    }
}

#[test]
fn zeroing_a_supplementary_element_flips_k1() {
    for req in supplementary_requirements(1) {
        let c = certify(1, &CertifyOptions { zeroed_keys: vec![req.key], ..Default::default() }).unwrap();
        assert!(!c.verdict.is_unique(), "{}", req.key);
        assert_eq!(c.supplementary.iter().filter(|e| e.zeroed).count(), 1);
    }
    let stray = RKey::new(1, 1, 1, 1, 1, 1);
    assert!(certify(1, &CertifyOptions { zeroed_keys: vec![stray], ..Default::default() }).is_err());
}

#[test]
fn requirements_only_reference_fusion_compatible_triples() {
    for k in 1..=8 {
        let table = FusionTable::new(k).unwrap();
        let prop = propagate_nonvanishing(k).unwrap();
        let known: BTreeSet<Triple> = prop.triples.iter().map(|t| t.indices).collect();
        for r in lambda_square_requirements(k).unwrap() {
            let [a, b, c] = r.triple.unwrap();
            let t = r.key.n;
            assert!(table.n(a, b, t) && table.n(a, t, c) && table.n(c, b, t));
            assert!(known.contains(&triple_key(a, t, c)));
        }
    }
}
