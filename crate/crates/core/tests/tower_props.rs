use std::collections::BTreeSet;

use cosetvir::tower::{build_tower, coset_fusion, coset_modules, coset_weight, griess_weight_check, FusionTable};

const MAX_K: u32 = 8;

#[test]
fn path_counts_are_conserved_by_one_more_step() {
    for k in 1..=MAX_K {
        let t = build_tower(k, MAX_K).unwrap();
        let from_below = build_tower(k - 1, MAX_K).unwrap().extend().unwrap();
        assert_eq!(t.path_count(), from_below.path_count(), "k={k}");
        assert_eq!(t, from_below, "k={k}");
    }
}

#[test]
fn materialized_paths_match_counts() {
    for k in 0..=3 {
        let t = build_tower(k, MAX_K).unwrap();
        for i in t.sectors() {
            let paths = t.paths(i);
            assert_eq!(paths.len() as u64, t.sector_size(i));
            let distinct: BTreeSet<Vec<u32>> = paths
                .iter()
                .map(|p| std::iter::once(p.seed.k).chain(p.labels.iter().map(|l| l.k)).collect())
                .collect();
            assert_eq!(distinct.len(), paths.len());
            assert!(paths.iter().all(|p| p.terminal().k == i && p.terminal().level == k + 5));
        }
    }
}

#[test]
fn vacuum_sector_carries_the_coset_weights() {
    for k in 1..=MAX_K {
        let t = build_tower(k, MAX_K).unwrap();
        let expect: BTreeSet<_> = coset_modules(k).iter().map(|&i| coset_weight(k, i).unwrap()).collect();
        assert_eq!(t.terminal_weights(0), expect, "k={k}");
    }
}

#[test]
fn coset_fusion_is_closed() {
    for k in 1..=MAX_K {
        let modules: BTreeSet<u32> = coset_modules(k).into_iter().collect();
        for &i in &modules {
            for &j in &modules {
                let s = coset_fusion(k, i, j).unwrap();
                assert!(!s.is_empty());
                assert!(s.labels().all(|c| modules.contains(c)), "k={k} {i}x{j}");
            }
        }
        let table = FusionTable::new(k).unwrap();
        // the self-fusion length is min(i, p - i)
        for &i in &modules {
            assert_eq!(table.products(i, i).count() as u32, i.min(k + 6 - i), "k={k} i={i}");
        }
    }
}

#[test]
fn griess_identity_holds_through_fifty() {
    for k in 1..=50 {
        assert!(griess_weight_check(k).unwrap().holds, "k={k}");
    }
}
