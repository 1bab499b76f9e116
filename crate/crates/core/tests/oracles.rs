//! Library answers checked against direct subset enumeration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hrush_core::closure::{d_closure, dimension, is_self_sufficient, ss_closure};
use hrush_core::mincut::min_predim_over;
use hrush_core::pregeom::{pg_extract, pg_iso};
use hrush_core::random::random_structure;
use hrush_core::transforms::{derive_saturate, pad_arity, unpad_arity};
use hrush_core::{Exec, IsoMode, RelStructure, Signature, Subset, Symbol};

fn delta(m: &RelStructure, s: u64) -> i64 {
    let inside: i64 = m
        .all_tuples()
        .filter(|(_, t)| t.iter().all(|&i| s >> i & 1 == 1))
        .map(|(name, _)| i64::from(m.symbol_of(name).weight))
        .sum();
    i64::from(s.count_ones()) - inside
}

fn dim(m: &RelStructure, a: u64) -> i64 {
    (0..1u64 << m.len()).filter(|s| s & a == a).map(|s| delta(m, s)).min().unwrap()
}

fn structures(seed: u64, count: usize, max: usize) -> Vec<RelStructure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sig = Signature::closed(vec![Symbol::new("R", 3, 1), Symbol::new("S", 2, 2), Symbol::new("T", 4, 1)]).unwrap();
    (0..count).map(|_| random_structure(&mut rng, &sig, 1, max).unwrap()).collect()
}

#[test]
fn closures_and_dimension_match_enumeration() {
    for m in structures(11, 150, 7) {
        let full = (1u64 << m.len()) - 1;
        for a in 0..=full {
            let d = dim(&m, a);
            assert_eq!(dimension(&m, Subset(a), 20).unwrap(), d);
            let ss = (0..=full).filter(|s| s & a == a).all(|s| delta(&m, s) >= delta(&m, a));
            assert_eq!(is_self_sufficient(&m, Subset(a), 20).unwrap(), ss);
            // The self-sufficient closure is the least self-sufficient superset.
            let cl = ss_closure(&m, Subset(a), 20).unwrap().bits();
            let least = (0..=full)
                .filter(|s| s & a == a)
                .filter(|&s| (0..=full).filter(|t| t & s == s).all(|t| delta(&m, t) >= delta(&m, s)))
                .min_by_key(|s| s.count_ones())
                .unwrap();
            assert_eq!(cl, least);
            let dcl = d_closure(&m, Subset(a), 20).unwrap().bits();
            let expected: u64 = (0..m.len()).filter(|&i| dim(&m, a | 1 << i) == d).map(|i| 1u64 << i).sum();
            assert_eq!(dcl, expected | a);
        }
    }
}

#[test]
fn minimum_cut_matches_enumeration() {
    for m in structures(12, 200, 9) {
        for a in (0..1u64 << m.len()).step_by(5) {
            let fixed: Vec<bool> = (0..m.len()).map(|i| a >> i & 1 == 1).collect();
            let cut = min_predim_over(&m, &fixed);
            assert_eq!(cut.value, dim(&m, a));
            let c: u64 = (0..m.len()).filter(|&i| cut.closure[i]).map(|i| 1u64 << i).sum();
            assert_eq!(delta(&m, c), cut.value);
            assert_eq!(c & a, a);
        }
    }
}

#[test]
fn pad_round_trip_keeps_the_pregeometry() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..60 {
        let m = random_structure(&mut rng, &Signature::uniform(3), 1, 7).unwrap();
        let padded = pad_arity(&m, 5).unwrap();
        for s in 0..1u64 << m.len() {
            assert_eq!(delta(&padded, s), delta(&m, s));
        }
        let back = unpad_arity(&padded).unwrap();
        assert_eq!(back, m);
        let p = pg_extract(&m, 20, Exec::Sequential).unwrap();
        let q = pg_extract(&padded, 20, Exec::Sequential).unwrap();
        let g = pg_iso(&p, &q, IsoMode::Iso, 20).unwrap().expect("same table");
        assert!(g.is_identity());
    }
}

#[test]
fn derivation_keeps_dimension_of_old_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let sig = Signature::closed(vec![Symbol::new("R3", 3, 1), Symbol::new("R4", 4, 1), Symbol::new("R5", 5, 1)]).unwrap();
    let mut derived_any = 0;
    for _ in 0..60 {
        let m = random_structure(&mut rng, &sig, 1, 5).unwrap();
        let d = derive_saturate(&m).unwrap();
        assert!(d.all_tuples().all(|(_, t)| t.len() == 3));
        assert!(d.in_class());
        derived_any += usize::from(d.len() > m.len());
        if d.len() > 16 {
            continue;
        }
        for a in 0..1u64 << m.len() {
            let names = m.subset_names(Subset(a));
            let a2 = d.subset(&names).unwrap().bits();
            assert_eq!(dim(&d, a2), dim(&m, a), "{names:?}");
        }
    }
    assert!(derived_any > 10);
}
