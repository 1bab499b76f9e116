use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hrush_core::genesis::{extension_catalog, generic_build, strong_embed_structure, BuildConfig};
use hrush_core::pclass::{is_strong_sub, lift_search, pclass_generic_build, pregeometries_on, LiftConfig};
use hrush_core::random::point_names;
use hrush_core::{Exec, Point, Signature};

#[test]
fn first_stage_holds_every_small_class_member() {
    let sig = Signature::uniform(3);
    let chain = generic_build(&sig, 3, 1, 17, &BuildConfig::default(), Exec::Parallel).unwrap();
    chain.validate().unwrap();
    let stage = &chain.stages[1];
    let catalog = extension_catalog(&sig, 3, 5).unwrap();
    let mut seen = BTreeSet::new();
    for pair in &catalog {
        if !seen.insert(pair.b.fingerprint()) {
            continue;
        }
        let g = strong_embed_structure(&pair.b, stage, 20).unwrap();
        assert!(g.is_some_and(|g| g.strong), "{}", pair.describe());
    }
}

#[test]
fn stage_ranks_agree_on_shared_points() {
    let chain = pclass_generic_build(3, 2, 2, 5, &BuildConfig::default(), Exec::Parallel).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 1..chain.stages() - 1 {
        let ground = chain.ground(i);
        for _ in 0..200 {
            let size = rng.random_range(1..=4.min(ground.len()));
            let pts: Vec<Point> = (0..size).map(|_| ground[rng.random_range(0..ground.len())].clone()).collect();
            assert_eq!(chain.rank(i, &pts).unwrap(), chain.rank(i + 1, &pts).unwrap());
        }
    }
}

#[test]
fn small_members_embed_strongly_into_the_chain() {
    let chain = pclass_generic_build(3, 3, 1, 17, &BuildConfig::default(), Exec::Parallel).unwrap();
    let cfg = LiftConfig::default();
    let mut members = 0;
    for k in 0..=3 {
        for q in pregeometries_on(&point_names(k), 20).unwrap() {
            if !lift_search(&q, 3, &cfg, Exec::Parallel).unwrap().found() {
                continue;
            }
            members += 1;
            let (stage, g) = chain.strong_embedding(&q, &cfg, Exec::Parallel).unwrap().expect("embeds");
            // The image carries the same ranks in the stage.
            let image: Vec<Point> = q.ground().iter().map(|p| g.get(p).unwrap().clone()).collect();
            assert_eq!(chain.rank(stage, &image).unwrap(), q.rank(q.full()));
        }
    }
    assert_eq!(members, 1 + 2 + 5 + 16);
}

#[test]
fn strong_substructure_examples() {
    let cfg = LiftConfig::default();
    for b in pregeometries_on(&point_names(3), 20).unwrap() {
        if !lift_search(&b, 3, &cfg, Exec::Sequential).unwrap().found() {
            continue;
        }
        let empty = b.restrict(hrush_core::Subset::EMPTY);
        assert!(is_strong_sub(&empty, &b, 3, &cfg, Exec::Sequential).unwrap().found());
        assert!(is_strong_sub(&b, &b, 3, &cfg, Exec::Sequential).unwrap().found());
    }
}
