//! Free amalgamation, extension catalogs, bounded generic chains and the
//! extension-property check.
//!
//! The true generic model is infinite. What is built here is a finite chain
//! `M_0 ≤ M_1 ≤ …` realizing the extension property for the pairs of a
//! bounded catalog only, and every consumer quantifies over that same bound.

mod builder;
mod catalog;
mod check;
mod embed;

use std::collections::BTreeSet;

pub use builder::{generic_build, BuildConfig, GenericChain, RoundLog, Truncation};
pub use catalog::{catalog_symbols, extension_catalog, for_each_in_class, ExtPair, RawTuple};
pub use check::{extension_check, replace_in_chain, CheckConfig, ExtReport, Unwitnessed};
pub use embed::{strong_embed_structure, Host};

use crate::error::{Error, Result};
use crate::mincut;
use crate::structure::{Point, RelStructure};

/// Glue `a1` and `a2` over their common points `a0` with no new relations.
/// Requires `a0` to be exactly the overlap, carrying the same relations on
/// both sides, and self-sufficient in `a2`.
pub fn free_amalgam(a1: &RelStructure, a2: &RelStructure, a0: &[Point]) -> Result<RelStructure> {
    if a1.signature() != a2.signature() {
        return Err(Error::OverlapMismatch("the two structures have different signatures".into()));
    }
    let shared: BTreeSet<&Point> = a1.universe().iter().filter(|p| a2.index_of(p.as_str()).is_some()).collect();
    let base: BTreeSet<&Point> = a0.iter().collect();
    if shared != base {
        let names: Vec<&str> = shared.iter().map(|p| p.as_str()).collect();
        return Err(Error::OverlapMismatch(format!("the structures share {{{}}}", names.join(","))));
    }
    let members = |m: &RelStructure| -> Vec<bool> { m.universe().iter().map(|p| base.contains(p)).collect() };
    let (m1, m2) = (members(a1), members(a2));
    let restrict = |m: &RelStructure, mem: &[bool]| -> BTreeSet<(String, Vec<Point>)> {
        m.all_tuples()
            .filter(|(_, t)| t.iter().all(|&i| mem[i as usize]))
            .map(|(s, t)| (s.to_string(), t.iter().map(|&i| m.point(i as usize).clone()).collect()))
            .collect()
    };
    if restrict(a1, &m1) != restrict(a2, &m2) {
        return Err(Error::OverlapMismatch("the two sides induce different relations on the base".into()));
    }
    if mincut::min_predim_over(a2, &m2).value != a2.predim_of(&m2) {
        let names: Vec<&str> = a0.iter().map(Point::as_str).collect();
        return Err(Error::NotSelfSufficient(format!("{{{}}}", names.join(","))));
    }
    let tuples: BTreeSet<(String, Vec<Point>)> = [a1, a2]
        .into_iter()
        .flat_map(|m| {
            m.all_tuples()
                .map(move |(s, t)| (s.to_string(), t.iter().map(|&i| m.point(i as usize).clone()).collect()))
        })
        .collect();
    let points: BTreeSet<Point> = a1.universe().iter().chain(a2.universe()).cloned().collect();
    RelStructure::new(a1.signature().clone(), points, tuples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure;
    use crate::signature::Signature;
    use crate::structure::Subset;
    use crate::test_fixtures::*;

    fn l3(points: &[&str], tuples: &[[&str; 3]]) -> RelStructure {
        RelStructure::new(Signature::uniform(3), points.iter().copied(), tuples.iter().map(|t| ("R", pts(t))))
            .unwrap()
    }

    #[test]
    fn amalgam_examples() {
        let f = free_amalgam(&l3(&["a", "b"], &[]), &l3(&["a", "c"], &[]), &pts(&["a"])).unwrap();
        assert_eq!(f, l3(&["a", "b", "c"], &[]));
        assert_eq!(f.predim_full(), 3);

        let s2 = s2();
        assert_eq!(free_amalgam(&s2, &l3(&["a"], &[]), &pts(&["a"])).unwrap(), s2);

        let f = free_amalgam(&s2, &l3(&["a", "d"], &[]), &pts(&["a"])).unwrap();
        assert_eq!(f.predim_full(), 1);
        assert!((0..16u64).all(|s| f.predim(Subset(s)) >= 0));
        let a1 = f.subset(&["a", "b", "c"]).unwrap();
        assert!(closure::is_self_sufficient(&f, a1, 20).unwrap());
    }

    #[test]
    fn amalgam_errors() {
        let s2 = s2();
        assert!(matches!(
            free_amalgam(&s2, &l3(&["a", "b"], &[]), &pts(&["a"])),
            Err(Error::OverlapMismatch(_))
        ));
        assert!(matches!(
            free_amalgam(&l3(&["x"], &[]), &s2, &pts(&["a"])),
            Err(Error::OverlapMismatch(_))
        ));
        // {a} is not self-sufficient in S2.
        assert!(matches!(free_amalgam(&l3(&["a", "z"], &[]), &s2, &pts(&["a"])), Err(Error::NotSelfSufficient(_))));
        let loop_a = l3(&["a", "q"], &[["a", "a", "a"]]);
        assert!(matches!(
            free_amalgam(&loop_a, &l3(&["a", "r"], &[]), &pts(&["a"])),
            Err(Error::OverlapMismatch(_))
        ));
    }
}
