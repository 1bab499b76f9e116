//! The lifted class `(P_n, ⊴_n)`: pregeometries that arise from a structure
//! with a single `n`-ary weight-one relation, strong substructures between
//! them, their amalgamation, and a bounded chain of generic pregeometries.
//!
//! A lift of `P` on ground set `G` has the same dimension function as `P`.
//! Since `G` is self-sufficient in itself, `δ(G) = rank(G)`, so every lift
//! has exactly `|G| - rank(G)` tuples, and `δ(S) ≥ rank(S)` for every `S`
//! bounds the tuples inside `S` by `|S| - rank(S)`. Predimension depends only
//! on the multiset of tuple supports, so the search runs over such multisets
//! and realizes each support by its lexicographically least surjective
//! tuples. Nothing is missed: any lift has a support multiset the search
//! visits, and that multiset is checked against the full rank table.

use std::collections::BTreeSet;

use crate::embedding::EmbeddingMap;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::genesis::{free_amalgam, generic_build, strong_embed_structure, BuildConfig, GenericChain};
use crate::mincut;
use crate::pregeom::{pg_extract, pg_is_matroid, Pregeometry};
use crate::signature::Signature;
use crate::structure::{superset_min_transform, Point, RelStructure, Subset, Tuple};
use crate::transforms::{replace_members, surjective_tuples, ReplaceOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiftConfig {
    pub max_ground: usize,
    pub max_arity: usize,
    /// Search nodes allowed per first-support branch. `None` searches to the
    /// end.
    pub node_limit: Option<u64>,
}

impl Default for LiftConfig {
    fn default() -> Self {
        LiftConfig { max_ground: 5, max_arity: 5, node_limit: None }
    }
}

/// Outcome of a lift search. `exhaustive` certifies that a negative answer
/// covers every lift within the caps; it is false only when a node limit
/// cut the search short.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftVerdict {
    pub lift: Option<RelStructure>,
    pub exhaustive: bool,
}

impl LiftVerdict {
    pub fn found(&self) -> bool {
        self.lift.is_some()
    }
}

/// Number of `arity`-tuples over a `k`-set that use all `k` elements.
fn surjections(arity: usize, k: usize) -> u64 {
    let mut total: i128 = 0;
    let mut binom: i128 = 1;
    for j in 0..=k {
        let term = binom * ((k - j) as i128).pow(arity as u32);
        total += if j % 2 == 0 { term } else { -term };
        binom = binom * (k - j) as i128 / (j as i128 + 1);
    }
    total.clamp(0, u64::MAX as i128) as u64
}

struct Search<'a> {
    n: usize,
    rank: &'a [u8],
    supports: Vec<(u64, u64)>,
    total: usize,
    inner: Option<(u64, usize)>,
    node_limit: Option<u64>,
}

enum Branch {
    Found(Vec<usize>),
    Empty,
    OutOfWork,
}

struct State {
    slack: Vec<i32>,
    chosen: Vec<usize>,
    counts: Vec<u64>,
    inside: usize,
    nodes: u64,
}

impl Search<'_> {
    fn supersets(&self, u: u64) -> impl Iterator<Item = u64> {
        let full = (1u64 << self.n) - 1;
        let mut next = Some(u);
        std::iter::from_fn(move || {
            let s = next?;
            next = (s != full).then(|| (s + 1) | u);
            Some(s)
        })
    }

    fn push(&self, st: &mut State, j: usize) -> bool {
        let (u, limit) = self.supports[j];
        if st.counts[j] >= limit || self.supersets(u).any(|s| st.slack[s as usize] < 1) {
            return false;
        }
        if let Some((a, target)) = self.inner {
            if u & !a == 0 && st.inside >= target {
                return false;
            }
        }
        self.supersets(u).for_each(|s| st.slack[s as usize] -= 1);
        st.counts[j] += 1;
        st.chosen.push(j);
        if let Some((a, _)) = self.inner {
            st.inside += usize::from(u & !a == 0);
        }
        true
    }

    fn pop(&self, st: &mut State) {
        let j = st.chosen.pop().expect("pop after push");
        let u = self.supports[j].0;
        self.supersets(u).for_each(|s| st.slack[s as usize] += 1);
        st.counts[j] -= 1;
        if let Some((a, _)) = self.inner {
            st.inside -= usize::from(u & !a == 0);
        }
    }

    /// The chosen supports give exactly the rank table (and the inner count).
    fn accepts(&self, st: &State) -> bool {
        if let Some((_, target)) = self.inner {
            if st.inside != target {
                return false;
            }
        }
        let mut delta: Vec<i32> = (0..1u64 << self.n).map(|s| s.count_ones() as i32).collect();
        for &j in &st.chosen {
            self.supersets(self.supports[j].0).for_each(|s| delta[s as usize] -= 1);
        }
        superset_min_transform(&mut delta, self.n, Exec::Sequential);
        delta.iter().zip(self.rank).all(|(&d, &r)| d == i32::from(r))
    }

    fn dfs(&self, st: &mut State, from: usize) -> Option<bool> {
        st.nodes += 1;
        if self.node_limit.is_some_and(|l| st.nodes > l) {
            return None;
        }
        if st.chosen.len() == self.total {
            return Some(self.accepts(st));
        }
        for j in from..self.supports.len() {
            if self.push(st, j) {
                let r = self.dfs(st, j);
                if r != Some(false) {
                    return r;
                }
                self.pop(st);
            }
        }
        Some(false)
    }

    fn fresh_state(&self) -> State {
        let slack = (0..1u64 << self.n).map(|s| s.count_ones() as i32 - i32::from(self.rank[s as usize])).collect();
        State { slack, chosen: Vec::new(), counts: vec![0; self.supports.len()], inside: 0, nodes: 0 }
    }

    /// Every multiset whose least support is `first`.
    fn branch(&self, first: usize) -> Branch {
        let mut st = self.fresh_state();
        if !self.push(&mut st, first) {
            return Branch::Empty;
        }
        match self.dfs(&mut st, first) {
            Some(true) => Branch::Found(st.chosen),
            Some(false) => Branch::Empty,
            None => Branch::OutOfWork,
        }
    }

    fn run(&self, exec: Exec) -> (Option<Vec<usize>>, bool) {
        if self.total == 0 {
            let st = self.fresh_state();
            return (self.accepts(&st).then(Vec::new), true);
        }
        let k = self.supports.len();
        let hit = exec.find_first(0..k, |i| match self.branch(i) {
            Branch::Empty => None,
            b => Some(b),
        });
        match hit {
            None => (None, true),
            Some((_, Branch::Found(c))) => (Some(c), true),
            Some((i, _)) => {
                let later = exec.find_first(i + 1..k, |j| match self.branch(j) {
                    Branch::Found(c) => Some(c),
                    _ => None,
                });
                (later.map(|(_, c)| c), false)
            }
        }
    }
}

fn names(points: &[Point]) -> Vec<&str> {
    points.iter().map(Point::as_str).collect()
}

fn check_caps(p: &Pregeometry, n: usize, cfg: &LiftConfig) -> Result<()> {
    if n == 0 {
        return Err(Error::Argument("lift arity must be at least 1".into()));
    }
    if p.len() > cfg.max_ground {
        return Err(Error::size("lift ground set", p.len(), cfg.max_ground));
    }
    if n > cfg.max_arity {
        return Err(Error::size("lift arity", n, cfg.max_arity));
    }
    Ok(())
}

fn search_lift(p: &Pregeometry, n: usize, inner: Option<Subset>, cfg: &LiftConfig, exec: Exec) -> Result<LiftVerdict> {
    check_caps(p, n, cfg)?;
    let g = p.len();
    let full = p.full();
    let rank_full = p.rank(full) as usize;
    let supports: Vec<(u64, u64)> = (1..1u64 << g)
        .filter(|u| (u.count_ones() as usize) <= n)
        .map(|u| (u, surjections(n, u.count_ones() as usize)))
        .collect();
    let search = Search {
        n: g,
        rank: p.table(),
        supports,
        total: g - rank_full,
        inner: inner.map(|a| (a.bits(), a.len() - p.rank(a) as usize)),
        node_limit: cfg.node_limit,
    };
    let (chosen, exhaustive) = search.run(exec);
    let lift = chosen.map(|c| realize(p, n, &search.supports, &c)).transpose()?;
    Ok(LiftVerdict { lift, exhaustive })
}

/// The structure on `p`'s ground set whose tuples have the chosen supports,
/// each support taking its lexicographically least surjective tuples.
fn realize(p: &Pregeometry, n: usize, supports: &[(u64, u64)], chosen: &[usize]) -> Result<RelStructure> {
    let mut tuples: Vec<(&str, Vec<Point>)> = Vec::new();
    let mut i = 0;
    while i < chosen.len() {
        let j = chosen[i];
        let run = chosen[i..].iter().take_while(|&&x| x == j).count();
        let support: Vec<u32> = Subset(supports[j].0).iter().map(|v| v as u32).collect();
        for t in surjective_tuples(&support, n).take(run) {
            tuples.push(("R", t.iter().map(|&v| p.ground()[v as usize].clone()).collect()));
        }
        i += run;
    }
    RelStructure::new(Signature::uniform(n), p.ground().iter().cloned(), tuples)
}

/// A structure in `C_n` on `p`'s ground set with `PG = p`, or none. The
/// returned lift is the first in canonical order regardless of `exec`.
pub fn lift_search(p: &Pregeometry, n: usize, cfg: &LiftConfig, exec: Exec) -> Result<LiftVerdict> {
    search_lift(p, n, None, cfg, exec)
}

/// `A ⊴_n B`: some lift `B̃` of `B` has `A`'s ground set self-sufficient. Then
/// `B̃` restricted there is a lift of `A`, because dimensions inside a
/// self-sufficient set are computed in the set itself. Self-sufficiency of
/// `A` in a lift of `B` means `δ(A) = rank(A)`, which pins the number of
/// tuples inside `A`. The returned lift is the witness `B̃`.
pub fn is_strong_sub(a: &Pregeometry, b: &Pregeometry, n: usize, cfg: &LiftConfig, exec: Exec) -> Result<LiftVerdict> {
    if !a.is_restriction_of(b) {
        return Err(Error::Argument("the smaller pregeometry is not a restriction of the larger one".into()));
    }
    let inner = b.subset(&names(a.ground()))?;
    search_lift(b, n, Some(inner), cfg, exec)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PregeomAmalgam {
    pub pregeometry: Pregeometry,
    /// The lift of `pregeometry` built by free amalgamation.
    pub lift: RelStructure,
    pub from_a1: EmbeddingMap,
    pub from_a2: EmbeddingMap,
}

/// Amalgamate `a1` and `a2` over `a0`. Points of `a2` outside `a0` whose
/// names clash with `a1` are primed.
pub fn pregeom_amalgam(
    a0: &Pregeometry,
    a1: &Pregeometry,
    a2: &Pregeometry,
    n: usize,
    cfg: &LiftConfig,
    exec: Exec,
) -> Result<PregeomAmalgam> {
    for (side, a) in [("A1", a1), ("A2", a2)] {
        if !a0.is_restriction_of(a) {
            return Err(Error::Argument(format!("A0 is not a restriction of {side}")));
        }
    }
    let base: BTreeSet<&Point> = a0.ground().iter().collect();
    let mut taken: BTreeSet<String> = a1.ground().iter().chain(a2.ground()).map(|p| p.to_string()).collect();
    let mut rename = Vec::new();
    for p in a2.ground() {
        let q = if base.contains(p) || a1.index_of(p.as_str()).is_none() {
            p.clone()
        } else {
            let mut name = format!("{p}'");
            while taken.contains(&name) {
                name.push('\'');
            }
            taken.insert(name.clone());
            Point::from(name)
        };
        rename.push((p.clone(), q));
    }
    let map2 = EmbeddingMap::new(rename, true);
    let a2r = a2.relabel(|p| map2.get(p).cloned().expect("every point is renamed"), cfg.max_ground.max(crate::DEFAULT_CAP))?;

    let witness = |a: &Pregeometry, side: &str| -> Result<RelStructure> {
        let v = is_strong_sub(a0, a, n, cfg, exec)?;
        v.lift.ok_or_else(|| {
            let why = if v.exhaustive { "has no witness lift" } else { "was not decided within the node limit" };
            Error::LiftFailed(format!("A0 ⊴_{n} {side} {why}"))
        })
    };
    let l1 = witness(a1, "A1")?;
    let l2 = witness(&a2r, "A2")?;

    // Give both lifts the same structure on A0. The two restrictions have
    // the same pregeometry, so the replacement keeps PG(L2).
    let on_a0 = l1.induced(l1.subset(&names(a0.ground()))?);
    let members: Vec<bool> = l2.universe().iter().map(|p| base.contains(p)).collect();
    let l2 = replace_members(&l2, &members, &on_a0, ReplaceOptions::default())?;
    let lift = free_amalgam(&l1, &l2, a0.ground())?;
    let pregeometry = pg_extract(&lift, crate::DEFAULT_CAP.max(lift.len()), exec)?;
    if !a1.is_restriction_of(&pregeometry) || !a2r.is_restriction_of(&pregeometry) {
        return Err(Error::LiftFailed("the amalgam does not restrict to the two sides".into()));
    }
    Ok(PregeomAmalgam { pregeometry, lift, from_a1: EmbeddingMap::identity(a1.ground(), true), from_a2: map2 })
}

/// Every pregeometry on the given points, by brute force over rank tables
/// that start at zero and rise by at most one per point, filtered by the
/// matroid axioms.
pub fn pregeometries_on(points: &[Point], cap: usize) -> Result<Vec<Pregeometry>> {
    let k = points.len();
    if k > 4.min(cap) {
        return Err(Error::size("pregeometry enumeration ground", k, 4.min(cap)));
    }
    let mut out = Vec::new();
    let mut table = vec![0u32; 1 << k];
    fn rec(s: usize, table: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if s == table.len() {
            if pg_is_matroid(table) {
                out.push(table.clone());
            }
            return;
        }
        let below: Vec<u32> = (0..usize::BITS).filter(|b| s >> b & 1 == 1).map(|b| table[s & !(1 << b)]).collect();
        let lo = *below.iter().max().expect("s is nonempty");
        let hi = below.iter().min().expect("s is nonempty") + 1;
        for r in lo..=hi {
            table[s] = r;
            rec(s + 1, table, out);
        }
    }
    let mut tables = Vec::new();
    if k == 0 {
        tables.push(vec![0]);
    } else {
        rec(1, &mut table, &mut tables);
    }
    for t in tables {
        out.push(Pregeometry::new(points.to_vec(), t, cap)?);
    }
    Ok(out)
}

/// [`generic_build`] over the single `n`-ary weight-one symbol, read through
/// the dimension function of each stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PgChain {
    pub arity: usize,
    pub chain: GenericChain,
}

impl PgChain {
    pub fn stages(&self) -> usize {
        self.chain.stages.len()
    }

    pub fn ground(&self, stage: usize) -> &[Point] {
        self.chain.stages[stage].universe()
    }

    /// Rank of the named points in stage `stage`, by minimum cut; works for
    /// stages of any size.
    pub fn rank(&self, stage: usize, points: &[Point]) -> Result<u32> {
        let m = &self.chain.stages[stage];
        let mut members = vec![false; m.len()];
        for p in points {
            members[m.index_of(p.as_str()).ok_or_else(|| Error::UnknownPoint(p.to_string()))?] = true;
        }
        Ok(mincut::min_predim_over(m, &members).value as u32)
    }

    /// The full rank table of a stage small enough for one.
    pub fn pregeometry(&self, stage: usize, cap: usize) -> Result<Pregeometry> {
        pg_extract(&self.chain.stages[stage], cap, Exec::Parallel)
    }

    /// A strong embedding of `q` into the earliest stage that has one: the
    /// canonical lift of `q` is strongly embedded as a structure, and the
    /// stage itself is the lift witnessing `⊴_n`. `None` when `q` has no lift
    /// or no stage receives it.
    pub fn strong_embedding(&self, q: &Pregeometry, cfg: &LiftConfig, exec: Exec) -> Result<Option<(usize, EmbeddingMap)>> {
        let Some(lift) = lift_search(q, self.arity, cfg, exec)?.lift else {
            return Ok(None);
        };
        for (i, stage) in self.chain.stages.iter().enumerate() {
            if let Some(g) = strong_embed_structure(&lift, stage, cfg.max_ground.max(lift.len()))? {
                return Ok(Some((i, g)));
            }
        }
        Ok(None)
    }
}

pub fn pclass_generic_build(
    n: usize,
    k: usize,
    rounds: usize,
    seed: u64,
    cfg: &BuildConfig,
    exec: Exec,
) -> Result<PgChain> {
    if n == 0 {
        return Err(Error::Argument("arity must be at least 1".into()));
    }
    let chain = generic_build(&Signature::uniform(n), k, rounds, seed, cfg, exec)?;
    Ok(PgChain { arity: n, chain })
}

/// Tuples of a lift, for display.
pub fn lift_tuples(lift: &RelStructure) -> Vec<Tuple> {
    lift.tuples("R").cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::point_names;
    use crate::test_fixtures::*;

    fn cfg() -> LiftConfig {
        LiftConfig::default()
    }

    fn pg(m: &RelStructure) -> Pregeometry {
        pg_extract(m, 20, Exec::Sequential).unwrap()
    }

    #[test]
    fn surjection_counts() {
        for (n, k) in [(3, 1), (3, 2), (3, 3), (4, 2), (5, 3), (2, 3)] {
            let support: Vec<u32> = (0..k as u32).collect();
            assert_eq!(surjections(n, k), surjective_tuples(&support, n).count() as u64, "{n} {k}");
        }
    }

    #[test]
    fn free_lifts_are_empty() {
        for k in 0..=4 {
            let p = Pregeometry::free(point_names(k), 20).unwrap();
            for n in 1..=4 {
                let v = lift_search(&p, n, &cfg(), Exec::Parallel).unwrap();
                assert_eq!(v.lift.unwrap().tuple_count(), 0);
            }
        }
    }

    #[test]
    fn s1_needs_arity_four() {
        let p = pg(&s1());
        let four = lift_search(&p, 4, &cfg(), Exec::Sequential).unwrap();
        assert_eq!(four.lift.as_ref(), Some(&s1()));
        let three = lift_search(&p, 3, &cfg(), Exec::Sequential).unwrap();
        assert!(three.lift.is_none() && three.exhaustive);
    }

    #[test]
    fn lifts_reproduce_the_table_and_modes_agree() {
        let ground = point_names(4);
        for p in pregeometries_on(&ground, 20).unwrap() {
            for n in [2, 3] {
                let s = lift_search(&p, n, &cfg(), Exec::Sequential).unwrap();
                let q = lift_search(&p, n, &cfg(), Exec::Parallel).unwrap();
                assert_eq!(s, q);
                if let Some(l) = s.lift {
                    assert!(l.in_class());
                    assert_eq!(pg(&l), p);
                }
            }
        }
    }

    #[test]
    fn lift_search_is_complete_on_three_points() {
        // Oracle: every set of 2-ary tuples on three points, filtered by class
        // membership, and the pregeometries they produce.
        let ground = point_names(3);
        let sig = Signature::uniform(2);
        let mut realized = std::collections::BTreeSet::new();
        for set in 0u32..1 << 9 {
            let tuples: Vec<(&str, Vec<Point>)> = (0..9)
                .filter(|i| set >> i & 1 == 1)
                .map(|i| ("R", vec![ground[i / 3].clone(), ground[i % 3].clone()]))
                .collect();
            let m = RelStructure::new(sig.clone(), ground.iter().cloned(), tuples).unwrap();
            if m.in_class() {
                realized.insert(pg(&m).table().to_vec());
            }
        }
        for p in pregeometries_on(&ground, 20).unwrap() {
            let found = lift_search(&p, 2, &cfg(), Exec::Sequential).unwrap().found();
            assert_eq!(found, realized.contains(p.table()), "{p:?}");
        }
    }

    #[test]
    fn strong_sub_examples() {
        let p = pg(&s2());
        let empty = Pregeometry::empty();
        assert!(is_strong_sub(&empty, &p, 3, &cfg(), Exec::Sequential).unwrap().found());
        assert!(is_strong_sub(&p, &p, 3, &cfg(), Exec::Sequential).unwrap().found());
        // A rank-0 point below a rank-0 point plus a free point.
        let b = Pregeometry::new(pts(&["p", "q"]), vec![0, 0, 1, 1], 20).unwrap();
        let a = b.restrict(Subset::singleton(0));
        let v = is_strong_sub(&a, &b, 3, &cfg(), Exec::Sequential).unwrap();
        let w = v.lift.unwrap();
        assert_eq!(w.tuple_count(), 1);
        assert!(w.contains_tuple("R", &[0, 0, 0]));
        // {a} is strong in the lift with one diagonal tuple per point.
        let a = p.restrict(Subset::singleton(0));
        assert!(is_strong_sub(&a, &p, 3, &cfg(), Exec::Sequential).unwrap().found());
        let not_sub = Pregeometry::free(pts(&["a"]), 20).unwrap();
        assert!(is_strong_sub(&not_sub, &p, 3, &cfg(), Exec::Sequential).is_err());
    }

    #[test]
    fn strong_sub_matches_all_lifts_on_three_points() {
        // Oracle: run through every class member on three points; each one is a
        // lift of its own pregeometry and witnesses A ⊴3 PG for every A that is
        // self-sufficient in it.
        let ground = point_names(3);
        let symbols = vec![crate::signature::Symbol::new("R", 3, 1)];
        let mut witnessed = std::collections::BTreeSet::new();
        crate::genesis::for_each_in_class(&symbols, 3, |_, delta| {
            let mut rank = delta.to_vec();
            superset_min_transform(&mut rank, 3, Exec::Sequential);
            for a in 0..8usize {
                if (0..8).filter(|t| t & a == a).all(|t| delta[t] >= delta[a]) {
                    witnessed.insert((rank.clone(), a));
                }
            }
        });
        let mut checked = 0;
        for b in pregeometries_on(&ground, 20).unwrap() {
            let rank: Vec<i32> = b.table().iter().map(|&r| i32::from(r)).collect();
            for a in 0..8u64 {
                let got = is_strong_sub(&b.restrict(Subset(a)), &b, 3, &cfg(), Exec::Sequential).unwrap().found();
                assert_eq!(got, witnessed.contains(&(rank.clone(), a as usize)), "{b:?} {a}");
                checked += 1;
            }
        }
        assert_eq!(checked, 16 * 8);
    }

    #[test]
    fn amalgam_examples() {
        let a = Pregeometry::free(pts(&["a"]), 20).unwrap();
        let am = pregeom_amalgam(&a, &a, &a, 3, &cfg(), Exec::Sequential).unwrap();
        assert_eq!(am.pregeometry, a);
        assert!(am.from_a1.is_identity() && am.from_a2.is_identity());

        let am = pregeom_amalgam(&Pregeometry::empty(), &a, &a, 3, &cfg(), Exec::Sequential).unwrap();
        assert_eq!(am.pregeometry, Pregeometry::free(pts(&["a", "a'"]), 20).unwrap());
        assert_eq!(am.from_a2.get(&Point::from("a")), Some(&Point::from("a'")));

        // S2 moved onto {b,c,d}, next to a free point a.
        let s2_bcd = s2().relabel(|p| Point::from(((p.as_str().as_bytes()[0] + 1) as char).to_string())).unwrap();
        let with_a = RelStructure::new(
            s2_bcd.signature().clone(),
            pts(&["a", "b", "c", "d"]),
            s2_bcd.all_tuples().map(|(r, t)| (r, t.iter().map(|&i| s2_bcd.point(i as usize).clone()).collect())),
        )
        .unwrap();
        let a1 = pg(&with_a);
        let a2 = Pregeometry::free(pts(&["a", "x"]), 20).unwrap();
        let a0 = a2.restrict(Subset::singleton(0));
        let am = pregeom_amalgam(&a0, &a1, &a2, 3, &cfg(), Exec::Sequential).unwrap();
        let p = &am.pregeometry;
        assert_eq!(p.len(), 5);
        let table: Vec<u32> = (0..1u64 << p.len()).map(|s| p.rank(Subset(s))).collect();
        assert!(pg_is_matroid(&table));
        assert!(is_strong_sub(&a1, p, 3, &cfg(), Exec::Sequential).unwrap().found());
        assert!(is_strong_sub(&a2, p, 3, &cfg(), Exec::Sequential).unwrap().found());
    }

    #[test]
    fn enumerated_pregeometries() {
        // Matroids on 0..=3 labeled points.
        let counts: Vec<usize> = (0..=3).map(|k| pregeometries_on(&point_names(k), 20).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 16]);
    }

    #[test]
    fn pgchain_small() {
        let c = pclass_generic_build(3, 2, 0, 0, &BuildConfig::default(), Exec::Parallel).unwrap();
        assert_eq!(c.stages(), 1);
        assert!(c.pregeometry(0, 20).unwrap().is_empty());
        let c = pclass_generic_build(3, 2, 1, 0, &BuildConfig::default(), Exec::Parallel).unwrap();
        let last = c.stages() - 1;
        for q in pregeometries_on(&point_names(2), 20).unwrap() {
            let (i, g) = c.strong_embedding(&q, &cfg(), Exec::Parallel).unwrap().expect("size-2 members embed");
            assert_eq!(i, last);
            let img: Vec<Point> = q.ground().iter().map(|p| g.get(p).unwrap().clone()).collect();
            for s in 0..1u64 << q.len() {
                let sub: Vec<Point> = Subset(s).iter().map(|v| img[v].clone()).collect();
                assert_eq!(c.rank(last, &sub).unwrap(), q.rank(Subset(s)));
            }
        }
    }
}
