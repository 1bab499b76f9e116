//! Pregeometries given by exact rank tables.
//!
//! A table is a dense array indexed by bitmask over the ground set in its
//! canonical (lexicographic) order. Extraction from a structure is two
//! passes over the subset lattice: a zeta transform for the predimension of
//! every subset, then a superset-minimum transform, which is the dimension.

use crate::embedding::EmbeddingMap;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::structure::{superset_min_transform, Point, RelStructure, Subset};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pregeometry {
    ground: Vec<Point>,
    rank: Vec<u8>,
}

impl std::fmt::Debug for Pregeometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Pregeometry {{ ground: {:?}, rank: {:?} }}", self.ground, self.rank)
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::size("ground set", n, cap));
    }
    Ok(())
}

impl Pregeometry {
    /// Build from a ground set in any order and a table indexed by bitmask
    /// over that order. The table is validated against the matroid axioms.
    pub fn new(ground: Vec<Point>, rank: Vec<u32>, cap: usize) -> Result<Self> {
        let n = ground.len();
        check_cap(n, cap)?;
        if rank.len() != 1 << n {
            return Err(Error::InvalidPregeometry(format!(
                "rank table has {} entries, expected {}",
                rank.len(),
                1usize << n
            )));
        }
        if !pg_is_matroid(&rank) {
            return Err(Error::InvalidPregeometry("rank table violates the matroid axioms".into()));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| ground[a].cmp(&ground[b]));
        if let Some(w) = order.windows(2).find(|w| ground[w[0]] == ground[w[1]]) {
            return Err(Error::InvalidPregeometry(format!("point `{}` listed twice", ground[w[0]])));
        }
        // Old bit of each new position.
        let old_of = spread_table(&order);
        let table = old_of.iter().map(|&old| rank[old as usize] as u8).collect();
        let ground = order.iter().map(|&i| ground[i].clone()).collect();
        Ok(Pregeometry { ground, rank: table })
    }

    /// Build from a rank function over a sorted, distinct ground set.
    pub fn from_fn(ground: Vec<Point>, cap: usize, f: impl Fn(Subset) -> u32) -> Result<Self> {
        check_cap(ground.len(), cap)?;
        let table = (0..1u64 << ground.len()).map(|m| f(Subset(m))).collect();
        Self::new(ground, table, cap)
    }

    pub fn free(ground: Vec<Point>, cap: usize) -> Result<Self> {
        Self::from_fn(ground, cap, |s| s.len() as u32)
    }

    pub fn empty() -> Self {
        Pregeometry { ground: Vec::new(), rank: vec![0] }
    }

    pub fn ground(&self) -> &[Point] {
        &self.ground
    }

    pub fn len(&self) -> usize {
        self.ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ground.is_empty()
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.len())
    }

    pub fn rank(&self, s: Subset) -> u32 {
        u32::from(self.rank[s.0 as usize])
    }

    pub fn table(&self) -> &[u8] {
        &self.rank
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.ground.binary_search_by(|p| p.as_str().cmp(name)).ok()
    }

    pub fn subset<S: AsRef<str>>(&self, names: &[S]) -> Result<Subset> {
        let mut out = Subset::EMPTY;
        for n in names {
            let n = n.as_ref();
            out = out.with(self.index_of(n).ok_or_else(|| Error::UnknownPoint(n.to_string()))?);
        }
        Ok(out)
    }

    pub fn check_subset(&self, a: Subset) -> Result<()> {
        if !a.is_subset_of(self.full()) {
            return Err(Error::Argument(format!(
                "subset {:#x} is not contained in a ground set of {} points",
                a.0,
                self.len()
            )));
        }
        Ok(())
    }

    pub fn subset_names(&self, a: Subset) -> Vec<&str> {
        a.iter().map(|i| self.ground[i].as_str()).collect()
    }

    /// The restriction of the rank function to `a`.
    pub fn restrict(&self, a: Subset) -> Pregeometry {
        let keep: Vec<usize> = a.iter().collect();
        let old_of = spread_table(&keep);
        Pregeometry {
            ground: keep.iter().map(|&i| self.ground[i].clone()).collect(),
            rank: old_of.iter().map(|&m| self.rank[m as usize]).collect(),
        }
    }

    /// Restriction to the named points, which must all be in the ground set.
    pub fn restrict_to(&self, points: &[Point]) -> Result<Pregeometry> {
        let mut a = Subset::EMPTY;
        for p in points {
            a = a.with(self.index_of(p.as_str()).ok_or_else(|| Error::UnknownPoint(p.to_string()))?);
        }
        Ok(self.restrict(a))
    }

    /// True iff `self` is the restriction of `other` to `self`'s ground set.
    pub fn is_restriction_of(&self, other: &Pregeometry) -> bool {
        other.restrict_to(&self.ground).is_ok_and(|r| &r == self)
    }

    /// Independence of a tuple of point indices: distinct entries spanning
    /// rank equal to the length.
    pub fn independent(&self, tuple: &[usize]) -> bool {
        let s = Subset::from_indices(tuple.iter().copied());
        s.len() == tuple.len() && self.rank(s) as usize == tuple.len()
    }

    /// The same table over renamed points (the renaming must be injective).
    pub fn relabel(&self, rename: impl Fn(&Point) -> Point, cap: usize) -> Result<Pregeometry> {
        let ground = self.ground.iter().map(rename).collect();
        Pregeometry::new(ground, self.rank.iter().map(|&r| u32::from(r)).collect(), cap)
    }
}

/// For each mask over `bits.len()` positions, the mask over the original
/// positions `bits[i]`.
fn spread_table(bits: &[usize]) -> Vec<u64> {
    let mut out = vec![0u64; 1 << bits.len()];
    for m in 1..out.len() {
        let low = m.trailing_zeros() as usize;
        out[m] = out[m & (m - 1)] | 1 << bits[low];
    }
    out
}

/// `PG(M)`: the rank of every subset is its dimension in `m`.
pub fn pg_extract(m: &RelStructure, cap: usize, exec: Exec) -> Result<Pregeometry> {
    let n = m.len();
    let mut table = m.delta_table(cap, exec)?;
    superset_min_transform(&mut table, n, exec);
    if table[0] < 0 {
        return Err(Error::NotInClass(format!("some subset has predimension {}", table[0])));
    }
    Ok(Pregeometry { ground: m.universe().to_vec(), rank: table.into_iter().map(|r| r as u8).collect() })
}

pub fn pg_closure(p: &Pregeometry, a: Subset) -> Subset {
    let r = p.rank(a);
    Subset::from_indices((0..p.len()).filter(|&c| p.rank(a.with(c)) == r))
}

/// Localization at `z`, with the points of `z` removed from the ground set.
pub fn pg_localize(p: &Pregeometry, z: Subset) -> Pregeometry {
    let rz = p.rank(z);
    let keep: Vec<usize> = p.full().difference(z).iter().collect();
    let old_of = spread_table(&keep);
    Pregeometry {
        ground: keep.iter().map(|&i| p.ground[i].clone()).collect(),
        rank: old_of.iter().map(|&m| (p.rank(Subset(m).union(z)) - rz) as u8).collect(),
    }
}

/// Normalization, unit increase and submodularity of a bitmask-indexed
/// table. Submodularity is checked in its local form
/// `r(S+a) + r(S+b) >= r(S+a+b) + r(S)`, which together with unit increase
/// implies the global inequality.
pub fn pg_is_matroid(table: &[u32]) -> bool {
    if !table.len().is_power_of_two() {
        return false;
    }
    let n = table.len().trailing_zeros() as usize;
    if table[0] != 0 {
        return false;
    }
    for s in 0..table.len() {
        let rs = table[s];
        for a in 0..n {
            let sa = s | 1 << a;
            if sa == s {
                continue;
            }
            if table[sa] < rs || table[sa] > rs + 1 {
                return false;
            }
            for b in a + 1..n {
                let sb = s | 1 << b;
                if sb == s {
                    continue;
                }
                if table[sa] + table[sb] < table[sa | sb] + rs {
                    return false;
                }
            }
        }
    }
    true
}

/// Identify parallel points and drop loops, keeping the least point of each
/// parallel class.
pub fn geometry_quotient(p: &Pregeometry) -> Pregeometry {
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..p.len() {
        if p.rank(Subset::singleton(i)) == 0 {
            continue;
        }
        if reps.iter().all(|&r| p.rank(Subset::singleton(r).with(i)) == 2) {
            reps.push(i);
        }
    }
    p.restrict(Subset::from_indices(reps))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsoMode {
    /// Rank-preserving bijection.
    Iso,
    /// Rank-preserving injection into the second pregeometry.
    Embed,
}

/// Search for a rank-preserving map from `p` to `q`. The returned map is the
/// first found by a deterministic backtracking search; its `strong` flag is
/// set for bijections.
pub fn pg_iso(p: &Pregeometry, q: &Pregeometry, mode: IsoMode, cap: usize) -> Result<Option<EmbeddingMap>> {
    check_cap(p.len(), cap)?;
    check_cap(q.len(), cap)?;
    match mode {
        IsoMode::Iso if p.len() != q.len() || p.rank(p.full()) != q.rank(q.full()) => return Ok(None),
        IsoMode::Embed if p.len() > q.len() => return Ok(None),
        _ => {}
    }
    let candidates: Vec<Vec<usize>> = match mode {
        IsoMode::Iso => {
            let sp = point_signatures(p);
            let sq = point_signatures(q);
            sp.iter().map(|s| (0..q.len()).filter(|&j| &sq[j] == s).collect()).collect()
        }
        IsoMode::Embed => (0..p.len())
            .map(|i| {
                let r = p.rank(Subset::singleton(i));
                (0..q.len()).filter(|&j| q.rank(Subset::singleton(j)) == r).collect()
            })
            .collect(),
    };
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by_key(|&i| (candidates[i].len(), i));
    let mut search = IsoSearch {
        p,
        q,
        order: &order,
        candidates: &candidates,
        image: vec![usize::MAX; p.len()],
        used: vec![false; q.len()],
        masks: vec![(0, 0)],
    };
    if !search.run(0) {
        return Ok(None);
    }
    let pairs = (0..p.len()).map(|i| (p.ground[i].clone(), q.ground[search.image[i]].clone()));
    Ok(Some(EmbeddingMap::new(pairs, mode == IsoMode::Iso)))
}

/// `pg_iso` after optionally passing both sides through [`geometry_quotient`].
pub fn pg_iso_with(
    p: &Pregeometry,
    q: &Pregeometry,
    mode: IsoMode,
    quotient: bool,
    cap: usize,
) -> Result<Option<EmbeddingMap>> {
    if quotient {
        pg_iso(&geometry_quotient(p), &geometry_quotient(q), mode, cap)
    } else {
        pg_iso(p, q, mode, cap)
    }
}

/// For each point, the counts of ranks of the subsets through it of sizes
/// one, two and three.
fn point_signatures(p: &Pregeometry) -> Vec<[[u32; 4]; 3]> {
    let n = p.len();
    (0..n)
        .map(|i| {
            let mut sig = [[0u32; 4]; 3];
            let one = Subset::singleton(i);
            sig[0][p.rank(one) as usize] += 1;
            for j in (0..n).filter(|&j| j != i) {
                let two = one.with(j);
                sig[1][p.rank(two) as usize] += 1;
                for k in (j + 1..n).filter(|&k| k != i) {
                    sig[2][p.rank(two.with(k)) as usize] += 1;
                }
            }
            sig
        })
        .collect()
}

struct IsoSearch<'a> {
    p: &'a Pregeometry,
    q: &'a Pregeometry,
    order: &'a [usize],
    candidates: &'a [Vec<usize>],
    image: Vec<usize>,
    used: Vec<bool>,
    /// Every subset of the assigned points, paired with its image.
    masks: Vec<(u64, u64)>,
}

impl IsoSearch<'_> {
    fn run(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let i = self.order[depth];
        let base = self.masks.len();
        for ci in 0..self.candidates[i].len() {
            let j = self.candidates[i][ci];
            if self.used[j] {
                continue;
            }
            let consistent = self.masks[..base].iter().all(|&(pm, qm)| {
                self.p.rank(Subset(pm | 1 << i)) == self.q.rank(Subset(qm | 1 << j))
            });
            if !consistent {
                continue;
            }
            for k in 0..base {
                let (pm, qm) = self.masks[k];
                self.masks.push((pm | 1 << i, qm | 1 << j));
            }
            self.used[j] = true;
            self.image[i] = j;
            if self.run(depth + 1) {
                return true;
            }
            self.used[j] = false;
            self.image[i] = usize::MAX;
            self.masks.truncate(base);
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure;
    use crate::test_fixtures::*;

    const CAP: usize = 20;

    fn extract(m: &RelStructure) -> Pregeometry {
        pg_extract(m, CAP, Exec::Parallel).unwrap()
    }

    /// Rank by the branch-and-bound dimension, one subset at a time.
    fn oracle(m: &RelStructure) -> Vec<u8> {
        (0..1u64 << m.len())
            .map(|a| closure::dimension(m, Subset(a), CAP).unwrap() as u8)
            .collect()
    }

    #[test]
    fn extraction_matches_dimension() {
        for m in [s1(), s2(), mixed_fixture()] {
            assert_eq!(extract(&m).table(), oracle(&m).as_slice());
            assert_eq!(pg_extract(&m, CAP, Exec::Sequential).unwrap(), extract(&m));
        }
    }

    #[test]
    fn s1_pregeometry() {
        let p = extract(&s1());
        for x in 0..16u64 {
            let x = Subset(x);
            let expect = if x.len() <= 3 { x.len() } else { 3 };
            assert_eq!(p.rank(x) as usize, expect);
        }
        let abc = p.subset(&["a", "b", "c"]).unwrap();
        assert_eq!(pg_closure(&p, abc), p.full());
    }

    #[test]
    fn s2_pregeometry_is_rank_zero() {
        assert!(extract(&s2()).table().iter().all(|&r| r == 0));
    }

    #[test]
    fn free_pregeometry() {
        let m = RelStructure::new(crate::Signature::uniform(3), ["p", "q", "r"], Vec::<(&str, Vec<Point>)>::new())
            .unwrap();
        let p = extract(&m);
        assert_eq!(p, Pregeometry::free(pts(&["p", "q", "r"]), CAP).unwrap());
        for a in 0..8u64 {
            assert_eq!(pg_closure(&p, Subset(a)), Subset(a));
        }
        assert_eq!(pg_closure(&p, p.full()), p.full());
    }

    #[test]
    fn localization() {
        let p = extract(&s1());
        assert_eq!(pg_localize(&p, Subset::EMPTY), p);
        let l = pg_localize(&p, p.subset(&["d"]).unwrap());
        assert_eq!(l.ground(), pts(&["a", "b", "c"]).as_slice());
        // rank'({a}) = r({a,d}) - r({d}) = 2 - 1; rank'({a,b,c}) = 3 - 1.
        assert_eq!(l.rank(l.subset(&["a"]).unwrap()), 1);
        assert_eq!(l.rank(l.full()), 2);
        assert!(pg_is_matroid(&l.table().iter().map(|&r| r as u32).collect::<Vec<_>>()));
        assert_eq!(pg_localize(&p, p.full()), Pregeometry::empty());
    }

    #[test]
    fn matroid_axioms() {
        assert!(!pg_is_matroid(&[1, 1, 1, 1]));
        assert!(!pg_is_matroid(&[0, 1, 1, 3]));
        assert!(!pg_is_matroid(&[0, 1, 1, 2, 1]));
        // Submodularity failure with unit increase intact: U_{1,2} ⊕ … broken at top.
        assert!(!pg_is_matroid(&[0, 1, 1, 1, 1, 2, 2, 3]));
        assert!(pg_is_matroid(&[0, 1, 1, 2]));
    }

    #[test]
    fn constructor_sorts_ground() {
        let p = Pregeometry::new(pts(&["b", "a"]), vec![0, 1, 0, 1], CAP).unwrap();
        assert_eq!(p.ground(), pts(&["a", "b"]).as_slice());
        assert_eq!(p.table(), &[0, 0, 1, 1]);
        assert!(Pregeometry::new(pts(&["a", "a"]), vec![0, 1, 1, 2], CAP).is_err());
        assert!(Pregeometry::new(pts(&["a"]), vec![0, 2], CAP).is_err());
        assert!(Pregeometry::free(pts(&["a", "b", "c"]), 2).unwrap_err().is_size_limit());
    }

    #[test]
    fn iso_and_embed() {
        let p = extract(&s1());
        let renamed = p.relabel(|x| Point::new(&format!("z{x}")), CAP).unwrap();
        let map = pg_iso(&p, &renamed, IsoMode::Iso, CAP).unwrap().unwrap();
        assert_eq!(map.get(&Point::new("a")), Some(&Point::new("za")));
        assert!(map.strong);
        let free4 = Pregeometry::free(pts(&["a", "b", "c", "d"]), CAP).unwrap();
        assert!(pg_iso(&p, &free4, IsoMode::Iso, CAP).unwrap().is_none());
        let free3 = Pregeometry::free(pts(&["x", "y", "z"]), CAP).unwrap();
        assert!(pg_iso(&free3, &p, IsoMode::Embed, CAP).unwrap().is_some());
        assert!(pg_iso(&free4, &p, IsoMode::Embed, CAP).unwrap().is_none());
    }

    #[test]
    fn iso_is_symmetric_and_transitive() {
        let p = extract(&mixed_fixture());
        let q = p.relabel(|x| Point::new(&format!("q{x}")), CAP).unwrap();
        let r = q.relabel(|x| Point::new(&format!("r{x}")), CAP).unwrap();
        let pq = pg_iso(&p, &q, IsoMode::Iso, CAP).unwrap().unwrap();
        let qr = pg_iso(&q, &r, IsoMode::Iso, CAP).unwrap().unwrap();
        let pr = pq.then(&qr);
        for a in 0..1u64 << p.len() {
            let image: Vec<Point> =
                Subset(a).iter().map(|i| pr.get(&p.ground()[i]).unwrap().clone()).collect();
            let names: Vec<&str> = image.iter().map(Point::as_str).collect();
            assert_eq!(p.rank(Subset(a)), r.rank(r.subset(&names).unwrap()));
        }
        assert!(pg_iso(&q, &p, IsoMode::Iso, CAP).unwrap().is_some());
        assert_eq!(pq.inverse().then(&pq).pairs.len(), q.len());
    }

    #[test]
    fn quotient_merges_parallel_points() {
        // a, b parallel; c a loop; d free.
        let rank = |s: Subset| {
            let s = s.difference(Subset::singleton(2));
            let ab = (s.contains(0) || s.contains(1)) as u32;
            ab + s.contains(3) as u32
        };
        let p = Pregeometry::from_fn(pts(&["a", "b", "c", "d"]), CAP, rank).unwrap();
        let g = geometry_quotient(&p);
        assert_eq!(g.ground(), pts(&["a", "d"]).as_slice());
        let free2 = Pregeometry::free(pts(&["u", "v"]), CAP).unwrap();
        assert!(pg_iso_with(&p, &free2, IsoMode::Iso, false, CAP).unwrap().is_none());
        assert!(pg_iso_with(&p, &free2, IsoMode::Iso, true, CAP).unwrap().is_some());
    }

    #[test]
    fn self_sufficient_restriction_agrees_with_induced() {
        let m = mixed_fixture();
        let pg = extract(&m);
        for a in 0..1u64 << m.len() {
            let a = Subset(a);
            if closure::is_self_sufficient(&m, a, CAP).unwrap() {
                assert_eq!(extract(&m.induced(a)), pg.restrict(a));
            }
        }
    }
}
