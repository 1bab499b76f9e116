//! Finite weighted relational structures and their predimension.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::signature::{Signature, Symbol};

/// A point identifier. Points compare lexicographically by name, and that
/// order is the canonical order of every universe.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(Arc<str>);

impl Point {
    pub fn new(name: &str) -> Self {
        Point(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Point {
    fn from(s: &str) -> Self {
        Point::new(s)
    }
}

impl From<String> for Point {
    fn from(s: String) -> Self {
        Point(Arc::from(s))
    }
}

/// Largest universe addressable by a [`Subset`] bitmask.
pub const MASK_BITS: usize = 64;

/// A subset of a universe, as a bitmask over its canonical order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset(pub u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn full(n: usize) -> Subset {
        assert!(n <= MASK_BITS);
        if n == MASK_BITS {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Subset {
        Subset(1u64 << i)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Subset {
        Subset(indices.into_iter().fold(0, |m, i| m | (1u64 << i)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Subset {
        Subset(self.0 | 1u64 << i)
    }

    pub fn without(self, i: usize) -> Subset {
        Subset(self.0 & !(1u64 << i))
    }

    pub fn union(self, o: Subset) -> Subset {
        Subset(self.0 | o.0)
    }

    pub fn intersection(self, o: Subset) -> Subset {
        Subset(self.0 & o.0)
    }

    pub fn difference(self, o: Subset) -> Subset {
        Subset(self.0 & !o.0)
    }

    pub fn is_subset_of(self, o: Subset) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(i)
            }
        })
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subset({:#b})", self.0)
    }
}

/// Ordered tuple of universe indices.
pub type Tuple = Vec<u32>;

/// All tuples sharing one underlying point set, with their summed weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedSupport {
    /// Sorted, distinct universe indices.
    pub points: Vec<u32>,
    /// Bitmask of `points`; only meaningful when the universe fits a mask.
    pub mask: u64,
    pub weight: i64,
}

/// A finite structure: a sorted universe plus, per symbol, a duplicate-free
/// set of ordered tuples. Only symbols carrying tuples are stored.
#[derive(Clone)]
pub struct RelStructure {
    signature: Arc<Signature>,
    universe: Vec<Point>,
    relations: BTreeMap<String, BTreeSet<Tuple>>,
    supports: Arc<[WeightedSupport]>,
}

impl PartialEq for RelStructure {
    fn eq(&self, other: &Self) -> bool {
        self.signature == other.signature
            && self.universe == other.universe
            && self.relations == other.relations
    }
}

impl Eq for RelStructure {}

impl fmt::Debug for RelStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RelStructure {{ points: {:?}", self.universe)?;
        for (name, tuples) in &self.relations {
            write!(f, "; {name}")?;
            for t in tuples {
                write!(f, " {}", self.format_tuple(t))?;
            }
        }
        write!(f, " }}")
    }
}

impl RelStructure {
    /// Build a structure from point names and named tuples.
    pub fn new<P, S, T>(signature: Signature, points: P, tuples: T) -> Result<Self>
    where
        P: IntoIterator,
        P::Item: Into<Point>,
        T: IntoIterator<Item = (S, Vec<Point>)>,
        S: AsRef<str>,
    {
        let mut universe: Vec<Point> = points.into_iter().map(Into::into).collect();
        universe.sort();
        if let Some(w) = universe.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidStructure(format!("point `{}` declared twice", w[0])));
        }
        let mut relations: BTreeMap<String, BTreeSet<Tuple>> = BTreeMap::new();
        for (name, pts) in tuples {
            let name = name.as_ref();
            let mut idx = Vec::with_capacity(pts.len());
            for p in &pts {
                let i = universe
                    .binary_search(p)
                    .map_err(|_| Error::UnknownPoint(p.to_string()))?;
                idx.push(i as u32);
            }
            let set = relations.entry(name.to_string()).or_default();
            if !set.insert(idx) {
                return Err(Error::InvalidStructure(format!(
                    "duplicate tuple {name}({})",
                    pts.iter().map(Point::as_str).collect::<Vec<_>>().join(",")
                )));
            }
        }
        Self::from_indexed(Arc::new(signature), universe, relations)
    }

    /// Build from an already sorted universe and index tuples.
    pub fn from_indexed(
        signature: Arc<Signature>,
        universe: Vec<Point>,
        mut relations: BTreeMap<String, BTreeSet<Tuple>>,
    ) -> Result<Self> {
        if universe.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidStructure("universe must be sorted and distinct".into()));
        }
        relations.retain(|_, t| !t.is_empty());
        let n = universe.len() as u32;
        let mut weights: HashMap<Vec<u32>, i64> = HashMap::new();
        for (name, tuples) in &relations {
            let sym = signature
                .symbol(name)
                .ok_or_else(|| Error::UnknownName { kind: "symbol", name: name.clone() })?;
            for t in tuples {
                if t.len() != sym.arity {
                    return Err(Error::InvalidStructure(format!(
                        "tuple of length {} for symbol `{}` of arity {}",
                        t.len(),
                        name,
                        sym.arity
                    )));
                }
                if let Some(&bad) = t.iter().find(|&&i| i >= n) {
                    return Err(Error::InvalidStructure(format!("tuple index {bad} out of range")));
                }
                let mut support = t.clone();
                support.sort_unstable();
                support.dedup();
                *weights.entry(support).or_insert(0) += i64::from(sym.weight);
            }
        }
        let fits = universe.len() <= MASK_BITS;
        let mut supports: Vec<WeightedSupport> = weights
            .into_iter()
            .map(|(points, weight)| {
                let mask = if fits { points.iter().fold(0u64, |m, &i| m | 1 << i) } else { 0 };
                WeightedSupport { points, mask, weight }
            })
            .collect();
        supports.sort_by(|a, b| a.points.cmp(&b.points));
        Ok(RelStructure { signature, universe, relations, supports: supports.into() })
    }

    pub fn empty(signature: Signature) -> Self {
        Self::from_indexed(Arc::new(signature), Vec::new(), BTreeMap::new()).unwrap()
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn signature_arc(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn universe(&self) -> &[Point] {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn relations(&self) -> &BTreeMap<String, BTreeSet<Tuple>> {
        &self.relations
    }

    pub fn tuples(&self, symbol: &str) -> impl Iterator<Item = &Tuple> {
        self.relations.get(symbol).into_iter().flatten()
    }

    /// All tuples as `(symbol, tuple)` in canonical order.
    pub fn all_tuples(&self) -> impl Iterator<Item = (&str, &Tuple)> {
        self.relations.iter().flat_map(|(n, ts)| ts.iter().map(move |t| (n.as_str(), t)))
    }

    pub fn tuple_count(&self) -> usize {
        self.relations.values().map(BTreeSet::len).sum()
    }

    pub fn contains_tuple(&self, symbol: &str, tuple: &[u32]) -> bool {
        self.relations.get(symbol).is_some_and(|s| s.contains(tuple))
    }

    pub fn supports(&self) -> &[WeightedSupport] {
        &self.supports
    }

    pub fn symbol_of(&self, name: &str) -> Symbol {
        self.signature.symbol(name).expect("stored symbols resolve")
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.universe.binary_search_by(|p| p.as_str().cmp(name)).ok()
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.universe[i]
    }

    pub fn full(&self) -> Subset {
        self.check_mask_width();
        Subset::full(self.len())
    }

    fn check_mask_width(&self) {
        assert!(self.len() <= MASK_BITS, "universe of {} points is too large for a bitmask", self.len());
    }

    /// Resolve point names to a subset of this universe.
    pub fn subset<S: AsRef<str>>(&self, names: &[S]) -> Result<Subset> {
        if self.len() > MASK_BITS {
            return Err(Error::size("universe", self.len(), MASK_BITS));
        }
        let mut m = Subset::EMPTY;
        for n in names {
            let i = self.index_of(n.as_ref()).ok_or_else(|| {
                Error::Argument(format!("point `{}` is not in the universe", n.as_ref()))
            })?;
            m = m.with(i);
        }
        Ok(m)
    }

    /// Check that `a` only names points of this universe.
    pub fn check_subset(&self, a: Subset) -> Result<()> {
        if self.len() < MASK_BITS && a.0 >> self.len() != 0 {
            return Err(Error::Argument(format!(
                "subset {:#b} is not contained in a universe of {} points",
                a.0,
                self.len()
            )));
        }
        Ok(())
    }

    pub fn subset_names(&self, a: Subset) -> Vec<&str> {
        a.iter().map(|i| self.universe[i].as_str()).collect()
    }

    pub fn format_subset(&self, a: Subset) -> String {
        format!("{{{}}}", self.subset_names(a).join(","))
    }

    pub fn format_tuple(&self, t: &[u32]) -> String {
        let names: Vec<&str> = t.iter().map(|&i| self.universe[i as usize].as_str()).collect();
        format!("({})", names.join(","))
    }

    /// `|A| - sum of weights of tuples lying inside A`.
    pub fn predim(&self, a: Subset) -> i64 {
        let inside: i64 =
            self.supports.iter().filter(|s| s.mask & !a.0 == 0).map(|s| s.weight).sum();
        a.len() as i64 - inside
    }

    /// Predimension of an arbitrary index set (no mask width limit).
    pub fn predim_of(&self, members: &[bool]) -> i64 {
        let count = members.iter().filter(|&&b| b).count() as i64;
        let inside: i64 = self
            .supports
            .iter()
            .filter(|s| s.points.iter().all(|&i| members[i as usize]))
            .map(|s| s.weight)
            .sum();
        count - inside
    }

    pub fn predim_full(&self) -> i64 {
        self.len() as i64 - self.supports.iter().map(|s| s.weight).sum::<i64>()
    }

    /// Substructure on `a`: exactly the tuples lying inside it.
    pub fn induced(&self, a: Subset) -> RelStructure {
        let keep: Vec<usize> = a.iter().collect();
        self.induced_indices(&keep)
    }

    /// Substructure on the given (sorted, distinct) universe indices.
    pub fn induced_indices(&self, keep: &[usize]) -> RelStructure {
        let mut remap = vec![u32::MAX; self.len()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new as u32;
        }
        let universe = keep.iter().map(|&i| self.universe[i].clone()).collect();
        let relations = self
            .relations
            .iter()
            .map(|(name, ts)| {
                let kept = ts
                    .iter()
                    .filter(|t| t.iter().all(|&i| remap[i as usize] != u32::MAX))
                    .map(|t| t.iter().map(|&i| remap[i as usize]).collect())
                    .collect();
                (name.clone(), kept)
            })
            .collect();
        RelStructure::from_indexed(self.signature.clone(), universe, relations)
            .expect("induced substructure is well formed")
    }

    /// Predimension of every subset, indexed by bitmask.
    pub fn delta_table(&self, cap: usize, exec: Exec) -> Result<Vec<i32>> {
        let n = self.len();
        if n > cap {
            return Err(Error::size("universe", n, cap));
        }
        let size = 1usize << n;
        let mut inside = vec![0i32; size];
        for s in self.supports.iter() {
            inside[s.mask as usize] += s.weight as i32;
        }
        subset_sum_transform(&mut inside, n, exec);
        let mut table = inside;
        exec.for_each_chunk_mut(&mut table, CHUNK, |c, chunk| {
            let base = c * CHUNK;
            for (j, v) in chunk.iter_mut().enumerate() {
                *v = (base + j).count_ones() as i32 - *v;
            }
        });
        Ok(table)
    }

    /// True iff every subset has nonnegative predimension.
    pub fn in_class(&self) -> bool {
        if self.len() <= EXHAUSTIVE_CLASS_LIMIT {
            let n = self.len();
            return (0u64..1 << n).all(|m| self.predim(Subset(m)) >= 0);
        }
        crate::mincut::min_predim_over(self, &vec![false; self.len()]).value >= 0
    }

    /// Stable content hash used to key dimension caches.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv64::default();
        self.signature.hash(&mut h);
        self.universe.hash(&mut h);
        self.relations.hash(&mut h);
        h.finish()
    }

    /// Rename points through `rename`, which must be injective.
    pub fn relabel<F: Fn(&Point) -> Point>(&self, rename: F) -> Result<RelStructure> {
        let names: Vec<Point> = self.universe.iter().map(&rename).collect();
        let tuples: Vec<(String, Vec<Point>)> = self
            .all_tuples()
            .map(|(s, t)| (s.to_string(), t.iter().map(|&i| names[i as usize].clone()).collect()))
            .collect();
        RelStructure::new(self.signature.as_ref().clone(), names, tuples)
    }

    /// Same points and tuples over a different (compatible) signature.
    pub fn with_signature(&self, signature: Signature) -> Result<RelStructure> {
        RelStructure::from_indexed(Arc::new(signature), self.universe.clone(), self.relations.clone())
    }
}

/// Universe size up to which `in_class` enumerates subsets directly.
const EXHAUSTIVE_CLASS_LIMIT: usize = 16;

const CHUNK: usize = 1 << 12;

/// In-place zeta transform over the subset lattice: `t[S] = sum_{T ⊆ S} t[T]`.
pub(crate) fn subset_sum_transform(t: &mut [i32], n: usize, exec: Exec) {
    for bit in 0..n {
        let step = 1usize << bit;
        let block = step << 1;
        let run = |chunk: &mut [i32]| {
            for pair in chunk.chunks_mut(block) {
                let (lo, hi) = pair.split_at_mut(step);
                for (h, l) in hi.iter_mut().zip(lo.iter()) {
                    *h += *l;
                }
            }
        };
        if block >= CHUNK || !exec.is_parallel() {
            run(t);
        } else {
            exec.for_each_chunk_mut(t, CHUNK, |_, c| run(c));
        }
    }
}

/// In-place superset minimum: `t[S] = min_{T ⊇ S} t[T]`.
pub(crate) fn superset_min_transform(t: &mut [i32], n: usize, exec: Exec) {
    for bit in 0..n {
        let step = 1usize << bit;
        let block = step << 1;
        let run = |chunk: &mut [i32]| {
            for pair in chunk.chunks_mut(block) {
                let (lo, hi) = pair.split_at_mut(step);
                for (l, h) in lo.iter_mut().zip(hi.iter()) {
                    if *h < *l {
                        *l = *h;
                    }
                }
            }
        };
        if block >= CHUNK || !exec.is_parallel() {
            run(t);
        } else {
            exec.for_each_chunk_mut(t, CHUNK, |_, c| run(c));
        }
    }
}

/// FNV-1a; deterministic across runs and platforms.
#[derive(Clone)]
pub(crate) struct Fnv64(u64);

impl Default for Fnv64 {
    fn default() -> Self {
        Fnv64(0xcbf29ce484222325)
    }
}

impl Hasher for Fnv64 {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_fixtures::*;

    #[test]
    fn predim_examples() {
        let s1 = s1();
        assert_eq!(s1.predim(s1.full()), 3);
        assert_eq!(s1.predim(Subset::EMPTY), 0);
        let sig = Signature::closed(vec![Symbol::new("R", 3, 2)]).unwrap();
        let m = RelStructure::new(sig, ["a", "b", "c"], [("R", pts(&["a", "b", "c"]))]).unwrap();
        assert_eq!(m.predim(m.full()), 1);
    }

    #[test]
    fn induced_examples() {
        let s1 = s1();
        let abc = s1.subset(&["a", "b", "c"]).unwrap();
        let sub = s1.induced(abc);
        assert_eq!(sub.len(), 3);
        assert_eq!(sub.tuple_count(), 0);
        assert_eq!(s1.induced(s1.full()), s1);
        let s2 = s2();
        let ab = s2.induced(s2.subset(&["a", "b"]).unwrap());
        assert_eq!(ab.tuple_count(), 0);
        assert_eq!(ab.universe(), &[Point::new("a"), Point::new("b")]);
    }

    #[test]
    fn in_class_examples() {
        assert!(s1().in_class());
        assert!(s2().in_class());
        let bad = RelStructure::new(
            Signature::uniform(3),
            ["a", "b"],
            [("R", pts(&["a", "a", "b"])), ("R", pts(&["a", "b", "a"])), ("R", pts(&["a", "b", "b"]))],
        )
        .unwrap();
        assert_eq!(bad.predim(bad.full()), -1);
        assert!(!bad.in_class());
    }

    #[test]
    fn construction_errors() {
        let sig = Signature::uniform(3);
        assert!(matches!(
            RelStructure::new(sig.clone(), ["a", "b"], [("R", pts(&["a", "b"]))]),
            Err(Error::InvalidStructure(_))
        ));
        assert!(matches!(
            RelStructure::new(sig.clone(), ["a", "b"], [("R", pts(&["a", "b", "z"]))]),
            Err(Error::UnknownPoint(_))
        ));
        assert!(matches!(
            RelStructure::new(sig.clone(), ["a", "a"], Vec::<(&str, Vec<Point>)>::new()),
            Err(Error::InvalidStructure(_))
        ));
        assert!(matches!(
            RelStructure::new(sig, ["a"], [("S", pts(&["a", "a", "a"]))]),
            Err(Error::UnknownName { .. })
        ));
        assert!(s1().subset(&["q"]).is_err());
    }

    #[test]
    fn delta_table_matches_direct_formula() {
        let s2 = s2();
        for exec in [Exec::Sequential, Exec::Parallel] {
            let t = s2.delta_table(20, exec).unwrap();
            for m in 0..8u64 {
                assert_eq!(i64::from(t[m as usize]), s2.predim(Subset(m)));
            }
        }
        assert!(s2.delta_table(2, Exec::Sequential).unwrap_err().is_size_limit());
    }

    #[test]
    fn open_mode_structures_store_only_present_symbols() {
        let m = RelStructure::new(
            Signature::open(),
            ["a", "b", "c", "d", "e"],
            [("R5", pts(&["a", "b", "c", "d", "e"])), ("R1", pts(&["a"]))],
        )
        .unwrap();
        assert_eq!(m.relations().len(), 2);
        assert_eq!(m.predim_full(), 3);
    }
}
