//! Self-sufficiency, self-sufficient closure and dimension inside a fixed
//! finite ambient structure.
//!
//! All queries reduce to one search: the minimum predimension over the
//! supersets of a set, together with the least set attaining it. The search
//! is a branch-and-bound over the points outside the set in canonical order.
//! A branch is cut once the best value it could still reach (current
//! predimension minus the weight of every tuple that could still be
//! completed) is worse than the incumbent. Minimizers are closed under
//! intersection by submodularity, so the least one is the intersection of all
//! of them.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::structure::{RelStructure, Subset};

/// Minimum predimension over supersets of a set, and its least minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupersetMin {
    pub value: i64,
    pub closure: Subset,
}

fn check(m: &RelStructure, a: Subset, cap: usize) -> Result<()> {
    if m.len() > cap {
        return Err(Error::size("universe", m.len(), cap));
    }
    m.check_subset(a)
}

/// Branch-and-bound minimization of δ over `{ Y : a ⊆ Y ⊆ M }`.
pub fn superset_min(m: &RelStructure, a: Subset, cap: usize) -> Result<SupersetMin> {
    check(m, a, cap)?;
    let outside: Vec<usize> = m.full().difference(a).iter().collect();
    let mut search = Search {
        m,
        outside: &outside,
        best: m.predim(a),
        closure: a,
    };
    search.run(0, a, m.predim(a));
    Ok(SupersetMin { value: search.best, closure: search.closure })
}

struct Search<'a> {
    m: &'a RelStructure,
    outside: &'a [usize],
    best: i64,
    closure: Subset,
}

impl Search<'_> {
    fn run(&mut self, depth: usize, current: Subset, delta: i64) {
        if delta < self.best {
            self.best = delta;
            self.closure = current;
        } else if delta == self.best {
            self.closure = self.closure.intersection(current);
        }
        if depth == self.outside.len() {
            return;
        }
        let undecided = Subset::from_indices(self.outside[depth..].iter().copied());
        let reach = current.union(undecided);
        let completable: i64 = self
            .m
            .supports()
            .iter()
            .filter(|s| s.mask & !reach.0 == 0 && s.mask & !current.0 != 0)
            .map(|s| s.weight)
            .sum();
        if delta - completable > self.best {
            return;
        }
        let p = self.outside[depth];
        let with = current.with(p);
        let gained: i64 = self
            .m
            .supports()
            .iter()
            .filter(|s| s.mask >> p & 1 == 1 && s.mask & !with.0 == 0)
            .map(|s| s.weight)
            .sum();
        self.run(depth + 1, with, delta + 1 - gained);
        self.run(depth + 1, current, delta);
    }
}

/// True iff no superset of `a` inside `m` has smaller predimension.
pub fn is_self_sufficient(m: &RelStructure, a: Subset, cap: usize) -> Result<bool> {
    Ok(superset_min(m, a, cap)?.value == m.predim(a))
}

/// The least self-sufficient superset of `a`.
pub fn ss_closure(m: &RelStructure, a: Subset, cap: usize) -> Result<Subset> {
    Ok(superset_min(m, a, cap)?.closure)
}

/// Minimum predimension over supersets of `a`. Nonnegative when `m` is in
/// the class.
pub fn dimension(m: &RelStructure, a: Subset, cap: usize) -> Result<i64> {
    Ok(superset_min(m, a, cap)?.value)
}

/// Points whose addition does not raise the dimension of `a`.
pub fn d_closure(m: &RelStructure, a: Subset, cap: usize) -> Result<Subset> {
    let base = dimension(m, a, cap)?;
    let mut out = a;
    for c in m.full().difference(a).iter() {
        if dimension(m, a.with(c), cap)? == base {
            out = out.with(c);
        }
    }
    Ok(out)
}

/// `d(X ∪ Z) - d(Z)`.
pub fn rel_dim(m: &RelStructure, x: Subset, z: Subset, cap: usize) -> Result<i64> {
    m.check_subset(x)?;
    Ok(dimension(m, x.union(z), cap)? - dimension(m, z, cap)?)
}

/// Session memo of superset minimizations keyed by structure fingerprint and
/// subset. Structures are immutable, so entries never go stale. Safe to share
/// between threads.
#[derive(Default)]
pub struct DimCache {
    entries: Mutex<HashMap<(u64, u64), SupersetMin>>,
}

impl DimCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn superset_min(&self, m: &RelStructure, a: Subset, cap: usize) -> Result<SupersetMin> {
        let key = (m.fingerprint(), a.0);
        if let Some(hit) = self.entries.lock().unwrap().get(&key) {
            return Ok(*hit);
        }
        let r = superset_min(m, a, cap)?;
        self.entries.lock().unwrap().insert(key, r);
        Ok(r)
    }

    pub fn dimension(&self, m: &RelStructure, a: Subset, cap: usize) -> Result<i64> {
        Ok(self.superset_min(m, a, cap)?.value)
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
