//! Embeddings of small structures into large ones.
//!
//! An embedding is injective and both preserves and reflects relations, so
//! its image is an induced copy. The search assigns the points of the small
//! structure one at a time, drawing candidates from the tuple-neighbours of an
//! already placed point whenever there is one. When the small structure is
//! required to land strongly, every prefix that is self-sufficient in the
//! small structure must also land self-sufficiently, which prunes early.

use std::collections::BTreeMap;

use crate::closure;
use crate::embedding::EmbeddingMap;
use crate::error::{Error, Result};
use crate::mincut::{min_predim_local, Incidence};
use crate::structure::{RelStructure, Subset, Tuple};

/// A large structure indexed for repeated embedding queries.
pub struct Host<'a> {
    pub m: &'a RelStructure,
    inc: Incidence,
    symbol_ids: BTreeMap<String, usize>,
    symbol_names: Vec<String>,
    tuples_at: Vec<Vec<(usize, Tuple)>>,
    neighbors: Vec<Vec<u32>>,
}

impl<'a> Host<'a> {
    pub fn new(m: &'a RelStructure) -> Self {
        let symbol_ids: BTreeMap<String, usize> =
            m.relations().keys().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let mut tuples_at = vec![Vec::new(); m.len()];
        let mut neighbors: Vec<Vec<u32>> = vec![Vec::new(); m.len()];
        for (name, t) in m.all_tuples() {
            let sid = symbol_ids[name];
            let mut seen: Vec<u32> = t.clone();
            seen.sort_unstable();
            seen.dedup();
            for &p in &seen {
                tuples_at[p as usize].push((sid, t.clone()));
                neighbors[p as usize].extend(seen.iter().copied().filter(|&q| q != p));
            }
        }
        for n in &mut neighbors {
            n.sort_unstable();
            n.dedup();
        }
        let symbol_names = m.relations().keys().cloned().collect();
        Host { m, inc: Incidence::new(m), symbol_ids, symbol_names, tuples_at, neighbors }
    }

    /// True iff the given points form a self-sufficient set.
    pub fn is_strong(&self, points: &[usize]) -> bool {
        let mut members = vec![false; self.m.len()];
        for &p in points {
            members[p] = true;
        }
        self.is_strong_with(points, self.m.predim_of(&members))
    }

    /// [`Host::is_strong`] when the predimension of the set is already known.
    pub fn is_strong_with(&self, points: &[usize], predim: i64) -> bool {
        min_predim_local(self.m, &self.inc, points).0 == predim
    }
}

/// Outcome of an exhaustive search that may hit its work limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Search {
    Finished,
    Stopped,
    OutOfWork,
}

pub(crate) struct Pattern<'b> {
    b: &'b RelStructure,
    order: Vec<usize>,
    /// `strong_prefix[k]`: the first `k` points of `order` are self-sufficient in `b`.
    strong_prefix: Vec<bool>,
    prefix_predim: Vec<i64>,
    /// Host symbol id of each of `b`'s symbols, if the host has it.
    host_symbol: BTreeMap<String, Option<usize>>,
    tuples_at: Vec<Vec<(String, Tuple)>>,
    /// For each position, an earlier position sharing a tuple with it.
    anchor: Vec<Option<usize>>,
}

impl<'b> Pattern<'b> {
    /// `fixed` leading points of `b` (in its universe order) are placed first.
    pub(crate) fn new(b: &'b RelStructure, fixed: usize, host: &Host<'_>, strong: bool) -> Result<Self> {
        let n = b.len();
        let mut adj = vec![Vec::new(); n];
        let mut tuples_at = vec![Vec::new(); n];
        for (name, t) in b.all_tuples() {
            let mut pts = t.clone();
            pts.sort_unstable();
            pts.dedup();
            for &p in &pts {
                tuples_at[p as usize].push((name.to_string(), t.clone()));
                adj[p as usize].extend(pts.iter().map(|&q| q as usize).filter(|&q| q != p as usize));
            }
        }
        let mut order: Vec<usize> = (0..fixed).collect();
        let mut placed = vec![false; n];
        order.iter().for_each(|&i| placed[i] = true);
        while order.len() < n {
            let next = (0..n)
                .filter(|&v| !placed[v])
                .max_by_key(|&v| (adj[v].iter().filter(|&&u| placed[u]).count(), std::cmp::Reverse(v)))
                .unwrap();
            placed[next] = true;
            order.push(next);
        }
        let pos_of = {
            let mut p = vec![0; n];
            order.iter().enumerate().for_each(|(k, &v)| p[v] = k);
            p
        };
        let anchor = order
            .iter()
            .enumerate()
            .map(|(k, &v)| adj[v].iter().map(|&u| pos_of[u]).filter(|&pu| pu < k).min())
            .collect();
        let mut strong_prefix = vec![false; n + 1];
        let prefix_predim =
            (0..=n).map(|k| b.predim(Subset::from_indices(order[..k].iter().copied()))).collect();
        if strong {
            if n > crate::DEFAULT_CAP.max(24) {
                return Err(Error::size("pattern structure", n, crate::DEFAULT_CAP.max(24)));
            }
            for k in fixed..=n {
                let prefix = Subset::from_indices(order[..k].iter().copied());
                strong_prefix[k] = closure::is_self_sufficient(b, prefix, n)?;
            }
        }
        let host_symbol =
            b.relations().keys().map(|s| (s.clone(), host.symbol_ids.get(s).copied())).collect();
        Ok(Pattern { b, order, strong_prefix, prefix_predim, host_symbol, tuples_at, anchor })
    }
}

struct Walk<'h, 'p, F> {
    host: &'h Host<'h>,
    pat: &'p Pattern<'p>,
    image: Vec<usize>,
    preimage: Vec<u32>,
    work: u64,
    visit: F,
}

const UNSET: u32 = u32::MAX;

impl<F: FnMut(&[usize]) -> bool> Walk<'_, '_, F> {
    fn consistent(&self, v: usize, x: usize) -> bool {
        for (name, t) in &self.pat.tuples_at[v] {
            if t.iter().all(|&u| u as usize == v || self.image[u as usize] != usize::MAX) {
                let img: Tuple = t
                    .iter()
                    .map(|&u| if u as usize == v { x as u32 } else { self.image[u as usize] as u32 })
                    .collect();
                if self.pat.host_symbol[name].is_none() || !self.host.m.contains_tuple(name, &img) {
                    return false;
                }
            }
        }
        for (sid, t) in &self.host.tuples_at[x] {
            let pre: Option<Tuple> = t
                .iter()
                .map(|&y| {
                    if y as usize == x {
                        Some(v as u32)
                    } else {
                        let p = self.preimage[y as usize];
                        (p != UNSET).then_some(p)
                    }
                })
                .collect();
            if let Some(pre) = pre {
                if !self.pat.b.contains_tuple(&self.host.symbol_names[*sid], &pre) {
                    return false;
                }
            }
        }
        true
    }

    fn strong_here(&self, k: usize) -> bool {
        if !self.pat.strong_prefix[k] {
            return true;
        }
        let pts: Vec<usize> = self.pat.order[..k].iter().map(|&v| self.image[v]).collect();
        self.host.is_strong_with(&pts, self.pat.prefix_predim[k])
    }

    fn run(&mut self, k: usize, limit: u64) -> Search {
        self.work += 1;
        if self.work > limit {
            return Search::OutOfWork;
        }
        if k == self.pat.order.len() {
            return if (self.visit)(&self.image) { Search::Finished } else { Search::Stopped };
        }
        let v = self.pat.order[k];
        let host = self.host;
        let candidates: Box<dyn Iterator<Item = usize>> = match self.pat.anchor[k] {
            Some(pa) => {
                let ax = self.image[self.pat.order[pa]];
                Box::new(host.neighbors[ax].iter().map(|&y| y as usize))
            }
            None => Box::new(0..host.m.len()),
        };
        for x in candidates {
            if self.preimage[x] != UNSET || !self.consistent(v, x) {
                continue;
            }
            self.image[v] = x;
            self.preimage[x] = v as u32;
            let outcome = if self.strong_here(k + 1) { self.run(k + 1, limit) } else { Search::Finished };
            self.image[v] = usize::MAX;
            self.preimage[x] = UNSET;
            if outcome != Search::Finished {
                return outcome;
            }
            self.work += 1;
            if self.work > limit {
                return Search::OutOfWork;
            }
        }
        Search::Finished
    }
}

/// Visit every embedding of `pattern` extending `fixed` (the images of its
/// first points). The visitor returns false to stop. Work counts search
/// nodes and is added to `*work`.
pub(crate) fn for_each_embedding(
    pat: &Pattern<'_>,
    host: &Host<'_>,
    fixed: &[usize],
    limit: u64,
    work: &mut u64,
    visit: impl FnMut(&[usize]) -> bool,
) -> Search {
    let mut walk = Walk {
        host,
        pat,
        image: vec![usize::MAX; pat.b.len()],
        preimage: vec![UNSET; host.m.len()],
        work: *work,
        visit,
    };
    for (v, &x) in fixed.iter().enumerate() {
        if walk.preimage[x] != UNSET {
            return Search::Finished;
        }
        walk.image[v] = x;
        walk.preimage[x] = v as u32;
    }
    // The fixed part must itself be an induced copy.
    for v in 0..fixed.len() {
        let x = walk.image[v];
        walk.image[v] = usize::MAX;
        walk.preimage[x] = UNSET;
        let ok = walk.consistent(v, x);
        walk.image[v] = x;
        walk.preimage[x] = v as u32;
        if !ok {
            *work = walk.work;
            return Search::Finished;
        }
    }
    let out = walk.run(fixed.len(), limit);
    *work = walk.work;
    out
}

/// First embedding of `b` extending `fixed` with self-sufficient image.
pub(crate) fn strong_extension(
    pat: &Pattern<'_>,
    host: &Host<'_>,
    fixed: &[usize],
    limit: u64,
    work: &mut u64,
) -> (Search, Option<Vec<usize>>) {
    let mut found = None;
    let s = for_each_embedding(pat, host, fixed, limit, work, |img| {
        found = Some(img.to_vec());
        false
    });
    (s, found)
}

/// A strong embedding of `a` into `m`, if one exists.
pub fn strong_embed_structure(a: &RelStructure, m: &RelStructure, cap: usize) -> Result<Option<EmbeddingMap>> {
    if a.len() > cap {
        return Err(Error::size("embedded structure", a.len(), cap));
    }
    if a.len() > m.len() || !symbols_fit(a, m) {
        return Ok(None);
    }
    let host = Host::new(m);
    let pat = Pattern::new(a, 0, &host, true)?;
    let mut work = 0;
    let (_, found) = strong_extension(&pat, &host, &[], u64::MAX, &mut work);
    Ok(found.map(|img| {
        EmbeddingMap::new(
            img.iter().enumerate().map(|(v, &x)| (a.point(v).clone(), m.point(x).clone())),
            true,
        )
    }))
}

fn symbols_fit(a: &RelStructure, m: &RelStructure) -> bool {
    a.relations().keys().all(|s| a.signature().symbol(s) == m.signature().symbol(s))
}
