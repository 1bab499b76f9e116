//! Enumeration of small class members and of extension pairs `A ≤ B` up to
//! isomorphism.

use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::signature::{open_symbol_name, Signature, Symbol};
use crate::structure::{Point, RelStructure, Subset};

/// An extension pair: `b` with `A` its first `a_size` points, `A ≤ B`.
/// Points are named `p0, p1, …` in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtPair {
    pub a_size: usize,
    pub b: RelStructure,
}

impl ExtPair {
    pub fn a_subset(&self) -> Subset {
        Subset::full(self.a_size)
    }

    pub fn a(&self) -> RelStructure {
        self.b.induced(self.a_subset())
    }

    /// `A = B`; such pairs are witnessed by every copy of `A`.
    pub fn is_trivial(&self) -> bool {
        self.a_size == self.b.len()
    }

    pub fn describe(&self) -> String {
        format!("A = {} in B = {}", self.b.format_subset(self.a_subset()), crate::text::inline_structure(&self.b))
    }
}

/// Symbols available to catalog members of size at most `k`. Open mode
/// contributes `R1..Rk`.
pub fn catalog_symbols(sig: &Signature, k: usize) -> Vec<Symbol> {
    let mut out: Vec<Symbol> = sig.symbols().to_vec();
    if sig.is_open() {
        for a in 1..=k {
            let name = open_symbol_name(a);
            if !out.iter().any(|s| s.name == name) {
                out.push(Symbol::new(name, a, 1));
            }
        }
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

/// A tuple over points `0..m` of symbol `symbols[sym]`.
pub type RawTuple = (usize, Vec<u8>);

/// Visit every class member on points `0..m` whose tuples use `symbols`.
/// The visitor receives the tuples (in candidate order) and the predimension
/// of every subset, indexed by bitmask.
pub fn for_each_in_class(symbols: &[Symbol], m: usize, mut visit: impl FnMut(&[RawTuple], &[i32])) {
    assert!(m <= 8, "enumeration is limited to 8 points");
    let mut cands: Vec<(RawTuple, u32, i32)> = Vec::new();
    for (si, s) in symbols.iter().enumerate() {
        if m == 0 {
            break;
        }
        let mut digits = vec![0u8; s.arity];
        loop {
            let mask = digits.iter().fold(0u32, |acc, &d| acc | 1 << d);
            cands.push(((si, digits.clone()), mask, s.weight as i32));
            let mut k = s.arity;
            let mut carry = true;
            while carry && k > 0 {
                k -= 1;
                digits[k] += 1;
                if (digits[k] as usize) < m {
                    carry = false;
                } else {
                    digits[k] = 0;
                }
            }
            if carry {
                break;
            }
        }
    }
    let mut delta: Vec<i32> = (0..1u32 << m).map(|s| s.count_ones() as i32).collect();
    let mut chosen: Vec<RawTuple> = Vec::new();
    fn rec(
        cands: &[(RawTuple, u32, i32)],
        start: usize,
        delta: &mut [i32],
        chosen: &mut Vec<RawTuple>,
        visit: &mut dyn FnMut(&[RawTuple], &[i32]),
    ) {
        visit(chosen, delta);
        for i in start..cands.len() {
            let (t, mask, w) = &cands[i];
            let fits = (0..delta.len() as u32).filter(|s| s & mask == *mask).all(|s| delta[s as usize] >= *w);
            if !fits {
                continue;
            }
            (0..delta.len() as u32).filter(|s| s & mask == *mask).for_each(|s| delta[s as usize] -= w);
            chosen.push(t.clone());
            rec(cands, i + 1, delta, chosen, visit);
            chosen.pop();
            (0..delta.len() as u32).filter(|s| s & mask == *mask).for_each(|s| delta[s as usize] += w);
        }
    }
    rec(&cands, 0, &mut delta, &mut chosen, &mut visit);
}

type Code = Vec<Vec<u8>>;

fn encode(tuples: &[RawTuple], perm: &[u8]) -> Code {
    let mut code: Code = tuples
        .iter()
        .map(|(s, t)| std::iter::once(*s as u8).chain(t.iter().map(|&p| perm[p as usize])).collect())
        .collect();
    code.sort_unstable();
    code
}

fn permutations(m: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut p: Vec<u8> = (0..m as u8).collect();
    fn heap(k: usize, p: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if k <= 1 {
            out.push(p.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, p, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            p.swap(j, k - 1);
        }
    }
    heap(m, &mut p, &mut out);
    out.sort();
    out
}

/// All extension pairs `A ≤ B` with `|B| ≤ k` up to pair isomorphism,
/// ordered by `|B|`, then `|A|`, then canonical encoding.
pub fn extension_catalog(sig: &Signature, k: usize, cap: usize) -> Result<Vec<ExtPair>> {
    if k > cap {
        return Err(Error::size("catalog bound", k, cap));
    }
    let symbols = catalog_symbols(sig, k);
    let out_sig = if sig.is_open() { Signature::new(symbols.clone(), true)? } else { sig.clone() };
    let mut pairs: BTreeSet<(usize, usize, Code)> = BTreeSet::new();
    for m in 0..=k {
        let perms = permutations(m);
        let mut seen_b: HashSet<Code> = HashSet::new();
        for_each_in_class(&symbols, m, |tuples, delta| {
            let canon_perm = perms.iter().min_by_key(|p| encode(tuples, p)).unwrap();
            let canon = encode(tuples, canon_perm);
            if !seen_b.insert(canon) {
                return;
            }
            for a in 0..1u32 << m {
                let strong = (0..1u32 << m).filter(|s| s & a == a).all(|s| delta[s as usize] >= delta[a as usize]);
                if !strong {
                    continue;
                }
                let a_size = a.count_ones() as usize;
                let code = perms
                    .iter()
                    .filter(|p| (0..m).all(|i| (a >> i & 1 == 1) == ((p[i] as usize) < a_size)))
                    .map(|p| encode(tuples, p))
                    .min()
                    .unwrap();
                pairs.insert((m, a_size, code));
            }
        });
    }
    pairs
        .into_iter()
        .map(|(m, a_size, code)| {
            let points: Vec<Point> = (0..m).map(|i| Point::from(format!("p{i}"))).collect();
            let tuples = code.iter().map(|t| {
                (symbols[t[0] as usize].name.clone(), t[1..].iter().map(|&i| points[i as usize].clone()).collect())
            });
            Ok(ExtPair { a_size, b: RelStructure::new(out_sig.clone(), points.clone(), tuples)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure;

    #[test]
    fn enumeration_matches_filtering_all_tuple_sets() {
        // Two points, ternary symbol: 8 candidate tuples, so 256 tuple sets.
        let symbols = vec![Symbol::new("R", 3, 1)];
        let mut count = 0;
        for_each_in_class(&symbols, 2, |_, _| count += 1);
        let mut oracle = 0;
        for set in 0..1u32 << 8 {
            let ts: Vec<u32> = (0..8).filter(|i| set >> i & 1 == 1).collect();
            let ok = (0..4u32).all(|s| {
                let inside = ts
                    .iter()
                    .filter(|&&t| (0..3).all(|c| s >> (t >> c & 1) & 1 == 1))
                    .count() as i32;
                s.count_ones() as i32 - inside >= 0
            });
            oracle += ok as usize;
        }
        assert_eq!(count, oracle);
    }

    #[test]
    fn small_catalogs() {
        let sig = Signature::uniform(3);
        let k0 = extension_catalog(&sig, 0, 5).unwrap();
        assert_eq!(k0.len(), 1);
        assert!(k0[0].is_trivial() && k0[0].b.is_empty());
        let k1 = extension_catalog(&sig, 1, 5).unwrap();
        let over_empty: Vec<usize> = k1.iter().filter(|p| p.a_size == 0).map(|p| p.b.tuple_count()).collect();
        assert_eq!(over_empty, vec![0, 0, 1]);
        assert_eq!(k1.iter().filter(|p| p.a_size == 0 && p.b.len() == 1).count(), 2);
        assert!(extension_catalog(&sig, 6, 5).unwrap_err().is_size_limit());
    }

    #[test]
    fn catalog_pairs_are_strong_and_distinct() {
        let sig = Signature::uniform(3);
        let cat = extension_catalog(&sig, 2, 5).unwrap();
        for p in &cat {
            assert!(p.b.in_class());
            assert!(closure::is_self_sufficient(&p.b, p.a_subset(), 20).unwrap());
        }
        // Pairwise non-isomorphic: brute force over point permutations fixing A.
        for (i, p) in cat.iter().enumerate() {
            for q in &cat[i + 1..] {
                if p.b.len() != q.b.len() || p.a_size != q.a_size || p.b.tuple_count() != q.b.tuple_count() {
                    continue;
                }
                let n = p.b.len();
                let iso = permutations(n).into_iter().any(|perm| {
                    let fixes_a = (0..n).all(|v| ((perm[v] as usize) < p.a_size) == (v < p.a_size));
                    fixes_a
                        && p.b.all_tuples().all(|(s, t)| {
                            let img: Vec<u32> = t.iter().map(|&v| perm[v as usize] as u32).collect();
                            q.b.contains_tuple(s, &img)
                        })
                });
                assert!(!iso, "{p:?} ~ {q:?}");
            }
        }
    }

    #[test]
    fn open_mode_uses_bounded_arities() {
        let cat = extension_catalog(&Signature::open(), 2, 5).unwrap();
        assert!(cat.iter().all(|p| p.b.all_tuples().all(|(_, t)| t.len() <= 2)));
        assert!(cat.iter().any(|p| p.b.relations().contains_key("R1")));
    }
}
