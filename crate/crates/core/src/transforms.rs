//! Structure rewriting: substructure replacement, π-reduction between
//! signatures, the derivative construction that lowers arities to three,
//! padding, and diagonal structures of rank zero.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::hash::Hasher;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::mincut;
use crate::pregeom::pg_extract;
use crate::signature::{open_symbol_name, Signature, Symbol};
use crate::structure::{Fnv64, Point, RelStructure, Subset, Tuple};

type NamedTuple = (String, Vec<Point>);

fn named_tuples(m: &RelStructure) -> Vec<NamedTuple> {
    m.all_tuples()
        .map(|(s, t)| (s.to_string(), t.iter().map(|&i| m.point(i as usize).clone()).collect()))
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct ReplaceOptions {
    /// Refuse when the replaced set is not self-sufficient in the ambient
    /// structure.
    pub require_self_sufficient: bool,
    /// Refuse unless the old and new substructures have the same pregeometry.
    pub require_same_pregeometry: bool,
    /// Cap on the replaced set for pregeometry comparison.
    pub cap: usize,
}

impl Default for ReplaceOptions {
    fn default() -> Self {
        ReplaceOptions { require_self_sufficient: true, require_same_pregeometry: false, cap: crate::DEFAULT_CAP }
    }
}

/// Swap the relations lying inside `a` for those of `a_new`, which lives on
/// the same points. Relations meeting the complement of `a` are untouched.
pub fn replace_substructure(
    m: &RelStructure,
    a: Subset,
    a_new: &RelStructure,
    opts: ReplaceOptions,
) -> Result<RelStructure> {
    let members: Vec<bool> = (0..m.len()).map(|i| a.contains(i)).collect();
    replace_members(m, &members, a_new, opts)
}

/// [`replace_substructure`] with the replaced set given as a membership
/// vector, for ambient structures wider than a bitmask.
pub fn replace_members(
    m: &RelStructure,
    members: &[bool],
    a_new: &RelStructure,
    opts: ReplaceOptions,
) -> Result<RelStructure> {
    if members.len() != m.len() {
        return Err(Error::Argument("membership vector does not match the universe".into()));
    }
    let old_points: Vec<&Point> = (0..m.len()).filter(|&i| members[i]).map(|i| m.point(i)).collect();
    if old_points.len() != a_new.len() || old_points.iter().zip(a_new.universe()).any(|(p, q)| *p != q) {
        return Err(Error::SetMismatch(format!(
            "replaced set has {} points, replacement has {}",
            old_points.len(),
            a_new.len()
        )));
    }
    if !a_new.in_class() {
        return Err(Error::NotInClass("replacement structure".into()));
    }
    if opts.require_self_sufficient {
        let r = mincut::min_predim_over(m, members);
        if r.value != m.predim_of(members) {
            let names: Vec<&str> = old_points.iter().map(|p| p.as_str()).collect();
            return Err(Error::NotSelfSufficient(format!("{{{}}}", names.join(","))));
        }
    }
    if opts.require_same_pregeometry {
        let keep: Vec<usize> = (0..m.len()).filter(|&i| members[i]).collect();
        let old = pg_extract(&m.induced_indices(&keep), opts.cap, Exec::Sequential)?;
        if old != pg_extract(a_new, opts.cap, Exec::Sequential)? {
            return Err(Error::PregeometryMismatch);
        }
    }
    let remap: Vec<u32> = a_new.universe().iter().map(|p| m.index_of(p.as_str()).unwrap() as u32).collect();
    let mut relations = m.relations().clone();
    for tuples in relations.values_mut() {
        tuples.retain(|t| !t.iter().all(|&i| members[i as usize]));
    }
    for (name, t) in a_new.all_tuples() {
        if m.signature().symbol(name).is_none() {
            return Err(Error::UnknownName { kind: "symbol", name: name.to_string() });
        }
        let mapped: Tuple = t.iter().map(|&i| remap[i as usize]).collect();
        relations.entry(name.to_string()).or_default().insert(mapped);
    }
    RelStructure::from_indexed(m.signature_arc().clone(), m.universe().to_vec(), relations)
}

/// One diagonal `n`-tuple `(c,…,c)` per point, using the weight-1 symbol of
/// arity `n`.
pub fn diagonal_saturate(signature: &Signature, points: &[Point], n: usize) -> Result<RelStructure> {
    if n == 0 {
        return Err(Error::Argument("arity must be at least 1".into()));
    }
    let sym = signature
        .unit_symbol_of_arity(n)
        .ok_or_else(|| Error::UnsupportedSignature(format!("no weight-1 symbol of arity {n}")))?;
    let tuples: Vec<NamedTuple> = points.iter().map(|p| (sym.name.clone(), vec![p.clone(); n])).collect();
    RelStructure::new(signature.clone(), points.iter().cloned(), tuples)
}

/// Tuples of `support^arity` that use every element of `support`, in
/// lexicographic order.
pub(crate) fn surjective_tuples(support: &[u32], arity: usize) -> impl Iterator<Item = Tuple> + '_ {
    let u = support.len();
    let mut digits = vec![0usize; arity];
    let mut done = u == 0 || arity < u;
    std::iter::from_fn(move || loop {
        if done {
            return None;
        }
        let mut seen = 0u64;
        for &d in &digits {
            seen |= 1 << d;
        }
        let current = (seen.count_ones() as usize == u).then(|| digits.iter().map(|&d| support[d]).collect());
        let mut k = arity;
        loop {
            if k == 0 {
                done = true;
                break;
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < u {
                break;
            }
            digits[k] = 0;
        }
        if current.is_some() {
            return current;
        }
    })
}

/// Rewrite every tuple of a symbol outside the target set into
/// `α_i / α_j` fresh tuples of its image symbol over the same underlying
/// set, preserving the predimension of every subset.
pub fn pi_reduce(m: &RelStructure, h: &BTreeMap<String, String>) -> Result<RelStructure> {
    let sig = m.signature();
    let lookup = |name: &str| {
        sig.symbol(name).ok_or_else(|| Error::UnknownName { kind: "symbol", name: name.to_string() })
    };
    let mut image: BTreeMap<String, Symbol> = BTreeMap::new();
    let mut domain: Vec<Symbol> = sig.symbols().to_vec();
    for used in m.relations().keys() {
        if !domain.iter().any(|s| &s.name == used) {
            domain.push(lookup(used)?);
        }
    }
    for (from, to) in h {
        let s = lookup(from)?;
        if !domain.contains(&s) {
            domain.push(s);
        }
        lookup(to)?;
    }
    for s in &domain {
        let target = lookup(h.get(&s.name).unwrap_or(&s.name))?;
        image.insert(s.name.clone(), target);
    }
    let targets: BTreeSet<String> = image.values().map(|s| s.name.clone()).collect();
    for j in &targets {
        if image.get(j).is_some_and(|s| &s.name != j) {
            return Err(Error::Argument(format!("target symbol `{j}` must map to itself")));
        }
    }
    for (i, j) in &image {
        let si = lookup(i)?;
        if si.arity > j.arity || si.weight % j.weight != 0 {
            return Err(Error::Argument(format!(
                "cannot map `{si}` to `{j}`: needs arity at most {} and weight divisible by {}",
                j.arity, j.weight
            )));
        }
    }
    let out_sig = Signature::closed(targets.iter().map(|j| lookup(j).unwrap()).collect())?;
    let mut relations: BTreeMap<String, BTreeSet<Tuple>> = BTreeMap::new();
    for j in &targets {
        if let Some(ts) = m.relations().get(j) {
            relations.insert(j.clone(), ts.clone());
        }
    }
    for (i, tuples) in m.relations() {
        let j = &image[i];
        if &j.name == i {
            continue;
        }
        let count = (lookup(i)?.weight / j.weight) as usize;
        for t in tuples {
            let mut support = t.clone();
            support.sort_unstable();
            support.dedup();
            let present = relations.entry(j.name.clone()).or_default();
            let fresh: Vec<Tuple> =
                surjective_tuples(&support, j.arity).filter(|c| !present.contains(c)).take(count).collect();
            if fresh.len() < count {
                return Err(Error::Infeasible(format!(
                    "only {} unused `{}` tuples over {}",
                    fresh.len(),
                    j.name,
                    m.format_tuple(&support)
                )));
            }
            present.extend(fresh);
        }
    }
    RelStructure::from_indexed(std::sync::Arc::new(out_sig), m.universe().to_vec(), relations)
}

/// The symbol used for `arity`-ary tuples in derivative constructions,
/// declaring `R<arity>` when a closed signature has none.
fn derivative_symbol(sig: &Signature, arity: usize) -> Result<(Symbol, Signature)> {
    if let Some(s) = sig.unit_symbol_of_arity(arity) {
        return Ok((s, sig.clone()));
    }
    let s = Symbol::new(open_symbol_name(arity), arity, 1);
    Ok((s.clone(), sig.with_symbol(s)?))
}

fn check_three_or_more(sig: &Signature) -> Result<()> {
    if let Some(bad) = sig.symbols().iter().find(|s| s.arity < 3 || s.weight != 1) {
        return Err(Error::UnsupportedSignature(format!(
            "derivatives need weight-1 symbols of arity at least 3, found `{bad}`"
        )));
    }
    Ok(())
}

fn fresh_names(m: &RelStructure, symbol: &str, tuple: &[Point], count: usize) -> Vec<Point> {
    let mut salt = 0u64;
    loop {
        let mut h = Fnv64::default();
        h.write(symbol.as_bytes());
        for p in tuple {
            h.write(&[0]);
            h.write(p.as_str().as_bytes());
        }
        h.write_u64(salt);
        let tag = h.finish() as u32;
        let names: Vec<Point> = (1..=count).map(|k| Point::from(format!("{tag:08x}.{k}"))).collect();
        if names.iter().all(|p| m.index_of(p.as_str()).is_none()) {
            return names;
        }
        salt += 1;
    }
}

/// Replace the `n`-ary tuple `t` (n ≥ 4) by fresh points `x_1..x_{n-1}`, the
/// chain `(b_k, x_k, b_{k+1})` and the derivative `(x_1, …, x_{n-1})`.
pub fn derive_tuple(m: &RelStructure, symbol: &str, t: &[Point]) -> Result<RelStructure> {
    derive_with_names(m, symbol, t).map(|(out, _)| out)
}

/// [`derive_tuple`], also returning the derivative's symbol and points.
fn derive_with_names(m: &RelStructure, symbol: &str, t: &[Point]) -> Result<(RelStructure, NamedTuple)> {
    let n = t.len();
    if n < 4 {
        return Err(Error::Argument(format!("derivative needs arity at least 4, got {n}")));
    }
    check_three_or_more(m.signature())?;
    let idx: Option<Vec<u32>> = t.iter().map(|p| m.index_of(p.as_str()).map(|i| i as u32)).collect();
    let shown = format!("{symbol}({})", t.iter().map(Point::as_str).collect::<Vec<_>>().join(","));
    match idx {
        Some(idx) if m.contains_tuple(symbol, &idx) => {}
        _ => return Err(Error::TupleNotPresent(shown)),
    }
    let (r3, sig) = derivative_symbol(m.signature(), 3)?;
    let (rd, sig) = derivative_symbol(&sig, n - 1)?;
    let xs = fresh_names(m, symbol, t, n - 1);
    let mut tuples: Vec<NamedTuple> = named_tuples(m)
        .into_iter()
        .filter(|(s, pts)| !(s == symbol && pts.as_slice() == t))
        .collect();
    for k in 0..n - 1 {
        tuples.push((r3.name.clone(), vec![t[k].clone(), xs[k].clone(), t[k + 1].clone()]));
    }
    let derivative = (rd.name.clone(), xs.clone());
    tuples.push(derivative.clone());
    let points = m.universe().iter().cloned().chain(xs);
    Ok((RelStructure::new(sig, points, tuples)?, derivative))
}

/// Apply [`derive_tuple`] until every tuple is ternary. Tuples are taken in
/// enumeration order, and each derivative of arity at least four is handled
/// right after its parent.
pub fn derive_saturate(m: &RelStructure) -> Result<RelStructure> {
    check_three_or_more(m.signature())?;
    let mut queue: VecDeque<NamedTuple> = named_tuples(m).into_iter().filter(|(_, t)| t.len() >= 4).collect();
    let mut current = m.clone();
    while let Some((symbol, t)) = queue.pop_front() {
        let (next, derivative) = derive_with_names(&current, &symbol, &t)?;
        if derivative.1.len() >= 4 {
            queue.push_front(derivative);
        }
        current = next;
    }
    Ok(current)
}

fn single_symbol(m: &RelStructure) -> Result<Symbol> {
    match m.signature().symbols() {
        [s] if s.weight == 1 && !m.signature().is_open() => Ok(s.clone()),
        _ => Err(Error::UnsupportedSignature("expected a single weight-1 symbol".into())),
    }
}

/// Extend every ternary tuple `(a,b,c)` to `(a,b,c,c,…,c)` of length `n`.
pub fn pad_arity(m: &RelStructure, n: usize) -> Result<RelStructure> {
    if n < 3 {
        return Err(Error::Argument(format!("target arity must be at least 3, got {n}")));
    }
    let sym = single_symbol(m)?;
    if sym.arity != 3 {
        return Err(Error::UnsupportedSignature(format!("padding starts from arity 3, found `{sym}`")));
    }
    let sig = Signature::closed(vec![Symbol::new(sym.name.clone(), n, 1)])?;
    let tuples = named_tuples(m).into_iter().map(|(s, mut t)| {
        let last = t[2].clone();
        t.resize(n, last);
        (s, t)
    });
    RelStructure::new(sig, m.universe().iter().cloned(), tuples)
}

/// Inverse of [`pad_arity`]: truncate to the first three coordinates, which
/// requires every tuple to be constant from the third coordinate on.
pub fn unpad_arity(m: &RelStructure) -> Result<RelStructure> {
    let sym = single_symbol(m)?;
    if sym.arity < 3 {
        return Err(Error::UnsupportedSignature(format!("cannot unpad `{sym}`")));
    }
    let mut tuples = Vec::new();
    for (s, t) in named_tuples(m) {
        if t[2..].iter().any(|p| p != &t[2]) {
            let shown: Vec<&str> = t.iter().map(Point::as_str).collect();
            return Err(Error::Argument(format!("tuple ({}) is not padded", shown.join(","))));
        }
        tuples.push((s, t[..3].to_vec()));
    }
    let sig = Signature::closed(vec![Symbol::new(sym.name, 3, 1)])?;
    RelStructure::new(sig, m.universe().iter().cloned(), tuples)
}
