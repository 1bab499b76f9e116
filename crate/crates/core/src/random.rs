//! Seeded generators: random class members, strong subsets, and random
//! replacements for a fixed substructure.
//!
//! Tuples are added one at a time and an addition is kept only when the
//! structure stays in the class. Adding a tuple of weight `w` whose support is
//! `U` lowers δ by `w` on exactly the supersets of `U`, so it is admissible
//! iff the least δ over supersets of `U` is at least `w`, that is, iff
//! `d(U) ≥ w` in the structure before the addition.

use std::collections::BTreeMap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::closure;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::genesis::catalog_symbols;
use crate::pregeom::pg_extract;
use crate::signature::{Signature, Symbol};
use crate::structure::{Point, RelStructure, Subset, Tuple};
use crate::transforms::surjective_tuples;

/// Names for generated universes: `a` to `z`, then `p26`, `p27`, …
pub fn point_names(n: usize) -> Vec<Point> {
    (0..n)
        .map(|i| if i < 26 { Point::from(((b'a' + i as u8) as char).to_string()) } else { Point::from(format!("p{i}")) })
        .collect()
}

/// The symbols the generator draws from, and the signature they live in.
/// Open signatures contribute `R1` to `R4`.
fn generator_symbols(sig: &Signature) -> Result<(Signature, Vec<Symbol>)> {
    if !sig.is_open() {
        return Ok((sig.clone(), sig.symbols().to_vec()));
    }
    let symbols = catalog_symbols(sig, 4);
    Ok((Signature::new(symbols.clone(), true)?, symbols))
}

/// A random tuple of `sym` over `0..n`. The support size is drawn first, so
/// tuples with repeated coordinates are common.
fn random_tuple<R: Rng>(rng: &mut R, sym: &Symbol, n: usize) -> Tuple {
    let size = rng.random_range(1..=sym.arity.min(n));
    let support: Vec<u32> = rand::seq::index::sample(rng, n, size).into_iter().map(|i| i as u32).collect();
    let mut t: Tuple = support.clone();
    while t.len() < sym.arity {
        t.push(*support.choose(rng).expect("support is nonempty"));
    }
    t.shuffle(rng);
    t
}

/// Add up to `attempts` random tuples to `m`, keeping it in the class.
/// Tuples lying entirely inside `frozen` are never added. `m` must be in the
/// class and fit the cap.
pub fn grow<R: Rng>(rng: &mut R, m: &RelStructure, attempts: usize, frozen: Subset, cap: usize) -> Result<RelStructure> {
    let n = m.len();
    if n == 0 || attempts == 0 {
        return Ok(m.clone());
    }
    let (sig, symbols) = generator_symbols(m.signature())?;
    if symbols.is_empty() {
        return Ok(m.clone());
    }
    let mut delta = m.delta_table(cap, Exec::Sequential)?;
    if delta.iter().any(|&d| d < 0) {
        return Err(Error::NotInClass("cannot grow a structure outside the class".into()));
    }
    let full = m.full().bits();
    let mut relations = m.relations().clone();
    for _ in 0..attempts {
        let sym = symbols.choose(rng).expect("symbols is nonempty");
        let t = random_tuple(rng, sym, n);
        let u = t.iter().fold(0u64, |acc, &i| acc | 1 << i);
        if u & !frozen.bits() == 0 {
            continue;
        }
        if relations.get(&sym.name).is_some_and(|set| set.contains(&t)) {
            continue;
        }
        let w = sym.weight as i32;
        let mut s = u;
        let mut fits = true;
        loop {
            if delta[s as usize] < w {
                fits = false;
                break;
            }
            if s == full {
                break;
            }
            s = (s + 1) | u;
        }
        if !fits {
            continue;
        }
        let mut s = u;
        loop {
            delta[s as usize] -= w;
            if s == full {
                break;
            }
            s = (s + 1) | u;
        }
        relations.entry(sym.name.clone()).or_default().insert(t);
    }
    RelStructure::from_indexed(sig.into(), m.universe().to_vec(), relations)
}

/// A random class member with between `min_points` and `max_points` points
/// (uniformly) and a uniform number of insertion attempts in `[0, 2n]`.
pub fn random_structure<R: Rng>(
    rng: &mut R,
    sig: &Signature,
    min_points: usize,
    max_points: usize,
) -> Result<RelStructure> {
    if min_points > max_points {
        return Err(Error::Argument(format!("empty size range {min_points}..={max_points}")));
    }
    let n = rng.random_range(min_points..=max_points);
    random_on(rng, sig, &point_names(n))
}

/// A random class member on the given points.
pub fn random_on<R: Rng>(rng: &mut R, sig: &Signature, points: &[Point]) -> Result<RelStructure> {
    let n = points.len();
    if n > crate::structure::MASK_BITS.min(crate::DEFAULT_CAP) {
        return Err(Error::size("random universe", n, crate::DEFAULT_CAP));
    }
    let empty = RelStructure::new(generator_symbols(sig)?.0, points.iter().cloned(), Vec::<(String, Vec<Point>)>::new())?;
    let attempts = rng.random_range(0..=2 * n);
    grow(rng, &empty, attempts, Subset::EMPTY, crate::DEFAULT_CAP)
}

/// A random self-sufficient subset of at most `max_size` points: the
/// closure of a random seed set, retried until it is small enough. Falls
/// back to `∅`, which is self-sufficient in every class member.
pub fn random_strong_subset<R: Rng>(rng: &mut R, m: &RelStructure, max_size: usize, cap: usize) -> Result<Subset> {
    let n = m.len();
    for _ in 0..16 {
        let size = rng.random_range(0..=max_size.min(n));
        let seed = Subset::from_indices(rand::seq::index::sample(rng, n, size));
        let cl = closure::ss_closure(m, seed, cap)?;
        if cl.len() <= max_size {
            return Ok(cl);
        }
    }
    Ok(Subset::EMPTY)
}

/// Replace every tuple by a random tuple of the same symbol with the same
/// underlying set. Predimension is unchanged on every subset.
pub fn shuffle_within_supports<R: Rng>(rng: &mut R, m: &RelStructure) -> Result<RelStructure> {
    let mut groups: BTreeMap<(String, Vec<u32>), usize> = BTreeMap::new();
    for (s, t) in m.all_tuples() {
        let mut support = t.clone();
        support.sort_unstable();
        support.dedup();
        *groups.entry((s.to_string(), support)).or_insert(0) += 1;
    }
    let mut relations: BTreeMap<String, std::collections::BTreeSet<Tuple>> = BTreeMap::new();
    for ((s, support), count) in groups {
        let arity = m.symbol_of(&s).arity;
        let pool: Vec<Tuple> = surjective_tuples(&support, arity).collect();
        let chosen = pool.choose_multiple(rng, count);
        relations.entry(s).or_default().extend(chosen.cloned());
    }
    RelStructure::from_indexed(m.signature_arc().clone(), m.universe().to_vec(), relations)
}

/// A class member on the points of `a` with the same pregeometry. Random
/// members are tried first; if none matches, the tuples of `a` are shuffled
/// within their supports. The flag reports whether a random member matched.
pub fn pregeometry_twin<R: Rng>(rng: &mut R, a: &RelStructure, cap: usize) -> Result<(RelStructure, bool)> {
    let target = pg_extract(a, cap, Exec::Sequential)?;
    for _ in 0..48 {
        let cand = random_on(rng, a.signature(), a.universe())?;
        if pg_extract(&cand, cap, Exec::Sequential)? == target {
            return Ok((cand.with_signature(a.signature().clone()).unwrap_or(cand), true));
        }
    }
    Ok((shuffle_within_supports(rng, a)?, false))
}
