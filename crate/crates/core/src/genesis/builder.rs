use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::catalog::{extension_catalog, ExtPair};
use super::embed::{for_each_embedding, strong_extension, Host, Pattern, Search};
use crate::error::Result;
use crate::exec::Exec;
use crate::signature::Signature;
use crate::structure::{Point, RelStructure};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildConfig {
    /// Copies of `B` glued per catalog pair per round.
    pub budget: usize,
    /// Copies of `B` glued over each unwitnessed copy of `A`. `None` means
    /// one more than the catalog bound.
    pub redundancy: Option<usize>,
    /// Copies of `A` examined per pair per round.
    pub scan_limit: usize,
    /// Search nodes allowed per witness query; a query that runs out is
    /// treated as unwitnessed.
    pub witness_work: u64,
    pub catalog_cap: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig { budget: 64, redundancy: None, scan_limit: 4096, witness_work: 1 << 22, catalog_cap: 5 }
    }
}

/// A pair whose unwitnessed copies were not all served in a round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Truncation {
    pub pair: usize,
    pub unwitnessed: usize,
    pub served: usize,
    /// The scan of `A`-copies stopped at the scan limit.
    pub scan_capped: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundLog {
    pub round: usize,
    pub copies_examined: usize,
    pub glued: usize,
    pub truncated: Vec<Truncation>,
}

/// A finite chain `M_0 ≤ M_1 ≤ …` with the catalog it was built against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericChain {
    pub signature: Signature,
    pub stages: Vec<RelStructure>,
    pub catalog: Vec<ExtPair>,
    pub catalog_bound: usize,
    pub rounds_done: usize,
    pub seed: u64,
    pub log: Vec<RoundLog>,
}

impl GenericChain {
    pub fn last(&self) -> &RelStructure {
        self.stages.last().expect("a chain has at least one stage")
    }

    /// Each stage is an induced substructure of the next, self-sufficient in
    /// it, and in the class.
    pub fn validate(&self) -> Result<()> {
        use crate::error::Error;
        for (i, w) in self.stages.windows(2).enumerate() {
            let (lo, hi) = (&w[0], &w[1]);
            let mut members = vec![false; hi.len()];
            let mut keep = Vec::with_capacity(lo.len());
            for p in lo.universe() {
                let j = hi.index_of(p.as_str()).ok_or_else(|| {
                    Error::InvalidStructure(format!("point {p} of stage {i} is missing from stage {}", i + 1))
                })?;
                members[j] = true;
                keep.push(j);
            }
            keep.sort_unstable();
            if &hi.induced_indices(&keep) != lo {
                return Err(Error::InvalidStructure(format!("stage {i} is not induced in stage {}", i + 1)));
            }
            if crate::mincut::min_predim_over(hi, &members).value != hi.predim_of(&members) {
                return Err(Error::NotSelfSufficient(format!("stage {i} in stage {}", i + 1)));
            }
        }
        for (i, s) in self.stages.iter().enumerate() {
            if !s.in_class() {
                return Err(Error::NotInClass(format!("stage {i}")));
            }
        }
        Ok(())
    }
}

/// Strong copies of `A` in the host, with those that already extend to a
/// strong copy of `B` removed.
struct PairScan {
    examined: usize,
    capped: bool,
    unwitnessed: Vec<Vec<usize>>,
}

fn scan_pair(pair: &ExtPair, host: &Host<'_>, cfg: &BuildConfig) -> Result<PairScan> {
    let a = pair.a();
    let pat_a = Pattern::new(&a, 0, host, true)?;
    let pat_b = Pattern::new(&pair.b, pair.a_size, host, true)?;
    let mut copies = Vec::new();
    let mut work = 0;
    let outcome = for_each_embedding(&pat_a, host, &[], u64::MAX, &mut work, |img| {
        copies.push(img.to_vec());
        copies.len() < cfg.scan_limit
    });
    let mut unwitnessed = Vec::new();
    for g in &copies {
        let mut w = 0;
        let (s, found) = strong_extension(&pat_b, host, g, cfg.witness_work, &mut w);
        if found.is_none() || s == Search::OutOfWork {
            unwitnessed.push(g.clone());
        }
    }
    Ok(PairScan { examined: copies.len(), capped: outcome == Search::Stopped, unwitnessed })
}

fn pair_seed(seed: u64, round: usize, pair: usize) -> u64 {
    seed ^ (round as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (pair as u64).wrapping_mul(0xc2b2_ae3d_27d4_eb4f)
}

/// Build `rounds` stages over `∅`. In round `r` every catalog pair is
/// visited in order; each strong copy of `A` in stage `r-1` that does not
/// yet extend to a strong copy of `B` receives fresh copies of `B` glued
/// freely over it. Stage `r` is the result of all gluings of the round.
pub fn generic_build(
    signature: &Signature,
    k: usize,
    rounds: usize,
    seed: u64,
    cfg: &BuildConfig,
    exec: Exec,
) -> Result<GenericChain> {
    let catalog = extension_catalog(signature, k, cfg.catalog_cap)?;
    let redundancy = cfg.redundancy.unwrap_or(k + 1).max(1);
    let mut stages = vec![RelStructure::empty(signature.clone())];
    let mut log = Vec::new();
    let active: Vec<usize> = (0..catalog.len()).filter(|&i| !catalog[i].is_trivial()).collect();
    for round in 1..=rounds {
        let snap = stages.last().unwrap().clone();
        let host = Host::new(&snap);
        let scans = exec.map_slice(&active, |&pi| scan_pair(&catalog[pi], &host, cfg));
        let mut points: Vec<Point> = snap.universe().to_vec();
        let mut tuples: Vec<(String, Vec<Point>)> = snap
            .all_tuples()
            .map(|(s, t)| (s.to_string(), t.iter().map(|&i| snap.point(i as usize).clone()).collect()))
            .collect();
        let mut counter = 0usize;
        let mut entry = RoundLog { round, copies_examined: 0, glued: 0, truncated: Vec::new() };
        for (&pi, scan) in active.iter().zip(scans) {
            let mut scan = scan?;
            let pair = &catalog[pi];
            entry.copies_examined += scan.examined;
            let reps = redundancy.min(cfg.budget);
            let serve = cfg.budget.checked_div(reps).unwrap_or(0).min(scan.unwitnessed.len());
            if serve < scan.unwitnessed.len() {
                let mut rng = ChaCha8Rng::seed_from_u64(pair_seed(seed, round, pi));
                scan.unwitnessed.shuffle(&mut rng);
            }
            if serve < scan.unwitnessed.len() || scan.capped {
                entry.truncated.push(Truncation {
                    pair: pi,
                    unwitnessed: scan.unwitnessed.len(),
                    served: serve,
                    scan_capped: scan.capped,
                });
            }
            for g in &scan.unwitnessed[..serve] {
                for _ in 0..reps {
                    let names: Vec<Point> = (0..pair.b.len())
                        .map(|v| {
                            if v < pair.a_size {
                                snap.point(g[v]).clone()
                            } else {
                                counter += 1;
                                let p = Point::from(format!("s{round:02}_{counter:06}"));
                                points.push(p.clone());
                                p
                            }
                        })
                        .collect();
                    for (s, t) in pair.b.all_tuples().filter(|(_, t)| t.iter().any(|&v| v as usize >= pair.a_size)) {
                        tuples.push((s.to_string(), t.iter().map(|&v| names[v as usize].clone()).collect()));
                    }
                    entry.glued += 1;
                }
            }
        }
        stages.push(RelStructure::new(signature.clone(), points, tuples)?);
        log.push(entry);
    }
    Ok(GenericChain { signature: signature.clone(), stages, catalog, catalog_bound: k, rounds_done: rounds, seed, log })
}
