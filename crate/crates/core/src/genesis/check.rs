use super::builder::GenericChain;
use super::embed::{for_each_embedding, strong_extension, Host, Pattern, Search};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::structure::{Point, RelStructure};
use crate::transforms::{replace_members, ReplaceOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckConfig {
    /// Search nodes allowed per (stage, pair) task.
    pub work_limit: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { work_limit: 50_000_000 }
    }
}

/// A strong copy of `A` with no strong copy of `B` over it in any later stage.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Unwitnessed {
    pub stage: usize,
    pub pair: usize,
    /// Images of `A`'s points, in `A`'s order.
    pub copy: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtReport {
    pub pass: bool,
    /// False when some task ran out of work; the verdict is then not a pass.
    pub complete: bool,
    pub copies_checked: usize,
    pub failures: Vec<Unwitnessed>,
    pub work: u64,
}

struct Task {
    copies: usize,
    failures: Vec<Unwitnessed>,
    work: u64,
    complete: bool,
}

/// For every stage that has a later stage (or the only stage of a
/// one-stage chain), every nontrivial catalog pair `(A, B)` and every strong
/// copy of `A` in that stage, look for a strong copy of `B` over it in the
/// last stage. By transitivity of `≤` along the chain, that is the same as
/// looking in every later stage.
pub fn extension_check(chain: &GenericChain, cfg: &CheckConfig, exec: Exec) -> ExtReport {
    let last = chain.stages.len() - 1;
    let checked = last.max(1).min(chain.stages.len());
    let witness_host = Host::new(chain.last());
    let pairs: Vec<usize> = (0..chain.catalog.len()).filter(|&i| !chain.catalog[i].is_trivial()).collect();
    let mut tasks = Vec::new();
    for i in 0..checked {
        let stage = &chain.stages[i];
        let host = Host::new(stage);
        let to_last: Vec<usize> =
            stage.universe().iter().map(|p| chain.last().index_of(p.as_str()).expect("stages are nested")).collect();
        tasks.extend(exec.map_slice(&pairs, |&pi| check_pair(chain, i, pi, &host, &witness_host, &to_last, cfg)));
    }
    let mut report = ExtReport { pass: true, complete: true, copies_checked: 0, failures: Vec::new(), work: 0 };
    for t in tasks {
        report.copies_checked += t.copies;
        report.work += t.work;
        report.complete &= t.complete;
        report.failures.extend(t.failures);
    }
    report.failures.sort();
    report.pass = report.complete && report.failures.is_empty();
    report
}

fn check_pair(
    chain: &GenericChain,
    stage: usize,
    pi: usize,
    host: &Host<'_>,
    witness_host: &Host<'_>,
    to_last: &[usize],
    cfg: &CheckConfig,
) -> Task {
    let pair = &chain.catalog[pi];
    let a = pair.a();
    let mut task = Task { copies: 0, failures: Vec::new(), work: 0, complete: true };
    let (Ok(pat_a), Ok(pat_b)) =
        (Pattern::new(&a, 0, host, true), Pattern::new(&pair.b, pair.a_size, witness_host, true))
    else {
        task.complete = false;
        return task;
    };
    let mut copies = Vec::new();
    let mut work = 0;
    if for_each_embedding(&pat_a, host, &[], cfg.work_limit, &mut work, |img| {
        copies.push(img.to_vec());
        true
    }) == Search::OutOfWork
    {
        task.complete = false;
    }
    for g in copies {
        task.copies += 1;
        let fixed: Vec<usize> = g.iter().map(|&x| to_last[x]).collect();
        let (s, found) = strong_extension(&pat_b, witness_host, &fixed, cfg.work_limit, &mut work);
        if s == Search::OutOfWork {
            task.complete = false;
            break;
        }
        if found.is_none() {
            let stage_m = &chain.stages[stage];
            task.failures.push(Unwitnessed {
                stage,
                pair: pi,
                copy: g.iter().map(|&x| stage_m.point(x).clone()).collect(),
            });
        }
    }
    task.work = work;
    task
}

/// Replace the relations on `z` by those of `z_new` in stage `stage` and
/// every later stage. `z` must be self-sufficient in stage `stage` and must
/// not meet any earlier stage.
pub fn replace_in_chain(
    chain: &GenericChain,
    stage: usize,
    z: &[Point],
    z_new: &RelStructure,
) -> Result<GenericChain> {
    if stage >= chain.stages.len() {
        return Err(Error::Argument(format!("chain has no stage {stage}")));
    }
    for (j, earlier) in chain.stages[..stage].iter().enumerate() {
        if let Some(p) = z.iter().find(|p| earlier.index_of(p.as_str()).is_some()) {
            return Err(Error::Argument(format!("point {p} already lies in stage {j}")));
        }
    }
    let mut out = chain.clone();
    for s in &mut out.stages[stage..] {
        let mut members = vec![false; s.len()];
        for p in z {
            members[s.index_of(p.as_str()).ok_or_else(|| Error::UnknownPoint(p.to_string()))?] = true;
        }
        *s = replace_members(s, &members, z_new, ReplaceOptions::default())?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genesis::{generic_build, BuildConfig};
    use crate::signature::Signature;
    use crate::transforms::diagonal_saturate;

    fn cfg() -> CheckConfig {
        CheckConfig::default()
    }

    #[test]
    fn one_stage_chain_fails() {
        let chain = generic_build(&Signature::uniform(3), 1, 0, 0, &BuildConfig::default(), Exec::Parallel).unwrap();
        let r = extension_check(&chain, &cfg(), Exec::Parallel);
        assert!(!r.pass);
        assert!(r.complete);
        assert_eq!(r.failures.len(), 2);
        assert!(r.failures.iter().all(|f| f.stage == 0 && f.copy.is_empty()));
    }

    #[test]
    fn built_chain_passes_and_modes_agree() {
        let build = BuildConfig { budget: 256, ..BuildConfig::default() };
        let chain = generic_build(&Signature::uniform(3), 2, 2, 3, &build, Exec::Parallel).unwrap();
        assert!(chain.log.iter().all(|l| l.truncated.is_empty()));
        let par = extension_check(&chain, &cfg(), Exec::Parallel);
        let seq = extension_check(&chain, &cfg(), Exec::Sequential);
        assert_eq!(par, seq);
        assert!(par.pass, "{:?}", &par.failures[..par.failures.len().min(5)]);
    }

    #[test]
    fn third_lemma_replacement_keeps_passing() {
        let sig = Signature::uniform(3);
        let chain = generic_build(&sig, 2, 1, 3, &BuildConfig::default(), Exec::Parallel).unwrap();
        let host = Host::new(chain.last());
        let z: Vec<usize> = (0..chain.last().len()).filter(|&x| host.is_strong(&[x])).take(1).collect();
        let z: Vec<Point> = z.iter().map(|&x| chain.last().point(x).clone()).collect();
        let diag = diagonal_saturate(&sig, &z, 3).unwrap();
        let replaced = replace_in_chain(&chain, 1, &z, &diag).unwrap();
        replaced.validate().unwrap();
        assert!(extension_check(&replaced, &cfg(), Exec::Parallel).pass);
        assert!(replace_in_chain(&chain, 5, &z, &diag).is_err());
    }
}
