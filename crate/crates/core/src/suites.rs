//! Named randomized property suites.
//!
//! Trial `i` of a run draws from its own ChaCha8 stream, selected by `i`
//! under the run seed, so a trial can be replayed alone and the outcome does
//! not depend on how trials are scheduled. The reported counterexample is the
//! failing trial with the lowest index, printed in the input grammar.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closure;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::genesis::free_amalgam;
use crate::mincut;
use crate::pclass::{is_strong_sub, lift_search, pregeom_amalgam, LiftConfig};
use crate::pregeom::{pg_extract, pg_is_matroid, pg_iso, pg_localize, IsoMode, Pregeometry};
use crate::random::{grow, point_names, pregeometry_twin, random_on, random_strong_subset, random_structure};
use crate::signature::{Signature, Symbol};
use crate::structure::{Point, RelStructure, Subset};
use crate::text::{render_pregeometry, render_signature, render_structure, render_subset};
use crate::transforms::{
    derive_saturate, derive_tuple, diagonal_saturate, pad_arity, pi_reduce, replace_substructure, unpad_arity,
    ReplaceOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    pub trials: usize,
    pub seed: u64,
    /// Largest generated universe; `None` uses the suite's own default.
    pub max_points: Option<usize>,
    pub cap: usize,
    pub exec: Exec,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { trials: 1000, seed: 0, max_points: None, cap: crate::DEFAULT_CAP, exec: Exec::Parallel }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub trial: usize,
    pub message: String,
    /// The failing inputs in the input grammar, with notes as comments.
    pub reproducer: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub seed: u64,
    pub max_points: usize,
    /// Trials whose inputs exercised the property beyond a trivial case.
    pub nontrivial: usize,
    pub warning: Option<String>,
    pub failure: Option<Failure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(w) = &self.warning {
            writeln!(f, "warning: {w}")?;
        }
        match &self.failure {
            None => writeln!(
                f,
                "suite {}: pass ({} trials, seed {}, up to {} points, {} nontrivial)",
                self.suite, self.trials, self.seed, self.max_points, self.nontrivial
            ),
            Some(fail) => {
                writeln!(f, "suite {}: FAIL at trial {} of {} (seed {})", self.suite, fail.trial, self.trials, self.seed)?;
                writeln!(f, "  {}", fail.message)?;
                writeln!(f, "reproducer:")?;
                write!(f, "{}", fail.reproducer)
            }
        }
    }
}

/// Inputs of one trial, kept for the reproducer.
#[derive(Default)]
struct Case {
    notes: Vec<String>,
    structures: Vec<(String, RelStructure)>,
    pregeometries: Vec<(String, Pregeometry)>,
}

struct Fail {
    message: String,
    reproducer: String,
}

impl Case {
    fn of(name: &str, m: &RelStructure) -> Case {
        let mut c = Case::default();
        c.add(name, m);
        c
    }

    fn add(&mut self, name: &str, m: &RelStructure) -> &mut Self {
        self.structures.push((name.to_string(), m.clone()));
        self
    }

    fn add_pg(&mut self, name: &str, p: &Pregeometry) -> &mut Self {
        self.pregeometries.push((name.to_string(), p.clone()));
        self
    }

    fn note(&mut self, s: impl Into<String>) -> &mut Self {
        self.notes.push(s.into());
        self
    }

    fn subset(&mut self, name: &str, m: &RelStructure, s: Subset) -> &mut Self {
        self.note(format!("{name} = {}", render_subset(&m.subset_names(s))))
    }

    fn render(&self) -> String {
        let mut out = String::new();
        for n in &self.notes {
            out.push_str(&format!("# {n}\n"));
        }
        let mut sigs: Vec<&Signature> = Vec::new();
        for (_, m) in &self.structures {
            if !sigs.contains(&m.signature()) {
                sigs.push(m.signature());
            }
        }
        for (i, s) in sigs.iter().enumerate() {
            out.push_str(&render_signature(&format!("sig{i}"), s));
        }
        for (name, m) in &self.structures {
            let i = sigs.iter().position(|s| *s == m.signature()).expect("collected above");
            out.push_str(&render_structure(name, &format!("sig{i}"), m));
        }
        for (name, p) in &self.pregeometries {
            out.push_str(&render_pregeometry(name, p));
        }
        out
    }

    fn fail(&self, message: impl Into<String>) -> Fail {
        Fail { message: message.into(), reproducer: self.render() }
    }

    fn ensure(&self, ok: bool, message: impl FnOnce() -> String) -> Result<(), Fail> {
        if ok {
            Ok(())
        } else {
            Err(self.fail(message()))
        }
    }
}

trait OrFail<T> {
    fn or_fail(self, case: &Case) -> Result<T, Fail>;
}

impl<T> OrFail<T> for Result<T> {
    fn or_fail(self, case: &Case) -> Result<T, Fail> {
        self.map_err(|e| case.fail(format!("unexpected error: {e}")))
    }
}

struct Ctx {
    points: usize,
    cap: usize,
}

type TrialFn = fn(&mut ChaCha8Rng, &Ctx) -> Result<bool, Fail>;

struct Suite {
    name: &'static str,
    about: &'static str,
    points: usize,
    run: TrialFn,
}

const SUITES: &[Suite] = &[
    Suite { name: "submodularity", about: "δ(A∪B) + δ(A∩B) ≤ δ(A) + δ(B)", points: 10, run: submodularity },
    Suite { name: "hereditary", about: "induced substructures of class members are in the class", points: 10, run: hereditary },
    Suite { name: "relabel", about: "δ and the pregeometry are invariant under renaming", points: 8, run: relabel },
    Suite { name: "matroid", about: "extracted rank tables satisfy the matroid axioms", points: 8, run: matroid },
    Suite { name: "closure", about: "self-sufficient closure is a closure operator", points: 8, run: closure_axioms },
    Suite { name: "transitivity", about: "A ≤ B ≤ C gives A ≤ C; strong sets are closed under ∩", points: 8, run: transitivity },
    Suite { name: "changing1", about: "replacing a strong Z keeps the class and Z ≤ M'", points: 8, run: changing1 },
    Suite { name: "changing2", about: "replacing Z by a same-pregeometry Z' keeps PG(M)", points: 8, run: changing2 },
    Suite { name: "changing4", about: "replacing a strong Z keeps the localization at Z", points: 8, run: changing4 },
    Suite { name: "cor54", about: "a rank-zero replacement turns PG_Z(M) into PG(M')", points: 8, run: cor54 },
    Suite { name: "localization", about: "diagonal replacement of |Z| ≤ 3 realizes the localization", points: 8, run: localization },
    Suite { name: "pireduce", about: "π-reduction {R3,R4} → {R4} keeps δ on every subset", points: 8, run: pireduce },
    Suite { name: "pireduce-weighted", about: "π-reduction with weight 2 → 1 keeps δ", points: 8, run: pireduce_weighted },
    Suite { name: "pad", about: "padding keeps δ on every subset and unpads back", points: 8, run: pad },
    Suite { name: "derive", about: "derivatives keep dimension on original subsets", points: 6, run: derive },
    Suite { name: "amalgam", about: "free amalgams are in the class with A1 strong", points: 8, run: amalgam },
    Suite { name: "strongsub-iso", about: "⊴3 is invariant under renaming", points: 4, run: strongsub_iso },
    Suite { name: "p3-in-p4", about: "3-lifts pad to 4-lifts of the same pregeometry", points: 4, run: p3_in_p4 },
    Suite { name: "pgamalgam", about: "amalgams of pregeometries are matroids with both sides ⊴3", points: 3, run: pgamalgam },
    Suite { name: "corrupt", about: "harness self-test: claims every subset is self-sufficient", points: 6, run: corrupt },
];

/// Names and one-line descriptions of the registered suites.
pub fn suite_names() -> Vec<(&'static str, &'static str)> {
    SUITES.iter().map(|s| (s.name, s.about)).collect()
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let suite = SUITES.iter().find(|s| s.name == name).ok_or_else(|| Error::UnknownSuite(name.to_string()))?;
    let points = cfg.max_points.unwrap_or(suite.points).min(cfg.cap);
    if points == 0 {
        return Err(Error::Argument("suites need at least one point".into()));
    }
    let ctx = Ctx { points, cap: cfg.cap };
    let outcomes = cfg.exec.map_range(0..cfg.trials, |i| (suite.run)(&mut trial_rng(cfg.seed, i), &ctx));
    let mut report = SuiteReport {
        suite: suite.name.to_string(),
        trials: cfg.trials,
        seed: cfg.seed,
        max_points: points,
        nontrivial: 0,
        warning: (cfg.trials == 0).then(|| "0 trials: the pass is vacuous".to_string()),
        failure: None,
    };
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(nontrivial) => report.nontrivial += usize::from(nontrivial),
            Err(f) => {
                report.failure = Some(Failure { trial: i, message: f.message, reproducer: f.reproducer });
                break;
            }
        }
    }
    Ok(report)
}

fn mixed() -> Signature {
    Signature::closed(vec![Symbol::new("R", 3, 1), Symbol::new("S", 2, 2), Symbol::new("T", 4, 1)])
        .expect("distinct symbols")
}

fn gen(rng: &mut ChaCha8Rng, sig: &Signature, ctx: &Ctx) -> Result<RelStructure, Fail> {
    random_structure(rng, sig, 1, ctx.points).or_fail(&Case::default())
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> Subset {
    Subset(rng.random_range(0..1u64 << n))
}

fn supersets(a: u64, n: usize) -> impl Iterator<Item = u64> {
    (0..1u64 << n).filter(move |t| t & a == a)
}

/// Oracle: `A ≤ M` by comparing δ with every superset.
fn brute_strong(m: &RelStructure, a: u64) -> bool {
    let d = m.predim(Subset(a));
    supersets(a, m.len()).all(|t| m.predim(Subset(t)) >= d)
}

/// Oracle: least δ over supersets.
fn brute_dim(m: &RelStructure, a: u64) -> i64 {
    supersets(a, m.len()).map(|t| m.predim(Subset(t))).min().expect("a is its own superset")
}

fn members(m: &RelStructure, s: Subset) -> Vec<Point> {
    s.iter().map(|i| m.point(i).clone()).collect()
}

fn pg(m: &RelStructure, case: &Case, cap: usize) -> Result<Pregeometry, Fail> {
    pg_extract(m, cap, Exec::Sequential).or_fail(case)
}

fn submodularity(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<bool, Fail> {
    let m = gen(rng, &mixed(), ctx)?;
    let case = Case::of("M", &m);
    let n = m.len();
    let full = 1u64 << n;
    if n <= 6 {
        for a in 0..full {
            for b in 0..full {
                let (da, db) = (m.predim(Subset(a)), m.predim(Subset(b)));
                let (du, di) = (m.predim(Subset(a | b)), m.predim(Subset(a & b)));
                case.ensure(du + di <= da + db, || {
                    format!("A = {}, B = {}", m.format_subset(Subset(a)), m.format_subset(Subset(b)))
                })?;
            }
        }
    } else {
        // Past six points, the equivalent local form: adding y helps A∪{x}
        // no more than it helps A.
        let d = m.delta_table(ctx.cap, Exec::Sequential).or_fail(&case)?;
        for a in 0..full {
            for x in (0..n).filter(|&x| a >> x & 1 == 0) {
                for y in (x + 1..n).filter(|&y| a >> y & 1 == 0) {
                    let (ax, ay) = (a | 1 << x, a | 1 << y);
                    case.ensure(d[(ax | ay) as usize] + d[a as usize] <= d[ax as usize] + d[ay as usize], || {
                        format!("A = {}, x = {}, y = {}", m.format_subset(Subset(a)), m.point(x), m.point(y))
                    })?;
                }
            }
        }
    }
    Ok(m.tuple_count() > 0)
}

fn hereditary(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<bool, Fail> {
    let m = gen(rng, &mixed(), ctx)?;
    let a = random_subset(rng, m.len());
    let mut case = Case::of("M", &m);
    case.subset("A", &m, a);
    let sub = m.induced(a);
    case.ensure(sub.in_class(), || "induced substructure left the class".into())?;
    let ok = (0..1u64 << sub.len()).all(|s| sub.predim(Subset(s)) >= 0);
    case.ensure(ok, || "induced substructure has a negative subset".into())?;
    Ok(sub.tuple_count() > 0)
}

fn relabel(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<bool, Fail> {
    let m = gen(rng, &mixed(), ctx)?;
    let case = Case::of("M", &m);
    let n = m.len();
    let mut fresh: Vec<Point> = (0..n).map(|i| Point::from(format!("v{i}"))).collect();
    fresh.shuffle(rng);
    let to: BTreeMap<Point, Point> = m.universe().iter().cloned().zip(fresh).collect();
    let r = m.relabel(|p| to[p].clone()).or_fail(&case)?;
    let idx: Vec<usize> = m.universe().iter().map(|p| r.index_of(to[p].as_str()).expect("renamed")).collect();
    for s in 0..1u64 << n {
        let img = Subset::from_indices(Subset(s).iter().map(|i| idx[i]));
        case.ensure(m.predim(Subset(s)) == r.predim(img), || format!("δ differs on {}", m.format_subset(Subset(s))))?;
    }
    let (p, q) = (pg(&m, &case, ctx.cap)?, pg(&r, &case, ctx.cap)?);
    let map = pg_iso(&p, &q, IsoMode::Iso, ctx.cap).or_fail(&case)?;
    let map = map.ok_or_else(|| case.fail("no isomorphism to the renamed pregeometry"))?;
    for s in 0..1u64 << n {
        let img = Subset::from_indices(
            Subset(s).iter().map(|i| q.index_of(map.get(&p.ground()[i]).expect("total").as_str()).expect("in Q")),
        );
        case.ensure(p.rank(Subset(s)) == q.rank(img), || "the isomorphism found does not preserve rank".into())?;
    }
    Ok(m.tuple_count() > 0)
}

fn matroid(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<bool, Fail> {
    let m = gen(rng, &mixed(), ctx)?;
    let case = Case::of("M", &m);
    let p = pg(&m, &case, ctx.cap)?;
    let table: Vec<u32> = (0..1u64 << p.len()).map(|s| p.rank(Subset(s))).collect();
    case.ensure(pg_is_matroid(&table), || "rank table violates the matroid axioms".into())?;
    let s = random_subset(rng, m.len());
    case.ensure(u32::try_from(brute_dim(&m, s.bits())).ok() == Some(p.rank(s)), || {
        format!("rank of {} differs from the least δ over its supersets", m.format_subset(s))
    })?;
    Ok(p.rank(p.full()) < p.len() as u32)
}

fn closure_axioms(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<bool, Fail> {
    let m = gen(rng, &mixed(), ctx)?;
    let n = m.len();
    let a = random_subset(rng, n);
    let b = a.union(random_subset(rng, n));
    let mut case = Case::of("M", &m);
    case.subset("A", &m, a).subset("B", &m, b);
    let cl = |s| closure::ss_closure(&m, s, ctx.cap).or_fail(&case);
    let (ca, cb) = (cl(a)?, cl(b)?);
    case.ensure(a.is_subset_of(ca), || "not extensive".into())?;
    case.ensure(ca.is_subset_of(cb), || "not monotone".into())?;
    case.ensure(cl(ca)? == ca, || "not idempotent".into())?;
    // Oracle: the intersection of all self-sufficient supersets.
    let meet = supersets(a.bits(), n).filter(|&t| brute_strong(&m, t)).fold((1u64 << n) - 1, |acc, t| acc & t);
    case.ensure(ca == Subset(meet), || {
        format!("closure {} but least strong superset {}", m.format_subset(ca), m.format_subset(Subset(meet)))
    })?;
    let dcl = closure::d_closure(&m, a, ctx.cap).or_fail(&case)?;
    case.ensure(ca.is_subset_of(dcl), || "closure is not inside the d-closure".into())?;
    let strong = closure::is_self_sufficient(&m, a, ctx.cap).or_fail(&case)?;
    let dim = closure::dimension(&m, a, ctx.cap).or_fail(&case)?;
    case.ensure(strong == (dim == m.predim(a)), || "A ≤ M disagrees with d(A) = δ(A)".into())?;
    Ok(ca != a)
}

fn transitivity(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<bool, Fail> {
    let m = gen(rng, &mixed(), ctx)?;
    let n = m.len();
    let mut case = Case::of("M", &m);
    let b = random_strong_subset(rng, &m, n, ctx.cap).or_fail(&case)?;
    let mb = m.induced(b);
    let a_in_b = random_strong_subset(rng, &mb, mb.len(), ctx.cap).or_fail(&case)?;
    let a = m.subset(&mb.subset_names(a_in_b)).or_fail(&case)?;
    case.subset("B", &m, b).subset("A", &m, a);
    case.ensure(brute_strong(&m, a.bits()), || "A ≤ B ≤ M but A is not strong in M".into())?;
    let a1 = random_strong_subset(rng, &m, n, ctx.cap).or_fail(&case)?;
    let a2 = random_strong_subset(rng, &m, n, ctx.cap).or_fail(&case)?;
    case.subset("A1", &m, a1).subset("A2", &m, a2);
    case.ensure(brute_strong(&m, a1.intersection(a2).bits()), || "A1 ∩ A2 is not strong".into())?;
    Ok(a != b && b != m.full())
}

/// A random class member and a strong `Z` of at most `z_max` points.
fn replacement_case(
    rng: &mut ChaCha8Rng,
    ctx: &Ctx,
    sig: &Signature,
    z_max: usize,
) -> Result<(RelStructure, Subset, Case), Fail> {
    let m = gen(rng, sig, ctx)?;
    let mut case = Case::of("M", &m);
    let z = random_strong_subset(rng, &m, z_max, ctx.cap).or_fail(&case)?;
    case.subset("Z", &m, z);
    Ok((m, z, case))
}

fn replace(m: &RelStructure, z: Subset, z_new: &RelStructure, case: &Case) -> Result<RelStructure, Fail> {
    replace_substructure(m, z, z_new, ReplaceOptions::default()).or_fail(case)
}

fn changing1(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<bool, Fail> {
    let (m, z, mut case) = replacement_case(rng, ctx, &mixed(), 4)?;
    let z_new = random_on(rng, m.signature(), &members(&m, z)).or_fail(&case)?;
    case.add("Z_new", &z_new);
    let out = replace(&m, z, &z_new, &case)?;
    let in_class = (0..1u64 << out.len()).all(|s| out.predim(Subset(s)) >= 0);
    case.ensure(in_class, || "M' is not in the class".into())?;
    case.ensure(brute_strong(&out, z.bits()), || "Z is not self-sufficient in M'".into())?;
    case.ensure(out.induced(z) == z_new, || "M' does not induce Z_new on Z".into())?;
    Ok(z_new != m.induced(z))
}

fn changing2(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<bool, Fail> {
    let (m, z, mut case) = replacement_case(rng, ctx, &mixed(), 4)?;
    let old = m.induced(z);
    let (z_new, searched) = pregeometry_twin(rng, &old, ctx.cap).or_fail(&case)?;
    case.add("Z_new", &z_new);
    case.ensure(pg(&z_new, &case, ctx.cap)? == pg(&old, &case, ctx.cap)?, || "generator broke PG(Z) = PG(Z')".into())?;
    let out = replace(&m, z, &z_new, &case)?;
    case.ensure(pg(&m, &case, ctx.cap)? == pg(&out, &case, ctx.cap)?, || "PG(M) ≠ PG(M')".into())?;
    Ok(searched && z_new != old)
}

fn changing4(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<bool, Fail> {
    let (m, z, mut case) = replacement_case(rng, ctx, &mixed(), 4)?;
    let z_new = random_on(rng, m.signature(), &members(&m, z)).or_fail(&case)?;
    case.add("Z_new", &z_new);
    let out = replace(&m, z, &z_new, &case)?;
    let before = pg_localize(&pg(&m, &case, ctx.cap)?, z);
    let after = pg_localize(&pg(&out, &case, ctx.cap)?, z);
    case.ensure(before == after, || "PG_Z(M) ≠ PG_Z(M')".into())?;
    Ok(z_new != m.induced(z) && !z.is_empty())
}

/// Replace `Z` by one diagonal 3-tuple per point and compare `PG_Z(M)` with
/// `PG(M')` on the rest.
fn diagonal_case(rng: &mut ChaCha8Rng, ctx: &Ctx, sig: &Signature, z_max: usize) -> Result<bool, Fail> {
    let (m, z, mut case) = replacement_case(rng, ctx, sig, z_max)?;
    let z_new = diagonal_saturate(m.signature(), &members(&m, z), 3).or_fail(&case)?;
    case.add("Z_new", &z_new);
    let out = replace(&m, z, &z_new, &case)?;
    let after = pg(&out, &case, ctx.cap)?;
    case.ensure(after.rank(z) == 0, || "the diagonal replacement does not have rank 0".into())?;
    let localized = pg_localize(&pg(&m, &case, ctx.cap)?, z);
    let rest = after.restrict(after.full().difference(z));
    case.ensure(localized == rest, || "PG_Z(M) differs from PG(M') off Z".into())?;
    Ok(!z.is_empty())
}

fn cor54(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<bool, Fail> {
    diagonal_case(rng, ctx, &mixed(), 4)
}

fn localization(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<bool, Fail> {
    diagonal_case(rng, ctx, &Signature::uniform(3), 3)
}

fn reduce_case(rng: &mut ChaCha8Rng, ctx: &Ctx, w3: u32) -> Result<bool, Fail> {
    let sig = Signature::closed(vec![Symbol::new("R3", 3, w3), Symbol::new("R4", 4, 1)]).expect("distinct symbols");
    let m = gen(rng, &sig, ctx)?;
    let case = Case::of("M", &m);
    let h: BTreeMap<String, String> = [("R3".to_string(), "R4".to_string())].into();
    let out = pi_reduce(&m, &h).or_fail(&case)?;
    case.ensure(out.relations().keys().all(|k| k == "R4"), || "symbols other than R4 remain".into())?;
    case.ensure(out.universe() == m.universe(), || "universe changed".into())?;
    for s in 0..1u64 << m.len() {
        case.ensure(out.predim(Subset(s)) == m.predim(Subset(s)), || {
            format!("δ changes on {}", m.format_subset(Subset(s)))
        })?;
    }
    let reduced = m.tuples("R3").next().is_some();
    Ok(reduced)
}

fn pireduce(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<bool, Fail> {
    reduce_case(rng, ctx, 1)
}

fn pireduce_weighted(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<bool, Fail> {
    reduce_case(rng, ctx, 2)
}

fn pad(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<bool, Fail> {
    let m = gen(rng, &Signature::uniform(3), ctx)?;
    let n = rng.random_range(3..=6);
    let mut case = Case::of("M", &m);
    case.note(format!("padded to arity {n}"));
    let out = pad_arity(&m, n).or_fail(&case)?;
    case.ensure(out.in_class(), || "padded structure left the class".into())?;
    for s in 0..1u64 << m.len() {
        case.ensure(out.predim(Subset(s)) == m.predim(Subset(s)), || {
            format!("δ changes on {}", m.format_subset(Subset(s)))
        })?;
    }
    case.ensure(unpad_arity(&out).or_fail(&case)? == m, || "unpadding does not give M back".into())?;
    Ok(m.tuple_count() > 0 && n > 3)
}

/// Dimension of every subset of `original`'s points, computed in `m`.
fn dims_on(m: &RelStructure, original: &[Point]) -> Vec<i64> {
    let idx: Vec<usize> = original.iter().map(|p| m.index_of(p.as_str()).expect("original point")).collect();
    (0..1u64 << original.len())
        .map(|s| {
            let mut fixed = vec![false; m.len()];
            Subset(s).iter().for_each(|i| fixed[idx[i]] = true);
            mincut::min_predim_over(m, &fixed).value
        })
        .collect()
}

fn derive(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<bool, Fail> {
    let sig = Signature::closed(vec![Symbol::new("R3", 3, 1), Symbol::new("R4", 4, 1), Symbol::new("R5", 5, 1)])
        .expect("distinct symbols");
    let m = gen(rng, &sig, ctx)?;
    let mut case = Case::of("M", &m);
    let dims = dims_on(&m, m.universe());
    let wide: Vec<(String, Vec<Point>)> = m
        .all_tuples()
        .filter(|(_, t)| t.len() >= 4)
        .map(|(s, t)| (s.to_string(), t.iter().map(|&i| m.point(i as usize).clone()).collect()))
        .collect();
    if let Some((s, t)) = wide.choose(rng) {
        let names: Vec<&str> = t.iter().map(Point::as_str).collect();
        case.note(format!("derived tuple {s}({})", names.join(",")));
        let out = derive_tuple(&m, s, t).or_fail(&case)?;
        case.ensure(out.predim_full() == m.predim_full(), || "δ of the whole structure changed".into())?;
        case.ensure(dims_on(&out, m.universe()) == dims, || "a dimension on the original points changed".into())?;
        case.ensure(mincut::min_predim_over(&out, &vec![false; out.len()]).value >= 0, || "M^t left the class".into())?;
    }
    let sat = derive_saturate(&m).or_fail(&case)?;
    case.ensure(sat.all_tuples().all(|(_, t)| t.len() == 3), || "saturation left a tuple of arity ≥ 4".into())?;
    case.ensure(mincut::min_predim_over(&sat, &vec![false; sat.len()]).value >= 0, || "saturation left the class".into())?;
    case.ensure(dims_on(&sat, m.universe()) == dims, || "saturation changed a dimension".into())?;
    Ok(!wide.is_empty())
}

/// A structure on `base`'s points plus `extra` fresh points `n0, n1, …`,
/// inducing `base` and having it self-sufficient. Random growth is kept
/// only when `base` stays strong; otherwise the fresh points stay free.
fn extend_strongly(
    rng: &mut ChaCha8Rng,
    base: &RelStructure,
    extra: usize,
    cap: usize,
) -> Result<(RelStructure, Subset)> {
    let tuples: Vec<(String, Vec<Point>)> = base
        .all_tuples()
        .map(|(s, t)| (s.to_string(), t.iter().map(|&i| base.point(i as usize).clone()).collect()))
        .collect();
    let points = base.universe().iter().cloned().chain((0..extra).map(|i| Point::from(format!("n{i}"))));
    let free = RelStructure::new(base.signature().clone(), points, tuples)?;
    let a0 = free.subset(&base.subset_names(base.full()))?;
    let attempts = rng.random_range(0..=2 * free.len());
    let grown = grow(rng, &free, attempts, a0, cap)?;
    if closure::is_self_sufficient(&grown, a0, cap)? {
        Ok((grown, a0))
    } else {
        Ok((free, a0))
    }
}

fn amalgam(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<bool, Fail> {
    let m1 = random_structure(rng, &mixed(), 1, ctx.points.saturating_sub(3).max(1)).or_fail(&Case::default())?;
    let mut case = Case::of("A1", &m1);
    let a0 = random_subset(rng, m1.len());
    case.subset("A0", &m1, a0);
    let extra = rng.random_range(0..=3);
    let (m2, _) = extend_strongly(rng, &m1.induced(a0), extra, ctx.cap).or_fail(&case)?;
    case.add("A2", &m2);
    let f = free_amalgam(&m1, &m2, &members(&m1, a0)).or_fail(&case)?;
    case.ensure(f.in_class(), || "the amalgam is not in the class".into())?;
    let a1 = f.subset(&m1.subset_names(m1.full())).or_fail(&case)?;
    case.ensure(brute_strong(&f, a1.bits()), || "A1 is not self-sufficient in the amalgam".into())?;
    for s in 0..1u64 << m1.len() {
        let img = f.subset(&m1.subset_names(Subset(s))).or_fail(&case)?;
        case.ensure(brute_dim(&f, img.bits()) == brute_dim(&m1, s), || {
            format!("dimension of {} changes in the amalgam", m1.format_subset(Subset(s)))
        })?;
    }
    Ok(m2.len() > a0.len() && m2.tuple_count() > m1.induced(a0).tuple_count())
}

fn lift_cfg() -> LiftConfig {
    LiftConfig::default()
}

fn small_l3(rng: &mut ChaCha8Rng, ctx: &Ctx, most: usize) -> Result<RelStructure, Fail> {
    random_structure(rng, &Signature::uniform(3), 1, ctx.points.min(most)).or_fail(&Case::default())
}

fn strongsub_iso(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<bool, Fail> {
    let m = small_l3(rng, ctx, 4)?;
    let mut case = Case::of("M", &m);
    let b = pg(&m, &case, ctx.cap)?;
    let a = b.restrict(random_subset(rng, b.len()));
    case.add_pg("A", &a).add_pg("B", &b);
    let before = is_strong_sub(&a, &b, 3, &lift_cfg(), Exec::Sequential).or_fail(&case)?;
    let mut fresh = point_names(b.len() + 4)[4..].to_vec();
    fresh.shuffle(rng);
    let to: BTreeMap<Point, Point> = b.ground().iter().cloned().zip(fresh).collect();
    let a2 = a.relabel(|p| to[p].clone(), ctx.cap).or_fail(&case)?;
    let b2 = b.relabel(|p| to[p].clone(), ctx.cap).or_fail(&case)?;
    let after = is_strong_sub(&a2, &b2, 3, &lift_cfg(), Exec::Sequential).or_fail(&case)?;
    case.ensure(before.found() == after.found(), || "renaming changed A ⊴3 B".into())?;
    Ok(!a.is_empty() && a.len() < b.len())
}

fn p3_in_p4(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<bool, Fail> {
    let m = small_l3(rng, ctx, 4)?;
    let mut case = Case::of("M", &m);
    let p = pg(&m, &case, ctx.cap)?;
    case.add_pg("P", &p);
    let lift = lift_search(&p, 3, &lift_cfg(), Exec::Sequential).or_fail(&case)?.lift;
    let lift = lift.ok_or_else(|| case.fail("PG(M) has no 3-lift although M is one"))?;
    let padded = pad_arity(&lift, 4).or_fail(&case)?;
    case.ensure(padded.in_class(), || "the padded lift is not in C4".into())?;
    case.ensure(pg(&padded, &case, ctx.cap)? == p, || "padding changed the pregeometry".into())?;
    Ok(lift.tuple_count() > 0)
}

fn pgamalgam(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<bool, Fail> {
    let m1 = small_l3(rng, ctx, 3)?;
    let mut case = Case::of("M1", &m1);
    let z = random_strong_subset(rng, &m1, m1.len(), ctx.cap).or_fail(&case)?;
    case.subset("A0", &m1, z);
    let extra = rng.random_range(0..=2);
    let (m2, _) = extend_strongly(rng, &m1.induced(z), extra, ctx.cap).or_fail(&case)?;
    case.add("M2", &m2);
    let a1 = pg(&m1, &case, ctx.cap)?;
    let a2 = pg(&m2, &case, ctx.cap)?;
    let a0 = a1.restrict(z);
    let am = pregeom_amalgam(&a0, &a1, &a2, 3, &lift_cfg(), Exec::Sequential).or_fail(&case)?;
    let p = &am.pregeometry;
    let table: Vec<u32> = (0..1u64 << p.len()).map(|s| p.rank(Subset(s))).collect();
    case.ensure(pg_is_matroid(&table), || "the amalgam is not a pregeometry".into())?;
    let a2r = a2.relabel(|q| am.from_a2.get(q).expect("total").clone(), ctx.cap).or_fail(&case)?;
    for (side, a) in [("A1", &a1), ("A2", &a2r)] {
        let v = is_strong_sub(a, p, 3, &lift_cfg(), Exec::Sequential).or_fail(&case)?;
        case.ensure(v.found(), || format!("{side} is not ⊴3 the amalgam"))?;
    }
    Ok(extra > 0 && z != m1.full())
}

fn corrupt(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<bool, Fail> {
    let m = gen(rng, &mixed(), ctx)?;
    let a = random_subset(rng, m.len());
    let mut case = Case::of("M", &m);
    case.subset("A", &m, a);
    let strong = closure::is_self_sufficient(&m, a, ctx.cap).or_fail(&case)?;
    case.ensure(strong, || format!("{} is not self-sufficient", m.format_subset(a)))?;
    Ok(true)
}
