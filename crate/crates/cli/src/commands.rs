use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Value};

use hrush_core::closure;
use hrush_core::genesis::{extension_check, free_amalgam, generic_build, BuildConfig, CheckConfig, GenericChain};
use hrush_core::pclass::{is_strong_sub, lift_search, pclass_generic_build, pregeom_amalgam, LiftConfig, LiftVerdict};
use hrush_core::pregeom::{pg_extract, pg_iso, pg_localize};
use hrush_core::suites::{run_suite, suite_names, SuiteConfig};
use hrush_core::text::{self, render_pregeometry, render_signature, render_structure, render_subset, Workspace};
use hrush_core::transforms::{
    derive_saturate, diagonal_saturate, pad_arity, pi_reduce, replace_substructure, ReplaceOptions,
};
use hrush_core::{EmbeddingMap, Exec, IsoMode, Point, Pregeometry, RelStructure, Signature, Subset};

use crate::report::Report;
use crate::{Command, Failure, Opts};

const PRELUDE: &str = include_str!("prelude.hr");

type Out = Result<Report, Failure>;

/// Everything a command needs: the parsed inputs, the object names given on
/// the command line, and the resolved options.
struct Ctx<'a> {
    ws: Workspace,
    names: Vec<String>,
    opts: &'a Opts,
    cap: usize,
    exec: Exec,
}

fn looks_like_path(arg: &str) -> bool {
    arg.contains('/') || arg.contains('\\') || arg.ends_with(".hr") || arg.ends_with(".txt")
}

fn load<'a>(args: &[String], opts: &'a Opts) -> Result<Ctx<'a>, Failure> {
    let cap = opts.cap.unwrap_or_else(hrush_core::default_cap);
    let mut ws = Workspace::default();
    let mut names = Vec::new();
    let mut files = 0;
    for arg in args {
        let path = Path::new(arg);
        if path.is_file() {
            let input = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{arg}: {e}")))?;
            ws = text::parse_into(ws, &input, cap).map_err(|e| {
                let mut f = Failure::from(e);
                f.message = format!("{arg}:{}", f.message);
                f
            })?;
            files += 1;
        } else if looks_like_path(arg) {
            return Err(Failure::input(format!("{arg}: no such file")));
        } else {
            names.push(arg.clone());
        }
    }
    if files == 0 {
        ws = text::parse(PRELUDE, cap).expect("the prelude parses");
    }
    let exec = if opts.sequential { Exec::Sequential } else { Exec::Parallel };
    Ok(Ctx { ws, names, opts, cap, exec })
}

impl Ctx<'_> {
    fn name(&self, i: usize, what: &str) -> Result<&str, Failure> {
        self.names.get(i).map(String::as_str).ok_or_else(|| Failure::input(format!("missing argument: {what}")))
    }

    fn expect_names(&self, n: usize) -> Result<(), Failure> {
        if self.names.len() > n {
            return Err(Failure::input(format!("unexpected argument `{}`", self.names[n])));
        }
        Ok(())
    }

    /// A structure with the name of its signature.
    fn structure(&self, i: usize) -> Result<(&str, &str, &RelStructure), Failure> {
        let name = self.name(i, "structure name")?;
        let (sig, m) = self.ws.structures.get(name).ok_or_else(|| unknown("structure", name))?;
        Ok((name, sig.as_str(), m))
    }

    /// A named pregeometry, or the pregeometry of a named structure.
    fn pregeometry(&self, i: usize) -> Result<(String, Pregeometry), Failure> {
        let name = self.name(i, "pregeometry or structure name")?;
        if let Some(p) = self.ws.pregeometries.get(name) {
            return Ok((name.to_string(), p.clone()));
        }
        if let Some((_, m)) = self.ws.structures.get(name) {
            return Ok((format!("PG_{name}"), pg_extract(m, self.cap, self.exec)?));
        }
        Err(unknown("pregeometry or structure", name))
    }

    fn subset_arg(&self, i: usize) -> Option<Vec<String>> {
        self.opts.subset.get(i).map(|s| split_names(s))
    }

    fn required_subset(&self, i: usize, what: &str) -> Result<Vec<String>, Failure> {
        self.subset_arg(i).ok_or_else(|| Failure::input(format!("missing --subset ({what})")))
    }

    fn arity(&self, default: Option<usize>) -> Result<usize, Failure> {
        self.opts.arity.or(default).ok_or_else(|| Failure::input("missing --arity"))
    }
}

fn unknown(kind: &str, name: &str) -> Failure {
    Failure::domain(format!("unknown {kind} `{name}`"))
}

/// `a,b`, `{a, b}`, `a b` and `{}` are all accepted.
fn split_names(s: &str) -> Vec<String> {
    s.trim()
        .trim_start_matches('{')
        .trim_end_matches('}')
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect()
}

fn subset_of(m: &RelStructure, names: &[String]) -> Result<Subset, Failure> {
    Ok(m.subset(names)?)
}

fn names_json(names: &[&str]) -> Value {
    json!(names)
}

fn subset_text(m: &RelStructure, s: Subset) -> String {
    render_subset(&m.subset_names(s))
}

fn structure_json(m: &RelStructure) -> Value {
    let relations: serde_json::Map<String, Value> = m
        .relations()
        .iter()
        .map(|(name, tuples)| {
            let ts: Vec<Vec<&str>> =
                tuples.iter().map(|t| t.iter().map(|&i| m.point(i as usize).as_str()).collect()).collect();
            (name.clone(), json!(ts))
        })
        .collect();
    let points: Vec<&str> = m.universe().iter().map(Point::as_str).collect();
    json!({ "points": points, "relations": relations })
}

/// Rank table in bitmask order.
fn pregeometry_json(p: &Pregeometry) -> Value {
    let ground: Vec<&str> = p.ground().iter().map(Point::as_str).collect();
    let rank: Vec<Value> = (0..1u64 << p.len())
        .map(|s| json!({ "subset": p.subset_names(Subset(s)), "rank": p.rank(Subset(s)) }))
        .collect();
    json!({ "ground": ground, "rank": rank })
}

fn map_json(g: &EmbeddingMap) -> Value {
    let m: serde_json::Map<String, Value> =
        g.pairs.iter().map(|(a, b)| (a.as_str().to_string(), json!(b.as_str()))).collect();
    Value::Object(m)
}

fn map_text(g: &EmbeddingMap) -> String {
    g.pairs.iter().map(|(a, b)| format!("{a}->{b}")).collect::<Vec<_>>().join(" ")
}

/// A derived structure, printed as a standalone input file.
fn emit_structure(report: Report, name: &str, sig_name: &str, m: &RelStructure) -> Report {
    let body = format!("{}{}", render_signature(sig_name, m.signature()), render_structure(name, sig_name, m));
    report.text(&body).field("name", name).field("structure", structure_json(m)).field("text", body)
}

/// The signature name to print with a derived structure: the input's, unless
/// the transformation changed the signature.
fn derived_sig_name(sig_name: &str, before: &Signature, after: &Signature, suffix: &str) -> String {
    if before == after {
        sig_name.to_string()
    } else {
        format!("{sig_name}_{suffix}")
    }
}

pub fn run(cmd: &Command, opts: &Opts) -> Out {
    use Command::*;
    let args = match cmd {
        Delta(i) | Inclass(i) | Ssuff(i) | Ssclosure(i) | Dim(i) | Dclosure(i) | Reldim(i) | Pg(i) | Pgiso(i)
        | Localize(i) | Replace(i) | Pireduce(i) | Derive(i) | Pad(i) | Diag(i) | Amalgam(i) | Generic(i)
        | Extcheck(i) | Lift(i) | Strongsub(i) | Pgamalgam(i) | Pgeneric(i) | Proptest(i) => &i.args,
    };
    let cx = load(args, opts)?;
    match cmd {
        Delta(_) => delta(&cx),
        Inclass(_) => inclass(&cx),
        Ssuff(_) => ssuff(&cx),
        Ssclosure(_) => ssclosure(&cx),
        Dim(_) => dim(&cx),
        Dclosure(_) => dclosure(&cx),
        Reldim(_) => reldim(&cx),
        Pg(_) => pg(&cx),
        Pgiso(_) => pgiso(&cx),
        Localize(_) => localize(&cx),
        Replace(_) => replace(&cx),
        Pireduce(_) => pireduce(&cx),
        Derive(_) => derive(&cx),
        Pad(_) => pad(&cx),
        Diag(_) => diag(&cx),
        Amalgam(_) => amalgam(&cx),
        Generic(_) => generic(&cx),
        Extcheck(_) => extcheck(&cx),
        Lift(_) => lift(&cx),
        Strongsub(_) => strongsub(&cx),
        Pgamalgam(_) => pgamalgam(&cx),
        Pgeneric(_) => pgeneric(&cx),
        Proptest(_) => proptest(&cx),
    }
}

/// The `--subset` argument, or the whole universe.
fn subset_or_full(cx: &Ctx<'_>, m: &RelStructure) -> Result<Subset, Failure> {
    match cx.subset_arg(0) {
        Some(names) => subset_of(m, &names),
        None => Ok(m.full()),
    }
}

fn delta(cx: &Ctx<'_>) -> Out {
    cx.expect_names(1)?;
    let (_, _, m) = cx.structure(0)?;
    let a = subset_or_full(cx, m)?;
    Ok(Report::new().kv("delta", m.predim(a)).field("subset", names_json(&m.subset_names(a))))
}

fn inclass(cx: &Ctx<'_>) -> Out {
    cx.expect_names(1)?;
    let (_, _, m) = cx.structure(0)?;
    let ok = m.in_class();
    let mut r = Report::new().kv("in_class", ok);
    if !ok {
        let table = m.delta_table(cx.cap, cx.exec)?;
        let (worst, d) = table.iter().enumerate().min_by_key(|&(s, &d)| (d, s)).expect("the table is nonempty");
        let w = Subset(worst as u64);
        r = r.kv("witness", subset_text(m, w)).kv("witness_delta", *d).field("witness_subset", names_json(&m.subset_names(w)));
    }
    Ok(r)
}

fn ssuff(cx: &Ctx<'_>) -> Out {
    cx.expect_names(1)?;
    let (_, _, m) = cx.structure(0)?;
    let a = subset_of(m, &cx.required_subset(0, "the subset to test")?)?;
    Ok(Report::new().kv("self_sufficient", closure::is_self_sufficient(m, a, cx.cap)?))
}

fn ssclosure(cx: &Ctx<'_>) -> Out {
    cx.expect_names(1)?;
    let (_, _, m) = cx.structure(0)?;
    let a = subset_of(m, &cx.required_subset(0, "the subset to close")?)?;
    let cl = closure::ss_closure(m, a, cx.cap)?;
    Ok(Report::new()
        .kv("ss_closure", subset_text(m, cl))
        .field("closure", names_json(&m.subset_names(cl)))
        .field("delta", m.predim(cl)))
}

fn dim(cx: &Ctx<'_>) -> Out {
    cx.expect_names(1)?;
    let (_, _, m) = cx.structure(0)?;
    let a = subset_or_full(cx, m)?;
    Ok(Report::new().kv("dim", closure::dimension(m, a, cx.cap)?).field("subset", names_json(&m.subset_names(a))))
}

fn dclosure(cx: &Ctx<'_>) -> Out {
    cx.expect_names(1)?;
    let (_, _, m) = cx.structure(0)?;
    let a = subset_of(m, &cx.required_subset(0, "the subset to close")?)?;
    let cl = closure::d_closure(m, a, cx.cap)?;
    Ok(Report::new().kv("d_closure", subset_text(m, cl)).field("closure", names_json(&m.subset_names(cl))))
}

fn reldim(cx: &Ctx<'_>) -> Out {
    cx.expect_names(1)?;
    let (_, _, m) = cx.structure(0)?;
    let x = subset_of(m, &cx.required_subset(0, "X")?)?;
    let z = subset_of(m, &cx.required_subset(1, "Z, given as a second --subset")?)?;
    Ok(Report::new().kv("reldim", closure::rel_dim(m, x, z, cx.cap)?))
}

fn pg(cx: &Ctx<'_>) -> Out {
    cx.expect_names(1)?;
    let (name, p) = cx.pregeometry(0)?;
    Ok(Report::new().text(&render_pregeometry(&name, &p)).field("name", name).field("pregeometry", pregeometry_json(&p)))
}

fn pgiso(cx: &Ctx<'_>) -> Out {
    cx.expect_names(2)?;
    let (_, p) = cx.pregeometry(0)?;
    let (_, q) = cx.pregeometry(1)?;
    let (mode, key) = if cx.opts.embed { (IsoMode::Embed, "embeds") } else { (IsoMode::Iso, "isomorphic") };
    let found = pg_iso(&p, &q, mode, cx.cap)?;
    let mut r = Report::new().kv(key, found.is_some());
    if let Some(g) = &found {
        r = r.kv("map", map_text(g)).field("pairs", map_json(g));
    }
    Ok(r)
}

fn localize(cx: &Ctx<'_>) -> Out {
    cx.expect_names(1)?;
    let (name, p) = cx.pregeometry(0)?;
    let z = p.subset(&cx.required_subset(0, "Z")?)?;
    let local = pg_localize(&p, z);
    let out = format!("{name}_local");
    Ok(Report::new()
        .text(&render_pregeometry(&out, &local))
        .field("name", out)
        .field("pregeometry", pregeometry_json(&local)))
}

fn replace(cx: &Ctx<'_>) -> Out {
    cx.expect_names(2)?;
    let (name, sig_name, m) = cx.structure(0)?;
    let (_, _, new) = cx.structure(1)?;
    let names: Vec<&str> = new.universe().iter().map(Point::as_str).collect();
    let a = m.subset(&names)?;
    let opts = ReplaceOptions { cap: cx.cap, ..ReplaceOptions::default() };
    let out = replace_substructure(m, a, new, opts)?;
    Ok(emit_structure(Report::new(), &format!("{name}_replaced"), sig_name, &out))
}

fn pireduce(cx: &Ctx<'_>) -> Out {
    cx.expect_names(1)?;
    let (name, sig_name, m) = cx.structure(0)?;
    let mut h = BTreeMap::new();
    for part in cx.opts.target.iter().flat_map(|t| t.split(',')).filter(|p| !p.trim().is_empty()) {
        let (from, to) = part
            .split_once('=')
            .ok_or_else(|| Failure::input(format!("--target expects FROM=TO, got `{part}`")))?;
        h.insert(from.trim().to_string(), to.trim().to_string());
    }
    if h.is_empty() {
        return Err(Failure::input("missing --target FROM=TO"));
    }
    let out = pi_reduce(m, &h)?;
    let sig = derived_sig_name(sig_name, m.signature(), out.signature(), "reduced");
    Ok(emit_structure(Report::new(), &format!("{name}_reduced"), &sig, &out))
}

fn derive(cx: &Ctx<'_>) -> Out {
    cx.expect_names(1)?;
    let (name, sig_name, m) = cx.structure(0)?;
    let out = derive_saturate(m)?;
    let sig = derived_sig_name(sig_name, m.signature(), out.signature(), "derived");
    Ok(emit_structure(Report::new(), &format!("{name}_derived"), &sig, &out))
}

fn pad(cx: &Ctx<'_>) -> Out {
    cx.expect_names(1)?;
    let (name, sig_name, m) = cx.structure(0)?;
    let out = pad_arity(m, cx.arity(None)?)?;
    let sig = derived_sig_name(sig_name, m.signature(), out.signature(), "padded");
    Ok(emit_structure(Report::new(), &format!("{name}_padded"), &sig, &out))
}

/// `diag NAME`: NAME is a signature, or a structure whose signature is used.
fn diag(cx: &Ctx<'_>) -> Out {
    cx.expect_names(1)?;
    let name = cx.name(0, "signature or structure name")?;
    let (sig_name, sig) = match (cx.ws.signatures.get(name), cx.ws.structures.get(name)) {
        (Some(s), _) => (name.to_string(), s.clone()),
        (None, Some((s, m))) => (s.clone(), m.signature().clone()),
        (None, None) => return Err(unknown("signature or structure", name)),
    };
    let points: Vec<Point> = cx.required_subset(0, "the points Z")?.iter().map(|p| Point::new(p)).collect();
    let out = diagonal_saturate(&sig, &points, cx.arity(None)?)?;
    let sig_name = derived_sig_name(&sig_name, &sig, out.signature(), "diag");
    Ok(emit_structure(Report::new(), "Diag", &sig_name, &out))
}

fn amalgam(cx: &Ctx<'_>) -> Out {
    cx.expect_names(2)?;
    let (n1, sig_name, a1) = cx.structure(0)?;
    let (n2, _, a2) = cx.structure(1)?;
    let a0: Vec<Point> = cx.required_subset(0, "the base A0")?.iter().map(|p| Point::new(p)).collect();
    let out = free_amalgam(a1, a2, &a0)?;
    Ok(emit_structure(Report::new(), &format!("{n1}_{n2}"), sig_name, &out))
}

fn build_config() -> BuildConfig {
    BuildConfig::default()
}

/// The chain for `generic` and `extcheck`: over a named signature if one is
/// given, else over the uniform `--arity` signature.
fn build_chain(cx: &Ctx<'_>) -> Result<GenericChain, Failure> {
    cx.expect_names(1)?;
    let sig = match cx.names.first() {
        Some(name) => cx.ws.signatures.get(name).cloned().ok_or_else(|| unknown("signature", name))?,
        None => Signature::uniform(cx.arity(Some(3))?),
    };
    let k = cx.opts.bound.unwrap_or(3);
    let rounds = cx.opts.rounds.unwrap_or(1);
    Ok(generic_build(&sig, k, rounds, cx.opts.seed.unwrap_or(0), &build_config(), cx.exec)?)
}

fn chain_report(chain: &GenericChain) -> Report {
    let sizes: Vec<usize> = chain.stages.iter().map(RelStructure::len).collect();
    let tuples: Vec<usize> = chain.stages.iter().map(RelStructure::tuple_count).collect();
    let active = chain.catalog.iter().filter(|p| !p.is_trivial()).count();
    let truncations: usize = chain.log.iter().map(|l| l.truncated.len()).sum();
    let rounds: Vec<Value> = chain
        .log
        .iter()
        .map(|l| json!({ "round": l.round, "copies_examined": l.copies_examined, "glued": l.glued, "truncated": l.truncated.len() }))
        .collect();
    let mut r = Report::new()
        .kv("rounds", chain.rounds_done)
        .kv("catalog_pairs", active)
        .kv("stage_sizes", sizes.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
        .field("stage_sizes", json!(sizes))
        .field("stage_tuples", json!(tuples))
        .field("log", Value::Array(rounds))
        .kv("truncations", truncations);
    for l in &chain.log {
        r = r.text(&format!(
            "round {}: {} copies examined, {} copies of B glued, {} pairs truncated",
            l.round,
            l.copies_examined,
            l.glued,
            l.truncated.len()
        ));
    }
    r
}

fn generic(cx: &Ctx<'_>) -> Out {
    let chain = build_chain(cx)?;
    let valid = chain.validate().is_ok();
    Ok(chain_report(&chain).kv("valid", valid))
}

fn extcheck(cx: &Ctx<'_>) -> Out {
    let chain = build_chain(cx)?;
    let report = extension_check(&chain, &CheckConfig::default(), cx.exec);
    let mut r = chain_report(&chain)
        .kv("extension_check", if report.pass { "pass" } else { "fail" })
        .kv("complete", report.complete)
        .kv("copies_checked", report.copies_checked)
        .kv("unwitnessed", report.failures.len());
    let first: Vec<Value> = report
        .failures
        .iter()
        .take(5)
        .map(|u| {
            let pair = &chain.catalog[u.pair];
            json!({ "stage": u.stage, "pair": pair.describe(), "copy": u.copy.iter().map(Point::as_str).collect::<Vec<_>>() })
        })
        .collect();
    for u in report.failures.iter().take(5) {
        let copy: Vec<&str> = u.copy.iter().map(Point::as_str).collect();
        r = r.text(&format!("  stage {}: {} over {}", u.stage, chain.catalog[u.pair].describe(), render_subset(&copy)));
    }
    Ok(r.field("first_unwitnessed", Value::Array(first)))
}

fn lift_config() -> LiftConfig {
    LiftConfig::default()
}

fn verdict(r: Report, key: &str, v: &LiftVerdict, sig_name: &str) -> Report {
    let word = match (v.found(), v.exhaustive) {
        (true, _) => "true",
        (false, true) => "false",
        (false, false) => "unknown",
    };
    let r = r.kv(key, word).kv("exhaustive", v.exhaustive);
    match &v.lift {
        Some(l) => emit_structure(r, "Lift", sig_name, l),
        None => r,
    }
}

fn lift(cx: &Ctx<'_>) -> Out {
    cx.expect_names(1)?;
    let (_, p) = cx.pregeometry(0)?;
    let n = cx.arity(Some(3))?;
    let v = lift_search(&p, n, &lift_config(), cx.exec)?;
    Ok(verdict(Report::new(), "lift", &v, &format!("s{n}")))
}

fn strongsub(cx: &Ctx<'_>) -> Out {
    cx.expect_names(2)?;
    let (_, a) = cx.pregeometry(0)?;
    let (_, b) = cx.pregeometry(1)?;
    let n = cx.arity(Some(3))?;
    let v = is_strong_sub(&a, &b, n, &lift_config(), cx.exec)?;
    Ok(verdict(Report::new(), "strong_sub", &v, &format!("s{n}")))
}

fn pgamalgam(cx: &Ctx<'_>) -> Out {
    cx.expect_names(3)?;
    let (_, a0) = cx.pregeometry(0)?;
    let (_, a1) = cx.pregeometry(1)?;
    let (_, a2) = cx.pregeometry(2)?;
    let n = cx.arity(Some(3))?;
    let am = pregeom_amalgam(&a0, &a1, &a2, n, &lift_config(), cx.exec)?;
    let r = Report::new()
        .text(&render_pregeometry("Amalgam", &am.pregeometry))
        .field("pregeometry", pregeometry_json(&am.pregeometry))
        .text(&format!("# from A1: {}", map_text(&am.from_a1)))
        .text(&format!("# from A2: {}", map_text(&am.from_a2)))
        .field("from_a1_pairs", map_json(&am.from_a1))
        .field("from_a2_pairs", map_json(&am.from_a2));
    Ok(emit_structure(r, "Lift", &format!("s{n}"), &am.lift))
}

fn pgeneric(cx: &Ctx<'_>) -> Out {
    cx.expect_names(0)?;
    let n = cx.arity(Some(3))?;
    let k = cx.opts.bound.unwrap_or(3);
    let rounds = cx.opts.rounds.unwrap_or(1);
    let chain = pclass_generic_build(n, k, rounds, cx.opts.seed.unwrap_or(0), &build_config(), cx.exec)?;
    let mut ranks = Vec::new();
    for i in 0..chain.stages() {
        ranks.push(chain.rank(i, chain.ground(i))?);
    }
    Ok(chain_report(&chain.chain)
        .kv("stage_ranks", ranks.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
        .field("stage_ranks", json!(ranks)))
}

fn proptest(cx: &Ctx<'_>) -> Out {
    cx.expect_names(0)?;
    let Some(suite) = &cx.opts.suite else {
        let mut r = Report::new();
        let mut listed = serde_json::Map::new();
        for (name, about) in suite_names() {
            r = r.text(&format!("{name:20} {about}"));
            listed.insert(name.to_string(), json!(about));
        }
        return Ok(r.field("suites", Value::Object(listed)));
    };
    let cfg = SuiteConfig {
        trials: cx.opts.trials.unwrap_or(SuiteConfig::default().trials),
        seed: cx.opts.seed.unwrap_or(0),
        cap: cx.cap,
        exec: cx.exec,
        ..SuiteConfig::default()
    };
    let rep = run_suite(suite, &cfg)?;
    let failure = rep.failure.as_ref().map(|f| json!({ "trial": f.trial, "message": f.message, "reproducer": f.reproducer }));
    Ok(Report::new()
        .text(&rep.to_string())
        .field("suite", rep.suite.clone())
        .field("passed", rep.passed())
        .field("trials", rep.trials)
        .field("seed", rep.seed)
        .field("max_points", rep.max_points)
        .field("nontrivial", rep.nontrivial)
        .field("warning", rep.warning.clone())
        .field("failure", failure)
        .status(if rep.passed() { 0 } else { 1 }))
}
