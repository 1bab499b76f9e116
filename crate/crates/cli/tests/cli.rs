use std::path::PathBuf;
use std::process::{Command, Output};

use hrush_core::pregeom::pg_extract;
use hrush_core::text;
use hrush_core::{Exec, Subset};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn hrush(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hrush")).args(args).env_remove("HRUSH_CAP").output().expect("the binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = hrush(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    hrush(args).status.code().expect("exited normally")
}

/// δ of a subset by counting: points minus the weights of tuples inside it.
fn delta_by_count(m: &hrush_core::RelStructure, s: u64) -> i64 {
    let inside: i64 = m
        .all_tuples()
        .filter(|(_, t)| t.iter().all(|&i| s >> i & 1 == 1))
        .map(|(name, _)| i64::from(m.symbol_of(name).weight))
        .sum();
    i64::from(s.count_ones()) - inside
}

#[test]
fn prelude_values() {
    assert_eq!(stdout(&["delta", "S1"]), "delta = 3\n");
    assert_eq!(stdout(&["dim", "S2", "--subset", "a"]), "dim = 0\n");
    assert_eq!(stdout(&["delta", "S2", "--subset", "{a,b}"]), "delta = 2\n");
    assert_eq!(stdout(&["inclass", "S2"]), "in_class = true\n");
}

#[test]
fn delta_matches_counting_on_every_subset() {
    let file = data("mixed.hr");
    let ws = text::parse(&std::fs::read_to_string(&file).unwrap(), 20).unwrap();
    let m = ws.structure("T").unwrap();
    for s in [0u64, 0b1, 0b111, 0b1111, 0b11111, 0b111111, 0b101010] {
        let names = m.subset_names(Subset(s)).join(",");
        let out = stdout(&["delta", &file, "T", "--subset", &names]);
        assert_eq!(out, format!("delta = {}\n", delta_by_count(m, s)), "subset {names}");
    }
}

#[test]
fn json_output_has_sorted_keys() {
    let out = stdout(&["ssclosure", "S1", "--subset", "a,b", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["ss_closure"], "{a,b}");
    assert_eq!(v["delta"], 2);
    let keys: Vec<&str> =
        out.lines().filter_map(|l| l.strip_prefix("  \"")).filter(|l| l.contains("\":")).filter_map(|l| l.split('"').next()).collect();
    assert_eq!(keys.len(), 3);
    let mut sorted = keys.clone();
    sorted.sort_unstable();
    assert_eq!(keys, sorted);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["delta", "Nope"]), 1);
    assert_eq!(code(&["pg", "S1", "--cap", "3"]), 2);
    assert_eq!(code(&["delta", "missing/file.hr"]), 3);
    assert_eq!(code(&["delta", "S1", "--no-such-flag"]), 3);
    assert_eq!(code(&["ssuff", "S1"]), 3);
}

#[test]
fn parse_errors_carry_location() {
    let out = hrush(&["delta", &data("bad_arity.hr"), "X"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad_arity.hr:3:"), "{err}");
    assert!(err.contains("arity"), "{err}");
}

#[test]
fn pregeometry_output_reads_back() {
    let out = stdout(&["pg", "S1"]);
    let ws = text::parse(&out, 20).unwrap();
    let p = ws.pregeometry("PG_S1").unwrap();
    let prelude = text::parse("signature s4 { R: arity 4 weight 1 } structure S1 over s4 { points a b c d; R (a,b,c,d); }", 20).unwrap();
    assert_eq!(p, &pg_extract(prelude.structure("S1").unwrap(), 20, Exec::Sequential).unwrap());
    // Every triple is independent and the whole set has rank 3.
    assert!((0..16u64).all(|s| p.rank(Subset(s)) == s.count_ones().min(3)));
}

#[test]
fn pireduce_keeps_delta_everywhere() {
    let file = data("mixed.hr");
    let out = stdout(&["pireduce", &file, "M", "--target", "R3=R4"]);
    let reduced = text::parse(&out, 20).unwrap();
    let r = reduced.structure("M_reduced").unwrap();
    let ws = text::parse(&std::fs::read_to_string(&file).unwrap(), 20).unwrap();
    let m = ws.structure("M").unwrap();
    assert!(r.relations().keys().all(|k| k == "R4"));
    assert_eq!(r.universe(), m.universe());
    for s in 0..1u64 << m.len() {
        assert_eq!(delta_by_count(r, s), delta_by_count(m, s));
    }
}

#[test]
fn transform_outputs_are_valid_inputs() {
    let file = data("mixed.hr");
    for args in [
        vec!["derive", file.as_str(), "W"],
        vec!["pad", file.as_str(), "T", "--arity", "5"],
        vec!["diag", file.as_str(), "s4", "--subset", "p,q", "--arity", "4"],
        vec!["amalgam", file.as_str(), "A1", "A2", "--subset", "a,b"],
        vec!["replace", file.as_str(), "T", "T5"],
    ] {
        let out = stdout(&args);
        let ws = text::parse(&out, 20).unwrap_or_else(|e| panic!("{args:?}: {e}\n{out}"));
        let (_, (_, m)) = ws.structures.iter().next().unwrap();
        assert!(m.in_class(), "{args:?}");
    }
}

#[test]
fn replacement_needs_a_self_sufficient_set() {
    let file = data("mixed.hr");
    let out = hrush(&["replace", &file, "T", "Tbad"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("not self-sufficient"));
}

#[test]
fn lifts_of_the_four_point_table() {
    assert!(stdout(&["lift", "S1", "--arity", "4"]).starts_with("lift = true\n"));
    assert_eq!(stdout(&["lift", "S1", "--arity", "3"]), "lift = false\nexhaustive = true\n");
}

#[test]
fn strong_sub_and_amalgam() {
    let file = data("mixed.hr");
    assert!(stdout(&["strongsub", &file, "Free1", "Free2"]).starts_with("strong_sub = true\n"));
    let out = stdout(&["pgamalgam", &file, "Free1", "Free2", "Free2"]);
    let ws = text::parse(&out, 20).unwrap();
    let p = ws.pregeometry("Amalgam").unwrap();
    assert_eq!(p.len(), 3);
    assert_eq!(p.rank(p.full()), 3);
}

#[test]
fn isomorphism_and_embedding() {
    let file = data("mixed.hr");
    assert_eq!(stdout(&["pgiso", &file, "Free2", "Free2"]), "isomorphic = true\nmap = a->a b->b\n");
    assert!(stdout(&["pgiso", &file, "Free1", "Free2", "--embed"]).starts_with("embeds = true\n"));
    assert_eq!(stdout(&["pgiso", &file, "Free1", "Free2"]), "isomorphic = false\n");
}

#[test]
fn localization_drops_the_set() {
    let out = stdout(&["localize", "S1", "--subset", "a"]);
    let ws = text::parse(&out, 20).unwrap();
    let p = ws.pregeometry("PG_S1_local").unwrap();
    assert_eq!(p.len(), 3);
    assert_eq!(p.rank(p.full()), 2);
}

#[test]
fn generic_chain_passes_its_check() {
    let out = stdout(&["extcheck", "--rounds", "1", "--bound", "2", "--seed", "3", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["extension_check"], "pass");
    assert_eq!(v["complete"], true);
    assert_eq!(v["truncations"], 0);
}

#[test]
fn reports_are_deterministic() {
    let args = ["proptest", "--suite", "changing2", "--trials", "200", "--seed", "7"];
    let a = stdout(&args);
    assert!(a.starts_with("suite changing2: pass (200 trials, seed 7"), "{a}");
    assert_eq!(a, stdout(&args));
    assert_eq!(a, stdout(&["proptest", "--suite", "changing2", "--trials", "200", "--seed", "7", "--sequential"]));
}

#[test]
fn corrupted_suite_fails_with_a_parseable_reproducer() {
    let out = hrush(&["proptest", "--suite", "corrupt", "--trials", "50", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let text_out = String::from_utf8(out.stdout).unwrap();
    let (_, repro) = text_out.split_once("reproducer:\n").expect("a reproducer is printed");
    let ws = text::parse(repro, 20).unwrap();
    assert!(!ws.structures.is_empty());
}

#[test]
fn zero_trials_warn() {
    let out = stdout(&["proptest", "--suite", "submodularity", "--trials", "0"]);
    assert!(out.starts_with("warning: 0 trials"), "{out}");
}

#[test]
fn suites_are_listed_and_unknown_ones_rejected() {
    let out = stdout(&["proptest"]);
    for name in ["submodularity", "changing4", "localization", "pgamalgam"] {
        assert!(out.lines().any(|l| l.starts_with(name)), "{name}");
    }
    assert_eq!(code(&["proptest", "--suite", "nope"]), 1);
}
