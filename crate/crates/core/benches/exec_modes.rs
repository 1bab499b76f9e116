//! Sequential against parallel execution on the main data-parallel loops.
//! Build with `--no-default-features` to see both arms run sequentially.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hrush_core::pclass::{lift_search, LiftConfig};
use hrush_core::pregeom::pg_extract;
use hrush_core::random::{point_names, random_on};
use hrush_core::suites::{run_suite, SuiteConfig};
use hrush_core::{Exec, RelStructure, Signature};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn dense(n: usize, seed: u64) -> RelStructure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Keep the densest of a few draws so the rank table is not trivially free.
    (0..8)
        .map(|_| random_on(&mut rng, &Signature::uniform(3), &point_names(n)).unwrap())
        .max_by_key(RelStructure::tuple_count)
        .unwrap()
}

fn extract(c: &mut Criterion) {
    let mut group = c.benchmark_group("pg_extract");
    group.sample_size(10);
    for n in [14, 18] {
        let m = dense(n, n as u64);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &m, |b, m| b.iter(|| pg_extract(m, 20, exec).unwrap()));
        }
    }
    group.finish();
}

fn suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("suite_changing2_200");
    group.sample_size(10);
    for (name, exec) in MODES {
        let cfg = SuiteConfig { trials: 200, seed: 1, exec, ..SuiteConfig::default() };
        group.bench_function(name, |b| b.iter(|| assert!(run_suite("changing2", &cfg).unwrap().passed())));
    }
    group.finish();
}

fn lift(c: &mut Criterion) {
    // The four-point table with every triple free: no ternary lift exists, so
    // the search runs to exhaustion.
    let s1 = RelStructure::new(Signature::uniform(4), point_names(4), [("R", point_names(4))]).unwrap();
    let p = pg_extract(&s1, 20, Exec::Sequential).unwrap();
    let cfg = LiftConfig::default();
    let mut group = c.benchmark_group("lift_search_exhaustive");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| assert!(!lift_search(&p, 3, &cfg, exec).unwrap().found())));
    }
    group.finish();
}

criterion_group!(benches, extract, suite, lift);
criterion_main!(benches);
