use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use fourgeo::bounds::{scan, Target};
use fourgeo::geography::{known_table, TableClass};
use fourgeo::manifold::theorem1_construct;
use fourgeo::parallel::{self, Exec};
use fourgeo::presentation::{Presentation, Syllable, Word};
use fourgeo::rational::frac;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn presentations(count: usize) -> Vec<Presentation> {
    // deterministic mix of sizes, g and r up to 5
    (0..count)
        .map(|i| {
            let g = 1 + i % 5;
            let r = i % 6;
            let rels = (0..r)
                .map(|j| Word::reduced((0..6).map(|k| Syllable::new((i + j + k) % g, if (i + k) % 3 == 0 { -1 } else { 2 }))))
                .collect();
            Presentation::with_numbered_generators("a", g, rels).unwrap()
        })
        .collect()
}

fn bench_constructions(c: &mut Criterion) {
    let ps = presentations(64);
    let mut group = c.benchmark_group("fibered_construction_x64");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| parallel::map(exec, black_box(&ps), |p| theorem1_construct(p).unwrap().final_class.chi))
        });
    }
    group.finish();
}

fn bench_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("family_scan");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("cyclic_2_200", name), &exec, |b, &exec| {
            b.iter(|| scan("cyclic", 2..=200, Target::Chi, exec).unwrap().len())
        });
        group.bench_with_input(BenchmarkId::new("zn_1_40", name), &exec, |b, &exec| {
            b.iter(|| scan("zn", 1..=40, Target::ChiPlusSigma, exec).unwrap().len())
        });
    }
    group.finish();
}

fn bench_sampling(c: &mut Criterion) {
    let f = known_table(TableClass::MinimalTrivial);
    let (lo, hi) = (frac(-10, 3), frac(3, 2));
    let mut group = c.benchmark_group("envelope_sample_20k");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| f.sample(black_box(&lo), black_box(&hi), 20_000, exec).len())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_constructions, bench_scan, bench_sampling);
criterion_main!(benches);
