use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use leibnizlab::automorphism::{derivation_dim, is_automorphism};
use leibnizlab::catalog::{build, Family};
use leibnizlab::local::{certify_point, certify_probes, default_probes, DEFAULT_PROBE_COUNT};
use leibnizlab::sweep::sweep_row;
use leibnizlab_bench::{algebra, automorphism, local_operator, sizes, SEED};

fn structure(c: &mut Criterion) {
    let mut g = c.benchmark_group("structure");
    for spec in sizes(Family::Mu2) {
        let a = algebra(&spec);
        let id = spec.to_string();
        g.bench_with_input(BenchmarkId::new("build", &id), &spec, |b, s| b.iter(|| build(black_box(s))));
        g.bench_with_input(BenchmarkId::new("leibniz", &id), &a, |b, a| b.iter(|| a.leibniz_violations()));
        let e1 = a.unit_vector(0);
        g.bench_with_input(BenchmarkId::new("char_seq_e1", &id), &a, |b, a| b.iter(|| a.char_seq_at(black_box(&e1))));
    }
    g.finish();
}

fn automorphisms(c: &mut Criterion) {
    let mut g = c.benchmark_group("automorphism");
    g.sample_size(20);
    for family in Family::ALL {
        for spec in sizes(family) {
            let a = algebra(&spec);
            let m = automorphism(&spec);
            let id = spec.to_string();
            g.bench_with_input(BenchmarkId::new("is_automorphism", &id), &m, |b, m| {
                b.iter(|| is_automorphism(&a, black_box(m)))
            });
            if spec.n <= 12 {
                g.bench_with_input(BenchmarkId::new("derivation_dim", &id), &a, |b, a| b.iter(|| derivation_dim(a)));
            }
        }
    }
    g.finish();
}

fn certification(c: &mut Criterion) {
    let mut g = c.benchmark_group("certify");
    g.sample_size(10);
    for family in [Family::Mu1, Family::Mu3] {
        for spec in sizes(family) {
            let delta = local_operator(&spec);
            let probes = default_probes(&spec, SEED, DEFAULT_PROBE_COUNT);
            let id = spec.to_string();
            let generic = probes.last().expect("probes").clone();
            g.bench_with_input(BenchmarkId::new("point", &id), &generic, |b, x| {
                b.iter(|| certify_point(&spec, &delta, black_box(x)))
            });
            g.bench_with_input(BenchmarkId::new("probes", &id), &probes, |b, p| {
                b.iter(|| certify_probes(&spec, &delta, black_box(p)))
            });
        }
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    for spec in sizes(Family::Mu1) {
        g.bench_with_input(BenchmarkId::new("row", spec.to_string()), &spec, |b, s| b.iter(|| sweep_row(s, SEED)));
    }
    g.finish();
}

criterion_group!(benches, structure, automorphisms, certification, sweep);
criterion_main!(benches);
