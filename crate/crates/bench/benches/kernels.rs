use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use gnslab_core::corpus::{perturbed, BumpShape};
use gnslab_core::functionals::{deficit_identity, lift, normalize_mass, normalize_ratio};
use gnslab_core::manifold::{h1_distance, l1_gn_distance, lp_distance};
use gnslab_core::{build_grid, derive_params, DEFAULT_RESOLUTION};

fn grid(c: &mut Criterion) {
    let p = derive_params(2, 3.0).unwrap();
    for res in [32, DEFAULT_RESOLUTION] {
        c.bench_function(&format!("build_grid/{res}"), |b| b.iter(|| build_grid(black_box(&p), res).unwrap()));
    }
}

fn functionals(c: &mut Criterion) {
    let p = derive_params(3, 2.0).unwrap();
    let g = build_grid(&p, DEFAULT_RESOLUTION).unwrap();
    let u = normalize_ratio(&perturbed(&p, &[(BumpShape::Core, 0.05)]), &p, &g).unwrap();
    c.bench_function("deficit_identity", |b| b.iter(|| deficit_identity(black_box(&u), &p, &g).unwrap()));
}

fn distances(c: &mut Criterion) {
    let p = derive_params(2, 3.0).unwrap();
    let g = build_grid(&p, DEFAULT_RESOLUTION).unwrap();
    let u = normalize_ratio(&perturbed(&p, &[(BumpShape::Wide, 0.05)]), &p, &g).unwrap();
    let phi = lift(&u, &p, &g).unwrap();
    let mass = normalize_mass(&u, &p, &g).unwrap();
    let mut group = c.benchmark_group("distance");
    group.sample_size(20);
    group.bench_function("h1", |b| b.iter(|| h1_distance(black_box(&phi), &p, &g).unwrap()));
    group.bench_function("lp", |b| b.iter(|| lp_distance(black_box(&phi), &p, &g).unwrap()));
    group.bench_function("l1_gn", |b| b.iter(|| l1_gn_distance(black_box(&mass), &p, &g).unwrap()));
    group.finish();
}

criterion_group!(benches, grid, functionals, distances);
criterion_main!(benches);
