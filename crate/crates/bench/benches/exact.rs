use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use quadtoric::exact_linalg::{rational_nullspace, smith_normal_form, IntegerMatrix, NullspaceSide};
use quadtoric::quadric_config::QuadricConfiguration;
use quadtoric::reduction::{lookup, Instance};
use quadtoric::torus_actions::freeness_check;

fn polytope(name: &str) -> quadtoric::polytope::PolytopePresentation {
    match lookup(name).unwrap() {
        Instance::Polytope(p) => p,
        _ => unreachable!(),
    }
}

fn gale_and_freeness(c: &mut Criterion) {
    let mut group = c.benchmark_group("gale_dual");
    for name in ["triangle", "cube:3", "simplex-product:3,3", "cube:4"] {
        let p = polytope(name);
        group.bench_with_input(BenchmarkId::from_parameter(name), &p, |b, p| {
            b.iter(|| QuadricConfiguration::gale_dual(black_box(p)))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("freeness_check");
    group.sample_size(20);
    for name in ["triangle", "cube:3", "simplex-product:3,3"] {
        let q = QuadricConfiguration::gale_dual(&polytope(name));
        group.bench_with_input(BenchmarkId::from_parameter(name), &q, |b, q| {
            b.iter(|| freeness_check(black_box(q)).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("vertices");
    for name in ["cube:3", "simplex-product:3,3"] {
        let p = polytope(name);
        group.bench_with_input(BenchmarkId::from_parameter(name), &p, |b, p| {
            b.iter(|| p.is_delzant().unwrap())
        });
    }
    group.finish();
}

fn lattice(c: &mut Criterion) {
    let m = IntegerMatrix::from_i64_rows(&[
        &[2, 4, 4, -6, 1],
        &[-6, 6, 12, 10, 3],
        &[10, -4, -16, 8, 7],
        &[1, 1, 1, 1, 1],
    ])
    .unwrap();
    c.bench_function("smith_normal_form/4x5", |b| b.iter(|| smith_normal_form(black_box(&m))));
    let r = m.to_rational();
    c.bench_function("nullspace/4x5", |b| {
        b.iter(|| rational_nullspace(black_box(&r), NullspaceSide::Right))
    });
}

criterion_group!(benches, gale_and_freeness, lattice);
criterion_main!(benches);
