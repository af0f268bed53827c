use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use quadtoric::numerics::{
    lagrangian_residual, mean_curvature_ambient, patch_volume_derivative, tangent_frame, Axis, FlatSpace, Patch,
    Sampler, SubmanifoldChart,
};
use quadtoric::reduction::lookup;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pointwise(c: &mut Criterion) {
    for name in ["one-quadric:3", "two-quadrics:2,2"] {
        let q = lookup(name).unwrap().quadrics().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = Sampler::new(&q).unwrap().chart_point(&mut rng, 1e-10).unwrap();
        let x = p.x();
        c.bench_function(&format!("chart_point/{name}"), |b| {
            let sampler = Sampler::new(&q).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            b.iter(|| sampler.chart_point(&mut rng, 1e-10).unwrap())
        });
        c.bench_function(&format!("lagrangian/{name}"), |b| {
            b.iter(|| lagrangian_residual(&tangent_frame(&p.chart, black_box(&x)).unwrap()))
        });
        c.bench_function(&format!("mean_curvature/{name}"), |b| {
            b.iter(|| mean_curvature_ambient(&p.chart, black_box(&x), 1e-4).unwrap())
        });
    }
}

fn variation(c: &mut Criterion) {
    let q = lookup("one-quadric:2").unwrap().quadrics().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let p = Sampler::new(&q).unwrap().chart_point(&mut rng, 1e-10).unwrap();
    let patch = Patch::new(vec![
        Axis::Bump { center: p.v[0], half_width: 0.15, n: 24 },
        Axis::Periodic { lo: 0.0, hi: 1.0, n: 8 },
    ]);
    let field = |x: &[f64]| Ok(p.chart.point(x)? * patch.weight(x));
    let mut group = c.benchmark_group("variation");
    group.sample_size(20);
    group.bench_function("volume_derivative/N(2)", |b| {
        b.iter(|| patch_volume_derivative(&p.chart, &FlatSpace { m: 2 }, &patch, &field, 1e-4).unwrap())
    });
    group.finish();
}

criterion_group!(benches, pointwise, variation);
criterion_main!(benches);
