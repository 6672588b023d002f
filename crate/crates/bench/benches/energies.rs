use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sigman::mesh::{self, triangulate_sphere};
use sigman::{sampling, verify, ManifoldSpec, SignalCurve};

fn curves(c: &mut Criterion) {
    let mut rng = sampling::rng_for(1, 0);
    let m = ManifoldSpec::Euclidean { dim: 3 };
    let path = sampling::random_curve(&m, 1000, false, &mut rng).unwrap();
    let sig = SignalCurve::new(path).unwrap();
    c.bench_function("curve_energy_1000", |b| b.iter(|| sigman::energy::curve_energy(&sig)));
}

fn regions(c: &mut Criterion) {
    let mut group = c.benchmark_group("example22");
    group.sample_size(10);
    for step in [0.05, 0.02] {
        group.bench_with_input(BenchmarkId::from_parameter(step), &step, |b, &s| b.iter(|| verify::example22(s).unwrap()));
    }
    group.finish();
}

fn diameter(c: &mut Criterion) {
    let mut group = c.benchmark_group("sphere_diameter");
    group.sample_size(10);
    for s in [2, 3, 4] {
        let m = triangulate_sphere(s).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(s), &m, |b, m| b.iter(|| mesh::mesh_diameter(m)));
    }
    group.finish();
}

criterion_group!(benches, curves, regions, diameter);
criterion_main!(benches);
