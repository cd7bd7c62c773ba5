use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dualmcl_core::filters::{
    dual_mcl_step, ekf_step, init_dual_mcl, init_ekf, low_variance_resample, ParticleSet,
};
use dualmcl_core::sim::presets;
use dualmcl_core::{anchor_positions, construct_measurement, true_ranges, DualMclConfig, Particle, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn geometry(c: &mut Criterion) {
    let layout = anchor_positions(0.44).unwrap();
    let ranges = true_ranges(&Vec2::new(-2.0, 2.0), &layout);
    c.bench_function("construct_measurement", |b| {
        b.iter(|| construct_measurement(std::hint::black_box(&ranges), &layout).unwrap())
    });
}

fn dual_mcl(c: &mut Criterion) {
    let layout = anchor_positions(0.44).unwrap();
    let ranges = true_ranges(&Vec2::new(-2.0, 2.0), &layout);
    let v0 = Vec2::new(0.0, 0.2);
    let mut group = c.benchmark_group("dual_mcl_step");
    for m in [100usize, 200, 800] {
        let config = DualMclConfig::new(m, 1.0, 0.5_f64.sqrt(), 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let state = init_dual_mcl(&presets::case1_init_region(), m, &mut rng).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, _| {
            b.iter(|| dual_mcl_step(&state, &ranges, &v0, &config, &layout, &mut rng).unwrap())
        });
    }
    group.finish();
}

fn ekf(c: &mut Criterion) {
    let layout = anchor_positions(0.44).unwrap();
    let ranges = true_ranges(&Vec2::new(-2.0, 2.0), &layout);
    let state = init_ekf(&presets::case1_init_region(), 1.0).unwrap();
    let q = nalgebra::Matrix4::from_diagonal_element(1e-3);
    let r = nalgebra::Matrix3::from_diagonal_element(0.05 * 0.05);
    c.bench_function("ekf_step", |b| {
        b.iter(|| ekf_step(&state, &ranges, &Vec2::zeros(), &q, &r, 0.1, &layout))
    });
}

fn resample(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let particles: Vec<Particle> = (0..1000)
        .map(|i| Particle {
            x: Vec2::new(i as f64, 0.0),
            w: rng.random::<f64>(),
        })
        .collect();
    let set = ParticleSet::new(particles, 0).unwrap();
    c.bench_function("low_variance_resample_1000", |b| {
        b.iter(|| low_variance_resample(&set, &mut rng))
    });
}

criterion_group!(benches, geometry, dual_mcl, ekf, resample);
criterion_main!(benches);
