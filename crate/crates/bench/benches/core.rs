use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use p2sheaf::cones::{conjecture_check, sbld_table};
use p2sheaf::exceptional::{controlling, enumerate_exceptionals, ControlBranch};
use p2sheaf::gaeta::{decompose_betti, gaeta_resolution};
use p2sheaf::gradecoh::*;
use p2sheaf::rational::{int, rat};
use p2sheaf::LogChern;

fn exact(c: &mut Criterion) {
    let xi = LogChern::from_ints(3, rat(2, 3), rat(17, 9));
    c.bench_function("gaeta_resolution (3, 2/3, 17/9)", |b| b.iter(|| gaeta_resolution(black_box(&xi)).unwrap()));
    c.bench_function("decompose_betti (3, 2/3, 17/9)", |b| b.iter(|| decompose_betti(black_box(&xi)).unwrap()));
    let pts = LogChern::from_ints(1, int(0), int(1008));
    c.bench_function("controlling I_1008", |b| b.iter(|| controlling(black_box(&pts), ControlBranch::Primary).unwrap()));
    c.bench_function("enumerate_exceptionals rank < 1000", |b| b.iter(|| enumerate_exceptionals(1000, &int(0), &int(1))));
    c.bench_function("sbld_table 12", |b| b.iter(|| sbld_table(black_box(12)).unwrap()));
    let mut g = c.benchmark_group("conjecture");
    g.sample_size(10);
    g.bench_function("conjecture_check rank < 30", |b| b.iter(|| conjecture_check(30, 0..60).unwrap()));
    g.finish();
}

fn finite_field(c: &mut Criterion) {
    let f = Fp::default();
    let cfg = sample_points(Stratum::General, 10, 1, f).unwrap();
    c.bench_function("ideal_betti 10 general points", |b| b.iter(|| ideal_betti(black_box(&cfg), f).unwrap()));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let m = GradedMatrix::random_minimal(vec![-9, -8, -8, -8, -8, -8], vec![-10, -10, -10, -10, -9], f, &mut rng);
    c.bench_function("hilbert_burch 6x5", |b| b.iter(|| hilbert_burch(black_box(&m), f).unwrap()));
    let mut g = c.benchmark_group("interpolation");
    g.sample_size(10);
    g.bench_function("triangular r = 5", |b| b.iter(|| verify_interpolation_triangular(5, 1, 0, 1, f).unwrap()));
    g.bench_function("tangential s = 3 ladder", |b| {
        b.iter(|| verify_interpolation_tangential(3, 1, 0, 1, Route::Ladder, f).unwrap())
    });
    g.bench_function("qk_section_count s = 4, k = 2", |b| b.iter(|| qk_section_count(4, 2, 0, f).unwrap()));
    g.finish();
}

criterion_group!(benches, exact, finite_field);
criterion_main!(benches);
