use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sunphase_core::charts::DomainBlock;
use sunphase_core::sampling::{random_hermitian, random_pair, seeded_rng};
use sunphase_core::{
    build_cartan_frame, build_gellmann_basis, dchi_finite_difference, dchi_vielbein, exp_chart,
    expm_generator, section, section_with, tol, verify_cprel, Chart, DerivativeBackend, Domain,
};

const DIMS: [usize; 3] = [2, 3, 4];

fn bench_basis(c: &mut Criterion) {
    let mut group = c.benchmark_group("gellmann_basis");
    for n in DIMS.into_iter().chain([5, 8]) {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| build_gellmann_basis(black_box(n)).unwrap())
        });
    }
    group.finish();
}

fn bench_expm(c: &mut Criterion) {
    let mut group = c.benchmark_group("expm");
    let mut rng = seeded_rng(1);
    for n in DIMS {
        let h = random_hermitian(&mut rng, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &h, |b, h| {
            b.iter(|| expm_generator(black_box(h), 0.7).unwrap())
        });
    }
    group.finish();
}

fn bench_gradient(c: &mut Criterion) {
    let mut group = c.benchmark_group("phase_gradient");
    let mut rng = seeded_rng(2);
    for n in DIMS {
        let chart = exp_chart(build_gellmann_basis(n).unwrap());
        let pair = random_pair(&mut rng, n);
        let x = chart.domain().sample(&mut rng, 1e-3);
        group.bench_with_input(BenchmarkId::new("vielbein", n), &x, |b, x| {
            b.iter(|| dchi_vielbein(&pair, &chart, black_box(x)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("central", n), &x, |b, x| {
            b.iter(|| dchi_finite_difference(&pair, &chart, black_box(x), tol::FD_STEP).unwrap())
        });
    }
    group.finish();
}

fn bench_section(c: &mut Criterion) {
    let mut group = c.benchmark_group("section");
    let mut rng = seeded_rng(3);
    for n in DIMS {
        let basis = build_gellmann_basis(n).unwrap();
        let pair = random_pair(&mut rng, n);
        let frame = build_cartan_frame(&pair.psi_i, &basis).unwrap();
        let m = 2 * (n - 1);
        let ball = Domain::new(
            m,
            vec![DomainBlock::Ball {
                start: 0,
                len: m,
                radius: 1.0,
            }],
        );
        let y = ball.sample(&mut rng, 0.0);
        group.bench_with_input(BenchmarkId::new("analytic", n), &y, |b, y| {
            b.iter(|| section(&frame, black_box(y)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("central", n), &y, |b, y| {
            b.iter(|| section_with(&frame, black_box(y), DerivativeBackend::central()).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("ray_relations", n), &y, |b, y| {
            b.iter(|| verify_cprel(&pair, &frame, black_box(y), 1.0).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_basis,
    bench_expm,
    bench_gradient,
    bench_section
);
criterion_main!(benches);
