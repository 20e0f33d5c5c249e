use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use framedim::estimate::{beurling_dim_estimate, entropy_dim_estimate, lev_integral, EntropyBound};
use framedim::frame::{frame_bounds_atomic, gram_matrix};
use framedim::{LevelSet, Limits, MeasureSpec, Method, SpectrumSet};
use framedim_bench::{evens_measure, evens_truncation, geometric_frequencies};

fn fourier(c: &mut Criterion) {
    let nu = evens_measure();
    let xs = geometric_frequencies(24);
    c.bench_function("digit_fourier_24_frequencies", |b| {
        b.iter(|| {
            for x in &xs {
                black_box(nu.fourier(&[*x], 1e-13).unwrap());
            }
        })
    });
}

fn gram(c: &mut Criterion) {
    let mu = evens_truncation(16);
    let lambda = SpectrumSet::digit(2, LevelSet::evens(), 16, 0).unwrap();
    c.bench_function("gram_256", |b| {
        b.iter(|| black_box(gram_matrix(&mu, &lambda, 1e-13, &Limits::DEFAULT).unwrap()))
    });
    c.bench_function("frame_bounds_256", |b| {
        b.iter(|| black_box(frame_bounds_atomic(&mu, &lambda, &Limits::DEFAULT).unwrap()))
    });
}

fn estimators(c: &mut Criterion) {
    let nu = evens_measure();
    c.bench_function("entropy_dim_depth_40", |b| {
        b.iter(|| black_box(entropy_dim_estimate(&nu, 40, EntropyBound::Upper, None).unwrap()))
    });
    let lambda = SpectrumSet::digit(
        2,
        LevelSet::oscillating(1.0 / 3.0, 2.0 / 3.0, 2.0).unwrap(),
        200,
        0,
    )
    .unwrap();
    c.bench_function("beurling_dim_oscillating_200", |b| {
        b.iter(|| {
            black_box(
                beurling_dim_estimate(&lambda, None, Method::TailMax, &Limits::DEFAULT).unwrap(),
            )
        })
    });
    let leb = MeasureSpec::lebesgue();
    c.bench_function("lev_integral_r64", |b| {
        b.iter(|| black_box(lev_integral(&leb, 64.0, 1e-8).unwrap()))
    });
}

criterion_group!(benches, fourier, gram, estimators);
criterion_main!(benches);
