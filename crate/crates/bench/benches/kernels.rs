use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use fso_bench::{draws, scenario};
use fso_core::engine::average_ber_many;
use fso_core::oracle::simulate_frames;
use fso_core::schemes::cond_ber;
use fso_core::specfun::{bessel_k, q_function, q_inverse};
use fso_core::{McConfig, RngStream, Scheme};

fn special_functions(c: &mut Criterion) {
    let mut g = c.benchmark_group("specfun");
    g.bench_function("q_function", |b| b.iter(|| q_function(black_box(3.7))));
    g.bench_function("q_inverse", |b| b.iter(|| q_inverse(black_box(1e-7))));
    g.bench_function("bessel_k_small_x", |b| b.iter(|| bessel_k(black_box(1.5), black_box(0.3))));
    g.bench_function("bessel_k_large_x", |b| b.iter(|| bessel_k(black_box(1.5), black_box(30.0))));
    g.finish();
}

fn channel(c: &mut Criterion) {
    let sampler = scenario().sampler().unwrap();
    let mut rng = RngStream::new(3, 0);
    c.bench_function("channel_draw", |b| b.iter(|| sampler.draw(&mut rng)));
}

fn conditional_ber(c: &mut Criterion) {
    let batch = draws(1024);
    let rad = scenario().radiometry;
    let mut g = c.benchmark_group("cond_ber");
    g.throughput(Throughput::Elements(batch.len() as u64));
    for scheme in Scheme::ALL {
        g.bench_function(scheme.as_str(), |b| {
            b.iter(|| batch.iter().map(|d| cond_ber(scheme, &rad, d).get()).sum::<f64>())
        });
    }
    g.finish();
}

fn engine(c: &mut Criterion) {
    let s = scenario();
    let mut g = c.benchmark_group("engine");
    g.sample_size(10);
    for workers in [1, 4] {
        let cfg = McConfig {
            samples: 65_536,
            workers,
            ..McConfig::default()
        };
        g.bench_function(format!("average_ber_all_schemes_w{workers}"), |b| {
            b.iter(|| average_ber_many(&Scheme::ALL, &s, &cfg).unwrap())
        });
    }
    g.finish();
}

fn waveform(c: &mut Criterion) {
    let d = draws(1)[0];
    let rad = scenario().radiometry;
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    g.throughput(Throughput::Elements(100_000));
    g.bench_function("spacetime_100k_bits", |b| {
        b.iter(|| simulate_frames(Scheme::SpaceTime, &d, &rad, 100_000, &mut RngStream::new(5, 0)))
    });
    g.finish();
}

criterion_group!(benches, special_functions, channel, conditional_ber, engine, waveform);
criterion_main!(benches);
