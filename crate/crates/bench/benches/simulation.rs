use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use recordtime::gausslim::{simulate_bm_pair, Scheme};
use recordtime::pathsim::{build_trace, observables_at, simulate_path, stream_observables};
use recordtime::randomness::{make_stream, BoxMuller};
use recordtime::recordsim::{record_times_ceil_rep, record_times_markov, simulate_record_values};
use recordtime::scaling::{rescaled_w, Grid};
use recordtime::statlab::{ks_one_sample, ks_two_sample, ReferenceLaw};

fn paths(c: &mut Criterion) {
    let horizon = 8f64.exp();
    c.bench_function("simulate_path e^8", |b| {
        let mut s = make_stream(1, 0);
        b.iter(|| simulate_path(&mut s, 1.0, horizon).unwrap())
    });
    c.bench_function("stream_observables e^8", |b| {
        let mut s = make_stream(1, 1);
        b.iter(|| stream_observables(&mut s, 1.0, horizon).unwrap())
    });
    let path = simulate_path(&mut make_stream(1, 2), 1.0, horizon).unwrap();
    let trace = build_trace(&path);
    c.bench_function("observables_at", |b| {
        b.iter(|| observables_at(&path, &trace, black_box(horizon * 0.7)).unwrap())
    });
    let grid = Grid::uniform(513).unwrap();
    c.bench_function("rescaled_w n=8 grid 513", |b| {
        b.iter(|| rescaled_w(&path, &trace, 8.0, 1.0, &grid).unwrap())
    });
}

fn record_times(c: &mut Criterion) {
    c.bench_function("record_times_markov n=20", |b| {
        let mut s = make_stream(2, 0);
        b.iter(|| record_times_markov(&mut s, 20).unwrap())
    });
    c.bench_function("record_times_ceil_rep n=20", |b| {
        let mut s = make_stream(2, 1);
        b.iter(|| {
            let r = simulate_record_values(&mut s, 1.0, 20).unwrap();
            record_times_ceil_rep(&mut s, &r).unwrap()
        })
    });
}

fn gaussian(c: &mut Criterion) {
    let grid = Grid::uniform(513).unwrap();
    for scheme in [Scheme::ExactJoint, Scheme::Trapezoid] {
        c.bench_function(&format!("simulate_bm_pair {scheme:?} grid 513"), |b| {
            let mut g = BoxMuller::new(make_stream(3, 0));
            b.iter(|| simulate_bm_pair(&mut g, &grid, scheme))
        });
    }
}

fn ks(c: &mut Criterion) {
    let mut s = make_stream(4, 0);
    let a: Vec<f64> = (0..10_000).map(|_| s.uniform()).collect();
    let b2: Vec<f64> = (0..10_000).map(|_| s.uniform()).collect();
    c.bench_function("ks_one_sample 1e4", |b| {
        b.iter(|| ks_one_sample(&a, &ReferenceLaw::Uniform01).unwrap())
    });
    c.bench_function("ks_two_sample 1e4", |b| b.iter(|| ks_two_sample(&a, &b2).unwrap()));
}

criterion_group!(benches, paths, record_times, gaussian, ks);
criterion_main!(benches);
