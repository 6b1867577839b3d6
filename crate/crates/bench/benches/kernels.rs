use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use roughlift::checks::random_pl_path;
use roughlift::gaussian::{
    malliavin_gradient, standard_normals, FbmBackend, FbmSampler, FBMSpec, FourierCoefficients,
    FourierGaussianModel, PathSampler,
};
use roughlift::norms::{besov_seminorm, inhom_distance, p_variation, BesovParams, InhomDistanceParams};
use roughlift::signature::path_signature;
use roughlift::{PairSet, TimeGrid, Word};

fn fourier(m: usize, n_max: usize) -> FourierGaussianModel {
    FourierGaussianModel::on_circle(FourierCoefficients::decay(2, n_max, 1.0, 0.45).unwrap(), m).unwrap()
}

fn signatures(c: &mut Criterion) {
    let model = fourier(1024, 256);
    let x = model.sample(1, 0).unwrap();
    let (s, t) = (x.grid().start(), x.grid().end());
    c.bench_function("path_signature m=1024 level=3", |b| {
        b.iter(|| path_signature(black_box(&x), s, t, 3).unwrap())
    });
    c.bench_function("path_signature m=1024 level=5", |b| {
        b.iter(|| path_signature(black_box(&x), s, t, 5).unwrap())
    });
}

fn distances(c: &mut Criterion) {
    let model = fourier(1024, 256);
    let x = model.sample(1, 0).unwrap();
    let y = model.sample(1, 1).unwrap();
    let dyadic = InhomDistanceParams::new(0.23, 0.45, 2, PairSet::Dyadic).unwrap();
    c.bench_function("inhom_distance m=1024 dyadic level=2", |b| {
        b.iter(|| inhom_distance(black_box(&x), black_box(&y), &dyadic).unwrap())
    });
    let small = fourier(256, 64);
    let (u, v) = (small.sample(1, 0).unwrap(), small.sample(1, 1).unwrap());
    let all = InhomDistanceParams::new(0.23, 0.45, 2, PairSet::AllGridPairs).unwrap();
    c.bench_function("inhom_distance m=256 all pairs level=2", |b| {
        b.iter(|| inhom_distance(black_box(&u), black_box(&v), &all).unwrap())
    });
}

fn variation_and_besov(c: &mut Criterion) {
    let model = fourier(512, 128);
    let x = model.sample(2, 0).unwrap();
    let (s, t) = (x.grid().start(), x.grid().end());
    c.bench_function("p_variation m=512 p=2.5", |b| b.iter(|| p_variation(black_box(&x), 2.5, s, t).unwrap()));
    let short = random_pl_path(3, 0, 128, 1);
    let params = BesovParams::new(0.6, 2.0).unwrap();
    c.bench_function("besov_seminorm up to 128 segments", |b| {
        b.iter(|| besov_seminorm(black_box(&short), &params).unwrap())
    });
}

fn sampling(c: &mut Criterion) {
    let grid = TimeGrid::uniform(1.0, 1024).unwrap();
    let dense = FbmSampler::new(FBMSpec::new(0.4, 2, grid.clone(), FbmBackend::Dense).unwrap()).unwrap();
    let circulant = FbmSampler::new(FBMSpec::new(0.4, 2, grid, FbmBackend::Circulant).unwrap()).unwrap();
    c.bench_function("fbm dense m=1024", |b| b.iter(|| dense.sample(black_box(1), 0).unwrap()));
    c.bench_function("fbm circulant m=1024", |b| b.iter(|| circulant.sample(black_box(1), 0).unwrap()));
    let model = fourier(4096, 1024);
    c.bench_function("fourier path m=4096 n_max=1024", |b| b.iter(|| model.sample(black_box(1), 0).unwrap()));
}

fn gradients(c: &mut Criterion) {
    let model = fourier(128, 8);
    let noise = standard_normals(4, 0, model.noise_len());
    let w: Word = "121".parse().unwrap();
    c.bench_function("malliavin_gradient 8 modes |w|=3", |b| {
        b.iter(|| malliavin_gradient(&model, &w, 0.5, 5.0, black_box(&noise)).unwrap())
    });
}

criterion_group!(benches, signatures, distances, variation_and_besov, sampling, gradients);
criterion_main!(benches);
