use std::hint::black_box;

use conharm::cross_section::{mesh_eigenvalues, CrossSection, GroupAction};
use conharm::frequency::{dyadic_decay_report, frequency_profile, three_circle_check};
use conharm::mesh::TriMesh;
use conharm::oracle::{circle_spectrum_fft, integrate_radial, RadialOde};
use conharm::realize::realize;
use conharm::spectra::{growth_spectrum, oneform_growth_spectrum};
use conharm::verify::fd_consistency;
use conharm_bench::{corpus, dyadic_radii, r4_mixture};
use criterion::{criterion_group, criterion_main, Criterion};

fn spectra(c: &mut Criterion) {
    let s3 = CrossSection::round_sphere(4).unwrap();
    let q = CrossSection::sphere_quotient(6, GroupAction::CyclicDiagonal { order: 5, weights: vec![1, 2, 3] }).unwrap();
    c.bench_function("oneform_spectrum_S3_window_0_3", |b| {
        b.iter(|| oneform_growth_spectrum(black_box(&s3), (0.0, 3.0)).unwrap())
    });
    c.bench_function("function_spectrum_S5_Z5_window_0_8", |b| {
        b.iter(|| growth_spectrum(black_box(&q), (0.0, 8.0)).unwrap())
    });
}

fn frequency(c: &mut Criterion) {
    let fields = corpus(20);
    let radii = dyadic_radii();
    c.bench_function("frequency_profile_corpus20", |b| {
        b.iter(|| {
            for f in &fields {
                black_box(frequency_profile(f, &radii).unwrap());
            }
        })
    });
    let (u, _) = r4_mixture();
    c.bench_function("three_circle_r4_mixture", |b| b.iter(|| three_circle_check(black_box(&u), &radii, 1e-9).unwrap()));
    c.bench_function("dyadic_decay_k10", |b| b.iter(|| dyadic_decay_report(black_box(&u), 10, 0.5).unwrap()));
}

fn oracles(c: &mut Criterion) {
    let mesh = TriMesh::icosphere(3);
    let mut g = c.benchmark_group("oracles");
    g.sample_size(10);
    g.bench_function("icosphere3_lowest9", |b| b.iter(|| mesh_eigenvalues(black_box(&mesh), 9).unwrap()));
    g.bench_function("circle_fft_32", |b| b.iter(|| circle_spectrum_fft(black_box(32)).unwrap()));
    let ode = RadialOde { m: 4, c1: 5.0, r0: 1.0, r1: 3.0, f0: 0.7, df0: -0.4 };
    g.bench_function("radial_rk4_4000", |b| b.iter(|| integrate_radial(black_box(&ode), 4000).unwrap()));
    let (u, s) = r4_mixture();
    g.bench_function("realize_r4_mixture", |b| b.iter(|| realize(black_box(&u), &s).unwrap()));
    g.bench_function("fd_consistency_r4", |b| b.iter(|| fd_consistency(&u, &s, &[1.0, 0.7, 0.3, 0.9]).unwrap()));
    g.finish();
}

criterion_group!(benches, spectra, frequency, oracles);
criterion_main!(benches);
