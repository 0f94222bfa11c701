use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use tsirelson_core::certificates::{nullifier_basis, verify_certificate, w3_certificate, Level};
use tsirelson_core::optimize::{face_scan, hessian_rmax, npa_bound, sos_search, HessianSource};
use tsirelson_core::scenario::AnyExpression;
use tsirelson_core::slice::{beta_t, octagon_vertices};

fn exact(c: &mut Criterion) {
    c.bench_function("octagon_vertices", |b| b.iter(octagon_vertices));
    c.bench_function("nullifier_basis_L1AB_ABB", |b| b.iter(|| nullifier_basis(black_box(Level::L1AB_ABB))));
    let w3 = w3_certificate();
    c.bench_function("verify_w3_exact", |b| b.iter(|| verify_certificate(black_box(&w3), 0.0).unwrap()));
}

fn numeric(c: &mut Criterion) {
    let bt = beta_t::<f64>();
    let mut g = c.benchmark_group("numeric");
    g.sample_size(10);
    g.bench_function("npa_bound_L1AB", |b| b.iter(|| npa_bound(black_box(&bt), Level::L1AB, 1e-8).unwrap()));
    g.bench_function("npa_bound_L1AB_ABB_AAB", |b| {
        b.iter(|| npa_bound(black_box(&bt), Level::L1AB_ABB_AAB, 1e-8).unwrap())
    });
    let any = AnyExpression::Float(bt.clone());
    g.bench_function("sos_search_L1AB_ABB", |b| b.iter(|| sos_search(black_box(&any), Level::L1AB_ABB, 1e-8).unwrap()));
    g.bench_function("hessian_rmax_closed_form", |b| {
        b.iter(|| hessian_rmax(black_box(0.0), 256, 1e-4, HessianSource::ClosedForm))
    });
    g.bench_function("face_scan_50", |b| b.iter(|| face_scan(black_box(&bt), 50, 1e-7, 0)));
    g.finish();
}

criterion_group!(benches, exact, numeric);
criterion_main!(benches);
