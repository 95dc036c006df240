//! Benchmarks for the hot exact-arithmetic paths: cohomology solves,
//! locality scans, and series iteration.

use std::collections::BTreeMap;

use criterion::{criterion_group, criterion_main, Criterion};
use vertexkit::cdmod::{Gen, ModElement};
use vertexkit::cohom::{self, CoefficientModule};
use vertexkit::exact::rat_int;
use vertexkit::lca;
use vertexkit::va;

fn bench_h2(c: &mut Criterion) {
    let jordan = CoefficientModule::jordan(3);
    c.bench_function("h2 jordan(3) deg 8", |b| {
        b.iter(|| cohom::h2(&jordan, 8).expect("h2 run"))
    });
}

fn bench_locality(c: &mut Criterion) {
    let psi = BTreeMap::from([(-4, rat_int(1)), (-2, rat_int(1))]);
    let v = va::make_finitevertex(&psi, false).expect("table");
    let m = v.module();
    let a = ModElement::generator(m, Gen(0));
    let vac = ModElement::generator(m, v.vacuum());
    c.bench_function("locality scan N <= 8", |b| {
        b.iter(|| va::locality_check(&v, &a, &a, &vac, 8).expect("locality run"))
    });
}

fn bench_central_series(c: &mut Criterion) {
    let alg = lca::make_virasoro_ext(rat_int(1), 2);
    c.bench_function("central series vir-ext(1,2)", |b| b.iter(|| alg.central_series(12)));
}

fn bench_novir(c: &mut Criterion) {
    c.bench_function("no-go run order 6", |b| {
        b.iter(|| va::novir_verify(&rat_int(0), 6).expect("no-go run"))
    });
}

criterion_group!(benches, bench_h2, bench_locality, bench_central_series, bench_novir);
criterion_main!(benches);
