use std::hint::black_box;

use corrwork_core::sampling::random_density_matrix;
use corrwork_core::{
    apply_unitary, build_hamiltonian, entangled_phi, ergotropy, ergotropy_in,
    inversion_sequence_to_bias, partial_transpose, product_thermal, rho_deg, u_alpha, Bipartition,
    SystemSpec, ThermalParams,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn qubits(n: usize) -> SystemSpec {
    SystemSpec::qubits(n, 1.0, 1.0).unwrap()
}

fn bench_ergotropy(c: &mut Criterion) {
    let mut group = c.benchmark_group("ergotropy");
    for n in [4, 6, 8] {
        let spec = qubits(n);
        let h = build_hamiltonian(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let dense = random_density_matrix(spec.dim().unwrap(), &mut rng);
        group.bench_with_input(BenchmarkId::new("dense_random", n), &n, |b, _| {
            b.iter(|| ergotropy(black_box(&dense), &h).unwrap())
        });
        let phi = entangled_phi(&spec).unwrap();
        group.bench_with_input(BenchmarkId::new("phi", n), &n, |b, _| {
            b.iter(|| ergotropy_in(black_box(&phi), &spec).unwrap())
        });
        let deg = rho_deg(&spec).unwrap();
        group.bench_with_input(BenchmarkId::new("diagonal", n), &n, |b, _| {
            b.iter(|| ergotropy_in(black_box(&deg), &spec).unwrap())
        });
    }
    group.finish();
}

fn bench_protocols(c: &mut Criterion) {
    let mut group = c.benchmark_group("protocols");
    for n in [6, 10] {
        let spec = qubits(n);
        let rho = product_thermal(&spec, 2.0).unwrap();
        let u = u_alpha(&spec, 0.4).unwrap();
        group.bench_with_input(BenchmarkId::new("apply_u_alpha", n), &n, |b, _| {
            b.iter(|| apply_unitary(black_box(&rho), &u).unwrap())
        });
        let target = 0.9 * ThermalParams::new(&spec, 1.0).unwrap().bias();
        group.bench_with_input(BenchmarkId::new("inversion_sequence", n), &n, |b, _| {
            b.iter(|| inversion_sequence_to_bias(&spec, 1.0, black_box(target)).unwrap())
        });
    }
    group.finish();
}

fn bench_partial_transpose(c: &mut Criterion) {
    let mut group = c.benchmark_group("partial_transpose");
    for n in [4, 6] {
        let spec = qubits(n);
        let rho = apply_unitary(
            &product_thermal(&spec, 1.0).unwrap(),
            &u_alpha(&spec, 0.7).unwrap(),
        )
        .unwrap();
        let part = Bipartition::half(n).unwrap();
        group.bench_with_input(BenchmarkId::new("half_split", n), &n, |b, _| {
            b.iter(|| partial_transpose(black_box(&rho), &spec, &part).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_ergotropy,
    bench_protocols,
    bench_partial_transpose
);
criterion_main!(benches);
