use std::f64::consts::PI;

use catqubit::analysis::{wigner, GridSpec};
use catqubit::dynamics::{
    default_step, lindblad_evolve_in, standard_channels, superop_propagator, Picture, TimeDependentHamiltonian,
};
use catqubit::hilbert::{
    build_static_hamiltonian, cat_state, coherent_state, displacement_operator, tensor_states, transmon_state, G,
};
use catqubit::pulses::{parity_pi_pulse, pulse_to_hamiltonian, unconditional_displacement_pulse, Envelope};
use catqubit::{Parity, SystemParams, C64};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

const CHI: f64 = 2.0 * PI * 50e6;

fn params(nf: usize) -> SystemParams {
    SystemParams::new(CHI, nf).with_kappa(1e-4 * CHI)
}

/// A fixed number of RK4 steps of a driven, damped density matrix.
fn rk4_steps(c: &mut Criterion) {
    let mut group = c.benchmark_group("rk4_100_steps");
    group.sample_size(10);
    for nf in [24, 40] {
        let p = params(nf);
        let channels = standard_channels(&p).unwrap();
        let rho = tensor_states(&[
            &coherent_state(C64::from(2.0), nf).unwrap(),
            &transmon_state(G, 2).unwrap(),
        ])
        .unwrap()
        .into_density();
        let cases = [
            (
                "qubit_comb",
                parity_pi_pulse(C64::from(2.0), 6, 10.0, &p, Envelope::Square).unwrap(),
            ),
            (
                "displacement",
                unconditional_displacement_pulse(C64::from(1.0), &p, 10.0, Envelope::Square).unwrap(),
            ),
        ];
        for (name, pulse) in cases {
            let h = pulse_to_hamiltonian(&pulse, &p).unwrap();
            let dt = default_step(
                Picture::Lab,
                &p,
                &h,
                &channels,
                &pulse.detunings(),
                pulse.coefficient_bound(),
            );
            group.bench_with_input(BenchmarkId::new(name, nf), &nf, |b, _| {
                b.iter(|| {
                    lindblad_evolve_in(black_box(&rho), &h, &channels, 100.0 * dt, dt, "bench", Picture::Lab).unwrap()
                })
            });
        }
    }
    group.finish();
}

fn wigner_grid(c: &mut Criterion) {
    let mut group = c.benchmark_group("wigner_61x61");
    group.sample_size(10);
    for (alpha, nf) in [(2.0, 30), (3.0, 50)] {
        let cat = cat_state(C64::from(alpha), Parity::Even, nf).unwrap();
        let grid = GridSpec::square(alpha + 2.0, 61);
        group.bench_with_input(BenchmarkId::from_parameter(nf), &nf, |b, _| {
            b.iter(|| wigner(black_box(&cat), &grid).unwrap())
        });
    }
    group.finish();
}

fn matrix_exponentials(c: &mut Criterion) {
    let mut group = c.benchmark_group("expm");
    group.sample_size(10);
    for nf in [30, 60] {
        group.bench_with_input(BenchmarkId::new("displacement", nf), &nf, |b, &nf| {
            b.iter(|| displacement_operator(black_box(C64::new(1.5, 0.5)), nf).unwrap())
        });
    }
    let p = SystemParams::new(1.0, 8).with_kappa(0.05).with_kerr(0.01);
    let h = TimeDependentHamiltonian::new(build_static_hamiltonian(&p).unwrap());
    let channels = standard_channels(&p).unwrap();
    group.bench_function("liouvillian_dim16", |b| {
        b.iter(|| superop_propagator(black_box(&h.at(0.0)), &channels, 1.0).unwrap())
    });
    group.finish();
}

criterion_group!(benches, rk4_steps, wigner_grid, matrix_exponentials);
criterion_main!(benches);
