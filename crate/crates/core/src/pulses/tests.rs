use super::*;
use crate::dynamics::{default_dt, lindblad_evolve, omega_max};
use crate::hilbert::{coherent_state, fock_state, ladder_ops, tensor_states, transmon_state, State, E, G};
use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn cz(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// exp(+iθ/2 n̂_φ·σ) in the (g, e) basis with σ_y = [[0, i], [−i, 0]].
fn ideal_rotation(theta: f64, phi: f64) -> DMatrix<C64> {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let i = cz(0.0, 1.0);
    let off01 = i * s * (cz(phi.cos(), 0.0) + i * phi.sin());
    let off10 = i * s * (cz(phi.cos(), 0.0) - i * phi.sin());
    DMatrix::from_row_slice(2, 2, &[cz(c, 0.0), off01, off10, cz(c, 0.0)])
}

fn run(pulse: &PulseSpec, params: &SystemParams, psi: &State) -> State {
    let h = pulse_to_hamiltonian(pulse, params).unwrap();
    let dt = default_dt(omega_max(params, &pulse.detunings()));
    lindblad_evolve(psi, &h, &[], pulse.duration, dt).unwrap().rho_final
}

#[test]
fn y0_pi_pulse_structure_and_action() {
    let p = SystemParams::new(1.0, 6);
    let pulse = subset_rotation_pulse(&[0], PI, PI / 2.0, &p, 10.0, Envelope::Square).unwrap();
    assert_eq!(pulse.components.len(), 1);
    assert_eq!(pulse.components[0].detuning, 0.0);
    assert_relative_eq!(pulse.components[0].amplitude, p.chi / 10.0, max_relative = 1e-12);
    assert_relative_eq!(pulse.duration, 10.0 * PI);

    // (|0⟩ + |1⟩)/√2 ⊗ |g⟩: only the vacuum component rotates.
    let mut v = DVector::zeros(12);
    v[0] = cz(0.5f64.sqrt(), 0.0);
    v[1] = cz(0.5f64.sqrt(), 0.0);
    let psi = State::ket(v, vec![6, 2]).unwrap();
    let out = run(&pulse, &p, &psi);
    let r = ideal_rotation(PI, PI / 2.0);
    let mut expected = DVector::zeros(12);
    expected[0] = r[(0, 0)] * 0.5f64.sqrt();
    expected[6] = r[(1, 0)] * 0.5f64.sqrt();
    expected[1] = cz(0.5f64.sqrt(), 0.0);
    let f = out.overlap_with(&expected);
    assert!(f > 0.995, "fidelity {f}");
}

#[test]
fn zero_angle_is_identity() {
    let p = SystemParams::new(1.0, 6);
    let pulse = subset_rotation_pulse(&[0, 1, 2], 0.0, 0.3, &p, 4.0, Envelope::Square).unwrap();
    assert!(pulse.components.iter().all(|c| c.amplitude == 0.0));
    let h = pulse_to_hamiltonian(&pulse, &p).unwrap();
    assert_eq!(h.at(1.3).to_dense(), h.static_part().to_dense());
}

#[test]
fn empty_subset_is_rejected() {
    let p = SystemParams::new(1.0, 6);
    assert!(subset_rotation_pulse(&[], PI, 0.0, &p, 4.0, Envelope::Square).is_err());
    assert!(parity_pi_pulse(cz(2.0, 0.0), 0, 4.0, &p, Envelope::Square).is_err());
}

#[test]
fn single_component_drive_matrix() {
    let p = SystemParams::new(1.0, 3);
    let pulse = PulseSpec::new(
        PulseTarget::Qubit,
        Envelope::Square,
        10.0,
        vec![PulseComponent {
            detuning: -0.5,
            amplitude: 0.2,
            phase: 1.0,
        }],
        "test",
    )
    .unwrap();
    // Δt + δ = 0 at t = 2.
    let h = pulse_to_hamiltonian(&pulse, &p).unwrap();
    let drive = h.at(2.0).to_dense() - h.static_part().to_dense();
    let ops = ladder_ops(3, 2).unwrap();
    let sx = (ops.sigma_minus.to_dense() + ops.sigma_minus.adjoint().to_dense()) * cz(0.1, 0.0);
    assert!((drive - sx).camax() < 1e-15);
}

#[test]
fn comb_coefficient_is_periodic_in_pi_over_chi() {
    let p = SystemParams::new(2.0, 20);
    let pulse = subset_rotation_pulse(&(0..12).collect::<Vec<_>>(), 0.7, 0.2, &p, 10.0, Envelope::Square).unwrap();
    let c = pulse.coefficient();
    for t in [0.1, 0.77, 2.3] {
        let d = c(t) - c(t + PI / p.chi);
        assert!(d.norm() < 1e-12);
    }
}

#[test]
fn gaussian_area_is_theta() {
    let p = SystemParams::new(1.0, 4);
    for k in [1.0, 3.0, 10.0] {
        let theta = PI / 2.0;
        let pulse = subset_rotation_pulse(&[0], theta, 0.0, &p, k, Envelope::Gaussian).unwrap();
        let n = 20_000;
        let h = pulse.duration / n as f64;
        let area: f64 =
            (0..n).map(|i| pulse.shape((i as f64 + 0.5) * h) * h).sum::<f64>() * pulse.components[0].amplitude;
        assert!((area - theta).abs() < 1e-4, "area {area}");
        assert_relative_eq!(pulse.gaussian_sigma().unwrap() * pulse.duration, 6.0);
    }
}

proptest! {
    #[test]
    fn square_comb_has_exact_sinc_zeros(k in 1u32..25, mask in 1u32..(1 << 12), theta in 0.1f64..3.1) {
        let p = SystemParams::new(1.3, 16);
        let subset: Vec<usize> = (0..12).filter(|n| mask & (1 << n) != 0).collect();
        let pulse = subset_rotation_pulse(&subset, theta, 0.4, &p, k as f64, Envelope::Square).unwrap();
        let leak = first_order_leakage(&pulse, &p);
        for n in 0..16 {
            if subset.contains(&n) {
                prop_assert!((leak.amplitudes[n] - theta / 2.0).abs() < 1e-9);
            } else {
                prop_assert_eq!(leak.amplitudes[n], 0.0);
            }
        }
    }
}

#[test]
fn gaussian_leaks_more_than_square_at_small_k() {
    let p = SystemParams::new(1.0, 12);
    for k in [1.0, 2.0] {
        let sq = subset_rotation_pulse(&[4], PI, 0.0, &p, k, Envelope::Square).unwrap();
        let ga = subset_rotation_pulse(&[4], PI, 0.0, &p, k, Envelope::Gaussian).unwrap();
        let off = |r: LeakageReport| {
            r.amplitudes
                .iter()
                .enumerate()
                .filter(|(n, _)| *n != 4)
                .map(|(_, a)| a)
                .sum::<f64>()
        };
        assert!(off(first_order_leakage(&ga, &p)) > off(first_order_leakage(&sq, &p)));
    }
    let strong = subset_rotation_pulse(&[4], PI, 0.0, &p, 1.0, Envelope::Gaussian).unwrap();
    assert!(!first_order_leakage(&strong, &p).perturbative);
}

#[test]
fn unconditional_half_pi_reaches_equator() {
    let p = SystemParams::new(1.0, 12);
    let pulse = unconditional_rotation_pulse(PI / 2.0, PI / 2.0, 0.0, &p, 10.0, Envelope::Square).unwrap();
    let psi = tensor_states(&[&fock_state(0, 12).unwrap(), &transmon_state(G, 2).unwrap()]).unwrap();
    let out = run(&pulse, &p, &psi);
    let pe = out.expect(&ladder_ops(12, 2).unwrap().projectors[E]).re;
    assert!((pe - 0.5).abs() < 0.01, "p_e {pe}");
}

#[test]
fn qubit_pulse_conserves_photon_number() {
    let nf = 20;
    let p = SystemParams::new(1.0, nf);
    let alpha = cz(1.5, 0.0);
    let pulse = unconditional_rotation_pulse(PI / 2.0, 0.3, 1.5, &p, 2.0, Envelope::Square).unwrap();
    let psi = tensor_states(&[&coherent_state(alpha, nf).unwrap(), &transmon_state(G, 2).unwrap()]).unwrap();
    let num = ladder_ops(nf, 2).unwrap().number;
    let before = psi.expect(&num).re;
    let h = pulse_to_hamiltonian(&pulse, &p).unwrap();
    let dt = default_dt(omega_max(&p, &pulse.detunings())) / 2.0;
    let after = lindblad_evolve(&psi, &h, &[], pulse.duration, dt)
        .unwrap()
        .rho_final
        .expect(&num)
        .re;
    assert!((after - before).abs() < 1e-8, "{before} {after}");
}

#[test]
fn subset_rotation_converges_with_k() {
    let nf = 8;
    let p = SystemParams::new(1.0, nf);
    // Photon numbers 0..4 in equal superposition, rotate the odd ones.
    let mut v = DVector::zeros(2 * nf);
    for n in 0..4 {
        v[n] = cz(0.5, 0.0);
    }
    let psi = State::ket(v.clone(), vec![nf, 2]).unwrap();
    let r = ideal_rotation(PI, PI / 2.0);
    let mut target = DVector::zeros(2 * nf);
    for n in 0..4 {
        if n % 2 == 1 {
            target[n] = r[(0, 0)] * 0.5;
            target[n + nf] = r[(1, 0)] * 0.5;
        } else {
            target[n] = cz(0.5, 0.0);
        }
    }
    let gap = |k: f64| {
        let pulse = subset_rotation_pulse(&[1, 3], PI, PI / 2.0, &p, k, Envelope::Square).unwrap();
        1.0 - run(&pulse, &p, &psi).overlap_with(&target)
    };
    let (g4, g8, g16) = (gap(4.0), gap(8.0), gap(16.0));
    assert!(g4 > g8 && g8 > g16, "{g4} {g8} {g16}");
    assert!(g8 / g16 > 2.5, "{g8} {g16}");
}

#[test]
fn nearest_odd_selection() {
    assert_eq!(nearest_odd(16.0, 4), vec![13, 15, 17, 19]);
    assert_eq!(nearest_odd(16.0, 20), (0..20).map(|i| 2 * i + 1).collect::<Vec<_>>());
    assert_eq!(nearest_odd(4.0, 1), vec![3]);
}

#[test]
fn photon_window_bounds_mass() {
    let (lo, hi) = photon_window(16.0, 1e-4);
    assert!(lo < 16 && hi > 16);
    assert!(crate::hilbert::poisson_tail(16.0, hi + 1) <= 1e-4);
    assert_eq!(photon_window(0.0, 1e-4), (0, 0));
}

#[test]
fn displacement_calibration_reaches_targets() {
    let nf = 30;
    let p = SystemParams::new(1.0, nf);
    let beta = cz(1.2, -0.7);
    for envelope in [Envelope::Square, Envelope::Gaussian] {
        for kind in [
            DisplacementKind::Unconditional,
            DisplacementKind::Ground,
            DisplacementKind::Excited,
        ] {
            let cal = displacement_pulse(kind, beta, &p, 10.0, envelope).unwrap();
            assert!(
                cal.fidelity >= CALIBRATION_FIDELITY,
                "{kind:?} {envelope:?} {}",
                cal.fidelity
            );
            let targets = kind.targets(beta);
            for (level, target) in [G, E].into_iter().zip(targets) {
                let psi = tensor_states(&[&fock_state(0, nf).unwrap(), &transmon_state(level, 2).unwrap()]).unwrap();
                let out = run(&cal.pulse, &p, &psi);
                let want =
                    tensor_states(&[&coherent_state(target, nf).unwrap(), &transmon_state(level, 2).unwrap()]).unwrap();
                assert!(out.overlap_with(want.as_ket().unwrap()) > 1.0 - 1e-6);
            }
        }
    }
    let a = displacement_pulse(DisplacementKind::Ground, beta, &p, 10.0, Envelope::Square).unwrap();
    let b = displacement_pulse(DisplacementKind::Ground, beta, &p, 10.0, Envelope::Square).unwrap();
    assert!(Arc::ptr_eq(&a, &b));
    // Integer k makes the square system diagonal: a single tone suffices.
    assert_eq!(a.pulse.components[1].amplitude, 0.0);
}

#[test]
fn zero_displacement_is_empty() {
    let p = SystemParams::new(1.0, 10);
    let cal = displacement_pulse(
        DisplacementKind::Unconditional,
        cz(0.0, 0.0),
        &p,
        10.0,
        Envelope::Square,
    )
    .unwrap();
    assert!(cal.pulse.components.is_empty());
    assert_eq!(cal.frame_shift(), 0.0);
}

#[test]
fn unconditional_displacement_has_ac_stark_frame_shift() {
    let p = SystemParams::new(1.0, 20);
    let cal = displacement_pulse(
        DisplacementKind::Unconditional,
        cz(2.0, 0.0),
        &p,
        10.0,
        Envelope::Square,
    )
    .unwrap();
    // Leading terms ±|z|²T/(2χ) with |z| = |β|/T, plus cross terms.
    assert!(cal.frame_shift().abs() > 0.01);
}

#[test]
fn pulse_record_is_dimensionless() {
    let p = SystemParams::from_chi_mhz(50.0, 10);
    let pulse = subset_rotation_pulse(&[2], PI, 0.0, &p, 10.0, Envelope::Square).unwrap();
    let rec = pulse.record(p.chi);
    assert_relative_eq!(rec.duration_over_pi_per_chi, 10.0, max_relative = 1e-12);
    assert_relative_eq!(rec.components[0].0, -4.0);
    assert_relative_eq!(rec.components[0].1, 0.1, max_relative = 1e-12);
    let json = serde_json::to_string(&rec).unwrap();
    let back: PulseRecord = serde_json::from_str(&json).unwrap();
    assert_eq!(back, rec);
}
