use std::f64::consts::PI;

use catqubit::analysis::{
    cavity_density, cavity_parity, logical_fidelity, wigner_point, FidelityDefinition, LogicalMap,
};
use catqubit::dynamics::{lindblad_evolve, standard_channels, superop_propagator, TimeDependentHamiltonian};
use catqubit::gates::{Encoding, LogicalState};
use catqubit::hilbert::{
    build_static_hamiltonian, coherent_state, displacement_operator, load_state, save_state, tensor_states,
};
use catqubit::{State, SystemParams, C64};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn ket_from(parts: &[(f64, f64)]) -> DVector<C64> {
    DVector::from_iterator(parts.len(), parts.iter().map(|&(re, im)| C64::new(re, im)))
}

/// A random density matrix of dimension `dim` built from `parts` as a
/// mixture of two normalized kets.
fn mixture(parts: &[(f64, f64)], weight: f64, dim: usize) -> Option<DMatrix<C64>> {
    let a = ket_from(&parts[..dim]);
    let b = ket_from(&parts[dim..2 * dim]);
    let (na, nb) = (a.norm(), b.norm());
    if na < 1e-3 || nb < 1e-3 {
        return None;
    }
    let (a, b) = (a.unscale(na), b.unscale(nb));
    Some(&a * a.adjoint() * C64::from(weight) + &b * b.adjoint() * C64::from(1.0 - weight))
}

fn amplitudes(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalized_fidelity_bounds_paper(parts in amplitudes(2 * 2 * 12), w in 0.0f64..1.0, theta in 0.0f64..PI, phi in 0.0f64..(2.0 * PI)) {
        let nf = 12;
        let Some(rho) = mixture(&parts, w, 2 * nf) else { return Ok(()) };
        let s = State::density(rho, vec![nf, 2]).unwrap();
        let initial = LogicalState::new(theta, phi, 1.0, Encoding::Computational).unwrap();
        let map = LogicalMap::hadamard();
        let paper = logical_fidelity(&s, &initial, &map, FidelityDefinition::Paper).unwrap();
        let norm = logical_fidelity(&s, &initial, &map, FidelityDefinition::Normalized).unwrap();
        prop_assert!(paper.value >= -1e-12 && paper.value <= paper.g_population + 1e-12);
        prop_assert!(norm.value >= paper.value - 1e-12);
        prop_assert!(norm.value <= 1.0 + 1e-9);
        if paper.g_population > 1e-6 {
            prop_assert!((norm.value * paper.g_population - paper.value).abs() < 1e-12);
        }
    }

    #[test]
    fn wigner_origin_is_scaled_parity(parts in amplitudes(2 * 10), w in 0.0f64..1.0) {
        let Some(rho) = mixture(&parts, w, 10) else { return Ok(()) };
        let s = State::density(rho.clone(), vec![10]).unwrap();
        let w0 = wigner_point(&rho, C64::new(0.0, 0.0));
        prop_assert!((PI / 2.0 * w0 - cavity_parity(&s).unwrap()).abs() < 1e-8);
        prop_assert!(w0.abs() <= 2.0 / PI + 1e-9);
    }

    #[test]
    fn partial_trace_keeps_trace_and_hermiticity(parts in amplitudes(2 * 16), w in 0.0f64..1.0) {
        let Some(rho) = mixture(&parts, w, 16) else { return Ok(()) };
        let s = State::density(rho, vec![8, 2]).unwrap();
        for keep in [[0usize], [1]] {
            let r = s.partial_trace(&keep).unwrap();
            prop_assert!((r.trace() - C64::from(1.0)).norm() < 1e-12);
            let m = r.density_matrix();
            prop_assert!((&m - m.adjoint()).camax() < 1e-12);
        }
        let cav = cavity_density(&s).unwrap();
        prop_assert!((cav.trace() - C64::from(1.0)).norm() < 1e-12);
    }

    #[test]
    fn displacement_moves_the_mean_field(re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let nf = 60;
        let beta = C64::new(re, im);
        let d = displacement_operator(beta, nf).unwrap();
        let vac = coherent_state(C64::new(0.0, 0.0), nf).unwrap();
        let moved = d.apply(&vac).unwrap();
        let target = coherent_state(beta, nf).unwrap();
        prop_assert!(1.0 - moved.overlap_with(target.as_ket().unwrap()) < 1e-10);
    }

    #[test]
    fn state_files_round_trip(parts in amplitudes(2 * 8), w in 0.0f64..1.0) {
        let Some(rho) = mixture(&parts, w, 8) else { return Ok(()) };
        let s = State::density(rho, vec![4, 2]).unwrap();
        let dir = std::env::temp_dir().join(format!("catqubit-rt-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(format!("{:x}.json", (w * 1e15) as u64));
        save_state(&s, "random", &path).unwrap();
        let (back, label) = load_state(&path).unwrap();
        std::fs::remove_file(&path).ok();
        prop_assert_eq!(label, "random");
        prop_assert_eq!(back, s);
    }

    #[test]
    fn damped_evolution_stays_physical(kappa in 0.0f64..0.2, gamma in 0.0f64..0.2, t in 0.1f64..3.0) {
        let nf = 10;
        let p = SystemParams::new(1.0, nf).with_kappa(kappa).with_kerr(0.02).with_gamma(gamma);
        let h = TimeDependentHamiltonian::new(build_static_hamiltonian(&p).unwrap());
        let ch = standard_channels(&p).unwrap();
        let q = State::ket(ket_from(&[(0.6, 0.0), (0.0, 0.8)]), vec![2]).unwrap();
        let rho0 = tensor_states(&[&coherent_state(C64::new(0.7, 0.2), nf).unwrap(), &q]).unwrap().into_density();
        let r = lindblad_evolve(&rho0, &h, &ch, t, 0.01).unwrap();
        prop_assert!(r.trace_drift < 1e-6);
        // RK4 is not positivity preserving; near-zero eigenvalues of a rank
        // deficient state move at the integration accuracy.
        let min_eig = r.rho_final.min_eigenvalue();
        prop_assert!(min_eig > -1e-6, "min eigenvalue {min_eig:e}");
        let exact = superop_propagator(&h.at(0.0), &ch, t).unwrap().apply(&rho0).unwrap();
        prop_assert!(r.rho_final.trace_distance(&exact).unwrap() < 1e-6);
        // Decay only lowers the e population.
        let e_pop = r.rho_final.density_matrix().diagonal().iter().skip(nf).map(|c| c.re).sum::<f64>();
        prop_assert!(e_pop <= 0.64 + 1e-9);
    }
}
