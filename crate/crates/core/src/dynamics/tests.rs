use super::*;
use crate::hilbert::{
    build_static_hamiltonian, cat_state, coherent_state, fock_state, tensor_states, transmon_state, Parity, E, G,
};
use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};

fn cz(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn constant(c: C64) -> Coefficient {
    Arc::new(move |_| c)
}

fn cavity_only(nf: usize, kappa: f64) -> (TimeDependentHamiltonian, Vec<CollapseChannel>) {
    let h = TimeDependentHamiltonian::new(Operator::zeros(vec![nf]));
    let a = Operator::new(annihilation(nf), vec![nf], "a").unwrap();
    (h, vec![CollapseChannel::new(a, kappa).unwrap()])
}

#[test]
fn negative_rate_rejected() {
    let a = Operator::new(annihilation(4), vec![4], "a").unwrap();
    assert!(CollapseChannel::new(a, -1.0).is_err());
}

#[test]
fn parity_wait_maps_alpha_to_minus_alpha() {
    let chi = 1.0;
    let nf = 40;
    let p = SystemParams::new(chi, nf);
    let alpha = cz(2.0, 0.5);
    let e = transmon_state(E, 2).unwrap();
    let psi = tensor_states(&[&coherent_state(alpha, nf).unwrap(), &e]).unwrap();
    let target = tensor_states(&[&coherent_state(-alpha, nf).unwrap(), &e]).unwrap();
    let wait = free_parity_wait(&p, 4.0).unwrap();
    let h0 = build_static_hamiltonian(&p).unwrap();

    // Exact diagonal path.
    let h = TimeDependentHamiltonian::new(h0.clone());
    let r = lindblad_evolve(&psi, &h, &[], wait.duration, 1e-3).unwrap();
    assert_relative_eq!(r.rho_final.overlap_with(target.as_ket().unwrap()), 1.0, epsilon = 1e-12);

    // Same through the integrator, forced by an inert drive.
    let ops = ladder_ops(nf, 2).unwrap();
    let h = TimeDependentHamiltonian::new(h0)
        .with_drive(ops.a, constant(cz(0.0, 0.0)))
        .unwrap();
    let dt = default_dt(omega_max(&p, &[]));
    let r = lindblad_evolve(&psi.clone().into_density(), &h, &[], wait.duration, dt).unwrap();
    assert!(r.rho_final.overlap_with(target.as_ket().unwrap()) > 1.0 - 1e-8);
    assert!(r.trace_drift < 1e-10);
    let r = lindblad_evolve(&psi, &h, &[], wait.duration, dt).unwrap();
    assert!(r.rho_final.is_ket());
    assert!(r.rho_final.overlap_with(target.as_ket().unwrap()) > 1.0 - 1e-8);
}

#[test]
fn damped_coherent_state_stays_coherent() {
    let nf = 30;
    let kappa = 0.3;
    let alpha = cz(2.0, -1.0);
    let (h, ch) = cavity_only(nf, kappa);
    let rho0 = coherent_state(alpha, nf).unwrap().into_density();
    let t = 2.0;
    let r = lindblad_evolve(&rho0, &h, &ch, t, 1e-3).unwrap();
    let target = coherent_state(alpha * (-kappa * t / 2.0).exp(), nf).unwrap();
    assert!(r.rho_final.overlap_with(target.as_ket().unwrap()) > 1.0 - 1e-8);
    assert!(r.trace_drift < TRACE_DRIFT_TOL);
}

#[test]
fn cat_coherence_decays_at_enhanced_rate() {
    let nf = 12;
    let kappa = 1e-3;
    let alpha = 1.0;
    let n_bar = alpha * alpha;
    let cat = cat_state(cz(alpha, 0.0), Parity::Even, nf).unwrap().into_density();
    let (h, ch) = cavity_only(nf, kappa);
    let t = 5.0;
    let r = lindblad_evolve(&cat, &h, &ch, t, 1e-2).unwrap();
    let oracle = superop_propagator(h.static_part(), &ch, t)
        .unwrap()
        .apply(&cat)
        .unwrap();
    assert!(r.rho_final.trace_distance(&oracle).unwrap() < 1e-6);

    // ⟨Π⟩ = N²(2e^{−2|α_t|²} + 2D) isolates the coherence factor D.
    let par = CsrMatrix::from_diagonal(
        &(0..nf)
            .map(|n| cz(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
            .collect::<Vec<_>>(),
    );
    let parity = Operator::new(par, vec![nf], "Π").unwrap();
    let norm2 = 1.0 / (2.0 + 2.0 * (-2.0 * n_bar).exp());
    let at2 = n_bar * (-kappa * t).exp();
    let d = oracle.expect(&parity).re / (2.0 * norm2) - (-2.0 * at2).exp();
    let rate = -d.ln() / t;
    assert!(
        (rate - 2.0 * n_bar * kappa).abs() / (2.0 * n_bar * kappa) < 0.01,
        "rate {rate}"
    );
}

#[test]
fn zero_liouvillian_is_identity() {
    let h = Operator::zeros(vec![3, 2]);
    let s = superop_propagator(&h, &[], 1.7).unwrap();
    assert!((s.matrix() - DMatrix::<C64>::identity(36, 36)).camax() < 1e-14);
}

#[test]
fn unitary_superoperator_matches_closed_form() {
    let p = SystemParams::new(1.0, 5).with_kerr(0.07);
    let ops = ladder_ops(5, 2).unwrap();
    let h = build_static_hamiltonian(&p)
        .unwrap()
        .add(&ops.a.add(&ops.a_dagger).unwrap().scale(cz(0.3, 0.0)))
        .unwrap()
        .add(
            &ops.sigma_minus
                .add(&ops.sigma_minus.adjoint())
                .unwrap()
                .scale(cz(0.2, 0.0)),
        )
        .unwrap();
    let t = 0.9;
    let u = (h.to_dense() * cz(0.0, -t)).exp();
    let v = nalgebra::DVector::from_fn(10, |i, _| cz(1.0 / (1.0 + i as f64), 0.1 * i as f64));
    let rho = State::ket_normalized(v, vec![5, 2]).unwrap().density_matrix();
    let expected = &u * &rho * u.adjoint();
    let st = State::density(rho, vec![5, 2]).unwrap();
    let got = superop_propagator(&h, &[], t)
        .unwrap()
        .apply(&st)
        .unwrap()
        .density_matrix();
    assert!((got - expected).camax() < 1e-10);
}

fn driven_damped_case(nf: usize) -> (SystemParams, TimeDependentHamiltonian, Vec<CollapseChannel>, State) {
    let p = SystemParams::new(1.0, nf).with_kappa(0.05).with_kerr(0.01);
    let ops = ladder_ops(nf, 2).unwrap();
    let h = TimeDependentHamiltonian::new(build_static_hamiltonian(&p).unwrap())
        .with_drive(ops.a.clone(), constant(cz(0.15, 0.05)))
        .unwrap()
        .with_drive(ops.sigma_minus.clone(), constant(cz(0.2, 0.0)))
        .unwrap();
    let ch = standard_channels(&p.clone().with_gamma(0.02)).unwrap();
    let psi = tensor_states(&[&fock_state(0, nf).unwrap(), &transmon_state(G, 2).unwrap()]).unwrap();
    (p, h, ch, psi.into_density())
}

#[test]
fn rk4_matches_superoperator_oracle() {
    let (p, h, ch, rho0) = driven_damped_case(8);
    let t = 3.0;
    let dt = default_dt(omega_max(&p, &[]));
    let r = lindblad_evolve(&rho0, &h, &ch, t, dt).unwrap();
    let exact = superop_propagator(&h.at(0.0), &ch, t).unwrap().apply(&rho0).unwrap();
    let dist = r.rho_final.trace_distance(&exact).unwrap();
    assert!(dist < 1e-6, "trace distance {dist}");
    assert!(r.trace_drift < TRACE_DRIFT_TOL);
    assert!(r.rho_final.min_eigenvalue() > -1e-6);
    let m = r.rho_final.density_matrix();
    assert!((&m - m.adjoint()).camax() < 1e-8);
}

#[test]
fn interaction_picture_matches_oracle() {
    let (p, h, ch, rho0) = driven_damped_case(8);
    let t = 3.0;
    let exact = superop_propagator(&h.at(0.0), &ch, t).unwrap().apply(&rho0).unwrap();
    let w = interaction_omega_max(&h, &ch, &[0.0], 0.25).unwrap();
    assert!(w < omega_max(&p, &[]));
    let r = lindblad_evolve_in(&rho0, &h, &ch, t, default_dt(w), "ip", Picture::Interaction).unwrap();
    let dist = r.rho_final.trace_distance(&exact).unwrap();
    assert!(dist < 1e-6, "trace distance {dist}");

    // Closed system through the ket path.
    let psi = tensor_states(&[&fock_state(1, 8).unwrap(), &transmon_state(E, 2).unwrap()]).unwrap();
    let exact = superop_propagator(&h.at(0.0), &[], t)
        .unwrap()
        .apply(&psi.clone().into_density())
        .unwrap();
    let r = lindblad_evolve_in(&psi, &h, &[], t, default_dt(w), "ip", Picture::Interaction).unwrap();
    assert!(r.rho_final.trace_distance(&exact).unwrap() < 1e-6);
}

#[test]
fn weak_qubit_decay_is_left_unresolved() {
    let nf = 12;
    let p = SystemParams::new(1.0, nf).with_kappa(1e-3);
    let ops = ladder_ops(nf, 2).unwrap();
    let h = TimeDependentHamiltonian::new(build_static_hamiltonian(&p).unwrap())
        .with_drive(ops.a.clone(), constant(cz(0.1, 0.0)))
        .unwrap();
    let ch = standard_channels(&p.clone().with_gamma(1e-5)).unwrap();
    let plus = DVector::from_element(2, C64::new(0.5f64.sqrt(), 0.0));
    let q = State::ket(plus, vec![2]).unwrap();
    let rho0 = tensor_states(&[&coherent_state(cz(1.0, 0.0), nf).unwrap(), &q])
        .unwrap()
        .into_density();

    // The step follows the cavity block only.
    let w = interaction_omega_max(&h, &ch, &[0.0], 0.1).unwrap();
    assert!(w < 2.0 * (nf as f64 - 1.0) / 4.0, "{w}");
    let t = 3.0;
    let exact = superop_propagator(&h.at(0.0), &ch, t).unwrap().apply(&rho0).unwrap();
    let r = lindblad_evolve_in(&rho0, &h, &ch, t, default_dt(w), "ip", Picture::Interaction).unwrap();
    let dist = r.rho_final.trace_distance(&exact).unwrap();
    assert!(dist < 1e-6, "trace distance {dist}");
    assert!(r.trace_drift < 1e-12);
}

#[test]
fn interaction_picture_needs_diagonal_static_part() {
    let a = annihilation(4);
    let x = Operator::new(a.add(&a.adjoint()), vec![4], "x").unwrap();
    let h = TimeDependentHamiltonian::new(x);
    assert!(interaction_omega_max(&h, &[], &[], 0.0).is_none());
    let psi = fock_state(0, 4).unwrap();
    let lab = lindblad_evolve(&psi, &h, &[], 1.0, 0.01).unwrap();
    let ip = lindblad_evolve_in(&psi, &h, &[], 1.0, 0.01, "ip", Picture::Interaction).unwrap();
    assert_eq!(lab.rho_final, ip.rho_final);
}

#[test]
fn rk4_is_fourth_order() {
    let (_, h, ch, rho0) = driven_damped_case(6);
    let t = 4.0;
    let exact = superop_propagator(&h.at(0.0), &ch, t).unwrap().apply(&rho0).unwrap();
    let err = |dt: f64| {
        let r = lindblad_evolve(&rho0, &h, &ch, t, dt).unwrap();
        (r.rho_final.density_matrix() - exact.density_matrix()).norm()
    };
    let (e1, e2) = (err(0.2), err(0.1));
    let ratio = e1 / e2;
    assert!((ratio - 16.0).abs() < 2.0, "ratio {ratio}");
}

#[test]
fn ket_and_density_paths_agree() {
    let nf = 10;
    let p = SystemParams::new(1.0, nf);
    let ops = ladder_ops(nf, 2).unwrap();
    let h = TimeDependentHamiltonian::new(build_static_hamiltonian(&p).unwrap())
        .with_drive(
            ops.sigma_minus.clone(),
            Arc::new(|t: f64| C64::from_polar(0.3, -2.0 * t)),
        )
        .unwrap();
    let psi = tensor_states(&[&fock_state(1, nf).unwrap(), &transmon_state(G, 2).unwrap()]).unwrap();
    let a = lindblad_evolve(&psi, &h, &[], 2.0, 0.01).unwrap();
    let b = lindblad_evolve(&psi.clone().into_density(), &h, &[], 2.0, 0.01).unwrap();
    assert!(a.rho_final.is_ket() && !b.rho_final.is_ket());
    let dist = a.rho_final.trace_distance(&b.rho_final).unwrap();
    assert!(dist < 1e-8, "{dist}");
    // The drive is resonant with n = 1 and moves population to e.
    let pe = b.rho_final.expect(&ops.projectors[1]).re;
    assert!(pe > 0.1);
}

#[test]
fn hamiltonian_is_hermitian_at_sampled_times() {
    let nf = 6;
    let ops = ladder_ops(nf, 2).unwrap();
    let p = SystemParams::new(1.0, nf);
    let h = TimeDependentHamiltonian::new(build_static_hamiltonian(&p).unwrap())
        .with_drive(ops.a, Arc::new(|t: f64| C64::from_polar(0.4 * (1.0 + t), 3.0 * t)))
        .unwrap()
        .with_drive(ops.sigma_minus, Arc::new(|t: f64| cz(t.sin(), t.cos())))
        .unwrap();
    for k in 0..20 {
        assert!(h.at(0.37 * k as f64).is_hermitian(1e-10));
    }
}

#[test]
fn oversized_step_reports_trace_drift() {
    let (_, h, ch, rho0) = driven_damped_case(6);
    let err = lindblad_evolve(&rho0, &h, &ch, 100.0, 50.0).unwrap_err();
    assert!(matches!(err, Error::TraceDriftExceeded { .. }), "{err}");
    assert!(err.is_numerical());
}

#[test]
fn dimension_mismatch_is_rejected() {
    let (_, h, ch, _) = driven_damped_case(6);
    let wrong = fock_state(0, 12).unwrap();
    assert!(matches!(
        lindblad_evolve(&wrong, &h, &ch, 1.0, 0.1),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn superoperator_rejects_large_dimension() {
    let h = Operator::zeros(vec![33, 2]);
    assert!(matches!(
        superop_propagator(&h, &[], 1.0),
        Err(Error::DimensionTooLarge { .. })
    ));
}

#[test]
fn parity_wait_durations() {
    let p = SystemParams::from_chi_mhz(50.0, 30);
    let w = free_parity_wait(&p, 16.0).unwrap();
    assert_relative_eq!(w.duration, 5e-9, max_relative = 1e-12);
    assert_eq!(free_parity_wait(&p, 0.0).unwrap().duration, w.duration);
    let k = 0.5e-4 * p.chi;
    let pk = p.clone().with_kerr(k);
    let wk = free_parity_wait(&pk, 16.0).unwrap();
    assert_relative_eq!(wk.duration, PI / (2.0 * p.chi * (1.0 + 8e-4)), max_relative = 1e-12);
    assert!(free_parity_wait(&p.with_kerr(-1.0 * 1e12), 16.0).is_err());
}

#[test]
fn kerr_corrected_wait_beats_uncorrected() {
    let nf = 44;
    let alpha = cz(4.0, 0.0);
    let e = transmon_state(E, 2).unwrap();
    let psi = tensor_states(&[&coherent_state(alpha, nf).unwrap(), &e]).unwrap();
    let target = tensor_states(&[&coherent_state(-alpha, nf).unwrap(), &e]).unwrap();
    for k in [1e-5, 1e-4, 5e-4, 1e-3] {
        let p = SystemParams::new(1.0, nf).with_kerr(k);
        let h = TimeDependentHamiltonian::new(build_static_hamiltonian(&p).unwrap());
        let f = |t: f64| {
            lindblad_evolve(&psi, &h, &[], t, 1.0)
                .unwrap()
                .rho_final
                .overlap_with(target.as_ket().unwrap())
        };
        let corrected = f(free_parity_wait(&p, 16.0).unwrap().duration);
        let plain = f(PI / 2.0);
        assert!(corrected > plain, "K={k}: {corrected} vs {plain}");
    }
}

#[test]
fn hopping_identity_and_full_swap() {
    let nf = 20;
    let alpha = cz(1.5, 0.0);
    let psi = tensor_states(&[&coherent_state(alpha, nf).unwrap(), &fock_state(0, nf).unwrap()]).unwrap();
    let r = two_cavity_hopping_evolve(&psi, 0.0, 0.0, 1.0, Some(0.1)).unwrap();
    assert!(r.rho_final.trace_distance(&psi).unwrap() < 1e-14);

    let xi = 1.0;
    let t = PI / (2.0 * xi);
    let r = two_cavity_hopping_evolve(&psi, xi, 0.0, t, None).unwrap();
    let target = tensor_states(&[
        &fock_state(0, nf).unwrap(),
        &coherent_state(cz(0.0, -1.0) * alpha, nf).unwrap(),
    ])
    .unwrap();
    assert!(r.rho_final.overlap_with(target.as_ket().unwrap()) > 1.0 - 1e-8);

    // Intermediate time follows the beam-splitter closed form.
    let t = 0.4;
    let r = two_cavity_hopping_evolve(&psi, xi, 0.0, t, None).unwrap();
    let target = tensor_states(&[
        &coherent_state(alpha * (xi * t).cos(), nf).unwrap(),
        &coherent_state(cz(0.0, -1.0) * alpha * (xi * t).sin(), nf).unwrap(),
    ])
    .unwrap();
    assert!(r.rho_final.overlap_with(target.as_ket().unwrap()) > 1.0 - 1e-8);
}

#[test]
fn run_results_concatenate() {
    let (_, h, ch, rho0) = driven_damped_case(4);
    let mut a = lindblad_evolve(&rho0, &h, &ch, 1.0, 0.05).unwrap();
    let b = lindblad_evolve(&a.rho_final, &h, &ch, 0.5, 0.05).unwrap();
    a.extend(b);
    assert_relative_eq!(a.total_time(), 1.5);
    assert_eq!(a.diagnostics[1].start, 1.0);
    assert_relative_eq!(*a.t_grid.last().unwrap(), 1.5, epsilon = 1e-12);
    assert!(a.t_grid.windows(2).all(|w| w[1] > w[0]));
}
