use super::*;
use crate::gates::{hadamard_sequence, ideal_displacement, ApplyOptions, Compile, Encoding, LogicalState};
use crate::hilbert::{cat_state, coherent_state, default_n_fock, displacement_operator, Parity, E};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::FRAC_2_PI;

/// Displaced-parity formula evaluated literally in a padded Fock space.
fn wigner_oracle(rho: &DMatrix<C64>, alpha: C64, pad: usize) -> f64 {
    let n = rho.nrows();
    let mut big = DMatrix::zeros(pad, pad);
    big.view_mut((0, 0), (n, n)).copy_from(rho);
    let d = displacement_operator(alpha, pad).unwrap().to_dense();
    let moved = d.adjoint() * big * d;
    let parity: C64 = (0..pad)
        .map(|k| if k % 2 == 0 { moved[(k, k)] } else { -moved[(k, k)] })
        .sum();
    FRAC_2_PI * parity.re
}

fn mixed_test_state(n: usize) -> DMatrix<C64> {
    let a = DVector::from_fn(n, |i, _| {
        C64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()) / (1.0 + i as f64)
    });
    let b = DVector::from_fn(n, |i, _| {
        C64::new(1.0 / (1.0 + (i as f64 - 3.0).abs()), 0.2 * i as f64 / n as f64)
    });
    let a = &a / C64::from(a.norm());
    let b = &b / C64::from(b.norm());
    &a * a.adjoint() * C64::from(0.6) + &b * b.adjoint() * C64::from(0.4)
}

#[test]
fn wigner_matches_displaced_parity_oracle() {
    let rho = mixed_test_state(10);
    for alpha in [
        C64::new(0.0, 0.0),
        C64::new(0.4, -0.3),
        C64::new(-1.2, 0.9),
        C64::new(2.0, 1.5),
    ] {
        let fast = wigner_point(&rho, alpha);
        let slow = wigner_oracle(&rho, alpha, 90);
        assert!((fast - slow).abs() < 1e-10, "{alpha}: {fast} vs {slow}");
    }
}

#[test]
fn vacuum_peak() {
    let s = coherent_state(C64::new(0.0, 0.0), 8).unwrap();
    assert!((wigner_point(&s.density_matrix(), C64::new(0.0, 0.0)) - FRAC_2_PI).abs() < 1e-15);
}

#[test]
fn coherent_state_is_a_gaussian() {
    let beta = C64::new(1.5, -0.8);
    let s = coherent_state(beta, default_n_fock(beta.norm())).unwrap();
    let grid = wigner(&s, &GridSpec::square(4.0, 21)).unwrap();
    // Renormalizing after truncation rescales W by up to the 1e-8 tail.
    for (i, &y) in grid.im_axis.iter().enumerate() {
        for (j, &x) in grid.re_axis.iter().enumerate() {
            let expect = FRAC_2_PI * (-2.0 * (C64::new(x, y) - beta).norm_sqr()).exp();
            assert!(
                (grid.values[(i, j)] - expect).abs() < 1e-7,
                "{}",
                grid.values[(i, j)] - expect
            );
        }
    }
    assert!((grid.centroid() - beta).norm() < 1e-3);
    assert!((cavity_mean_field(&s).unwrap() - beta).norm() < 1e-8);
}

#[test]
fn parity_identity_at_origin() {
    let rho = mixed_test_state(14);
    let s = State::density(rho.clone(), vec![14]).unwrap();
    let w0 = wigner_point(&rho, C64::new(0.0, 0.0));
    assert!((PI / 2.0 * w0 - cavity_parity(&s).unwrap()).abs() < 1e-8);
}

#[test]
fn even_cat_grid_invariants() {
    let alpha = 2.5;
    let s = cat_state(C64::from(alpha), Parity::Even, default_n_fock(alpha)).unwrap();
    let grid = wigner(&s, &GridSpec::default_for(alpha)).unwrap();
    assert_eq!(grid.values.shape(), (121, 121));
    assert!(grid.max() <= FRAC_2_PI + 1e-3 && grid.min() >= -FRAC_2_PI - 1e-3);
    assert!((grid.integral() - 1.0).abs() < 0.02, "{}", grid.integral());
    assert!(grid.nearest(C64::new(0.0, 0.0)) > 0.5);
    assert!(grid.min() < -0.3);
    let csv = grid.to_csv();
    assert!(csv.starts_with("re_alpha,im_alpha,w\n"));
    assert_eq!(csv.lines().count(), 1 + 121 * 121);
}

#[test]
fn transmon_is_traced_out() {
    let p = SystemParams::new(1.0, 12);
    let mut v = DVector::zeros(p.dim());
    v[3] = C64::from(0.6);
    v[1 + E * 12] = C64::from(0.8);
    let s = State::ket(v, p.dims()).unwrap();
    let rho = cavity_density(&s).unwrap();
    assert!((rho[(3, 3)].re - 0.36).abs() < 1e-15 && (rho[(1, 1)].re - 0.64).abs() < 1e-15);
    assert!(rho[(1, 3)].norm() < 1e-15);
}

fn ideal_output(alpha: f64, s: &LogicalState, p: &SystemParams) -> State {
    let seq = hadamard_sequence(alpha, p, &Compile::Ideal).unwrap();
    apply_sequence_ideal(&seq, &s.physical(p).unwrap(), p)
}

fn apply_sequence_ideal(seq: &crate::gates::GateSequence, psi: &State, p: &SystemParams) -> State {
    crate::gates::apply_sequence(seq, psi, p, &ApplyOptions::default())
        .unwrap()
        .result
        .rho_final
}

#[test]
fn hadamard_fidelity_definitions() {
    let alpha = 3.0;
    let p = SystemParams::new(1.0, default_n_fock(alpha));
    let s = LogicalState::new(1.1, 2.3, alpha, Encoding::Computational).unwrap();
    let target = logical_ket(
        LogicalMap::hadamard().apply(s.coefficients()),
        alpha,
        Encoding::Computational,
        p.n_fock,
    )
    .unwrap();
    let mut v = DVector::zeros(p.dim());
    v.rows_mut(0, p.n_fock).copy_from(&target);
    let perfect = State::ket(v.clone(), p.dims()).unwrap();
    for def in [FidelityDefinition::Paper, FidelityDefinition::Normalized] {
        assert!((hadamard_fidelity(&perfect, &s, def).unwrap().value - 1.0).abs() < 1e-12);
    }
    let mut w = DVector::zeros(p.dim());
    w.rows_mut(E * p.n_fock, p.n_fock).copy_from(&target);
    let excited = State::ket(w, p.dims()).unwrap();
    let rec = hadamard_fidelity(&excited, &s, FidelityDefinition::Paper).unwrap();
    assert_eq!(rec.value, 0.0);
    assert_eq!(rec.g_population, 0.0);

    // Half the population in e: the paper value is scaled by exactly 1/2.
    let mut half = DVector::zeros(p.dim());
    half.rows_mut(0, p.n_fock)
        .copy_from(&(&target * C64::from(0.5f64.sqrt())));
    half.rows_mut(E * p.n_fock, p.n_fock)
        .copy_from(&(&target * C64::from(0.5f64.sqrt())));
    let half = State::ket(half, p.dims()).unwrap();
    let paper = hadamard_fidelity(&half, &s, FidelityDefinition::Paper).unwrap();
    let norm = hadamard_fidelity(&half, &s, FidelityDefinition::Normalized).unwrap();
    assert!((paper.value - 0.5).abs() < 1e-12 && (norm.value - 1.0).abs() < 1e-12);
    assert!((paper.value / norm.value - paper.g_population).abs() < 1e-12);
}

#[test]
fn bloch_sweep_single_node_matches_direct_call() {
    let alpha = 3.0;
    let p = SystemParams::new(1.0, default_n_fock(alpha));
    let seq = hadamard_sequence(alpha, &p, &Compile::Ideal).unwrap();
    let (theta, phi) = (0.9, 4.1);
    let surf = bloch_sweep(
        &seq,
        &p,
        alpha,
        &LogicalMap::hadamard(),
        &[theta],
        &[phi],
        &ApplyOptions::default(),
    )
    .unwrap();
    let s = LogicalState::new(theta, phi, alpha, Encoding::Computational).unwrap();
    let out = ideal_output(alpha, &s, &p);
    let direct = hadamard_fidelity(&out, &s, FidelityDefinition::Paper).unwrap();
    assert_eq!(surf.points.len(), 1);
    assert!((surf.points[0].fidelity_paper - direct.value).abs() < 1e-10);
}

#[test]
fn linearity_reconstructs_mixed_outputs() {
    // A sequence that leaves population in e and mixes nothing: compare the
    // reconstructed g-block with direct runs at several Bloch points.
    let alpha = 2.0;
    let p = SystemParams::new(1.0, default_n_fock(alpha + 1.0));
    let mut seq = hadamard_sequence(alpha, &p, &Compile::Ideal).unwrap();
    seq.items.truncate(3);
    let resp = LogicalResponse::measure(&seq, &p, alpha, Encoding::Computational, &ApplyOptions::default()).unwrap();
    for (theta, phi) in [(0.3, 0.2), (1.7, 3.3), (2.9, 5.9)] {
        let s = LogicalState::new(theta, phi, alpha, Encoding::Computational).unwrap();
        let direct = g_block(&apply_sequence_ideal(&seq, &s.physical(&p).unwrap(), &p)).unwrap();
        let rebuilt = resp.g_block_for(s.coefficients()).unwrap();
        assert!((direct - rebuilt).camax() < 1e-12);
    }
}

#[test]
fn ideal_hadamard_surface_respects_overlap_bound() {
    let alpha = 3.0;
    let p = SystemParams::new(1.0, default_n_fock(alpha));
    let seq = hadamard_sequence(alpha, &p, &Compile::Ideal).unwrap();
    let (thetas, phis) = bloch_grid(7, 8);
    let surf = bloch_sweep(
        &seq,
        &p,
        alpha,
        &LogicalMap::hadamard(),
        &thetas,
        &phis,
        &ApplyOptions::default(),
    )
    .unwrap();
    let bound = 1.0 - 4.0 * (-alpha * alpha / 2.0).exp();
    assert_eq!(surf.points.len(), 56);
    assert!(surf.min_paper() >= bound, "{} < {bound}", surf.min_paper());
    for pt in &surf.points {
        assert!(pt.fidelity_normalized >= pt.fidelity_paper - 1e-15);
    }
    // φ = 0 and the wrapped endpoint φ = 2π describe the same state.
    let end = bloch_sweep(
        &seq,
        &p,
        alpha,
        &LogicalMap::hadamard(),
        &[1.0],
        &[0.0, 2.0 * PI],
        &ApplyOptions::default(),
    )
    .unwrap();
    assert!((end.points[0].fidelity_paper - end.points[1].fidelity_paper).abs() < 1e-12);
}

#[test]
fn cz_targets_and_inputs() {
    let (alpha, nf) = (3.0, default_n_fock(3.0));
    let ideal: Vec<State> = (0..4)
        .map(|c| State::ket(cz_target(c / 2, c % 2, alpha, nf).unwrap(), vec![nf, nf]).unwrap())
        .collect();
    let m = cz_fidelity_matrix(
        &[ideal[0].clone(), ideal[1].clone(), ideal[2].clone(), ideal[3].clone()],
        alpha,
    )
    .unwrap();
    for r in 0..4 {
        assert!((m.matrix[r][r] - 1.0).abs() < 1e-12);
        for c in 0..4 {
            assert!((m.matrix[r][c] - m.matrix[c][r]).abs() < 1e-12);
        }
    }
    // Without a gate each product input overlaps its Bell-like target by
    // |(1 + 1 + 1 − 1)/4|² on orthogonal logical states.
    let inputs: Vec<State> = (0..4).map(|c| cz_input(c / 2, c % 2, alpha, nf).unwrap()).collect();
    let none = cz_fidelity_matrix(
        &[
            inputs[0].clone(),
            inputs[1].clone(),
            inputs[2].clone(),
            inputs[3].clone(),
        ],
        alpha,
    )
    .unwrap();
    for f in none.diagonal() {
        assert!((f - 0.25).abs() < 0.01, "{f}");
    }
}

#[test]
fn entangler_improves_with_k_without_loss() {
    let alpha = 2.0;
    let p = SystemParams::new(1.0, 21);
    let f: Vec<f64> = [1.0, 4.0, 12.0]
        .iter()
        .map(|&k| {
            parity_entangler_fidelity(alpha, default_n_omega(alpha), k, Envelope::Square, &p, None)
                .unwrap()
                .fidelity
        })
        .collect();
    assert!(f[0] < f[1] && f[1] < f[2], "{f:?}");
    assert!(f[2] > 0.99, "{f:?}");
}

#[test]
fn envelope_value() {
    let p = SystemParams::new(1.0, 50).with_kappa(1e-4);
    assert!((entangler_envelope(4.0, 10.0, &p) - (-16.0e-4 * 10.0 * PI / 2.0f64).exp()).abs() < 1e-15);
    assert!((entangler_envelope(4.0, 10.0, &p) - 0.975).abs() < 1e-3);
    assert_eq!(default_n_omega(2.0), 6);
}

#[test]
fn displaced_vacuum_centroid() {
    let p = SystemParams::new(1.0, 30);
    let d = ideal_displacement(C64::new(0.0, 2.0), p.n_fock, 2).unwrap();
    let mut v = DVector::zeros(p.dim());
    v[0] = C64::from(1.0);
    let s = d.apply(&State::ket(v, p.dims()).unwrap()).unwrap();
    let g = wigner(&s, &GridSpec::default_for(2.0)).unwrap();
    assert!((g.centroid() - C64::new(0.0, 2.0)).norm() < 1e-3);
}
