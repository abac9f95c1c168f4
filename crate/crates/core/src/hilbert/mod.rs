//! States and operators of the truncated cavity ⊗ transmon space.
//!
//! Basis convention: subsystems are listed cavity first and the first listed
//! subsystem varies fastest, so `|n⟩⊗|j⟩` has flat index `n + n_fock * j`.
//! Transmon levels are ordered `g, e, f` and σ^z = |e⟩⟨e| − |g⟩⟨g|.

mod io;
mod operator;
mod params;
mod state;

pub use io::{load_state, save_state, StateFile, StateKind, STATE_FORMAT, STATE_FORMAT_VERSION};
pub use operator::Operator;
pub use params::{
    check_truncation, default_n_fock, ln_factorial, min_adequate_n_fock, poisson_tail, SystemParams,
    DEFAULT_DELTA_OVER_CHI, TRUNCATION_TAIL,
};
pub use state::{State, StateData, HERMITIAN_TOL, KET_NORM_TOL, POSITIVITY_TOL, TRACE_TOL};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

pub const G: usize = 0;
pub const E: usize = 1;
pub const F: usize = 2;

/// Flat index of `|n⟩⊗|level⟩`.
pub fn basis_index(n: usize, level: usize, n_fock: usize) -> usize {
    n + n_fock * level
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Truncated annihilation operator on a single mode.
pub fn annihilation(n_fock: usize) -> CsrMatrix {
    CsrMatrix::from_triplets(n_fock, n_fock, (1..n_fock).map(|n| (n - 1, n, c((n as f64).sqrt()))))
}

/// Transmon lowering operator: σ⁻ = |g⟩⟨e| for two levels, plus √2|e⟩⟨f|
/// for three.
pub fn transmon_lowering(levels: usize) -> CsrMatrix {
    CsrMatrix::from_triplets(levels, levels, (1..levels).map(|j| (j - 1, j, c((j as f64).sqrt()))))
}

pub fn projector(dim: usize, k: usize) -> CsrMatrix {
    CsrMatrix::from_triplets(dim, dim, [(k, k, c(1.0))])
}

/// Kronecker product of operators; the first operand varies fastest.
pub fn tensor(ops: &[&Operator]) -> Result<Operator> {
    let first = ops
        .first()
        .ok_or_else(|| Error::InvalidParameter("tensor of zero operators".into()))?;
    let mut matrix = first.matrix().clone();
    let mut dims = first.dims().to_vec();
    let mut label = first.label().to_string();
    for op in &ops[1..] {
        matrix = op.matrix().kron(&matrix);
        dims.extend_from_slice(op.dims());
        label = format!("{label}⊗{}", op.label());
    }
    Operator::new(matrix, dims, label)
}

/// Product state of the given factors; the first factor varies fastest.
pub fn tensor_states(states: &[&State]) -> Result<State> {
    let first = states
        .first()
        .ok_or_else(|| Error::InvalidParameter("tensor of zero states".into()))?;
    let mut dims = first.dims().to_vec();
    if states.iter().all(|s| s.is_ket()) {
        let mut v = first.as_ket().unwrap().clone();
        for s in &states[1..] {
            v = s.as_ket().unwrap().kronecker(&v);
            dims.extend_from_slice(s.dims());
        }
        Ok(State::ket_unchecked(v, dims))
    } else {
        let mut m = first.density_matrix();
        for s in &states[1..] {
            m = s.density_matrix().kronecker(&m);
            dims.extend_from_slice(s.dims());
        }
        Ok(State::density_unchecked(m, dims))
    }
}

/// Embeds a cavity operator as `A ⊗ 1_q`.
pub fn on_cavity(m: &CsrMatrix, n_transmon: usize) -> CsrMatrix {
    CsrMatrix::identity(n_transmon).kron(m)
}

/// Embeds a transmon operator as `1_c ⊗ B`.
pub fn on_transmon(m: &CsrMatrix, n_fock: usize) -> CsrMatrix {
    m.kron(&CsrMatrix::identity(n_fock))
}

/// Ladder and diagnostic operators of the cavity ⊗ transmon space.
#[derive(Clone, Debug)]
pub struct LadderOps {
    pub a: Operator,
    pub a_dagger: Operator,
    pub sigma_minus: Operator,
    /// `1_c ⊗ |j⟩⟨j|` for every transmon level.
    pub projectors: Vec<Operator>,
    pub number: Operator,
    /// exp(iπ a†a) ⊗ 1.
    pub parity: Operator,
}

pub fn ladder_ops(n_fock: usize, n_transmon: usize) -> Result<LadderOps> {
    if n_fock < 2 || n_transmon < 2 {
        return Err(Error::InvalidParameter("ladder operators need dimensions >= 2".into()));
    }
    let dims = vec![n_fock, n_transmon];
    let a = on_cavity(&annihilation(n_fock), n_transmon);
    let num = CsrMatrix::from_diagonal(&(0..n_fock).map(|n| c(n as f64)).collect::<Vec<_>>());
    let par = CsrMatrix::from_diagonal(
        &(0..n_fock)
            .map(|n| c(if n % 2 == 0 { 1.0 } else { -1.0 }))
            .collect::<Vec<_>>(),
    );
    let sm = on_transmon(&transmon_lowering(n_transmon), n_fock);
    let projectors = (0..n_transmon)
        .map(|j| {
            Operator::new(
                on_transmon(&projector(n_transmon, j), n_fock),
                dims.clone(),
                format!("|{j}⟩⟨{j}|"),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LadderOps {
        a_dagger: Operator::new(a.adjoint(), dims.clone(), "a†")?,
        a: Operator::new(a, dims.clone(), "a")?,
        sigma_minus: Operator::new(sm, dims.clone(), "σ⁻")?,
        projectors,
        number: Operator::new(on_cavity(&num, n_transmon), dims.clone(), "a†a")?,
        parity: Operator::new(on_cavity(&par, n_transmon), dims, "Π")?,
    })
}

pub fn fock_state(n: usize, n_fock: usize) -> Result<State> {
    if n >= n_fock {
        return Err(Error::IndexOutOfRange { index: n, len: n_fock });
    }
    let mut v = DVector::zeros(n_fock);
    v[n] = c(1.0);
    Ok(State::ket_unchecked(v, vec![n_fock]))
}

pub fn transmon_state(level: usize, n_transmon: usize) -> Result<State> {
    if level >= n_transmon {
        return Err(Error::IndexOutOfRange {
            index: level,
            len: n_transmon,
        });
    }
    let mut v = DVector::zeros(n_transmon);
    v[level] = c(1.0);
    Ok(State::ket_unchecked(v, vec![n_transmon]))
}

/// Unnormalized coherent-state amplitudes e^{−|α|²/2} αⁿ/√(n!) for n < n_fock.
pub fn coherent_amplitudes(alpha: C64, n_fock: usize) -> DVector<C64> {
    let mut v = DVector::zeros(n_fock);
    let mut cur = c((-alpha.norm_sqr() / 2.0).exp());
    for n in 0..n_fock {
        if n > 0 {
            cur = cur * alpha / (n as f64).sqrt();
        }
        v[n] = cur;
    }
    v
}

/// Coherent state |α⟩ in a truncated Fock space, renormalized after
/// truncation.
pub fn coherent_state(alpha: C64, n_fock: usize) -> Result<State> {
    check_truncation(alpha.norm(), n_fock)?;
    State::ket_normalized(coherent_amplitudes(alpha, n_fock), vec![n_fock])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

/// Cat state N(|α⟩ ± |−α⟩), normalized in the truncated space.
pub fn cat_state(alpha: C64, parity: Parity, n_fock: usize) -> Result<State> {
    check_truncation(alpha.norm(), n_fock)?;
    let plus = coherent_amplitudes(alpha, n_fock);
    let minus = coherent_amplitudes(-alpha, n_fock);
    let v = match parity {
        Parity::Even => plus + minus,
        Parity::Odd => plus - minus,
    };
    if parity == Parity::Odd && alpha.norm() == 0.0 {
        return Err(Error::InvalidParameter("odd cat state undefined at alpha = 0".into()));
    }
    State::ket_normalized(v, vec![n_fock])
}

/// Generator α a† − α* a on a single truncated mode.
pub fn displacement_generator(alpha: C64, n_fock: usize) -> DMatrix<C64> {
    let a = annihilation(n_fock).to_dense();
    &a.adjoint() * alpha - &a * alpha.conj()
}

/// D(α) = exp(α a† − α* a), exponentiated in the truncated space.
pub fn displacement_operator(alpha: C64, n_fock: usize) -> Result<Operator> {
    if n_fock < 2 {
        return Err(Error::InvalidParameter("n_fock must be at least 2".into()));
    }
    let d = if alpha == C64::new(0.0, 0.0) {
        DMatrix::identity(n_fock, n_fock)
    } else {
        displacement_generator(alpha, n_fock).exp()
    };
    Operator::from_dense(&d, vec![n_fock], format!("D({alpha})"))
}

/// Diagonal of the static rotating-frame Hamiltonian on the flat basis.
pub fn static_energies(params: &SystemParams) -> Result<Vec<f64>> {
    let nf = params.n_fock;
    let (chi, k) = (params.chi, params.kerr);
    let mut e = vec![0.0; params.dim()];
    for n in 0..nf {
        let nn = n as f64;
        let kerr = -k * nn * (nn - 1.0);
        e[basis_index(n, G, nf)] = kerr;
        e[basis_index(n, E, nf)] = -2.0 * chi * nn + kerr;
        match params.n_transmon {
            2 => {}
            3 => e[basis_index(n, F, nf)] = params.anharmonicity - 2.0 * chi * nn - 2.0 * params.chi_prime * nn + kerr,
            other => return Err(Error::UnsupportedTransmonLevels(other)),
        }
    }
    Ok(e)
}

/// Static Hamiltonian: −2χ a†a ⊗ |e⟩⟨e| − K a†a†aa ⊗ 1, extended by the f
/// level for three-level transmons so that the e↔f resonances sit at
/// (ω_fe − ω_eg) − 2nχ′.
pub fn build_static_hamiltonian(params: &SystemParams) -> Result<Operator> {
    params.validate()?;
    let e = static_energies(params)?;
    let diag: Vec<C64> = e.into_iter().map(c).collect();
    Operator::new(CsrMatrix::from_diagonal(&diag), params.dims(), "H0")
}
