use num_complex::Complex64 as C64;

use crate::sparse::{add_adjoint, CsrMatrix};

use super::{Coefficient, CollapseChannel, TimeDependentHamiltonian};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

struct DriveScatter {
    coefficient: Coefficient,
    /// Positions in the union pattern receiving `c(t) * value`.
    direct: Vec<(usize, C64)>,
    /// Positions receiving `conj(c(t)) * value` (the adjoint operator).
    adjoint: Vec<(usize, C64)>,
}

/// Right-hand side of the Lindblad equation on a fixed sparsity pattern.
///
/// The effective Hamiltonian `H − (i/2) Σ r L†L + Σ (c O + c* O†)` shares
/// one CSR pattern for all times; only its values are refreshed per stage.
///
/// In the interaction frame of a diagonal static Hamiltonian `H0 = diag(E)`
/// every entry `(i, j)` picks up the phase `e^{i(E_i − E_j)t}` and `H0`
/// itself drops out.
pub struct LindbladKernel {
    dim: usize,
    pattern: CsrMatrix,
    base: Vec<C64>,
    drives: Vec<DriveScatter>,
    jumps: Vec<CsrMatrix>,
    frame: Option<Frame>,
}

struct Frame {
    energies: Vec<f64>,
    /// `E_i − E_j` per entry of the union pattern.
    pattern_freq: Vec<f64>,
    jump_freq: Vec<Vec<f64>>,
}

fn position(pattern: &CsrMatrix, i: usize, j: usize) -> usize {
    let start = pattern.indptr()[i];
    let row = &pattern.indices()[start..pattern.indptr()[i + 1]];
    start + row.binary_search(&j).expect("entry missing from union pattern")
}

fn scatter(pattern: &CsrMatrix, m: &CsrMatrix) -> Vec<(usize, C64)> {
    m.iter().map(|(i, j, v)| (position(pattern, i, j), v)).collect()
}

fn entry_freqs(m: &CsrMatrix, e: &[f64]) -> Vec<f64> {
    m.iter().map(|(i, j, _)| e[i] - e[j]).collect()
}

/// Diagonal of `h` when it has no off-diagonal entries.
pub fn diagonal_energies(h: &CsrMatrix) -> Option<Vec<f64>> {
    if h.iter().any(|(i, j, v)| i != j && v != ZERO) {
        return None;
    }
    Some((0..h.nrows()).map(|i| h.get(i, i).re).collect())
}

fn rotate(values: &mut [C64], freq: &[f64], t: f64) {
    for (v, &w) in values.iter_mut().zip(freq) {
        if w != 0.0 {
            *v *= C64::from_polar(1.0, w * t);
        }
    }
}

impl LindbladKernel {
    pub fn new(h: &TimeDependentHamiltonian, channels: &[CollapseChannel]) -> Self {
        let dim = h.static_part().dim();
        let active: Vec<&CollapseChannel> = channels.iter().filter(|c| c.rate > 0.0).collect();

        let mut static_eff = h.static_part().matrix().clone();
        for ch in &active {
            let l = ch.operator.matrix();
            let ldl = l.adjoint().matmul(l);
            static_eff = static_eff.add(&ldl.scale(C64::new(0.0, -0.5 * ch.rate)));
        }

        let one = C64::new(1.0, 0.0);
        let mut structural: Vec<(usize, usize, C64)> = static_eff.iter().map(|(i, j, _)| (i, j, one)).collect();
        structural.extend((0..dim).map(|i| (i, i, one)));
        let adjoints: Vec<CsrMatrix> = h.drive_terms().iter().map(|d| d.operator.matrix().adjoint()).collect();
        for (d, adj) in h.drive_terms().iter().zip(&adjoints) {
            structural.extend(d.operator.matrix().iter().map(|(i, j, _)| (i, j, one)));
            structural.extend(adj.iter().map(|(i, j, _)| (i, j, one)));
        }
        let pattern = CsrMatrix::from_triplets(dim, dim, structural);

        let mut base = vec![ZERO; pattern.nnz()];
        for (p, v) in scatter(&pattern, &static_eff) {
            base[p] += v;
        }
        let drives = h
            .drive_terms()
            .iter()
            .zip(&adjoints)
            .map(|(d, adj)| DriveScatter {
                coefficient: d.coefficient.clone(),
                direct: scatter(&pattern, d.operator.matrix()),
                adjoint: scatter(&pattern, adj),
            })
            .collect();
        let jumps = active
            .iter()
            .map(|ch| ch.operator.matrix().scale(C64::new(ch.rate.sqrt(), 0.0)))
            .collect();
        Self {
            dim,
            pattern,
            base,
            drives,
            jumps,
            frame: None,
        }
    }

    /// Kernel in the interaction frame of the static part, which must be
    /// diagonal. Returns `None` otherwise.
    pub fn interaction(h: &TimeDependentHamiltonian, channels: &[CollapseChannel]) -> Option<Self> {
        let energies = diagonal_energies(h.static_part().matrix())?;
        let mut k = Self::new(h, channels);
        for (i, &e) in energies.iter().enumerate() {
            let p = position(&k.pattern, i, i);
            k.base[p] -= e;
        }
        let pattern_freq = entry_freqs(&k.pattern, &energies);
        let jump_freq = k.jumps.iter().map(|l| entry_freqs(l, &energies)).collect();
        k.frame = Some(Frame {
            energies,
            pattern_freq,
            jump_freq,
        });
        Some(k)
    }

    /// Static energies removed by the interaction frame, if any.
    pub fn frame_energies(&self) -> Option<&[f64]> {
        self.frame.as_ref().map(|f| f.energies.as_slice())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_jumps(&self) -> bool {
        !self.jumps.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.pattern.nnz()
    }

    /// Values of the effective Hamiltonian at time `t` on the union pattern.
    pub fn hamiltonian_values(&self, t: f64, out: &mut [C64]) {
        out.copy_from_slice(&self.base);
        for d in &self.drives {
            let c = (d.coefficient)(t);
            if c == ZERO {
                continue;
            }
            let cc = c.conj();
            for &(p, v) in &d.direct {
                out[p] += c * v;
            }
            for &(p, v) in &d.adjoint {
                out[p] += cc * v;
            }
        }
        if let Some(f) = &self.frame {
            rotate(out, &f.pattern_freq, t);
        }
    }

    pub fn new_jump_values(&self) -> Vec<Vec<C64>> {
        self.jumps.iter().map(|l| l.values().to_vec()).collect()
    }

    /// Jump operator values at time `t`; constant outside the interaction
    /// frame.
    pub fn jump_values(&self, t: f64, out: &mut [Vec<C64>]) {
        let Some(f) = &self.frame else { return };
        for ((o, l), w) in out.iter_mut().zip(&self.jumps).zip(&f.jump_freq) {
            o.copy_from_slice(l.values());
            rotate(o, w, t);
        }
    }

    pub fn new_values(&self) -> Vec<C64> {
        vec![ZERO; self.pattern.nnz()]
    }

    /// `out = L(ρ)` for column-major `rho` with Hamiltonian values `hv` and
    /// jump values `jv`.
    pub fn density_rhs(&self, hv: &[C64], jv: &[Vec<C64>], rho: &[C64], out: &mut [C64], tmp: &mut [C64]) {
        let d = self.dim;
        self.pattern.left_mul_cols(hv, rho, tmp, d, false);
        for x in tmp.iter_mut() {
            *x = C64::new(x.im, -x.re);
        }
        add_adjoint(tmp, out, d);
        for (l, v) in self.jumps.iter().zip(jv) {
            l.left_mul_cols(v, rho, tmp, d, false);
            l.right_mul_adjoint_cols_with(v, tmp, out, d, true);
        }
    }

    /// `out = −i H ψ`, valid only without collapse channels.
    pub fn ket_rhs(&self, hv: &[C64], psi: &[C64], out: &mut [C64]) {
        self.pattern.mul_vec_into(hv, psi, out);
        for x in out.iter_mut() {
            *x *= -I;
        }
    }
}
