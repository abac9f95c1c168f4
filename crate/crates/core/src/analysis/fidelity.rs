use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{apply_sequence, ApplyOptions, Encoding, GateSequence, LogicalState, SequenceMetadata};
use crate::hilbert::{coherent_amplitudes, State, SystemParams, G};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FidelityDefinition {
    /// ⟨t|⟨g|ρ|g⟩|t⟩ with the g-conditioned block left unnormalized.
    Paper,
    /// The same overlap divided by tr⟨g|ρ|g⟩.
    Normalized,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityRecord {
    pub value: f64,
    pub definition: FidelityDefinition,
    pub initial: LogicalState,
    /// tr⟨g|ρ|g⟩, the factor separating the two definitions.
    pub g_population: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metadata: Option<SequenceMetadata>,
}

/// A logical operation on coefficient pairs together with the encodings it
/// reads from and writes to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogicalMap {
    pub matrix: [[C64; 2]; 2],
    pub input: Encoding,
    pub output: Encoding,
}

impl LogicalMap {
    pub fn identity(encoding: Encoding) -> Self {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self {
            matrix: [[l, o], [o, l]],
            input: encoding,
            output: encoding,
        }
    }

    pub fn hadamard() -> Self {
        let h = C64::from(FRAC_1_SQRT_2);
        Self {
            matrix: [[h, h], [h, -h]],
            input: Encoding::Computational,
            output: Encoding::Computational,
        }
    }

    pub fn not() -> Self {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self {
            matrix: [[o, l], [l, o]],
            input: Encoding::Computational,
            output: Encoding::Computational,
        }
    }

    /// diag(1, e^{iθ}).
    pub fn phase(theta: f64) -> Self {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self {
            matrix: [[l, o], [o, C64::from_polar(1.0, theta)]],
            input: Encoding::Computational,
            output: Encoding::Computational,
        }
    }

    /// Identity on coefficients, changing the encoding.
    pub fn switch(input: Encoding, output: Encoding) -> Self {
        Self {
            input,
            output,
            ..Self::identity(input)
        }
    }

    pub fn apply(&self, c: [C64; 2]) -> [C64; 2] {
        let m = &self.matrix;
        [m[0][0] * c[0] + m[0][1] * c[1], m[1][0] * c[0] + m[1][1] * c[1]]
    }
}

/// Normalized cavity ket c₀|0⟩_L + c₁|1⟩_L.
pub fn logical_ket(c: [C64; 2], alpha: f64, encoding: Encoding, n_fock: usize) -> Result<DVector<C64>> {
    let [b0, b1] = LogicalState::basis(alpha, encoding, n_fock)?;
    let v = b0 * c[0] + b1 * c[1];
    let norm = v.norm();
    if norm < 1e-12 {
        return Err(Error::InvalidState(
            "target superposition cancels in the truncated space".into(),
        ));
    }
    Ok(v / C64::from(norm))
}

/// ⟨g|ρ|g⟩ as a cavity matrix.
pub fn g_block(state: &State) -> Result<DMatrix<C64>> {
    let dims = state.dims();
    if dims.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: "cavity ⊗ transmon state".into(),
            found: format!("{dims:?}"),
        });
    }
    let nf = dims[0];
    Ok(match state.data() {
        crate::hilbert::StateData::Ket(v) => {
            let g = v.rows(G * nf, nf).into_owned();
            &g * g.adjoint()
        }
        crate::hilbert::StateData::Density(m) => m.view((G * nf, G * nf), (nf, nf)).into_owned(),
    })
}

/// Paper and normalized fidelities of a g-block against a cavity target.
pub fn block_fidelities(block: &DMatrix<C64>, target: &DVector<C64>) -> (f64, f64, f64) {
    let paper = (target.adjoint() * block * target)[(0, 0)].re.max(0.0);
    let pop = block.trace().re;
    let normalized = if pop > 0.0 { (paper / pop).min(1.0) } else { 0.0 };
    (paper.min(1.0), normalized, pop)
}

/// Fidelity of a final cavity⊗transmon state against the logical map
/// applied to `initial`.
pub fn logical_fidelity(
    rho_final: &State,
    initial: &LogicalState,
    map: &LogicalMap,
    definition: FidelityDefinition,
) -> Result<FidelityRecord> {
    let block = g_block(rho_final)?;
    let target = logical_ket(
        map.apply(initial.coefficients()),
        initial.alpha,
        map.output,
        block.nrows(),
    )?;
    let (paper, normalized, pop) = block_fidelities(&block, &target);
    Ok(FidelityRecord {
        value: match definition {
            FidelityDefinition::Paper => paper,
            FidelityDefinition::Normalized => normalized,
        },
        definition,
        initial: *initial,
        g_population: pop,
        metadata: None,
    })
}

pub fn hadamard_fidelity(
    rho_final: &State,
    psi0: &LogicalState,
    definition: FidelityDefinition,
) -> Result<FidelityRecord> {
    logical_fidelity(rho_final, psi0, &LogicalMap::hadamard(), definition)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    pub theta: f64,
    pub phi: f64,
    pub fidelity_paper: f64,
    pub fidelity_normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochSurface {
    pub alpha: f64,
    pub points: Vec<BlochPoint>,
}

impl BlochSurface {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,phi,fidelity_paper,fidelity_normalized\n");
        for p in &self.points {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                p.theta, p.phi, p.fidelity_paper, p.fidelity_normalized
            ));
        }
        out
    }

    pub fn min_paper(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.fidelity_paper)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Images of |b_i⟩⟨b_j| under a sequence, restricted to the g-block.
#[derive(Clone, Debug)]
pub struct LogicalResponse {
    pub alpha: f64,
    pub input: Encoding,
    blocks: [[DMatrix<C64>; 2]; 2],
}

impl LogicalResponse {
    /// Runs the sequence on |0⟩_L, |1⟩_L and the two superpositions
    /// (|0⟩_L + |1⟩_L) and (|0⟩_L + i|1⟩_L); the rest follows by linearity.
    pub fn measure(
        seq: &GateSequence,
        params: &SystemParams,
        alpha: f64,
        input: Encoding,
        opts: &ApplyOptions,
    ) -> Result<Self> {
        let [b0, b1] = LogicalState::basis(alpha, input, params.n_fock)?;
        let i = C64::new(0.0, 1.0);
        let inputs = [b0.clone(), b1.clone(), &b0 + &b1, &b0 + &b1 * i];
        let out: Vec<Result<DMatrix<C64>>> = inputs
            .par_iter()
            .map(|cav| {
                let n2 = cav.norm_squared();
                let mut v = DVector::zeros(params.dim());
                v.rows_mut(0, params.n_fock).copy_from(&(cav / C64::from(n2.sqrt())));
                let psi = State::ket(v, params.dims())?;
                let run = apply_sequence(seq, &psi, params, opts)?;
                Ok(g_block(&run.result.rho_final)? * C64::from(n2))
            })
            .collect();
        let mut out = out.into_iter().collect::<Result<Vec<_>>>()?.into_iter();
        let (r0, r1, rp, ri) = (
            out.next().unwrap(),
            out.next().unwrap(),
            out.next().unwrap(),
            out.next().unwrap(),
        );
        let x = &rp - &r0 - &r1;
        let y = &ri - &r0 - &r1;
        let half = C64::from(0.5);
        let b01 = (&x + &y * i) * half;
        let b10 = (&x - &y * i) * half;
        Ok(Self {
            alpha,
            input,
            blocks: [[r0, b01], [b10, r1]],
        })
    }

    /// g-block output for the input c₀|0⟩_L + c₁|1⟩_L (normalized).
    pub fn g_block_for(&self, c: [C64; 2]) -> Result<DMatrix<C64>> {
        let n = self.blocks[0][0].nrows();
        let [b0, b1] = LogicalState::basis(self.alpha, self.input, n)?;
        let norm2 = (&b0 * c[0] + &b1 * c[1]).norm_squared();
        let mut m = DMatrix::zeros(n, n);
        for a in 0..2 {
            for b in 0..2 {
                m += &self.blocks[a][b] * (c[a] * c[b].conj());
            }
        }
        Ok(m / C64::from(norm2))
    }
}

/// Fidelity surface of a sequence over the logical Bloch sphere. Node order
/// is θ outermost, then φ.
pub fn bloch_sweep(
    seq: &GateSequence,
    params: &SystemParams,
    alpha: f64,
    map: &LogicalMap,
    thetas: &[f64],
    phis: &[f64],
    opts: &ApplyOptions,
) -> Result<BlochSurface> {
    if thetas.is_empty() || phis.is_empty() {
        return Err(Error::InvalidParameter("Bloch sweep grid is empty".into()));
    }
    let response = LogicalResponse::measure(seq, params, alpha, map.input, opts)?;
    bloch_surface(&response, map, thetas, phis)
}

pub fn bloch_surface(
    response: &LogicalResponse,
    map: &LogicalMap,
    thetas: &[f64],
    phis: &[f64],
) -> Result<BlochSurface> {
    let mut points = Vec::with_capacity(thetas.len() * phis.len());
    for &theta in thetas {
        for &phi in phis {
            let s = LogicalState {
                theta,
                phi,
                alpha: response.alpha,
                encoding: map.input,
            };
            let block = response.g_block_for(s.coefficients())?;
            let target = logical_ket(map.apply(s.coefficients()), response.alpha, map.output, block.nrows())?;
            let (paper, normalized, _) = block_fidelities(&block, &target);
            points.push(BlochPoint {
                theta,
                phi,
                fidelity_paper: paper,
                fidelity_normalized: normalized,
            });
        }
    }
    Ok(BlochSurface {
        alpha: response.alpha,
        points,
    })
}

/// Evenly spaced Bloch angles: θ over [0, π] inclusive, φ over [0, 2π)
/// with the endpoint excluded.
pub fn bloch_grid(n_theta: usize, n_phi: usize) -> (Vec<f64>, Vec<f64>) {
    use std::f64::consts::PI;
    let thetas = if n_theta == 1 {
        vec![0.0]
    } else {
        (0..n_theta).map(|i| PI * i as f64 / (n_theta - 1) as f64).collect()
    };
    let phis = (0..n_phi).map(|j| 2.0 * PI * j as f64 / n_phi as f64).collect();
    (thetas, phis)
}

/// Two-cavity product ket |a⟩⊗|b⟩ with the first cavity fastest.
fn product(a: &DVector<C64>, b: &DVector<C64>) -> DVector<C64> {
    let n = a.len();
    DVector::from_fn(n * b.len(), |i, _| a[i % n] * b[i / n])
}

fn sign(i: usize) -> C64 {
    C64::from(if i % 2 == 0 { 1.0 } else { -1.0 })
}

/// |ψ_ij⟩ = (|0⟩_L + (−1)^i|1⟩_L) ⊗ (|0⟩_L + (−1)^j|1⟩_L), normalized.
pub fn cz_input(i: usize, j: usize, alpha: f64, n_fock: usize) -> Result<State> {
    crate::hilbert::check_truncation(alpha, n_fock)?;
    let zero = coherent_amplitudes(C64::new(0.0, 0.0), n_fock);
    let one = coherent_amplitudes(C64::from(alpha), n_fock);
    let a = &zero + &one * sign(i);
    let b = &zero + &one * sign(j);
    State::ket_normalized(product(&a, &b), vec![n_fock, n_fock])
}

/// |φ_ij⟩ = (|00⟩ + (−1)^i|10⟩ + (−1)^j|01⟩ − (−1)^{i+j}|11⟩), normalized,
/// with the first label on cavity 1.
pub fn cz_target(i: usize, j: usize, alpha: f64, n_fock: usize) -> Result<DVector<C64>> {
    crate::hilbert::check_truncation(alpha, n_fock)?;
    let z = coherent_amplitudes(C64::new(0.0, 0.0), n_fock);
    let o = coherent_amplitudes(C64::from(alpha), n_fock);
    let v = product(&z, &z) + product(&o, &z) * sign(i) + product(&z, &o) * sign(j) - product(&o, &o) * sign(i + j);
    let norm = v.norm();
    Ok(v / C64::from(norm))
}

/// Fidelities of the four CZ outputs against every target: entry `[r][c]`
/// compares the output for input r = 2i + j with target c. The diagonal
/// holds the gate fidelities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CzFidelityMatrix {
    pub alpha: f64,
    pub matrix: [[f64; 4]; 4],
}

impl CzFidelityMatrix {
    pub fn diagonal(&self) -> [f64; 4] {
        [
            self.matrix[0][0],
            self.matrix[1][1],
            self.matrix[2][2],
            self.matrix[3][3],
        ]
    }
}

pub fn cz_fidelity_matrix(finals: &[State; 4], alpha: f64) -> Result<CzFidelityMatrix> {
    let nf = finals[0].dims()[0];
    let mut matrix = [[0.0; 4]; 4];
    for (c, col) in (0..4)
        .map(|c| (c, cz_target(c / 2, c % 2, alpha, nf)))
        .collect::<Vec<_>>()
    {
        let t = col?;
        for (r, rho) in finals.iter().enumerate() {
            if rho.dims() != [nf, nf] {
                return Err(Error::DimensionMismatch {
                    expected: format!("[{nf}, {nf}]"),
                    found: format!("{:?}", rho.dims()),
                });
            }
            matrix[r][c] = rho.overlap_with(&t);
        }
    }
    Ok(CzFidelityMatrix { alpha, matrix })
}
