use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{basis_index, displacement_operator, Operator, E, G};
use crate::sparse::CsrMatrix;

/// Photon numbers a conditional transmon rotation acts on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotonSubset {
    All,
    Odd,
    Number(usize),
    Set(Vec<usize>),
}

impl PhotonSubset {
    pub fn contains(&self, n: usize) -> bool {
        match self {
            PhotonSubset::All => true,
            PhotonSubset::Odd => n % 2 == 1,
            PhotonSubset::Number(m) => *m == n,
            PhotonSubset::Set(s) => s.contains(&n),
        }
    }

    pub fn members(&self, n_fock: usize) -> Vec<usize> {
        (0..n_fock).filter(|&n| self.contains(n)).collect()
    }

    fn symbol(&self) -> String {
        match self {
            PhotonSubset::All => String::new(),
            PhotonSubset::Odd => "^odd".into(),
            PhotonSubset::Number(n) => format!("^{n}"),
            PhotonSubset::Set(s) => format!("^{s:?}"),
        }
    }

    pub(crate) fn label(&self, theta: f64, phi: f64) -> String {
        format!("X{}({theta:.4},{phi:.4})", self.symbol())
    }
}

/// exp(iθ/2 n̂_φ·σ) in the (g, e) basis, row-major.
pub fn rotation_block(theta: f64, phi: f64) -> [[C64; 2]; 2] {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let is = C64::new(0.0, s);
    [
        [C64::from(c), is * C64::from_polar(1.0, phi)],
        [is * C64::from_polar(1.0, -phi), C64::from(c)],
    ]
}

/// X^S_{θ,φ}: the rotation on every photon number in `subset`, identity on
/// the others and on the f level.
pub fn ideal_conditional_rotation(
    subset: &PhotonSubset,
    theta: f64,
    phi: f64,
    n_fock: usize,
    n_transmon: usize,
) -> Result<Operator> {
    check_transmon(n_transmon)?;
    let block = rotation_block(theta, phi);
    let mut trip = Vec::new();
    for n in 0..n_fock {
        let (g, e) = (basis_index(n, G, n_fock), basis_index(n, E, n_fock));
        if subset.contains(n) {
            for (r, row) in [g, e].into_iter().enumerate() {
                for (c, col) in [g, e].into_iter().enumerate() {
                    trip.push((row, col, block[r][c]));
                }
            }
        } else {
            trip.push((g, g, C64::from(1.0)));
            trip.push((e, e, C64::from(1.0)));
        }
        for level in 2..n_transmon {
            let i = basis_index(n, level, n_fock);
            trip.push((i, i, C64::from(1.0)));
        }
    }
    let d = n_fock * n_transmon;
    Operator::new(
        CsrMatrix::from_triplets(d, d, trip),
        vec![n_fock, n_transmon],
        subset.label(theta, phi),
    )
}

/// D^j_α = D(α) ⊗ |j⟩⟨j| + 1 ⊗ (1 − |j⟩⟨j|).
pub fn ideal_conditional_displacement(alpha: C64, level: usize, n_fock: usize, n_transmon: usize) -> Result<Operator> {
    check_transmon(n_transmon)?;
    if level >= n_transmon {
        return Err(Error::IndexOutOfRange {
            index: level,
            len: n_transmon,
        });
    }
    let label = format!("D^{}({alpha:.4})", ["g", "e", "f"][level]);
    displaced_levels(alpha, &[level], n_fock, n_transmon, label)
}

/// Unconditional D_α = D(α) ⊗ 1.
pub fn ideal_displacement(alpha: C64, n_fock: usize, n_transmon: usize) -> Result<Operator> {
    check_transmon(n_transmon)?;
    let levels: Vec<usize> = (0..n_transmon).collect();
    displaced_levels(alpha, &levels, n_fock, n_transmon, format!("D({alpha:.4})"))
}

fn displaced_levels(alpha: C64, levels: &[usize], n_fock: usize, n_transmon: usize, label: String) -> Result<Operator> {
    let d = displacement_operator(alpha, n_fock)?;
    let mut trip = Vec::new();
    for j in 0..n_transmon {
        if levels.contains(&j) {
            for (m, n, v) in d.matrix().iter() {
                trip.push((basis_index(m, j, n_fock), basis_index(n, j, n_fock), v));
            }
        } else {
            for n in 0..n_fock {
                let i = basis_index(n, j, n_fock);
                trip.push((i, i, C64::from(1.0)));
            }
        }
    }
    let dim = n_fock * n_transmon;
    Operator::new(
        CsrMatrix::from_triplets(dim, dim, trip),
        vec![n_fock, n_transmon],
        label,
    )
}

/// Π^e = exp(iπ a†a) ⊗ |e⟩⟨e| + 1 ⊗ (1 − |e⟩⟨e|).
pub fn ideal_parity_e(n_fock: usize, n_transmon: usize) -> Result<Operator> {
    check_transmon(n_transmon)?;
    let diag: Vec<C64> = (0..n_fock * n_transmon)
        .map(|i| {
            let (n, level) = (i % n_fock, i / n_fock);
            if level == E && n % 2 == 1 {
                C64::from(-1.0)
            } else {
                C64::from(1.0)
            }
        })
        .collect();
    Operator::new(CsrMatrix::from_diagonal(&diag), vec![n_fock, n_transmon], "Π^e")
}

/// Phase e^{iφ} on the transmon e level.
pub fn transmon_phase(phi: f64, n_fock: usize, n_transmon: usize) -> Result<Operator> {
    check_transmon(n_transmon)?;
    let diag: Vec<C64> = (0..n_fock * n_transmon)
        .map(|i| {
            if i / n_fock == E {
                C64::from_polar(1.0, phi)
            } else {
                C64::from(1.0)
            }
        })
        .collect();
    Operator::new(
        CsrMatrix::from_diagonal(&diag),
        vec![n_fock, n_transmon],
        format!("Z({phi:.4})"),
    )
}

fn check_transmon(n_transmon: usize) -> Result<()> {
    match n_transmon {
        2 | 3 => Ok(()),
        other => Err(Error::UnsupportedTransmonLevels(other)),
    }
}
