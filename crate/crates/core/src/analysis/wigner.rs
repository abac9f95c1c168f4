use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::State;

pub const DEFAULT_WIGNER_POINTS: usize = 121;
/// Margin added on each side of |α| by the default grid.
pub const DEFAULT_WIGNER_MARGIN: f64 = 2.0;

/// Square sampling grid in phase space, in units of field amplitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn square(half_width: f64, points: usize) -> Self {
        Self {
            re_min: -half_width,
            re_max: half_width,
            im_min: -half_width,
            im_max: half_width,
            points,
        }
    }

    /// 121×121 over [−|α|−2, |α|+2]².
    pub fn default_for(alpha: f64) -> Self {
        Self::square(alpha.abs() + DEFAULT_WIGNER_MARGIN, DEFAULT_WIGNER_POINTS)
    }

    fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![0.5 * (lo + hi)];
        }
        let step = (hi - lo) / (n - 1) as f64;
        (0..n).map(|i| lo + step * i as f64).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.points == 0 || !(self.re_max >= self.re_min) || !(self.im_max >= self.im_min) {
            return Err(Error::InvalidParameter(format!("bad Wigner grid {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    pub re_axis: Vec<f64>,
    pub im_axis: Vec<f64>,
    /// `values[(i, j)]` is W at `re_axis[j] + i·im_axis[i]`.
    pub values: DMatrix<f64>,
}

impl WignerGrid {
    fn cell_area(&self) -> f64 {
        let step = |a: &[f64]| if a.len() > 1 { a[1] - a[0] } else { 1.0 };
        step(&self.re_axis) * step(&self.im_axis)
    }

    /// Riemann sum of W d²α.
    pub fn integral(&self) -> f64 {
        self.values.sum() * self.cell_area()
    }

    /// ∫ α W d²α / ∫ W d²α.
    pub fn centroid(&self) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (i, &y) in self.im_axis.iter().enumerate() {
            for (j, &x) in self.re_axis.iter().enumerate() {
                acc += C64::new(x, y) * self.values[(i, j)];
            }
        }
        acc / self.values.sum()
    }

    pub fn min(&self) -> f64 {
        self.values.min()
    }

    pub fn max(&self) -> f64 {
        self.values.max()
    }

    /// Value at the grid node nearest to `alpha`.
    pub fn nearest(&self, alpha: C64) -> f64 {
        let idx = |axis: &[f64], v: f64| {
            axis.iter()
                .enumerate()
                .min_by(|a, b| (a.1 - v).abs().total_cmp(&(b.1 - v).abs()))
                .map(|(i, _)| i)
                .unwrap_or(0)
        };
        self.values[(idx(&self.im_axis, alpha.im), idx(&self.re_axis, alpha.re))]
    }

    /// CSV with header `re_alpha,im_alpha,w`, one row per node, imaginary
    /// axis outermost.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * self.values.len() + 32);
        out.push_str("re_alpha,im_alpha,w\n");
        for (i, &y) in self.im_axis.iter().enumerate() {
            for (j, &x) in self.re_axis.iter().enumerate() {
                let _ = writeln!(out, "{x:.16e},{y:.16e},{:.16e}", self.values[(i, j)]);
            }
        }
        out
    }
}

/// Cavity density matrix of a state: the state itself when it lives on a
/// single mode, otherwise the partial trace onto subsystem 0.
pub fn cavity_density(state: &State) -> Result<DMatrix<C64>> {
    match state.dims().len() {
        1 => Ok(state.density_matrix()),
        _ => Ok(state.partial_trace(&[0])?.density_matrix()),
    }
}

/// W(α) = (2/π) tr[Π D(−α) ρ D(α)] at a single point.
///
/// The displaced parity is evaluated through its closed-form Fock matrix
/// elements (a Laguerre recurrence), so no truncated displacement is
/// involved and points far from the state are accurate.
pub fn wigner_point(rho: &DMatrix<C64>, alpha: C64) -> f64 {
    let n = rho.nrows();
    let mut w = vec![C64::new(0.0, 0.0); n];
    let two_a = 2.0 * alpha;
    w[0] = C64::from((-2.0 * alpha.norm_sqr()).exp());
    let mut acc = rho[(0, 0)].re * w[0].re;
    for k in 1..n {
        w[k] = two_a * w[k - 1] / (k as f64).sqrt();
        acc += 2.0 * (rho[(0, k)] * w[k]).re;
    }
    for m in 1..n {
        let sm = (m as f64).sqrt();
        let mut temp = w[m];
        w[m] = (two_a.conj() * temp - sm * w[m - 1]) / sm;
        acc += (rho[(m, m)] * w[m]).re;
        for k in m + 1..n {
            let next = (two_a * w[k - 1] - sm * temp) / (k as f64).sqrt();
            temp = w[k];
            w[k] = next;
            acc += 2.0 * (rho[(m, k)] * w[k]).re;
        }
    }
    2.0 * acc / PI
}

/// Wigner function of the cavity part of `state` on `grid`.
pub fn wigner(state: &State, grid: &GridSpec) -> Result<WignerGrid> {
    grid.validate()?;
    let rho = cavity_density(state)?;
    wigner_of_matrix(&rho, grid)
}

pub fn wigner_of_matrix(rho: &DMatrix<C64>, grid: &GridSpec) -> Result<WignerGrid> {
    grid.validate()?;
    if !rho.is_square() {
        return Err(Error::DimensionMismatch {
            expected: "square cavity density matrix".into(),
            found: format!("{}x{}", rho.nrows(), rho.ncols()),
        });
    }
    let re_axis = GridSpec::axis(grid.re_min, grid.re_max, grid.points);
    let im_axis = GridSpec::axis(grid.im_min, grid.im_max, grid.points);
    let rows: Vec<Vec<f64>> = im_axis
        .par_iter()
        .map(|&y| re_axis.iter().map(|&x| wigner_point(rho, C64::new(x, y))).collect())
        .collect();
    let values = DMatrix::from_fn(im_axis.len(), re_axis.len(), |i, j| rows[i][j]);
    Ok(WignerGrid {
        re_axis,
        im_axis,
        values,
    })
}

/// tr[e^{iπ a†a} ρ] of the cavity part, equal to (π/2)W(0).
pub fn cavity_parity(state: &State) -> Result<f64> {
    let rho = cavity_density(state)?;
    Ok((0..rho.nrows())
        .map(|n| if n % 2 == 0 { rho[(n, n)].re } else { -rho[(n, n)].re })
        .sum())
}

/// ⟨a⟩ of the cavity part.
pub fn cavity_mean_field(state: &State) -> Result<C64> {
    let rho = cavity_density(state)?;
    Ok((1..rho.nrows()).map(|n| (n as f64).sqrt() * rho[(n, n - 1)]).sum())
}

/// Expands a cavity ket to a density matrix, a convenience for callers that
/// hold raw vectors.
pub fn ket_density(v: &DVector<C64>) -> DMatrix<C64> {
    v * v.adjoint()
}
