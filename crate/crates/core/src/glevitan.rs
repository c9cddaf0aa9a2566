//! Gelfand–Levitan reconstruction of `q` from eigenvalues and norming
//! constants.
//!
//! With reference potential `c` (a constant; `c = 0` is the free layer),
//! reference solutions are `φ_c(x, ν) = sin(√(ν+c) x)/√(ν+c)` and the
//! reference spectrum is `(λ_j⁰)² - c` with norming constants
//! `α_j⁰ = 1/(2(λ_j⁰)²)`. The kernel
//!
//! ```text
//! F(x,y) = Σ_j [ φ_c(x,λ_j²) φ_c(y,λ_j²) / α_j  -  φ_c(x,λ_j^c²) φ_c(y,λ_j^c²) / α_j⁰ ]
//! ```
//!
//! feeds `K(x,y) + F(x,y) + ∫₀ˣ K(x,t) F(t,y) dt = 0` on `0 ≤ y ≤ x ≤ 1`, and
//! `q(x) = c - 2 d/dx K(x,x)`.
//!
//! Modes beyond the data are completed from their large-`j` laws
//! `λ_j² = (λ_j⁰)² − c̄ + σ/(λ_j⁰)²` and `α_j = α_j⁰ (1 + κ/(λ_j⁰)²)`, with
//! `σ`, `κ` extrapolated from the data. `κ = (c̄ − q(0))/2`, and without it the
//! reconstruction is pinned to `q̂(0) = c̄`. With `σ = κ = 0` and the shifted
//! reference the completed modes drop out of `F` entirely.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::invert::inverse_e_regression;
use crate::model::{free_eigenvalue, PotentialProfile};
use crate::specfun::sinc_nu;

/// Default number of grid intervals on `[0, 1]`.
pub const DEFAULT_M_GL: usize = 400;
/// Default truncation for the free reference.
pub const DEFAULT_N_FREE: usize = 200;
/// Nyström systems whose pivot ratio exceeds this are rejected.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Reference {
    /// `c = 0`, summing `n_free` terms including completed ones. The
    /// truncation error does not decay near `z = 1`.
    Free { n_free: usize },
    /// Constant reference potential `c`; completed modes cancel exactly.
    Shifted(f64),
}

impl Reference {
    fn shift(self) -> f64 {
        match self {
            Reference::Free { .. } => 0.0,
            Reference::Shifted(c) => c,
        }
    }
}

/// Large-`j` model for the modes beyond the data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Completion {
    pub c_bar: f64,
    pub sigma: f64,
    pub kappa: f64,
}

impl Completion {
    /// `λ_j² = (λ_j⁰)² − c`, `α_j = α_j⁰`.
    pub fn constant(c_bar: f64) -> Self {
        Completion {
            c_bar,
            sigma: 0.0,
            kappa: 0.0,
        }
    }

    /// Extrapolates `c̄`, `σ` and `κ` from the last few modes.
    pub fn estimate(lambda_sq: &[f64], alpha: &[f64]) -> Self {
        let shift: Vec<f64> = lambda_sq
            .iter()
            .enumerate()
            .map(|(i, l)| free_eigenvalue(i + 1) - l)
            .collect();
        let (c_bar, slope) = inverse_e_regression(&shift);
        let weight: Vec<f64> = alpha
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let e = free_eigenvalue(i + 1);
                (2.0 * e * a - 1.0) * e
            })
            .collect();
        let kappa = if alpha.len() >= 3 {
            inverse_e_regression(&weight).0
        } else {
            0.0
        };
        Completion {
            c_bar,
            sigma: -slope,
            kappa,
        }
    }

    fn mode(&self, j: usize) -> (f64, f64) {
        let e = free_eigenvalue(j);
        (
            e - self.c_bar + self.sigma / e,
            0.5 / e * (1.0 + self.kappa / e),
        )
    }

    fn is_constant(&self) -> bool {
        self.sigma == 0.0 && self.kappa == 0.0
    }
}

/// Completed modes summed explicitly per grid interval when the completion
/// is not constant.
const TAIL_PER_INTERVAL: usize = 4;

/// `F` sampled on the uniform grid `x_k = k/m`, stored densely (symmetric).
#[derive(Clone, Debug)]
pub struct GlKernel {
    pub grid: Vec<f64>,
    pub f: DMatrix<f64>,
    pub reference: Reference,
}

#[derive(Clone, Debug)]
pub struct GlSolution {
    pub grid: Vec<f64>,
    /// Rows `K(x_i, y_k)` for `k ≤ i`.
    pub kernel: Vec<Vec<f64>>,
    /// `K(x,x)` relative to the free layer, i.e. `-½∫₀ˣ q̂`.
    pub k_diag: Vec<f64>,
    pub q_hat: Vec<f64>,
    /// Largest pivot ratio over all row systems.
    pub condition: f64,
    /// Largest residual of the discrete equation after solving.
    pub defect: f64,
}

fn check_data(lambda_sq: &[f64], alpha: &[f64]) -> Result<()> {
    if lambda_sq.len() != alpha.len() {
        return Err(Error::validation(format!(
            "{} eigenvalues but {} norming constants",
            lambda_sq.len(),
            alpha.len()
        )));
    }
    if lambda_sq.iter().chain(alpha).any(|v| !v.is_finite()) {
        return Err(Error::validation("non-finite spectral data"));
    }
    if alpha.iter().any(|&a| a <= 0.0) {
        return Err(Error::validation("norming constants must be positive"));
    }
    Ok(())
}

/// Kernel with the free reference and constant completion, as the
/// textbook formulation has it.
pub fn gl_kernel(
    lambda_sq: &[f64],
    alpha: &[f64],
    c_bar: f64,
    n_free: usize,
    m_gl: usize,
) -> Result<GlKernel> {
    gl_kernel_with(
        lambda_sq,
        alpha,
        &Completion::constant(c_bar),
        Reference::Free { n_free },
        m_gl,
    )
}

/// Kernel with an explicit completion and reference.
pub fn gl_kernel_with(
    lambda_sq: &[f64],
    alpha: &[f64],
    completion: &Completion,
    reference: Reference,
    m_gl: usize,
) -> Result<GlKernel> {
    check_data(lambda_sq, alpha)?;
    if m_gl < 4 {
        return Err(Error::validation("GL grid needs at least 4 intervals"));
    }
    let c = reference.shift();
    let n_terms = match reference {
        Reference::Free { n_free } => {
            if n_free < lambda_sq.len() {
                return Err(Error::validation(format!(
                    "n_free = {n_free} is below the number of modes ({})",
                    lambda_sq.len()
                )));
            }
            n_free
        }
        Reference::Shifted(_) if completion.is_constant() => lambda_sq.len(),
        Reference::Shifted(_) => lambda_sq.len().max(TAIL_PER_INTERVAL * m_gl),
    };
    let grid: Vec<f64> = (0..=m_gl).map(|k| k as f64 / m_gl as f64).collect();
    // each mode contributes ±φφᵀ/α; collect the columns and weights
    let mut cols: Vec<(Vec<f64>, f64)> = Vec::with_capacity(2 * n_terms);
    for j in 1..=n_terms {
        let e = free_eigenvalue(j);
        let a0 = 0.5 / e;
        let (l2, a) = match lambda_sq.get(j - 1) {
            Some(&l2) => (l2, alpha[j - 1]),
            None => completion.mode(j),
        };
        if l2 == e - c && a == a0 {
            continue;
        }
        cols.push((grid.iter().map(|&x| sinc_nu(x, l2 + c)).collect(), 1.0 / a));
        cols.push((grid.iter().map(|&x| sinc_nu(x, e)).collect(), -1.0 / a0));
    }
    let n = grid.len();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|a| {
            (a..n)
                .map(|b| cols.iter().map(|(phi, w)| w * phi[a] * phi[b]).sum())
                .collect()
        })
        .collect();
    let f = DMatrix::from_fn(n, n, |a, b| {
        if a <= b {
            upper[a][b - a]
        } else {
            upper[b][a - b]
        }
    });
    Ok(GlKernel { grid, f, reference })
}

/// Solves the GL equation row by row with a trapezoid Nyström scheme.
pub fn gl_solve(kern: &GlKernel) -> Result<GlSolution> {
    let n = kern.grid.len();
    let h = kern.grid[1] - kern.grid[0];
    let f = &kern.f;
    let rows: Vec<(Vec<f64>, f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let size = i + 1;
            let w = |k: usize| {
                if i == 0 {
                    0.0
                } else if k == 0 || k == i {
                    0.5 * h
                } else {
                    h
                }
            };
            // unknowns u_k = K(x_i, y_k): u_l + Σ_k w_k u_k F(y_k, y_l) = -F(x_i, y_l)
            let a = DMatrix::from_fn(size, size, |l, k| {
                let d = if l == k { 1.0 } else { 0.0 };
                d + w(k) * f[(k, l)]
            });
            let rhs = DVector::from_fn(size, |l, _| -f[(i, l)]);
            let lu = a.clone().lu();
            let u_diag = lu.u().diagonal();
            let (lo, hi) = u_diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), v| {
                (lo.min(v.abs()), hi.max(v.abs()))
            });
            let cond = if lo > 0.0 { hi / lo } else { f64::INFINITY };
            match lu.solve(&rhs) {
                Some(u) => {
                    let defect = (&a * &u - &rhs).amax();
                    (u.iter().copied().collect(), cond, defect)
                }
                None => (vec![f64::NAN; size], f64::INFINITY, f64::INFINITY),
            }
        })
        .collect();
    let condition = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let defect = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::numerical(
            "gelfand-levitan",
            format!("Nyström system is ill-conditioned (pivot ratio {condition:.3e})"),
        ));
    }
    let scale = 1.0 + f.amax();
    if !(defect <= 1e-8 * scale) {
        return Err(Error::numerical(
            "gelfand-levitan",
            format!("Nyström defect {defect:.3e} after solve"),
        ));
    }
    let c = kern.reference.shift();
    let kernel: Vec<Vec<f64>> = rows.into_iter().map(|r| r.0).collect();
    let k_diag: Vec<f64> = kern
        .grid
        .iter()
        .zip(&kernel)
        .map(|(&x, row)| row[row.len() - 1] - 0.5 * c * x)
        .collect();
    let q_hat = derivative(&k_diag, h)
        .into_iter()
        .map(|d| -2.0 * d)
        .collect();
    Ok(GlSolution {
        grid: kern.grid.clone(),
        kernel,
        k_diag,
        q_hat,
        condition,
        defect,
    })
}

/// Fourth-order centred differences inside, second order at the ends.
fn derivative(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    (0..n)
        .map(|i| {
            if i == 0 {
                (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h)
            } else if i == n - 1 {
                (3.0 * y[i] - 4.0 * y[i - 1] + y[i - 2]) / (2.0 * h)
            } else if i == 1 || i == n - 2 {
                (y[i + 1] - y[i - 1]) / (2.0 * h)
            } else {
                (-y[i + 2] + 8.0 * y[i + 1] - 8.0 * y[i - 1] + y[i - 2]) / (12.0 * h)
            }
        })
        .collect()
}

/// Packs `q̂` as a profile with wavenumber `k`.
pub fn recover_q(sol: &GlSolution, k: f64) -> Result<PotentialProfile> {
    PotentialProfile::new(sol.grid.clone(), sol.q_hat.clone(), k)
}

/// Full reconstruction from `(λ², α)` with the shifted reference and the
/// completion extrapolated from the data.
pub fn reconstruct(
    lambda_sq: &[f64],
    alpha: &[f64],
    m_gl: usize,
    k: f64,
) -> Result<(GlSolution, PotentialProfile)> {
    let completion = Completion::estimate(lambda_sq, alpha);
    let kern = gl_kernel_with(
        lambda_sq,
        alpha,
        &completion,
        Reference::Shifted(completion.c_bar),
        m_gl,
    )?;
    let sol = gl_solve(&kern)?;
    let q = recover_q(&sol, k)?;
    Ok((sol, q))
}
