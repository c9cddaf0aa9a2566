//! Spectral data from boundary data, and the characteristic function rebuilt
//! as an infinite product over its zeros.
//!
//! [`extract_spectral_data`] fits the poles `λ_j²` and residues `t_j` of the
//! sampled `G(λ)`. [`ProductModel`] then supplies `γ`, the product form of
//! `W(ν)` and the derivatives `b_j = Ẇ(λ_j²)`, from which
//! `α_j = t_j b_j²` and the spectral function follow.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freelayer::{free_power_tail, free_tail_product};
use crate::model::{
    free_eigenvalue, CurveKind, Jump, Mode, SampledCurve, SpectralData, SpectralFunction,
};
use crate::numerics::brent;
use crate::specfun::free_green;
use crate::synth::Tail;

/// Result of the pole fit.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleFit {
    pub modes: SpectralData,
    /// Shift of the tail model that best fits `G` (0 without tail). It
    /// absorbs everything the explicit modes do not and is not a reliable
    /// estimate of `∫q`; see [`asymptotic_shift`].
    pub c_bar: f64,
    /// RMS of the relative misfit `(model − G)/G` over the samples.
    pub residual: f64,
    pub n_fitted: usize,
    /// Number of pole pairs merged because they coincided.
    pub merged: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub tail: Tail,
    pub max_iter: usize,
    /// Largest acceptable RMS relative misfit.
    pub tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tail: Tail::ConstantShift,
            max_iter: 300,
            tol: 1e-3,
        }
    }
}

/// Poles closer than this (relative) are treated as one.
pub const MERGE_TOL: f64 = 1e-9;

struct Problem<'a> {
    l2: Vec<f64>,
    g: &'a [f64],
    m: usize,
    tail: Tail,
    /// Fit the first-order corrections `τ`, `σ` of the tail modes.
    with_corrections: bool,
    /// Last tail mode summed explicitly.
    explicit_end: usize,
    /// `S_k(explicit_end)` for `k = 1, 2, ...`
    power_tails: Vec<f64>,
}

/// Tail sums over `j > m` at `s = λ² − c̄`, with `e_j = (λ_j⁰)²`:
/// `Σ 2/(s+e_j)` (shifted free modes), `Σ 1/(e_j(s+e_j))` (shape of `τ`),
/// `−2 Σ 1/(e_j(s+e_j)²)` (shape of `σ`), and their `s`-derivatives.
#[derive(Debug, Clone, Copy, Default)]
struct TailSums {
    value: [f64; 3],
    slope: [f64; 3],
}

/// Model evaluated at one parameter vector.
struct Eval {
    mu: Vec<f64>,
    /// Residues `t_j`, then `τ`, `σ` when fitted.
    t: DVector<f64>,
    r: DVector<f64>,
    /// Orthonormal basis of the range of the linear design matrix.
    range: DMatrix<f64>,
    tails: Vec<TailSums>,
}

impl Problem<'_> {
    /// Parameters are `ln μ_j` followed by `c̄` when the tail is on.
    fn unpack(&self, p: &[f64]) -> (Vec<f64>, f64) {
        let mu = p[..self.m].iter().map(|v| v.exp()).collect();
        let c_bar = if self.tail == Tail::ConstantShift {
            p[self.m]
        } else {
            0.0
        };
        (mu, c_bar)
    }

    fn tail_sums(&self, s: f64) -> TailSums {
        let mut ts = TailSums::default();
        if self.tail == Tail::Off {
            return ts;
        }
        let (v, d) = (&mut ts.value, &mut ts.slope);
        for j in (self.m + 1..=self.explicit_end).rev() {
            let e = free_eigenvalue(j);
            let w = 1.0 / (s + e);
            v[0] += 2.0 * w;
            v[1] += w / e;
            v[2] -= 2.0 * w * w / e;
            d[0] -= 2.0 * w * w;
            d[1] -= w * w / e;
            d[2] += 4.0 * w * w * w / e;
        }
        // past the explicit range, expand in powers of s/e_j; pt[i] = S_{i+1}
        let pt = &self.power_tails;
        let mut sk = 1.0;
        for k in 0..pt.len() - 4 {
            let kf = k as f64;
            v[0] += 2.0 * sk * pt[k];
            v[1] += sk * pt[k + 1];
            v[2] -= 2.0 * (kf + 1.0) * sk * pt[k + 2];
            d[0] -= 2.0 * (kf + 1.0) * sk * pt[k + 1];
            d[1] -= (kf + 1.0) * sk * pt[k + 2];
            d[2] += 2.0 * (kf + 1.0) * (kf + 2.0) * sk * pt[k + 3];
            sk *= -s;
            if (sk * pt[k]).abs() <= 1e-18 * v[0].abs() {
                break;
            }
        }
        ts
    }

    fn n_linear(&self) -> usize {
        self.m + if self.with_corrections { 2 } else { 0 }
    }

    /// Relative residuals with the linear coefficients eliminated by least
    /// squares.
    fn evaluate(&self, p: &[f64]) -> Option<Eval> {
        let (mu, c_bar) = self.unpack(p);
        if mu.iter().any(|v| !v.is_finite()) || !c_bar.is_finite() {
            return None;
        }
        if self.tail == Tail::ConstantShift && c_bar >= self.l2[0] + free_eigenvalue(self.m + 1) {
            return None;
        }
        let n = self.l2.len();
        let tails: Vec<TailSums> = self
            .l2
            .iter()
            .map(|&l2| self.tail_sums(l2 - c_bar))
            .collect();
        let a = DMatrix::from_fn(n, self.n_linear(), |i, j| {
            if j < self.m {
                1.0 / ((self.l2[i] + mu[j]) * self.g[i])
            } else {
                tails[i].value[j - self.m + 1] / self.g[i]
            }
        });
        let y = DVector::from_fn(n, |i, _| 1.0 - tails[i].value[0] / self.g[i]);
        let svd = a.clone().svd(true, true);
        let (u, vt) = (svd.u.as_ref()?, svd.v_t.as_ref()?);
        let cutoff = 1e-15 * svd.singular_values.max();
        let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
        let mut t = DVector::zeros(a.ncols());
        for k in 0..rank {
            let coef = u.column(k).dot(&y) / svd.singular_values[k];
            t += vt.row(k).transpose() * coef;
        }
        let r = &a * &t - y;
        if r.iter().any(|v| !v.is_finite()) {
            return None;
        }
        Some(Eval {
            mu,
            t,
            r,
            range: u.columns(0, rank).into_owned(),
            tails,
        })
    }

    /// Kaufman's variable-projection Jacobian, `P⊥ (∂A/∂p_k · t − ∂y/∂p_k)`.
    fn jacobian(&self, ev: &Eval, n_params: usize) -> DMatrix<f64> {
        let n = self.l2.len();
        let mut jac = DMatrix::zeros(n, n_params);
        for k in 0..n_params {
            let w = DVector::from_fn(n, |i, _| {
                if k < self.m {
                    let d = self.l2[i] + ev.mu[k];
                    -ev.mu[k] * ev.t[k] / (d * d * self.g[i])
                } else {
                    // ∂/∂c̄ = −∂/∂s
                    let sl = ev.tails[i].slope;
                    let mut da_t = 0.0;
                    if self.with_corrections {
                        da_t = -(sl[1] * ev.t[self.m] + sl[2] * ev.t[self.m + 1]);
                    }
                    (da_t - sl[0]) / self.g[i]
                }
            });
            let proj = &ev.range * (ev.range.transpose() * &w);
            jac.set_column(k, &(w - proj));
        }
        jac
    }
}

/// `c̄₀` from the small-λ intercept: `free_green(λ_min² − c̄₀) = G(λ_min)`.
fn intercept_shift(l2_min: f64, g_min: f64) -> f64 {
    let hi = l2_min + 0.25 * PI * PI - 1e-9;
    let lo = -1e6;
    let f = |c: f64| free_green(l2_min - c) - g_min;
    if f(lo) > 0.0 {
        return lo;
    }
    brent(f, lo, hi, 1e-13, 200).unwrap_or(0.0)
}

struct LmRun {
    p: Vec<f64>,
    t: Vec<f64>,
    cost: f64,
    iterations: usize,
    trace: Vec<(usize, f64, f64)>,
}

/// Levenberg–Marquardt on the variable-projection residual. Steps come from
/// an SVD of the column-scaled Jacobian, never from normal equations.
fn levenberg_marquardt(prob: &Problem, mut p: Vec<f64>, max_iter: usize) -> Result<LmRun> {
    let n = prob.l2.len();
    let np = p.len();
    let mut ev = prob
        .evaluate(&p)
        .ok_or_else(|| Error::numerical("extract_spectral_data", "seed is not evaluable"))?;
    let mut cost = ev.r.norm_squared();
    let mut scale = vec![0.0f64; np];
    let mut damping = f64::NAN;
    let mut trace = Vec::new();
    let mut iterations = 0;

    for iter in 0..max_iter {
        iterations = iter + 1;
        if cost < 1e-32 {
            break;
        }
        let mut jac = prob.jacobian(&ev, np);
        for (k, s) in scale.iter_mut().enumerate().take(np) {
            *s = s.max(jac.column(k).norm());
            let sk = if *s > 0.0 { *s } else { 1.0 };
            jac.column_mut(k).scale_mut(1.0 / sk);
        }
        let svd = jac.svd(true, true);
        let (u, vt) = (svd.u.as_ref().unwrap(), svd.v_t.as_ref().unwrap());
        let sv = &svd.singular_values;
        let smax2 = sv.max().powi(2).max(1e-300);
        if damping.is_nan() {
            damping = 1e-3 * smax2;
        }
        let ur = u.transpose() * &ev.r;
        let mut accepted = false;
        let mut converged = false;
        while damping <= 1e12 * smax2 {
            let mut step = DVector::zeros(np);
            for i in 0..sv.len() {
                step -= vt.row(i).transpose() * (sv[i] * ur[i] / (sv[i] * sv[i] + damping));
            }
            let trial: Vec<f64> = (0..np)
                .map(|k| p[k] + step[k] / if scale[k] > 0.0 { scale[k] } else { 1.0 })
                .collect();
            if let Some(next) = prob.evaluate(&trial) {
                let ct = next.r.norm_squared();
                if ct < cost {
                    let small =
                        (0..np).all(|k| (trial[k] - p[k]).abs() <= 1e-15 * p[k].abs().max(1.0));
                    converged = small || cost - ct <= 1e-12 * cost;
                    p = trial;
                    ev = next;
                    cost = ct;
                    damping /= 5.0;
                    accepted = true;
                    break;
                }
            }
            damping *= 4.0;
        }
        trace.push((iter, (cost / n as f64).sqrt(), damping / smax2));
        if !accepted || converged {
            break;
        }
    }
    Ok(LmRun {
        p,
        t: ev.t.iter().copied().collect(),
        cost,
        iterations,
        trace,
    })
}

/// Fits `Σ_{j≤m} t_j/(λ²+λ_j²)` plus the constant-shift tail to the samples.
pub fn extract_spectral_data(curve: &SampledCurve, m: usize) -> Result<PoleFit> {
    extract_spectral_data_with(curve, m, &FitOptions::default())
}

pub fn extract_spectral_data_with(
    curve: &SampledCurve,
    m: usize,
    opts: &FitOptions,
) -> Result<PoleFit> {
    if curve.kind() != CurveKind::G_of_lambda {
        return Err(Error::validation(
            "extract_spectral_data expects a G(λ) curve",
        ));
    }
    if m == 0 {
        return Err(Error::validation(
            "extract_spectral_data: mode count must be ≥ 1",
        ));
    }
    let lambdas = curve.abscissae();
    let g = curve.real_values();
    let n_params = m + usize::from(opts.tail == Tail::ConstantShift);
    if lambdas.len() < 2 * n_params + 1 {
        return Err(Error::validation(format!(
            "extract_spectral_data: {} samples cannot determine {} modes",
            lambdas.len(),
            m
        )));
    }
    if lambdas[0] <= 0.0 || g.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::validation(
            "extract_spectral_data: needs λ > 0 and G > 0 (all-positive spectrum)",
        ));
    }
    let l2: Vec<f64> = lambdas.iter().map(|l| l * l).collect();
    let explicit_end = (m + 400)
        .max(40 * m)
        .max((10.0 * l2[l2.len() - 1].sqrt() / PI) as usize);
    let mut prob = Problem {
        l2,
        g: &g,
        m,
        tail: opts.tail,
        with_corrections: false,
        explicit_end,
        power_tails: (1..=16).map(|k| free_power_tail(k, explicit_end)).collect(),
    };

    let c0 = intercept_shift(prob.l2[0], g[0]).min(0.5 * free_eigenvalue(1));
    let mut p: Vec<f64> = (1..=m).map(|j| (free_eigenvalue(j) - c0).ln()).collect();
    if opts.tail == Tail::ConstantShift {
        p.push(c0);
    }
    let n = prob.l2.len();
    // The shift and the corrections are nearly collinear at low λ: settle the
    // pure shift first, then free the corrections from there.
    let mut run = levenberg_marquardt(&prob, p, opts.max_iter)?;
    if opts.tail == Tail::ConstantShift {
        prob.with_corrections = true;
        let second = levenberg_marquardt(&prob, run.p.clone(), opts.max_iter)?;
        if second.cost <= run.cost {
            let mut trace = run.trace;
            trace.extend(second.trace);
            run = LmRun {
                iterations: run.iterations + second.iterations,
                trace,
                ..second
            };
        }
    }
    let LmRun {
        p,
        t,
        cost,
        iterations,
        trace,
    } = run;

    let residual = (cost / n as f64).sqrt();
    if !(residual <= opts.tol) {
        let mut detail = format!(
            "fit did not converge: RMS relative misfit {residual:e} > {:e}\n",
            opts.tol
        );
        for (it, rms, d) in trace.iter().rev().take(10).rev() {
            let _ = writeln!(detail, "  iter {it:4}  rms {rms:.3e}  damping {d:.1e}");
        }
        return Err(Error::numerical("extract_spectral_data", detail));
    }
    let (mu, c_bar) = prob.unpack(&p);
    let mut modes: Vec<Mode> = mu
        .iter()
        .zip(&t)
        .map(|(&lambda_sq, &t)| Mode { lambda_sq, t })
        .collect();
    if let Some(bad) = modes.iter().find(|md| !(md.t > 0.0)) {
        return Err(Error::numerical(
            "extract_spectral_data",
            format!(
                "fitted residue t = {} at λ² = {} is not positive",
                bad.t, bad.lambda_sq
            ),
        ));
    }
    modes.sort_by(|a, b| a.lambda_sq.total_cmp(&b.lambda_sq));
    let mut merged_modes: Vec<Mode> = Vec::with_capacity(modes.len());
    let mut merged = 0;
    for md in modes {
        match merged_modes.last_mut() {
            Some(last)
                if (md.lambda_sq - last.lambda_sq).abs()
                    <= MERGE_TOL * md.lambda_sq.abs().max(1.0) =>
            {
                last.t += md.t;
                merged += 1;
            }
            _ => merged_modes.push(md),
        }
    }
    Ok(PoleFit {
        n_fitted: merged_modes.len(),
        modes: SpectralData::new(merged_modes)?,
        c_bar,
        residual,
        merged,
        iterations,
    })
}

fn reject_zero(lambda_sq: &[f64], op: &str) -> Result<()> {
    if let Some(j) = lambda_sq.iter().position(|&v| v == 0.0) {
        return Err(Error::validation(format!(
            "{op}: λ_{}² = 0, the product normalization is undefined for a zero eigenvalue",
            j + 1
        )));
    }
    Ok(())
}

/// Fits `y_j = a + b/(λ_j⁰)²` over the last (up to) four entries, leaving
/// out mode 1 when there are three or more. Returns `(a, b)`.
pub(crate) fn inverse_e_regression(y: &[f64]) -> (f64, f64) {
    let m = y.len();
    if m == 0 {
        return (0.0, 0.0);
    }
    let first = if m >= 3 {
        2.max(m.saturating_sub(3))
    } else {
        1
    };
    let pts: Vec<(f64, f64)> = (first..=m)
        .map(|j| (1.0 / free_eigenvalue(j), y[j - 1]))
        .collect();
    if pts.len() == 1 {
        return (pts[0].1, 0.0);
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

/// Estimate of `c̄ = lim ((λ_j⁰)² − λ_j²)` from the first modes, by
/// regressing `(λ_j⁰)² − λ_j² = c̄ − σ/(λ_j⁰)²`.
pub fn asymptotic_shift(lambda_sq: &[f64]) -> f64 {
    let y: Vec<f64> = lambda_sq
        .iter()
        .enumerate()
        .map(|(i, l)| free_eigenvalue(i + 1) - l)
        .collect();
    inverse_e_regression(&y).0
}

/// Explicit factor count for a fit of `m` modes.
pub fn product_truncation(m: usize) -> usize {
    200.max(4 * m)
}

/// `lambda_sq` continued to `n_prod` entries with `(λ_j⁰)² − c̄`.
fn completed(lambda_sq: &[f64], c_bar: f64, n_prod: usize) -> Vec<f64> {
    let mut all = lambda_sq.to_vec();
    all.extend((lambda_sq.len() + 1..=n_prod).map(|j| free_eigenvalue(j) - c_bar));
    all
}

/// `γ = Π_j λ_j²/(λ_j⁰)²`, the modes beyond the array taken with constant
/// shift `c̄` and summed analytically.
pub fn gamma_const(lambda_sq: &[f64], c_bar: f64) -> Result<f64> {
    if lambda_sq.is_empty() {
        return Err(Error::validation("gamma_const: empty spectrum"));
    }
    reject_zero(lambda_sq, "gamma_const")?;
    let n_prod = product_truncation(lambda_sq.len()).max(lambda_sq.len());
    let all = completed(lambda_sq, c_bar, n_prod);
    let head: f64 = all
        .iter()
        .enumerate()
        .map(|(i, l)| l / free_eigenvalue(i + 1))
        .product();
    Ok(head * free_tail_product(c_bar, n_prod))
}

/// Characteristic function in Hadamard form, `W(ν) = γ Π_j (1 − ν/λ_j²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductModel {
    pub lambda_sq: Vec<f64>,
    pub gamma: f64,
    pub c_bar: f64,
    pub n_prod: usize,
    factors: Vec<f64>,
    tail_norm: f64,
}

impl ProductModel {
    pub fn new(lambda_sq: Vec<f64>, c_bar: f64) -> Result<Self> {
        if lambda_sq.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::validation(
                "product model: eigenvalues must be strictly increasing",
            ));
        }
        let gamma = gamma_const(&lambda_sq, c_bar)?;
        let n_prod = product_truncation(lambda_sq.len()).max(lambda_sq.len());
        Ok(ProductModel {
            factors: completed(&lambda_sq, c_bar, n_prod),
            tail_norm: free_tail_product(c_bar, n_prod),
            lambda_sq,
            gamma,
            c_bar,
            n_prod,
        })
    }

    /// Model for fitted modes, with the tail shift taken from the modes
    /// themselves.
    pub fn from_fit(fit: &PoleFit) -> Result<Self> {
        let lambda_sq = fit.modes.lambda_sq();
        let c_bar = asymptotic_shift(&lambda_sq);
        Self::new(lambda_sq, c_bar)
    }

    /// `Π_{j>N_prod}(1 − ν/λ_j²)` for the completed modes.
    fn tail(&self, nu: f64) -> f64 {
        free_tail_product(self.c_bar + nu, self.n_prod) / self.tail_norm
    }

    /// Left form `Π_j (λ_j² − ν)/(λ_j⁰)²`; needs no `γ`.
    pub fn char_product_left(&self, nu: f64) -> f64 {
        let head: f64 = self
            .factors
            .iter()
            .enumerate()
            .map(|(i, l)| (l - nu) / free_eigenvalue(i + 1))
            .product();
        head * free_tail_product(self.c_bar + nu, self.n_prod)
    }
}

/// `γ Π_j (1 − ν/λ_j²)`.
pub fn char_product(pm: &ProductModel, nu: f64) -> f64 {
    let head: f64 = pm.factors.iter().map(|l| 1.0 - nu / l).product();
    pm.gamma * head * pm.tail(nu)
}

/// `b_j = W'(λ_j²) = −(γ/λ_j²) Π_{i≠j}(1 − λ_j²/λ_i²)`, `j` 1-based.
pub fn b_coeff(pm: &ProductModel, j: usize) -> Result<f64> {
    if j == 0 || j > pm.lambda_sq.len() {
        return Err(Error::validation(format!(
            "b_coeff: mode {j} outside 1..={}",
            pm.lambda_sq.len()
        )));
    }
    let lj = pm.lambda_sq[j - 1];
    reject_zero(&[lj], "b_coeff")?;
    let others: f64 = pm
        .factors
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != j - 1)
        .map(|(_, l)| 1.0 - lj / l)
        .product();
    Ok(-pm.gamma / lj * others * pm.tail(lj))
}

/// `α_j = t_j b_j²`.
pub fn alphas(fit: &PoleFit, pm: &ProductModel) -> Result<Vec<f64>> {
    if fit.modes.len() != pm.lambda_sq.len() {
        return Err(Error::validation(
            "alphas: fit and product model disagree on mode count",
        ));
    }
    let t = fit.modes.t();
    let out = (1..=t.len())
        .into_par_iter()
        .map(|j| b_coeff(pm, j).map(|b| t[j - 1] * b * b))
        .collect::<Result<Vec<f64>>>()?;
    if let Some(j) = out.iter().position(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(Error::numerical(
            "alphas",
            format!(
                "α_{} = {} is not positive; the fit is corrupted",
                j + 1,
                out[j]
            ),
        ));
    }
    Ok(out)
}

/// Step function with jumps `1/α_j` at `λ_j²`.
pub fn spectral_function(lambda_sq: &[f64], alpha: &[f64]) -> Result<SpectralFunction> {
    if lambda_sq.len() != alpha.len() {
        return Err(Error::validation("spectral_function: length mismatch"));
    }
    SpectralFunction::new(
        lambda_sq
            .iter()
            .zip(alpha)
            .map(|(&location, &a)| Jump {
                location,
                weight: 1.0 / a,
            })
            .collect(),
    )
}

/// Everything recovered from a `G(λ)` curve; the content of `spec.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralEstimate {
    pub lambda_sq: Vec<f64>,
    pub t: Vec<f64>,
    pub alpha: Vec<f64>,
    pub gamma: f64,
    pub c_bar: f64,
    pub residual: f64,
}

impl SpectralEstimate {
    pub fn validate(self) -> Result<Self> {
        let n = self.lambda_sq.len();
        if n == 0 || self.t.len() != n || self.alpha.len() != n {
            return Err(Error::validation(
                "spectral estimate: lambda_sq, t and alpha must be nonempty and of equal length",
            ));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(&self.lambda_sq)
            || !finite(&self.t)
            || !self.gamma.is_finite()
            || !self.c_bar.is_finite()
        {
            return Err(Error::validation("spectral estimate: non-finite entries"));
        }
        if self.lambda_sq.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::validation(
                "spectral estimate: lambda_sq must be strictly increasing",
            ));
        }
        if self.alpha.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::validation(
                "spectral estimate: alpha must be positive",
            ));
        }
        Ok(self)
    }

    pub fn spectral_function(&self) -> Result<SpectralFunction> {
        spectral_function(&self.lambda_sq, &self.alpha)
    }
}

pub fn parse_spec_json(text: &str) -> Result<SpectralEstimate> {
    serde_json::from_str::<SpectralEstimate>(text)?.validate()
}

pub fn format_spec_json(est: &SpectralEstimate) -> String {
    let mut s = serde_json::to_string_pretty(est).expect("plain data serializes");
    s.push('\n');
    s
}

/// Fit, product model and norming constants in one pass.
pub fn invert_curve(curve: &SampledCurve, m: usize, opts: &FitOptions) -> Result<SpectralEstimate> {
    let fit = extract_spectral_data_with(curve, m, opts)?;
    let pm = ProductModel::from_fit(&fit)?;
    let alpha = alphas(&fit, &pm)?;
    Ok(SpectralEstimate {
        lambda_sq: fit.modes.lambda_sq(),
        t: fit.modes.t(),
        alpha,
        gamma: pm.gamma,
        c_bar: pm.c_bar,
        residual: fit.residual,
    })
}
