//! Sturm–Liouville forward solver for `-Ψ'' - νΨ - qΨ = 0`, `Ψ(0) = 0`,
//! `Ψ'(0) = 1`, with eigenvalues the zeros of `W(ν) = Ψ'(1, ν)`.
//!
//! The IVP is integrated with a fixed-step fourth-order Magnus scheme on a
//! uniform grid. Each step uses the exact moments of the piecewise-linear
//! `q`, so the propagator is exact for constant `q` at any `ν`, and its
//! `ν`-derivative (the variational solution `Ψ̇`) is obtained by
//! differentiating the same discrete propagator.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{free_eigenvalue, EigenPair, PotentialProfile, SpectralData};
use crate::numerics::{brent, trapezoid_uniform};
use crate::specfun::{cos_nu, sinc_nu, sinc_nu_dnu};

pub const DEFAULT_GRID: usize = 2000;
pub const MIN_GRID: usize = 16;

/// Sampled solution of the IVP at one value of `ν`.
#[derive(Debug, Clone, PartialEq)]
pub struct IvpSolution {
    pub grid: Vec<f64>,
    pub psi: Vec<f64>,
    pub dpsi: Vec<f64>,
    pub nu: f64,
}

/// Endpoint values of `Ψ` and its `ν`-derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Endpoint {
    pub psi: f64,
    pub dpsi: f64,
    pub psi_dot: f64,
    pub dpsi_dot: f64,
}

/// Per-step moments `∫q` and `∫(z - mid) q` of the Magnus propagator.
#[derive(Debug, Clone, Copy)]
struct Step {
    m0: f64,
    m1: f64,
}

/// Discretized IVP for one profile on a uniform grid of `m` steps.
#[derive(Debug, Clone)]
pub struct Propagator {
    h: f64,
    steps: Vec<Step>,
}

/// 2×2 step matrix `[[a, b], [c, d]]` and its `ν`-derivative.
struct StepMatrix {
    e: [f64; 4],
    de: [f64; 4],
}

impl Propagator {
    pub fn new(q: &PotentialProfile, m: usize) -> Result<Self> {
        if m < MIN_GRID {
            return Err(Error::validation(format!(
                "grid size must be ≥ {MIN_GRID}, got {m}"
            )));
        }
        let h = 1.0 / m as f64;
        let steps = (0..m)
            .map(|i| {
                let a = i as f64 * h;
                let b = if i + 1 == m { 1.0 } else { (i + 1) as f64 * h };
                let (m0, m1) = q.moments(a, b);
                Step { m0, m1 }
            })
            .collect();
        Ok(Propagator { h, steps })
    }

    pub fn grid_size(&self) -> usize {
        self.steps.len()
    }

    pub fn grid(&self) -> Vec<f64> {
        crate::model::uniform_grid(self.steps.len())
    }

    /// `exp(Ω)` for `Ω = [[M1, h], [-(hν + M0), -M1]]`, the fourth-order
    /// Magnus exponent (the commutator term is `ν`-independent).
    #[inline]
    fn step_matrix(&self, s: Step, nu: f64, with_derivative: bool) -> StepMatrix {
        let h = self.h;
        let lower = -(h * nu + s.m0);
        let mu = h * h * nu + h * s.m0 - s.m1 * s.m1;
        let c = cos_nu(1.0, mu);
        let sn = sinc_nu(1.0, mu);
        let e = [c + sn * s.m1, sn * h, sn * lower, c - sn * s.m1];
        let de = if with_derivative {
            let h2 = h * h;
            let dc = -0.5 * sn * h2;
            let ds = sinc_nu_dnu(mu) * h2;
            [dc + ds * s.m1, ds * h, ds * lower - sn * h, dc - ds * s.m1]
        } else {
            [0.0; 4]
        };
        StepMatrix { e, de }
    }

    /// `W(ν) = Ψ'(1, ν)`.
    pub fn characteristic(&self, nu: f64) -> f64 {
        let (mut y, mut dy) = (0.0, 1.0);
        for &s in &self.steps {
            let e = self.step_matrix(s, nu, false).e;
            let ny = e[0] * y + e[1] * dy;
            dy = e[2] * y + e[3] * dy;
            y = ny;
        }
        dy
    }

    /// `(Ψ(1, ν), Ψ'(1, ν))`.
    pub fn endpoint_values(&self, nu: f64) -> (f64, f64) {
        let (mut y, mut dy) = (0.0, 1.0);
        for &s in &self.steps {
            let e = self.step_matrix(s, nu, false).e;
            let ny = e[0] * y + e[1] * dy;
            dy = e[2] * y + e[3] * dy;
            y = ny;
        }
        (y, dy)
    }

    /// Full sampled solution.
    pub fn integrate(&self, nu: f64) -> IvpSolution {
        let n = self.steps.len();
        let mut psi = Vec::with_capacity(n + 1);
        let mut dpsi = Vec::with_capacity(n + 1);
        let (mut y, mut dy) = (0.0, 1.0);
        psi.push(y);
        dpsi.push(dy);
        for &s in &self.steps {
            let e = self.step_matrix(s, nu, false).e;
            let ny = e[0] * y + e[1] * dy;
            dy = e[2] * y + e[3] * dy;
            y = ny;
            psi.push(y);
            dpsi.push(dy);
        }
        IvpSolution {
            grid: self.grid(),
            psi,
            dpsi,
            nu,
        }
    }

    /// Solution together with `Ψ̇ = ∂Ψ/∂ν`, which solves
    /// `-Ψ̇'' - νΨ̇ - qΨ̇ = Ψ`, `Ψ̇(0) = Ψ̇'(0) = 0`.
    pub fn integrate_with_derivative(&self, nu: f64) -> (IvpSolution, Vec<f64>, Endpoint) {
        let n = self.steps.len();
        let mut psi = Vec::with_capacity(n + 1);
        let mut dpsi = Vec::with_capacity(n + 1);
        let mut psi_dot = Vec::with_capacity(n + 1);
        let (mut y, mut dy, mut yd, mut dyd) = (0.0, 1.0, 0.0, 0.0);
        psi.push(y);
        dpsi.push(dy);
        psi_dot.push(yd);
        for &s in &self.steps {
            let StepMatrix { e, de } = self.step_matrix(s, nu, true);
            let nyd = e[0] * yd + e[1] * dyd + de[0] * y + de[1] * dy;
            dyd = e[2] * yd + e[3] * dyd + de[2] * y + de[3] * dy;
            yd = nyd;
            let ny = e[0] * y + e[1] * dy;
            dy = e[2] * y + e[3] * dy;
            y = ny;
            psi.push(y);
            dpsi.push(dy);
            psi_dot.push(yd);
        }
        let end = Endpoint {
            psi: y,
            dpsi: dy,
            psi_dot: yd,
            dpsi_dot: dyd,
        };
        (
            IvpSolution {
                grid: self.grid(),
                psi,
                dpsi,
                nu,
            },
            psi_dot,
            end,
        )
    }

    /// Continuous Prüfer angle `θ(1)` with `Ψ = R sin θ`, `Ψ' = R cos θ`,
    /// `θ(0) = 0`. Increasing in `ν`; the `j`-th eigenvalue is where
    /// `θ(1) = π/2 + (j-1)π`.
    pub fn prufer_angle(&self, nu: f64) -> f64 {
        use std::f64::consts::{PI, TAU};
        let (mut y, mut dy) = (0.0f64, 1.0f64);
        let mut theta = 0.0;
        let mut prev = 0.0;
        for &s in &self.steps {
            let e = self.step_matrix(s, nu, false).e;
            let ny = e[0] * y + e[1] * dy;
            dy = e[2] * y + e[3] * dy;
            y = ny;
            let scale = y.abs().max(dy.abs());
            if scale > 1e100 {
                y /= scale;
                dy /= scale;
            }
            let a = y.atan2(dy);
            let mut delta = a - prev;
            if delta > PI {
                delta -= TAU;
            } else if delta <= -PI {
                delta += TAU;
            }
            theta += delta;
            prev = a;
        }
        theta
    }
}

/// `integrate_ivp`: sampled `Ψ(·, ν)` for profile `q` on `m` steps.
pub fn integrate_ivp(q: &PotentialProfile, nu: f64, m: usize) -> Result<IvpSolution> {
    Ok(Propagator::new(q, m)?.integrate(nu))
}

/// `W(ν) = Ψ'(1, ν)` on the default grid.
pub fn characteristic(q: &PotentialProfile, nu: f64) -> Result<f64> {
    Ok(Propagator::new(q, DEFAULT_GRID)?.characteristic(nu))
}

/// `Ψ̇` samples and `Ψ̇'(1)` on `m` steps.
pub fn nu_derivative(q: &PotentialProfile, nu: f64, m: usize) -> Result<(Vec<f64>, f64)> {
    let (_, dot, end) = Propagator::new(q, m)?.integrate_with_derivative(nu);
    Ok((dot, end.dpsi_dot))
}

/// First `n` eigenvalues `λ_j²`, ascending.
pub fn eigenvalues(q: &PotentialProfile, n: usize, m: usize) -> Result<Vec<f64>> {
    let prop = Propagator::new(q, m)?;
    eigenvalues_with(&prop, q.integral(), n)
}

fn eigenvalues_with(prop: &Propagator, shift: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::validation("number of modes must be ≥ 1"));
    }
    let vals: Vec<Result<f64>> = (1..=n)
        .into_par_iter()
        .map(|j| find_eigenvalue(prop, j, shift))
        .collect();
    let vals = vals.into_iter().collect::<Result<Vec<f64>>>()?;
    if let Some(i) = vals.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::numerical(
            "eigenvalues",
            format!(
                "eigenvalues {} and {} not strictly increasing",
                i + 1,
                i + 2
            ),
        ));
    }
    Ok(vals)
}

/// Locates mode `j` (1-based): brackets it with the Prüfer angle around the
/// shifted asymptotic seed, then refines the sign change of `W` with Brent.
fn find_eigenvalue(prop: &Propagator, j: usize, shift: f64) -> Result<f64> {
    use std::f64::consts::PI;
    let target = PI * (j as f64 - 0.5);
    let offset = |nu: f64| prop.prufer_angle(nu) - target;

    let seed_lo = if j == 1 {
        free_eigenvalue(1) * 0.25
    } else {
        0.5 * (free_eigenvalue(j - 1) + free_eigenvalue(j))
    } - shift;
    let seed_hi = 0.5 * (free_eigenvalue(j) + free_eigenvalue(j + 1)) - shift;
    let width = (seed_hi - seed_lo).max(1.0);

    let (mut lo, mut hi) = (seed_lo, seed_hi);
    let (mut flo, mut fhi) = (offset(lo), offset(hi));
    let mut grow = width;
    let mut tries = 0;
    while flo >= 0.0 {
        hi = lo;
        fhi = flo;
        lo -= grow;
        grow *= 2.0;
        flo = offset(lo);
        tries += 1;
        if tries > 80 || !lo.is_finite() {
            return Err(bracket_failure(j, lo, hi));
        }
    }
    grow = width;
    while fhi <= 0.0 {
        lo = hi;
        flo = fhi;
        hi += grow;
        grow *= 2.0;
        fhi = offset(hi);
        tries += 1;
        if tries > 160 || !hi.is_finite() {
            return Err(bracket_failure(j, lo, hi));
        }
    }
    // Narrow until the angle is within π of the target on both sides, so
    // W = R cos θ changes sign exactly once inside.
    let mut iters = 0;
    while flo <= -PI || fhi >= PI {
        let mid = 0.5 * (lo + hi);
        let fm = offset(mid);
        if fm < 0.0 {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        iters += 1;
        if iters > 200 {
            return Err(bracket_failure(j, lo, hi));
        }
    }
    let xtol = 1e-15 * lo.abs().max(hi.abs()).max(1.0);
    brent(|nu| prop.characteristic(nu), lo, hi, xtol, 200).ok_or_else(|| {
        Error::numerical(
            "eigenvalues",
            format!("mode {j}: W has no sign change on [{lo}, {hi}]"),
        )
    })
}

fn bracket_failure(j: usize, lo: f64, hi: f64) -> Error {
    Error::numerical(
        "eigenvalues",
        format!("bracket failure for mode {j} near [{lo}, {hi}]; profile pathological or grid too coarse"),
    )
}

/// Eigenvalues with norming constants and endpoint data for one profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenSet {
    pub pairs: Vec<EigenPair>,
    pub profile_hash: String,
    pub n_modes: usize,
    /// Integration grid size used for the eigenfunction samples.
    pub grid: usize,
    /// `(Ψ_j, Ψ_j')` on the uniform grid, unnormalized (`Ψ'(0) = 1`).
    #[serde(skip)]
    pub shapes: Vec<(Vec<f64>, Vec<f64>)>,
}

impl EigenSet {
    pub fn spectral_data(&self) -> SpectralData {
        SpectralData::from(self.pairs.as_slice())
    }

    pub fn lambda_sq(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.lambda_sq).collect()
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.alpha).collect()
    }

    /// Normalized eigenfunction `ψ_j(z)` by cubic Hermite interpolation of
    /// the stored samples; `None` if shapes were not kept.
    pub fn eigenfunction(&self, j: usize, z: f64) -> Option<f64> {
        let (psi, dpsi) = self.shapes.get(j)?;
        let m = psi.len() - 1;
        let h = 1.0 / m as f64;
        let z = z.clamp(0.0, 1.0);
        let i = ((z / h) as usize).min(m - 1);
        let t = (z - i as f64 * h) / h;
        let (t2, t3) = (t * t, t * t * t);
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * psi[i]
            + (t3 - 2.0 * t2 + t) * h * dpsi[i]
            + (-2.0 * t3 + 3.0 * t2) * psi[i + 1]
            + (t3 - t2) * h * dpsi[i + 1];
        Some(v / self.pairs[j].alpha.sqrt())
    }

    /// Largest `|λ_j² - π²(j - ½)²|` over the set.
    pub fn asymptotic_remainder(&self) -> f64 {
        self.pairs
            .iter()
            .enumerate()
            .map(|(i, p)| (p.lambda_sq - free_eigenvalue(i + 1)).abs())
            .fold(0.0, f64::max)
    }
}

/// Per-mode diagnostics from the two independent norming-constant routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormingCheck {
    pub alpha_quadrature: f64,
    pub alpha_identity: f64,
}

impl NormingCheck {
    pub fn relative_gap(&self) -> f64 {
        (self.alpha_quadrature - self.alpha_identity).abs() / self.alpha_quadrature
    }
}

/// Relative gap between the two α routes above which `eigen_data` aborts.
pub const NORMING_ABORT: f64 = 1e-6;

/// First `n` modes of `q` with norming constants computed both by
/// quadrature of `Ψ_j²` and by `α_j = -Ψ_j(1) Ψ̇_j'(1)`.
pub fn eigen_data(q: &PotentialProfile, n: usize, m: usize) -> Result<EigenSet> {
    Ok(eigen_data_checked(q, n, m)?.0)
}

pub fn eigen_data_checked(
    q: &PotentialProfile,
    n: usize,
    m: usize,
) -> Result<(EigenSet, Vec<NormingCheck>)> {
    let prop = Propagator::new(q, m)?;
    let lambdas = eigenvalues_with(&prop, q.integral(), n)?;
    let h = 1.0 / m as f64;
    type ModeOut = (EigenPair, NormingCheck, (Vec<f64>, Vec<f64>));
    let modes: Vec<Result<ModeOut>> = lambdas
        .par_iter()
        .enumerate()
        .map(|(i, &nu)| {
            let (sol, _, end) = prop.integrate_with_derivative(nu);
            let sq: Vec<f64> = sol.psi.iter().map(|p| p * p).collect();
            let alpha_q = trapezoid_uniform(h, &sq);
            let alpha_id = -end.psi * end.dpsi_dot;
            let check = NormingCheck {
                alpha_quadrature: alpha_q,
                alpha_identity: alpha_id,
            };
            if !(check.relative_gap() <= NORMING_ABORT) {
                return Err(Error::numerical(
                    "eigen_data",
                    format!(
                        "mode {}: quadrature α = {alpha_q:e} vs identity α = {alpha_id:e} (ν = {nu})",
                        i + 1
                    ),
                ));
            }
            if !(end.psi.abs() > 1e-8 * alpha_q.sqrt()) {
                return Err(Error::numerical(
                    "eigen_data",
                    format!("mode {}: Ψ(1) vanishes", i + 1),
                ));
            }
            let pair = EigenPair {
                lambda_sq: nu,
                psi_end: end.psi,
                alpha: alpha_q,
                t: end.psi * end.psi / alpha_q,
            };
            Ok((pair, check, (sol.psi, sol.dpsi)))
        })
        .collect();
    let mut pairs = Vec::with_capacity(n);
    let mut checks = Vec::with_capacity(n);
    let mut shapes = Vec::with_capacity(n);
    for r in modes {
        let (p, c, s) = r?;
        pairs.push(p);
        checks.push(c);
        shapes.push(s);
    }
    Ok((
        EigenSet {
            pairs,
            profile_hash: profile_hash(q),
            n_modes: n,
            grid: m,
            shapes,
        },
        checks,
    ))
}

/// FNV-1a over the profile's bit patterns.
pub fn profile_hash(q: &PotentialProfile) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let k = q.k();
    let bits = q
        .nodes()
        .iter()
        .chain(q.values())
        .chain(std::iter::once(&k))
        .map(|v| v.to_bits());
    for b in bits {
        for byte in b.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine_profile() -> PotentialProfile {
        PotentialProfile::from_fn(400, 1.0, |z| (PI * z).sin()).unwrap()
    }

    #[test]
    fn free_solution_at_quarter_wave() {
        let q = PotentialProfile::constant(0.0, 1.0).unwrap();
        let sol = integrate_ivp(&q, PI * PI / 4.0, 2000).unwrap();
        assert_eq!(sol.psi[0], 0.0);
        assert_eq!(sol.dpsi[0], 1.0);
        assert!((sol.psi[2000] - 2.0 / PI).abs() < 1e-8);
        assert!(sol.dpsi[2000].abs() < 1e-8);
        let sol0 = integrate_ivp(&q, 0.0, 100).unwrap();
        for (z, p) in sol0.grid.iter().zip(&sol0.psi) {
            assert!((z - p).abs() < 1e-14);
        }
        assert!((sol0.dpsi[100] - 1.0).abs() < 1e-14);
        assert!(integrate_ivp(&q, 1.0, 8).is_err());
    }

    #[test]
    fn constant_potential_closed_form() {
        let q = PotentialProfile::constant(1.0, 1.0).unwrap();
        let sol = integrate_ivp(&q, 1.0, 500).unwrap();
        for (z, p) in sol.grid.iter().zip(&sol.psi) {
            assert!((p - sinc_nu(*z, 2.0)).abs() < 1e-13);
        }
        assert!((sol.dpsi[500] - 2f64.sqrt().cos()).abs() < 1e-13);
    }

    #[test]
    fn characteristic_examples() {
        let free = PotentialProfile::constant(0.0, 1.0).unwrap();
        assert!(characteristic(&free, PI * PI / 4.0).unwrap().abs() < 1e-13);
        assert!((characteristic(&free, -1.0).unwrap() - 1.543_080_634_8).abs() < 1e-10);
        let one = PotentialProfile::constant(1.0, 1.0).unwrap();
        assert!(characteristic(&one, PI * PI / 4.0 - 1.0).unwrap().abs() < 1e-13);
    }

    #[test]
    fn free_and_shifted_eigenvalues() {
        let free = PotentialProfile::constant(0.0, 1.0).unwrap();
        let ev = eigenvalues(&free, 3, 2000).unwrap();
        for (j, v) in ev.iter().enumerate() {
            assert!((v - free_eigenvalue(j + 1)).abs() < 1e-10);
        }
        let c = PotentialProfile::constant(2.5, 1.0).unwrap();
        let ev = eigenvalues(&c, 3, 2000).unwrap();
        for (j, v) in ev.iter().enumerate() {
            assert!((v - free_eigenvalue(j + 1) + 2.5).abs() < 1e-10);
        }
        assert!(eigenvalues(&free, 0, 2000).is_err());
    }

    #[test]
    fn deep_well_brackets_far_below_seed() {
        let q = PotentialProfile::constant(200.0, 1.0).unwrap();
        let ev = eigenvalues(&q, 4, 2000).unwrap();
        for (j, v) in ev.iter().enumerate() {
            assert!((v - free_eigenvalue(j + 1) + 200.0).abs() < 1e-9);
        }
        let q = PotentialProfile::new(vec![0.0, 0.5, 1.0], vec![0.0, 300.0, 0.0], 1.0).unwrap();
        let ev = eigenvalues(&q, 6, 2000).unwrap();
        assert!(ev[0] < 0.0);
        let prop = Propagator::new(&q, 2000).unwrap();
        for v in ev {
            assert!(prop.characteristic(v).abs() < 1e-10 * (1.0 + q.sup_norm()));
        }
    }

    #[test]
    fn nu_derivative_examples() {
        let free = PotentialProfile::constant(0.0, 1.0).unwrap();
        let (_, d1) = nu_derivative(&free, PI * PI / 4.0, 2000).unwrap();
        assert!((d1 + 1.0 / PI).abs() < 1e-12);
        let (_, d2) = nu_derivative(&free, 9.0 * PI * PI / 4.0, 2000).unwrap();
        assert!((d2 - 1.0 / (3.0 * PI)).abs() < 1e-12);
        let c = PotentialProfile::constant(0.7, 1.0).unwrap();
        let nu = free_eigenvalue(2) - 0.7;
        let (_, d) = nu_derivative(&c, nu, 2000).unwrap();
        let s = (nu + 0.7f64).sqrt();
        assert!((d + s.sin() / (2.0 * s)).abs() < 1e-12);
    }

    #[test]
    fn nu_derivative_matches_finite_differences() {
        let q = sine_profile();
        let prop = Propagator::new(&q, 2000).unwrap();
        for &nu in &[-20.0, -1.0, 0.0, 3.0, 40.0, 250.0] {
            let h = 1e-5 * (1.0 + f64::abs(nu));
            let fd = (prop.characteristic(nu + h) - prop.characteristic(nu - h)) / (2.0 * h);
            let (_, _, end) = prop.integrate_with_derivative(nu);
            assert!(
                (fd - end.dpsi_dot).abs() < 1e-5 * end.dpsi_dot.abs().max(1e-3),
                "nu={nu}"
            );
        }
    }

    #[test]
    fn free_norming_constants() {
        let free = PotentialProfile::constant(0.0, 1.0).unwrap();
        let es = eigen_data(&free, 4, 2000).unwrap();
        assert!((es.pairs[0].alpha - 2.0 / (PI * PI)).abs() < 1e-12);
        for (j, p) in es.pairs.iter().enumerate() {
            assert!((p.t - 2.0).abs() < 1e-10);
            assert!((p.alpha - 1.0 / (2.0 * free_eigenvalue(j + 1))).abs() < 1e-12);
            assert!(p.consistency_defect() < 1e-10);
        }
        let c = PotentialProfile::constant(1.3, 1.0).unwrap();
        let es = eigen_data(&c, 4, 2000).unwrap();
        for (j, p) in es.pairs.iter().enumerate() {
            assert!((p.t - 2.0).abs() < 1e-10);
            assert!((p.alpha - 1.0 / (2.0 * free_eigenvalue(j + 1))).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenfunctions_are_orthonormal() {
        let q = sine_profile();
        let es = eigen_data(&q, 10, 2000).unwrap();
        let zs = crate::model::uniform_grid(4000);
        let h = 1.0 / 4000.0;
        let samples: Vec<Vec<f64>> = (0..10)
            .map(|j| {
                zs.iter()
                    .map(|&z| es.eigenfunction(j, z).unwrap())
                    .collect()
            })
            .collect();
        for i in 0..10 {
            for j in 0..=i {
                let prod: Vec<f64> = samples[i]
                    .iter()
                    .zip(&samples[j])
                    .map(|(a, b)| a * b)
                    .collect();
                let ip = trapezoid_uniform(h, &prod);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-7, "({i},{j}) = {ip}");
            }
        }
    }

    #[test]
    fn endpoint_values_never_vanish() {
        let q = sine_profile();
        let es = eigen_data(&q, 30, 2000).unwrap();
        for p in &es.pairs {
            assert!(p.psi_end.abs() > 1e-8 * p.alpha.sqrt());
        }
    }

    #[test]
    fn profile_hash_is_stable() {
        let a = PotentialProfile::constant(1.0, 1.0).unwrap();
        let b = PotentialProfile::constant(1.0, 2.0).unwrap();
        assert_eq!(profile_hash(&a), profile_hash(&a.clone()));
        assert_ne!(profile_hash(&a), profile_hash(&b));
    }
}
