//! Forward data synthesis: the transformed boundary data `G(λ)`, the
//! physical boundary data `g(r)`, the absorbing field `u_ε`, and the radial
//! Fourier (Hankel) transform linking `g` to `G`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forward::{EigenSet, Propagator};
use crate::freelayer::{free_power_tail, free_resolvent_tail};
use crate::model::{
    free_eigenvalue, geometric_grid, CurveKind, CurveValues, PotentialProfile, SampledCurve,
    SpectralData,
};
use crate::numerics::trapezoid;
use crate::specfun::{self, bessel_k0_complex, free_green, free_green_complex, hankel0_first};

/// Number of trailing modes averaged to estimate the asymptotic shift `c̄`.
pub const SHIFT_WINDOW: usize = 5;

/// How the modes beyond the stored ones are accounted for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    /// Stored modes only.
    Off,
    /// Modes `j > N` taken as `λ_j² = (λ_j⁰)² − c̄`,
    /// `t_j = 2 + τ/(λ_j⁰)²`, both constants estimated from the last stored
    /// modes.
    ConstantShift,
}

/// Location in the layer: horizontal range, depth, absorption.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint {
    pub r: f64,
    pub z: f64,
    pub eps: f64,
}

impl FieldPoint {
    pub fn new(r: f64, z: f64, eps: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::validation(format!(
                "field point: r must be ≥ 0, got {r}"
            )));
        }
        if !(0.0..=1.0).contains(&z) {
            return Err(Error::validation(format!(
                "field point: z must be in [0,1], got {z}"
            )));
        }
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::validation(format!(
                "field point: eps must be ≥ 0, got {eps}"
            )));
        }
        Ok(FieldPoint { r, z, eps })
    }
}

/// Asymptotic constants of the modes beyond the stored ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailModel {
    pub n: usize,
    pub c_bar: f64,
    pub tau: f64,
}

impl TailModel {
    /// `c̄` and `τ` averaged over the last [`SHIFT_WINDOW`] modes.
    pub fn estimate(sd: &SpectralData) -> Self {
        let n = sd.len();
        let start = n.saturating_sub(SHIFT_WINDOW);
        let tau = if n == 0 {
            0.0
        } else {
            (start..n)
                .map(|i| (sd.modes()[i].t - 2.0) * free_eigenvalue(i + 1))
                .sum::<f64>()
                / (n - start) as f64
        };
        TailModel {
            n,
            c_bar: sd.tail_shift(SHIFT_WINDOW),
            tau,
        }
    }

    /// `Σ_{j>N} t_j / (λ² + λ_j²)` over the modelled modes.
    pub fn g_tail(&self, l2: f64) -> f64 {
        let s = l2 - self.c_bar;
        let head: f64 = (1..=self.n).map(|j| 2.0 / (s + free_eigenvalue(j))).sum();
        free_green(s) - head + self.tau * free_resolvent_tail(s, self.n, 1)
    }

    pub fn g_tail_complex(&self, l2: Complex64) -> Complex64 {
        let s = l2 - self.c_bar;
        let head: Complex64 = (1..=self.n).map(|j| 2.0 / (s + free_eigenvalue(j))).sum();
        let far = self.n + 20_000;
        let tau_part: Complex64 = (self.n + 1..=far)
            .rev()
            .map(|j| {
                let e = free_eigenvalue(j);
                1.0 / (e * (s + e))
            })
            .sum::<Complex64>()
            + free_power_tail(2, far);
        free_green_complex(s) - head + self.tau * tau_part
    }
}

/// `G(λ) = Σ_j t_j / (λ² + λ_j²)` from spectral data, optionally completed
/// with the constant-shift tail.
pub fn modal_g(sd: &SpectralData, lambda: f64, tail: Tail) -> Result<f64> {
    let l2 = lambda * lambda;
    let mut sum = 0.0;
    for (j, m) in sd.modes().iter().enumerate() {
        let d = l2 + m.lambda_sq;
        if d.abs() <= 1e-14 * (l2.abs() + m.lambda_sq.abs()).max(1e-300) {
            return Err(Error::numerical(
                "modal_G",
                format!("λ = {lambda} sits on the pole of mode {}", j + 1),
            ));
        }
        sum += m.t / d;
    }
    if tail == Tail::ConstantShift && !sd.is_empty() {
        sum += TailModel::estimate(sd).g_tail(l2);
    }
    Ok(sum)
}

/// Analytic continuation of [`modal_g`] to complex `λ`.
pub fn modal_g_complex(sd: &SpectralData, lambda: Complex64, tail: Tail) -> Complex64 {
    let l2 = lambda * lambda;
    let mut sum: Complex64 = sd.modes().iter().map(|m| m.t / (l2 + m.lambda_sq)).sum();
    if tail == Tail::ConstantShift && !sd.is_empty() {
        sum += TailModel::estimate(sd).g_tail_complex(l2);
    }
    sum
}

/// Mode-free value `G(λ) = Ψ(1, -λ²) / Ψ'(1, -λ²)`: the Green's function of
/// the transformed boundary problem with the source at `z = 1`.
pub fn greens_g(prop: &Propagator, lambda: f64) -> Result<f64> {
    let (psi, dpsi) = prop.endpoint_values(-lambda * lambda);
    if dpsi.abs() <= 1e-13 * psi.abs() {
        return Err(Error::numerical(
            "greens_G",
            format!(
                "ν = {} is an eigenvalue of the continued problem",
                -lambda * lambda
            ),
        ));
    }
    Ok(psi / dpsi)
}

pub fn greens_g_profile(q: &PotentialProfile, lambda: f64, m: usize) -> Result<f64> {
    greens_g(&Propagator::new(q, m)?, lambda)
}

/// Radial factor `B_j(r)` of one mode.
fn radial_factor(lambda_sq: f64, r: f64) -> Result<Complex64> {
    Ok(if lambda_sq > 0.0 {
        Complex64::new(specfun::bessel_k0(lambda_sq.sqrt() * r)?, 0.0)
    } else if lambda_sq < 0.0 {
        Complex64::new(0.0, FRAC_PI_2) * hankel0_first((-lambda_sq).sqrt() * r)?
    } else {
        Complex64::new((1.0 / r).ln(), 0.0)
    })
}

/// Cap on completion terms for small `r`.
const MAX_TAIL_TERMS: usize = 10_000_000;

/// Boundary data `g(r) = Σ_j t_j B_j(r) / 2π` with `B_j = K₀(λ_j r)` for
/// evanescent modes, `(iπ/2) H₀⁽¹⁾(|λ_j| r)` for propagating ones and
/// `log(1/r)` for a zero eigenvalue. With [`Tail::ConstantShift`] the sum is
/// continued over completed modes until they no longer contribute.
pub fn field_g(sd: &SpectralData, r: f64, tail: Tail) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(Error::validation(format!(
            "field_g: r must be > 0 (source line), got {r}"
        )));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for m in sd.modes() {
        sum += m.t * radial_factor(m.lambda_sq, r)?;
    }
    if tail == Tail::ConstantShift && !sd.is_empty() {
        let tm = TailModel::estimate(sd);
        let mut extra = 0.0;
        for j in sd.len() + 1..sd.len() + MAX_TAIL_TERMS {
            let e = free_eigenvalue(j);
            let mu = e - tm.c_bar;
            if mu <= 0.0 {
                continue;
            }
            let k = specfun::bessel_k0_eval(mu.sqrt() * r)?;
            let term = (2.0 + tm.tau / e) * k.value;
            extra += term;
            if k.underflow || term <= 1e-17 * (sum.norm() + extra) {
                break;
            }
        }
        sum += extra;
    }
    Ok(sum / (2.0 * PI))
}

/// Field with absorption, `u_ε = Σ_j ψ_j(z) ψ_j(1) K₀(r √(λ_j² + iε)) / 2π`,
/// principal square root. For `ε = 0` a zero eigenvalue contributes
/// `log(1/r)`.
pub fn field_u_eps(es: &EigenSet, p: FieldPoint) -> Result<Complex64> {
    if !(p.r > 0.0) {
        return Err(Error::validation(format!(
            "field_u_eps: r must be > 0, got {}",
            p.r
        )));
    }
    if es.shapes.len() != es.pairs.len() {
        return Err(Error::validation(
            "field_u_eps: eigen set carries no eigenfunction samples",
        ));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for (j, pair) in es.pairs.iter().enumerate() {
        let depth = es.eigenfunction(j, p.z).unwrap();
        let end = pair.psi_end / pair.alpha.sqrt();
        let radial = if p.eps == 0.0 && pair.lambda_sq == 0.0 {
            Complex64::new((1.0 / p.r).ln(), 0.0)
        } else {
            let root = Complex64::new(pair.lambda_sq, p.eps).sqrt();
            bessel_k0_complex(root * p.r)?
        };
        sum += depth * end * radial;
    }
    Ok(sum / (2.0 * PI))
}

/// Threshold on `|g(r_max)| r_max / max |g(r)| r` above which the sampled
/// curve is considered not to have decayed.
pub const DECAY_THRESHOLD: f64 = 1e-6;

/// `2π ∫ g(r) J₀(λ r) r dr` by the trapezoid rule over the samples, with the
/// integrand held constant on `[0, r_min]`.
pub fn hankel_transform(curve: &SampledCurve, lambda: f64) -> Result<f64> {
    if curve.kind() != CurveKind::g_of_r {
        return Err(Error::validation("hankel_transform expects a g(r) curve"));
    }
    let g = match curve.values() {
        CurveValues::Real(v) => v.clone(),
        CurveValues::Complex(v) => {
            if v.iter().any(|c| c.im.abs() > 1e-14 * c.norm().max(1e-300)) {
                return Err(Error::validation(
                    "hankel_transform: g(r) has propagating (complex) components",
                ));
            }
            v.iter().map(|c| c.re).collect()
        }
    };
    let r = curve.abscissae();
    if r.len() < 2 || r[0] <= 0.0 {
        return Err(Error::validation(
            "hankel_transform needs ≥ 2 samples with r > 0",
        ));
    }
    let weighted: Vec<f64> = r.iter().zip(&g).map(|(ri, gi)| gi * ri).collect();
    let peak = weighted.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let last = weighted.last().unwrap().abs();
    if last > DECAY_THRESHOLD * peak {
        return Err(Error::numerical(
            "hankel_transform",
            format!(
                "insufficient decay at r_max = {}: |g r| = {last:e} (peak {peak:e})",
                r.last().unwrap()
            ),
        ));
    }
    let integrand: Vec<f64> = r
        .iter()
        .zip(&weighted)
        .map(|(ri, w)| w * specfun::j0(lambda * ri))
        .collect();
    let body = trapezoid(r, &integrand);
    let head = integrand[0] * r[0];
    Ok(2.0 * PI * (head + body))
}

/// λ grid used to sample `G` for inversion: geometric on
/// `[0.05, 3 λ_m⁰]`, 500 points.
pub fn inversion_lambda_grid(m: usize) -> Vec<f64> {
    geometric_grid(0.05, 3.0 * free_eigenvalue(m.max(1)).sqrt(), 500)
}

/// r grid used to sample `g`: geometric on `[1e-3, 40]`, 400 points.
pub fn default_r_grid() -> Vec<f64> {
    geometric_grid(1e-3, 40.0, 400)
}

pub fn synthesize_g_of_lambda(
    sd: &SpectralData,
    lambdas: &[f64],
    tail: Tail,
) -> Result<SampledCurve> {
    let values = lambdas
        .iter()
        .map(|&l| modal_g(sd, l, tail))
        .collect::<Result<Vec<f64>>>()?;
    SampledCurve::real(lambdas.to_vec(), values, CurveKind::G_of_lambda)
}

/// `g(r)` samples; real unless the spectrum has propagating modes.
pub fn synthesize_g_of_r(sd: &SpectralData, rs: &[f64], tail: Tail) -> Result<SampledCurve> {
    let values = rs
        .iter()
        .map(|&r| field_g(sd, r, tail))
        .collect::<Result<Vec<Complex64>>>()?;
    let values = if sd.modes().iter().all(|m| m.lambda_sq >= 0.0) {
        CurveValues::Real(values.iter().map(|c| c.re).collect())
    } else {
        CurveValues::Complex(values)
    };
    SampledCurve::new(rs.to_vec(), values, CurveKind::g_of_r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::eigen_data;
    use crate::model::Mode;

    fn single(lambda_sq: f64, t: f64) -> SpectralData {
        SpectralData::new(vec![Mode { lambda_sq, t }]).unwrap()
    }

    #[test]
    fn modal_g_examples() {
        let free = SpectralData::free(50);
        assert!((modal_g(&free, 1.0, Tail::ConstantShift).unwrap() - 1f64.tanh()).abs() < 1e-6);
        assert!((modal_g(&free, 1e-8, Tail::ConstantShift).unwrap() - 1.0).abs() < 1e-6);
        assert_eq!(modal_g(&single(1.0, 1.0), 1.0, Tail::Off).unwrap(), 0.5);
        assert!(modal_g(&single(-4.0, 1.0), 2.0, Tail::Off).is_err());
    }

    #[test]
    fn free_partial_fractions_by_brute_force() {
        // Σ_{j ≤ 10⁶} 2/(λ² + (λ_j⁰)²) plus the 2/(π² 10⁶) remainder
        for &l in &[0.1, 1.0, 10.0] {
            let brute: f64 = (1..=1_000_000)
                .map(|j| 2.0 / (l * l + free_eigenvalue(j)))
                .sum::<f64>()
                + 2.0 / (PI * PI * 1e6);
            assert!((brute - l.tanh() / l).abs() < 1e-10 * brute);
        }
    }

    #[test]
    fn modal_g_is_decreasing_for_positive_spectra() {
        let sd = SpectralData::shifted_free(40, 1.0);
        let ls: Vec<f64> = (1..200).map(|i| i as f64 * 0.05).collect();
        let g: Vec<f64> = ls
            .iter()
            .map(|&l| modal_g(&sd, l, Tail::ConstantShift).unwrap())
            .collect();
        assert!(g.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn greens_g_examples() {
        let free = PotentialProfile::constant(0.0, 1.0).unwrap();
        assert!((greens_g_profile(&free, 1.0, 500).unwrap() - 0.761_594_156_0).abs() < 1e-10);
        assert!((greens_g_profile(&free, 2.0, 500).unwrap() - 0.482_013_790_0).abs() < 1e-10);
        let one = PotentialProfile::constant(1.0, 1.0).unwrap();
        let es = eigen_data(&one, 200, 2000).unwrap();
        let modal = modal_g(&es.spectral_data(), 1.0, Tail::ConstantShift).unwrap();
        assert!((greens_g_profile(&one, 1.0, 2000).unwrap() - modal).abs() < 1e-8);
    }

    #[test]
    fn field_g_examples() {
        let free = SpectralData::free(12);
        let brute: f64 = (1..=12)
            .map(|j| crate::specfun::bessel_k0((j as f64 - 0.5) * PI).unwrap())
            .sum::<f64>()
            / PI;
        let g = field_g(&free, 1.0, Tail::Off).unwrap();
        assert!((g.re - brute).abs() < 1e-15 && g.im == 0.0);
        let first10: f64 = (1..=10)
            .map(|j| crate::specfun::bessel_k0((j as f64 - 0.5) * PI).unwrap())
            .sum::<f64>()
            / PI;
        assert!((g.re - first10).abs() < 1e-12 * first10);

        let g = field_g(&single(0.0, 1.0), (-1f64).exp(), Tail::Off).unwrap();
        assert!((g.re - 1.0 / (2.0 * PI)).abs() < 1e-15);

        let g = field_g(&single(-1.0, 1.0), 1.0, Tail::Off).unwrap();
        let want = Complex64::new(0.0, 0.25) * hankel0_first(1.0).unwrap();
        assert!((g - want).norm() < 1e-15);

        assert!(field_g(&free, 0.0, Tail::Off).is_err());
    }

    #[test]
    fn field_g_tail_recovers_small_r_singularity() {
        // Near the source the full free sum behaves like 1/(2πr) (inverse
        // transform of tanh λ/λ ~ 1/λ).
        let free = SpectralData::free(20);
        let r = 1e-3;
        let full = field_g(&free, r, Tail::ConstantShift).unwrap().re;
        let truncated = field_g(&free, r, Tail::Off).unwrap().re;
        assert!(full > truncated * 5.0);
        assert!((full * 2.0 * PI * r - 1.0).abs() < 0.01);
    }

    #[test]
    fn field_u_eps_examples() {
        let free = PotentialProfile::constant(0.0, 1.0).unwrap();
        let es = eigen_data(&free, 10, 2000).unwrap();
        let u = field_u_eps(&es, FieldPoint::new(1.0, 1.0, 0.0).unwrap()).unwrap();
        let g = field_g(&es.spectral_data(), 1.0, Tail::Off).unwrap();
        assert!((u - g).norm() < 1e-10 * g.norm());
        let u0 = field_u_eps(&es, FieldPoint::new(1.0, 0.0, 0.3).unwrap()).unwrap();
        assert!(u0.norm() < 1e-15);

        let one = eigen_data(&PotentialProfile::constant(0.0, 1.0).unwrap(), 1, 2000).unwrap();
        let a = field_u_eps(&one, FieldPoint::new(1.0, 0.6, 1e-3).unwrap()).unwrap();
        let b = field_u_eps(&one, FieldPoint::new(1.0, 0.6, 0.0).unwrap()).unwrap();
        assert!((a - b).norm() < 1e-3);
        assert!(field_u_eps(
            &es,
            FieldPoint {
                r: 0.0,
                z: 0.5,
                eps: 0.0
            }
        )
        .is_err());
        assert!(FieldPoint::new(1.0, 1.5, 0.0).is_err());
    }

    #[test]
    fn hankel_transform_single_mode() {
        let sd = single(1.0, 1.0);
        let rs = geometric_grid(1e-5, 40.0, 4000);
        let curve = synthesize_g_of_r(&sd, &rs, Tail::Off).unwrap();
        for &(l, want) in &[(1.0, 0.5), (0.5, 0.8), (2.0, 0.2)] {
            let got = hankel_transform(&curve, l).unwrap();
            assert!((got - want).abs() < 1e-4, "λ={l}: {got}");
        }
    }

    #[test]
    fn hankel_transform_flags_slow_decay() {
        let sd = single(1e-4, 1.0);
        let rs = geometric_grid(1e-3, 30.0, 400);
        let curve = synthesize_g_of_r(&sd, &rs, Tail::Off).unwrap();
        assert!(matches!(
            hankel_transform(&curve, 1.0),
            Err(Error::Numerical { .. })
        ));
    }
}
