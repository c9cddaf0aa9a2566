//! Special-function kernels: `J₀`, `Y₀`, `K₀` (real and complex argument),
//! `H₀⁽¹⁾`, and the entire-in-`ν` free solutions `sin(√ν x)/√ν`, `cos(√ν x)`.
//!
//! Regimes for the Bessel functions of real argument:
//!
//! | function | small            | middle                         | large                  |
//! |----------|------------------|--------------------------------|------------------------|
//! | `J₀, Y₀` | series, `x < 8`  | Miller recurrence, `8 ≤ x < 25`| Hankel asymptotic      |
//! | `K₀`     | series, `x ≤ 2`  | trapezoid on `∫e^{-x cosh t}`  | asymptotic, `x ≥ 25`   |
//!
//! The asymptotic expansions are only used where their smallest term is
//! below `e^{-50}`.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Crossover from series to Miller recurrence for `J₀`/`Y₀`.
pub const JY_SERIES_MAX: f64 = 8.0;
/// Crossover from the Miller recurrence to the Hankel asymptotic expansion.
pub const JY_ASYMPTOTIC_MIN: f64 = 25.0;
/// Crossover from series to quadrature for `K₀`.
pub const K0_SERIES_MAX: f64 = 2.0;
/// Crossover from quadrature to the asymptotic expansion for `K₀`.
pub const K0_ASYMPTOTIC_MIN: f64 = 25.0;

/// Value of a function that may underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluated {
    pub value: f64,
    /// Set when the true value is below the smallest normal `f64` and
    /// `value` has been flushed to zero.
    pub underflow: bool,
}

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> Result<f64> {
    check_nonneg("bessel_j0", x)?;
    Ok(j0_y0_parts(x).0)
}

/// Bessel function of the second kind, order zero.
pub fn bessel_y0(x: f64) -> Result<f64> {
    check_pos("bessel_y0", x)?;
    Ok(j0_y0_parts(x).1)
}

/// Hankel function `H₀⁽¹⁾(x) = J₀(x) + i Y₀(x)`.
pub fn hankel0_first(x: f64) -> Result<Complex64> {
    check_pos("hankel0_first", x)?;
    let (j, y) = j0_y0_parts(x);
    Ok(Complex64::new(j, y))
}

/// Macdonald function `K₀(x)`; flushes to zero past the underflow range.
pub fn bessel_k0(x: f64) -> Result<f64> {
    Ok(bessel_k0_eval(x)?.value)
}

pub fn bessel_k0_eval(x: f64) -> Result<Evaluated> {
    check_pos("bessel_k0", x)?;
    let scaled = k0_scaled(x);
    // K₀(x) = e^{-x} · scaled; scaled ≈ √(π/2x) so the product is normal
    // while e^{-x} is.
    let log_value = scaled.ln() - x;
    if log_value < f64::MIN_POSITIVE.ln() {
        return Ok(Evaluated {
            value: 0.0,
            underflow: true,
        });
    }
    let value = if x <= K0_SERIES_MAX {
        k0_series(x)
    } else {
        scaled * (-x).exp()
    };
    Ok(Evaluated {
        value,
        underflow: false,
    })
}

/// `eˣ K₀(x)` for `x > 0`; never underflows.
pub fn bessel_k0_scaled(x: f64) -> Result<f64> {
    check_pos("bessel_k0_scaled", x)?;
    Ok(k0_scaled(x))
}

fn check_nonneg(name: &str, x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::validation(format!(
            "{name}: argument must be ≥ 0, got {x}"
        )));
    }
    Ok(())
}

fn check_pos(name: &str, x: f64) -> Result<()> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::validation(format!(
            "{name}: argument must be > 0, got {x}"
        )));
    }
    Ok(())
}

/// `(J₀(x), Y₀(x))` for `x ≥ 0`; `Y₀(0) = -∞`.
pub(crate) fn j0_y0_parts(x: f64) -> (f64, f64) {
    if x < JY_SERIES_MAX {
        j0_y0_series(x)
    } else if x < JY_ASYMPTOTIC_MIN {
        j0_y0_miller(x)
    } else {
        j0_y0_asymptotic(x)
    }
}

/// `J₀` only, for quadrature loops.
pub(crate) fn j0(x: f64) -> f64 {
    let x = x.abs();
    if x < JY_SERIES_MAX {
        let y = -0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..60 {
            let kf = k as f64;
            term *= y / (kf * kf);
            sum += term;
            if term.abs() < 1e-17 * sum.abs().max(1e-3) {
                break;
            }
        }
        sum
    } else {
        j0_y0_parts(x).0
    }
}

fn j0_y0_series(x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (1.0, f64::NEG_INFINITY);
    }
    let y = 0.25 * x * x;
    let mut term = 1.0;
    let mut j = 1.0;
    let mut harmonic = 0.0;
    let mut tail = 0.0;
    for k in 1..80 {
        let kf = k as f64;
        term *= -y / (kf * kf);
        harmonic += 1.0 / kf;
        j += term;
        // (-1)^{k+1} H_k (x²/4)^k/(k!)² = -H_k · term
        tail -= harmonic * term;
        if term.abs() * harmonic < 1e-18 {
            break;
        }
    }
    let y0 = FRAC_2_PI * (((0.5 * x).ln() + EULER_GAMMA) * j + tail);
    (j, y0)
}

fn j0_y0_miller(x: f64) -> (f64, f64) {
    let mut n = (x as usize + 40) & !1;
    if n < 2 {
        n = 2;
    }
    let mut next = 0.0; // j_{n+1}
    let mut cur = 1e-30; // j_n
    let mut norm = 0.0;
    let mut neumann = 0.0; // Σ_{k≥1} (-1)^k j_{2k} / k
    let two_over_x = 2.0 / x;
    // Walk from n down to 0; `cur` holds j_m at the top of the loop.
    let mut m = n;
    loop {
        if m.is_multiple_of(2) && m > 0 {
            let k = (m / 2) as f64;
            norm += 2.0 * cur;
            let sign = if (m / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
            neumann += sign * cur / k;
        }
        if m == 0 {
            norm += cur;
            break;
        }
        let prev = two_over_x * m as f64 * cur - next;
        next = cur;
        cur = prev;
        m -= 1;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            neumann *= 1e-250;
        }
    }
    let j0 = cur / norm;
    let y0 = FRAC_2_PI * (((0.5 * x).ln() + EULER_GAMMA) * j0 - 2.0 * neumann / norm);
    (j0, y0)
}

/// Hankel's expansion `P₀`, `Q₀` summed until the terms stop shrinking.
fn hankel_pq(x: f64) -> (f64, f64) {
    let mut p = 1.0;
    let mut q = 0.0;
    let mut coeff = 1.0; // (0, m) / (2x)^m with the (-1)^m absorbed
    let mut last = f64::INFINITY;
    for m in 1..60 {
        let odd = (2 * m - 1) as f64;
        coeff *= -(odd * odd) / (m as f64 * 8.0 * x);
        if coeff.abs() >= last {
            break;
        }
        last = coeff.abs();
        // m odd contributes to Q with sign (-1)^{(m-1)/2}; m even to P with
        // sign (-1)^{m/2}. coeff already carries (-1)^m.
        match m % 4 {
            1 => q += coeff,
            2 => p -= coeff,
            3 => q -= coeff,
            _ => p += coeff,
        }
        if coeff.abs() < 1e-17 {
            break;
        }
    }
    (p, q)
}

fn j0_y0_asymptotic(x: f64) -> (f64, f64) {
    let (p, q) = hankel_pq(x);
    let (s, c) = x.sin_cos();
    // cos(x - π/4) and sin(x - π/4) without forming x - π/4
    let cchi = (c + s) * std::f64::consts::FRAC_1_SQRT_2;
    let schi = (s - c) * std::f64::consts::FRAC_1_SQRT_2;
    let amp = (FRAC_2_PI / x).sqrt();
    (amp * (p * cchi - q * schi), amp * (p * schi + q * cchi))
}

fn k0_series(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let mut term = 1.0;
    let mut i0 = 1.0;
    let mut harmonic = 0.0;
    let mut tail = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= y / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += harmonic * term;
        if term * harmonic < 1e-18 * i0 {
            break;
        }
    }
    -((0.5 * x).ln() + EULER_GAMMA) * i0 + tail
}

/// `eˣ K₀(x) = ∫₀^∞ exp(-x(cosh t - 1)) dt` by the trapezoid rule, which
/// converges geometrically for this entire, rapidly decaying integrand.
fn k0_scaled_quadrature(x: f64) -> f64 {
    let h = (0.7 / x.sqrt()).min(0.125);
    let mut sum = 0.5;
    let mut i = 1;
    loop {
        let t = i as f64 * h;
        let f = (-x * (t.cosh() - 1.0)).exp();
        sum += f;
        if f < 1e-18 * sum {
            break;
        }
        i += 1;
    }
    sum * h
}

fn k0_asymptotic_scaled(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        let next = -term * odd * odd / (k as f64 * 8.0 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 {
            break;
        }
    }
    (FRAC_PI_2 / x).sqrt() * sum
}

fn k0_scaled(x: f64) -> f64 {
    if x <= K0_SERIES_MAX {
        k0_series(x) * x.exp()
    } else if x < K0_ASYMPTOTIC_MIN {
        k0_scaled_quadrature(x)
    } else {
        k0_asymptotic_scaled(x)
    }
}

/// `K₀(w)` for complex `w` with `Re w ≥ 0`, `w ≠ 0`.
///
/// Series for `|w| < 12` away from the positive real axis, trapezoid
/// quadrature of `∫₀^∞ e^{-w cosh t} dt` when `Re w ≥ 1`, and the asymptotic
/// expansion for `|w| ≥ 12`.
pub fn bessel_k0_complex(w: Complex64) -> Result<Complex64> {
    if !(w.re >= 0.0) || w.norm() == 0.0 || !w.im.is_finite() {
        return Err(Error::validation(format!(
            "bessel_k0_complex: need Re w ≥ 0 and w ≠ 0, got {w}"
        )));
    }
    let r = w.norm();
    if r >= 12.0 {
        let mut sum = Complex64::new(1.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for k in 1..60 {
            let odd = (2 * k - 1) as f64;
            let next = -term * (odd * odd / (k as f64 * 8.0)) / w;
            if next.norm() >= term.norm() {
                break;
            }
            term = next;
            sum += term;
            if term.norm() < 1e-17 {
                break;
            }
        }
        return Ok((Complex64::new(FRAC_PI_2, 0.0) / w).sqrt() * (-w).exp() * sum);
    }
    if w.re >= 1.0 {
        // Oscillation rate |Im w| sinh t; the step resolves it.
        let h = (0.4 / r).min(0.05);
        let mut sum = 0.5 * (-w).exp();
        let mut i = 1;
        loop {
            let t = i as f64 * h;
            let f = (-w * t.cosh()).exp();
            sum += f;
            if f.norm() < 1e-18 * sum.norm() && w.re * (t.cosh() - 1.0) > 40.0 {
                break;
            }
            i += 1;
        }
        return Ok(sum * h);
    }
    let y = 0.25 * w * w;
    let mut term = Complex64::new(1.0, 0.0);
    let mut i0 = Complex64::new(1.0, 0.0);
    let mut harmonic = 0.0;
    let mut tail = Complex64::new(0.0, 0.0);
    for k in 1..120 {
        let kf = k as f64;
        term *= y / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += harmonic * term;
        if term.norm() * harmonic < 1e-18 {
            break;
        }
    }
    Ok(-((0.5 * w).ln() + EULER_GAMMA) * i0 + tail)
}

/// Threshold on `|ν x²|` below which the Taylor series is used.
const NU_SERIES_MAX: f64 = 0.01;

/// `sin(√ν x)/√ν`, continued entirely through `ν = 0` (`= x`) to
/// `sinh(√-ν x)/√-ν` for `ν < 0`.
pub fn sinc_nu(x: f64, nu: f64) -> f64 {
    let mu = nu * x * x;
    if mu.abs() < NU_SERIES_MAX {
        // x Σ (-μ)^k / (2k+1)!
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..8 {
            term *= -mu / ((2 * k) as f64 * (2 * k + 1) as f64);
            sum += term;
        }
        x * sum
    } else if nu > 0.0 {
        let s = nu.sqrt();
        (s * x).sin() / s
    } else {
        let s = (-nu).sqrt();
        (s * x).sinh() / s
    }
}

/// `cos(√ν x)`, continued to `cosh(√-ν x)` for `ν < 0`.
pub fn cos_nu(x: f64, nu: f64) -> f64 {
    let mu = nu * x * x;
    if mu.abs() < NU_SERIES_MAX {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..8 {
            term *= -mu / ((2 * k - 1) as f64 * (2 * k) as f64);
            sum += term;
        }
        sum
    } else if nu > 0.0 {
        (nu.sqrt() * x).cos()
    } else {
        ((-nu).sqrt() * x).cosh()
    }
}

/// `d/dμ [sin(√μ)/√μ] = (cos√μ − sin√μ/√μ) / 2μ`, entire in `μ`.
pub fn sinc_nu_dnu(mu: f64) -> f64 {
    if mu.abs() < 0.05 {
        // Σ_{k≥1} (-1)^k k μ^{k-1} / (2k+1)!
        let mut fact = 6.0; // (2k+1)! for k = 1
        let mut pow = 1.0;
        let mut sum = 0.0;
        for k in 1..10 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * k as f64 * pow / fact;
            pow *= mu;
            fact *= (2 * k + 2) as f64 * (2 * k + 3) as f64;
        }
        sum
    } else {
        (cos_nu(1.0, mu) - sinc_nu(1.0, mu)) / (2.0 * mu)
    }
}

/// `Σ_{j≥1} 2 / (μ + (λ_j⁰)²) = tanh(√μ)/√μ`, the free-layer Green's value
/// continued to all real `μ` (poles at `μ = -(λ_j⁰)²`).
pub fn free_green(mu: f64) -> f64 {
    sinc_nu(1.0, -mu) / cos_nu(1.0, -mu)
}

/// Complex continuation of [`free_green`]; even in `√μ`, so the branch is
/// irrelevant.
pub fn free_green_complex(mu: Complex64) -> Complex64 {
    if mu.norm() < 1e-3 {
        // 1 − μ/3 + 2μ²/15 − 17μ³/315 + 62μ⁴/2835
        let c = [1.0, -1.0 / 3.0, 2.0 / 15.0, -17.0 / 315.0, 62.0 / 2835.0];
        return c
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * mu + a);
    }
    let s = mu.sqrt();
    s.tanh() / s
}

/// Large-argument leading term `√(π/2x) e^{-x}` of `K₀`.
pub fn k0_leading_asymptotic(x: f64) -> f64 {
    (PI / (2.0 * x)).sqrt() * (-x).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    /// Independent power-series oracle for J₀ (plain summation, 30 terms).
    fn j0_oracle(x: f64) -> f64 {
        let mut s = 0.0;
        let mut fact = 1.0;
        for k in 0..30 {
            if k > 0 {
                fact *= k as f64;
            }
            s += (-1.0f64).powi(k) * (x / 2.0).powi(2 * k) / (fact * fact);
        }
        s
    }

    #[test]
    fn j0_examples() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
        let oracle = j0_oracle(1.0);
        assert!((oracle - 0.765_197_686_6).abs() < 1e-10);
        assert!(rel(bessel_j0(1.0).unwrap(), oracle) < 1e-14);
        assert!(bessel_j0(2.404825557695773).unwrap().abs() < 1e-9);
        assert!(bessel_j0(-1.0).is_err());
    }

    #[test]
    fn j0_root_by_bisection_of_oracle() {
        let (mut a, mut b) = (2.0, 3.0);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if j0_oracle(a) * j0_oracle(m) <= 0.0 {
                b = m
            } else {
                a = m
            }
        }
        assert!((a - 2.404825557695773).abs() < 1e-14);
    }

    #[test]
    fn k0_examples() {
        assert!(rel(bessel_k0(1.0).unwrap(), 0.421_024_438_240_708_3) < 1e-12);
        let lead = k0_leading_asymptotic(10.0);
        assert!(rel(bessel_k0(10.0).unwrap(), lead) < 0.02);
        let small = -(0.5e-8f64).ln() - EULER_GAMMA;
        assert!(rel(bessel_k0(1e-8).unwrap(), small) < 1e-6);
        assert!(bessel_k0(0.0).is_err());
        assert!(bessel_k0(-2.0).is_err());
    }

    #[test]
    fn k0_underflow_flag() {
        let e = bessel_k0_eval(700.0).unwrap();
        assert!(!e.underflow && e.value > 0.0);
        let e = bessel_k0_eval(800.0).unwrap();
        assert!(e.underflow);
        assert_eq!(e.value, 0.0);
        assert!(bessel_k0_scaled(800.0).unwrap() > 0.0);
    }

    #[test]
    fn hankel_examples() {
        let h = hankel0_first(1.0).unwrap();
        assert!((h.re - 0.765_197_686_6).abs() < 1e-10);
        assert!((h.im - 0.088_256_964_2).abs() < 1e-10);
        let h50 = hankel0_first(50.0).unwrap();
        let flat = h50.norm() / (2.0 / (PI * 50.0)).sqrt();
        assert!((flat - 1.0).abs() < 0.05);
        assert!(hankel0_first(0.0).is_err());
    }

    #[test]
    fn k0_is_decreasing() {
        let xs: Vec<f64> = (1..400).map(|i| i as f64 * 0.1).collect();
        let v: Vec<f64> = xs.iter().map(|&x| bessel_k0(x).unwrap()).collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]));
        assert!(v.iter().all(|&k| k > 0.0));
    }

    #[test]
    fn regimes_agree_at_crossovers() {
        for &x in &[JY_SERIES_MAX, JY_ASYMPTOTIC_MIN] {
            let a = j0_y0_series(x);
            let b = j0_y0_miller(x);
            if x == JY_ASYMPTOTIC_MIN {
                let c = j0_y0_asymptotic(x);
                assert!((b.0 - c.0).abs() < 1e-14 && (b.1 - c.1).abs() < 1e-14);
            } else {
                assert!((a.0 - b.0).abs() < 1e-13 && (a.1 - b.1).abs() < 1e-13);
            }
        }
        let x = K0_SERIES_MAX;
        assert!(rel(k0_series(x) * x.exp(), k0_scaled_quadrature(x)) < 1e-13);
        let x = K0_ASYMPTOTIC_MIN;
        assert!(rel(k0_asymptotic_scaled(x), k0_scaled_quadrature(x)) < 1e-14);
    }

    #[test]
    fn complex_k0_matches_real_on_axis() {
        for &x in &[0.3, 1.0, 5.0, 11.0, 20.0] {
            let c = bessel_k0_complex(Complex64::new(x, 0.0)).unwrap();
            assert!(rel(c.re, bessel_k0(x).unwrap()) < 1e-12, "x={x}");
            assert!(c.im.abs() < 1e-12 * c.re);
        }
    }

    #[test]
    fn complex_k0_continues_to_hankel() {
        // K₀(δ − i x) → (iπ/2) H₀⁽¹⁾(x) as δ ↓ 0.
        for &x in &[0.5, 1.0, 3.0, 8.0, 15.0] {
            let k = bessel_k0_complex(Complex64::new(1e-12, -x)).unwrap();
            let h = Complex64::new(0.0, FRAC_PI_2) * hankel0_first(x).unwrap();
            assert!((k - h).norm() < 1e-10 * h.norm(), "x={x}: {k} vs {h}");
        }
    }

    #[test]
    fn sinc_and_cos_examples() {
        assert!((sinc_nu(1.0, PI * PI / 4.0) - 2.0 / PI).abs() < 1e-15);
        assert_eq!(sinc_nu(0.7, 0.0), 0.7);
        assert!((sinc_nu(1.0, -1.0) - 1.175_201_193_6).abs() < 1e-10);
        assert!(cos_nu(1.0, PI * PI / 4.0).abs() < 1e-12);
        assert_eq!(cos_nu(1.0, 0.0), 1.0);
        assert!((cos_nu(1.0, -1.0) - 1.543_080_634_8).abs() < 1e-10);
    }

    #[test]
    fn sinc_smooth_across_threshold() {
        for &x in &[0.3, 1.0] {
            let edge = NU_SERIES_MAX / (x * x);
            for &nu in &[
                edge * (1.0 - 1e-9),
                edge * (1.0 + 1e-9),
                -edge * (1.0 - 1e-9),
                -edge * (1.0 + 1e-9),
            ] {
                let exact = if nu > 0.0 {
                    (nu.sqrt() * x).sin() / nu.sqrt()
                } else {
                    ((-nu).sqrt() * x).sinh() / (-nu).sqrt()
                };
                assert!(rel(sinc_nu(x, nu), exact) < 1e-14);
                let exact_c = if nu > 0.0 {
                    (nu.sqrt() * x).cos()
                } else {
                    ((-nu).sqrt() * x).cosh()
                };
                assert!(rel(cos_nu(x, nu), exact_c) < 1e-14);
            }
        }
    }

    #[test]
    fn derivative_identity_by_finite_differences() {
        let h = 1e-5;
        for &nu in &[-30.0, -1.0, -1e-3, 0.0, 1e-3, 2.0, 50.0, 400.0] {
            for &x in &[0.1, 0.5, 0.9] {
                let fd = (sinc_nu(x + h, nu) - sinc_nu(x - h, nu)) / (2.0 * h);
                assert!((fd - cos_nu(x, nu)).abs() < 1e-6 * (1.0 + cos_nu(x, nu).abs()));
            }
        }
    }

    #[test]
    fn sinc_nu_derivative_in_nu() {
        for &mu in &[-20.0, -0.04, -1e-4, 0.0, 1e-4, 0.049, 0.06, 3.0, 90.0] {
            let h = 1e-6 * (1.0 + f64::abs(mu));
            let fd = (sinc_nu(1.0, mu + h) - sinc_nu(1.0, mu - h)) / (2.0 * h);
            assert!(
                (fd - sinc_nu_dnu(mu)).abs() < 1e-7 * (1.0 + fd.abs()),
                "mu={mu}"
            );
        }
    }

    #[test]
    fn free_green_matches_partial_fractions() {
        for &mu in &[-2.0, 0.0, 1.0, 25.0] {
            let direct: f64 = (1..=1_000_000)
                .map(|j| 2.0 / (mu + crate::model::free_eigenvalue(j)))
                .sum();
            // tail beyond 10⁶ terms ≈ 2/(π² · 10⁶)
            let tail = 2.0 / (PI * PI * 1e6);
            assert!((free_green(mu) - direct - tail).abs() < 1e-10);
            let c = free_green_complex(Complex64::new(mu, 0.0));
            assert!((c.re - free_green(mu)).abs() < 1e-13);
        }
        assert!(
            (free_green_complex(Complex64::new(1e-4, 2e-4))
                - free_green_complex(Complex64::new(2e-3, 2e-4)))
            .norm()
                < 1e-3
        );
    }
}
