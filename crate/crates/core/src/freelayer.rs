//! Tail sums and products over the free-layer eigenvalues
//! `e_j = (λ_j⁰)² = π²(j − ½)²`, used to complete truncated modal sums.

use std::f64::consts::PI;

use crate::model::free_eigenvalue;

/// `Σ_{i>n} ((i−½)π)^{-2k}` by the midpoint Euler–Maclaurin formula, `n ≥ 100`.
pub fn free_power_tail(k: u32, n: usize) -> f64 {
    let p = 2.0 * f64::from(k);
    let y = n as f64 * PI;
    let integral = y.powf(1.0 - p) / (PI * (p - 1.0));
    let d1 = -p * PI * y.powf(-p - 1.0);
    let d3 = -p * (p + 1.0) * (p + 2.0) * PI.powi(3) * y.powf(-p - 3.0);
    let d5 = -p * (p + 1.0) * (p + 2.0) * (p + 3.0) * (p + 4.0) * PI.powi(5) * y.powf(-p - 5.0);
    integral + d1 / 24.0 - 7.0 * d3 / 5760.0 + 31.0 * d5 / 967_680.0
}

/// `Π_{i>n} (1 − c/(λ_i⁰)²)`: explicit factors until `|c|` is small against
/// `(λ_i⁰)²`, then `exp(−Σ_k c^k S_k / k)`.
pub fn free_tail_product(c: f64, n: usize) -> f64 {
    let mut start = n.max(100);
    while c.abs() > 1e-2 * free_eigenvalue(start + 1) {
        start *= 2;
    }
    let explicit: f64 = (n + 1..=start)
        .map(|i| 1.0 - c / free_eigenvalue(i))
        .product();
    let mut log = 0.0;
    let mut ck = 1.0;
    for k in 1..=20u32 {
        ck *= c;
        let term = ck * free_power_tail(k, start) / f64::from(k);
        log -= term;
        if term.abs() <= 1e-18 * log.abs() {
            break;
        }
    }
    explicit * log.exp()
}

/// `Σ_{j>n} e_j^{-p} / (s + e_j)`.
///
/// Explicit terms until `|s|` is small against `e_j`, then a power series in
/// `s` over the Euler–Maclaurin tails.
pub fn free_resolvent_tail(s: f64, n: usize, p: u32) -> f64 {
    let mut start = n.max(100);
    while s.abs() > 1e-2 * free_eigenvalue(start + 1) {
        start *= 2;
    }
    let explicit: f64 = (n + 1..=start)
        .rev()
        .map(|j| {
            let e = free_eigenvalue(j);
            e.powi(-(p as i32)) / (s + e)
        })
        .sum();
    let mut series = 0.0;
    let mut sk = 1.0;
    for k in 0..20u32 {
        let term = sk * free_power_tail(k + p + 1, start);
        series += term;
        if term.abs() <= 1e-18 * series.abs() {
            break;
        }
        sk *= -s;
    }
    explicit + series
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{cos_nu, free_green};

    #[test]
    fn power_tails_match_direct_sums() {
        for &(k, n) in &[(1u32, 100usize), (2, 100), (3, 250), (6, 400)] {
            let direct: f64 = (n + 1..n + 2_000_000)
                .rev()
                .map(|i| free_eigenvalue(i).powi(-(k as i32)))
                .sum();
            let rest = if k == 1 {
                1.0 / (PI * PI * (n + 1_999_999) as f64)
            } else {
                0.0
            };
            let em = free_power_tail(k, n);
            assert!(
                ((direct + rest) - em).abs() < 1e-11 * em,
                "k={k} n={n}: {}",
                (direct + rest) / em - 1.0
            );
        }
    }

    #[test]
    fn tail_product_is_cosine_remainder() {
        for &c in &[1.0, -3.0, 50.0, -1e4, 2e5] {
            let n = 10;
            let head: f64 = (1..=n).map(|i| 1.0 - c / free_eigenvalue(i)).product();
            let want = cos_nu(1.0, c) / head;
            let got = free_tail_product(c, n);
            assert!(
                (got - want).abs() < 1e-11 * want.abs(),
                "c={c}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn resolvent_tail_matches_closed_forms() {
        for &s in &[-3.0, 0.0, 0.5, 40.0, 5e4] {
            let n = 7;
            let head: f64 = (1..=n).map(|j| 2.0 / (s + free_eigenvalue(j))).sum();
            let want = free_green(s) - head;
            let got = 2.0 * free_resolvent_tail(s, n, 0);
            assert!(
                (got - want).abs() < 1e-12 * want.abs(),
                "s={s}: {got} vs {want}"
            );
        }
        // p = 1 by partial fractions: 1/(e(s+e)) = (1/e − 1/(s+e))/s
        let (s, n) = (30.0, 12);
        let s1 = 0.5 - (1..=n).map(|j| 1.0 / free_eigenvalue(j)).sum::<f64>();
        let want = (s1 - free_resolvent_tail(s, n, 0)) / s;
        assert!((free_resolvent_tail(s, n, 1) - want).abs() < 1e-10 * want);
    }
}
