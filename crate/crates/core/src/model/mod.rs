//! Domain types shared by every stage of the pipeline.
//!
//! All values are immutable after construction. Depth is normalized so the
//! layer occupies `z ∈ [0, 1]`, and profiles carry the potential
//! `q(z) = k² n(z)` rather than the refraction coefficient itself.

pub mod io;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Potential `q(z) = k² n(z)` sampled on `[0, 1]`, piecewise-linear between
/// nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialProfile {
    nodes: Vec<f64>,
    values: Vec<f64>,
    k: f64,
}

impl PotentialProfile {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, k: f64) -> Result<Self> {
        validate_profile(PotentialProfile { nodes, values, k })
    }

    /// Constant potential `q ≡ c` on the two-node grid.
    pub fn constant(c: f64, k: f64) -> Result<Self> {
        Self::new(vec![0.0, 1.0], vec![c, c], k)
    }

    /// Samples `f` on a uniform grid of `m + 1` nodes.
    pub fn from_fn(m: usize, k: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::validation(
                "profile grid needs at least one interval",
            ));
        }
        let nodes = uniform_grid(m);
        let values = nodes.iter().map(|&z| f(z)).collect();
        Self::new(nodes, values, k)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Refraction coefficient `n = q / k²` at the nodes.
    pub fn refraction(&self) -> Vec<f64> {
        let k2 = self.k * self.k;
        self.values.iter().map(|q| q / k2).collect()
    }

    /// Index `i` of the segment `[nodes[i], nodes[i+1]]` containing `z`.
    fn segment(&self, z: f64) -> usize {
        let n = self.nodes.len();
        match self
            .nodes
            .binary_search_by(|probe| probe.partial_cmp(&z).unwrap())
        {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    /// Linear interpolant of `q` at `z` (clamped to `[0, 1]`).
    pub fn eval(&self, z: f64) -> f64 {
        let z = z.clamp(0.0, 1.0);
        let i = self.segment(z);
        let (z0, z1) = (self.nodes[i], self.nodes[i + 1]);
        let (q0, q1) = (self.values[i], self.values[i + 1]);
        q0 + (q1 - q0) * (z - z0) / (z1 - z0)
    }

    /// Exact moments `(∫ q dz, ∫ (z - c) q dz)` over `[a, b]` with
    /// `c = (a + b) / 2`, integrating the piecewise-linear interpolant
    /// segment by segment.
    pub fn moments(&self, a: f64, b: f64) -> (f64, f64) {
        let mid = 0.5 * (a + b);
        let mut m0 = 0.0;
        let mut m1 = 0.0;
        let mut lo = a;
        let mut i = self.segment(a);
        while lo < b {
            let hi = if i + 2 < self.nodes.len() {
                self.nodes[i + 1].min(b)
            } else {
                b
            };
            if hi > lo {
                // q is linear on [lo, hi]: Simpson's rule is exact for
                // q and for (z - mid) q.
                let zm = 0.5 * (lo + hi);
                let (ql, qm, qh) = (
                    self.eval_on(i, lo),
                    self.eval_on(i, zm),
                    self.eval_on(i, hi),
                );
                let w = (hi - lo) / 6.0;
                m0 += w * (ql + 4.0 * qm + qh);
                m1 += w * ((lo - mid) * ql + 4.0 * (zm - mid) * qm + (hi - mid) * qh);
            }
            lo = hi;
            i += 1;
        }
        (m0, m1)
    }

    fn eval_on(&self, i: usize, z: f64) -> f64 {
        let (z0, z1) = (self.nodes[i], self.nodes[i + 1]);
        let (q0, q1) = (self.values[i], self.values[i + 1]);
        q0 + (q1 - q0) * (z - z0) / (z1 - z0)
    }

    /// `∫₀¹ q dz`.
    pub fn integral(&self) -> f64 {
        self.nodes
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(z, q)| 0.5 * (z[1] - z[0]) * (q[0] + q[1]))
            .sum()
    }

    /// Sup norm of the node values.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Checks every profile invariant and hands the profile back unchanged.
pub fn validate_profile(p: PotentialProfile) -> Result<PotentialProfile> {
    if p.nodes.len() != p.values.len() {
        return Err(Error::validation(format!(
            "profile has {} nodes but {} values",
            p.nodes.len(),
            p.values.len()
        )));
    }
    if p.nodes.len() < 2 {
        return Err(Error::validation("profile needs at least two nodes"));
    }
    if !(p.k.is_finite() && p.k > 0.0) {
        return Err(Error::validation(format!(
            "wavenumber k must be positive, got {}",
            p.k
        )));
    }
    if p.nodes[0] != 0.0 {
        return Err(Error::validation("profile domain must start at 0"));
    }
    if *p.nodes.last().unwrap() != 1.0 {
        return Err(Error::validation("profile domain must end at 1"));
    }
    if let Some(i) = p.nodes.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::validation(format!(
            "profile nodes not strictly increasing at index {}",
            i + 1
        )));
    }
    if let Some(i) = p.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::validation(format!(
            "profile value at index {i} is not finite"
        )));
    }
    Ok(p)
}

/// Linear interpolation of `p` onto the uniform grid of `m + 1` nodes.
pub fn resample_profile(p: &PotentialProfile, m: usize) -> Result<PotentialProfile> {
    if m == 0 {
        return Err(Error::validation("resample grid size must be at least 1"));
    }
    let nodes = uniform_grid(m);
    let mut values: Vec<f64> = nodes.iter().map(|&z| p.eval(z)).collect();
    values[0] = p.values[0];
    values[m] = *p.values.last().unwrap();
    PotentialProfile::new(nodes, values, p.k)
}

/// `m + 1` equally spaced points on `[0, 1]`, endpoints exact.
pub fn uniform_grid(m: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
    g[m] = 1.0;
    g
}

/// One waveguide mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    /// Eigenvalue `λ_j²`.
    pub lambda_sq: f64,
    /// `Ψ_j(1)` for the solution normalized by `Ψ'(0) = 1`.
    pub psi_end: f64,
    /// Norming constant `‖Ψ_j‖²`.
    pub alpha: f64,
    /// Endpoint value of the normalized eigenfunction squared, `ψ_j(1)²`.
    pub t: f64,
}

impl EigenPair {
    /// Relative defect of `t · α = Ψ(1)²`.
    pub fn consistency_defect(&self) -> f64 {
        let p2 = self.psi_end * self.psi_end;
        (self.t * self.alpha - p2).abs() / p2.max(f64::MIN_POSITIVE)
    }
}

/// One entry of the boundary spectral data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub lambda_sq: f64,
    pub t: f64,
}

/// The data set `{λ_j², t_j}` carried by the boundary measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    modes: Vec<Mode>,
}

impl SpectralData {
    pub fn new(modes: Vec<Mode>) -> Result<Self> {
        for (i, m) in modes.iter().enumerate() {
            if !m.lambda_sq.is_finite() {
                return Err(Error::validation(format!(
                    "mode {i}: lambda_sq is not finite"
                )));
            }
            if !(m.t.is_finite() && m.t > 0.0) {
                return Err(Error::validation(format!(
                    "mode {i}: t must be positive, got {}",
                    m.t
                )));
            }
        }
        if let Some(i) = modes
            .windows(2)
            .position(|w| !(w[1].lambda_sq > w[0].lambda_sq))
        {
            return Err(Error::validation(format!(
                "eigenvalues must be strictly increasing (modes {} and {})",
                i,
                i + 1
            )));
        }
        Ok(SpectralData { modes })
    }

    /// Free-layer data `λ_j² = π²(j−½)²`, `t_j = 2`, for `j = 1..=n`.
    pub fn free(n: usize) -> Self {
        Self::shifted_free(n, 0.0)
    }

    /// Constant-potential data `λ_j² = π²(j−½)² − c`, `t_j = 2`.
    pub fn shifted_free(n: usize, c: f64) -> Self {
        let modes = (1..=n)
            .map(|j| Mode {
                lambda_sq: free_eigenvalue(j) - c,
                t: 2.0,
            })
            .collect();
        SpectralData { modes }
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn lambda_sq(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.lambda_sq).collect()
    }

    pub fn t(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.t).collect()
    }

    /// Mean of `(λ_j⁰)² − λ_j²` over the last `window` modes: the
    /// asymptotic constant shift used for tail corrections.
    pub fn tail_shift(&self, window: usize) -> f64 {
        tail_shift(&self.lambda_sq(), window)
    }
}

impl From<&[EigenPair]> for SpectralData {
    fn from(pairs: &[EigenPair]) -> Self {
        SpectralData {
            modes: pairs
                .iter()
                .map(|p| Mode {
                    lambda_sq: p.lambda_sq,
                    t: p.t,
                })
                .collect(),
        }
    }
}

/// `(λ_j⁰)² = π²(j − ½)²`, the `j`-th (1-based) eigenvalue of the free layer.
pub fn free_eigenvalue(j: usize) -> f64 {
    let s = std::f64::consts::PI * (j as f64 - 0.5);
    s * s
}

/// Mean of `(λ_j⁰)² − λ_j²` over the last `window` entries of an ascending
/// eigenvalue list whose first entry is mode 1.
pub fn tail_shift(lambda_sq: &[f64], window: usize) -> f64 {
    let n = lambda_sq.len();
    if n == 0 {
        return 0.0;
    }
    let start = n.saturating_sub(window.max(1));
    let count = (n - start) as f64;
    (start..n)
        .map(|i| free_eigenvalue(i + 1) - lambda_sq[i])
        .sum::<f64>()
        / count
}

/// One jump of the spectral function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    /// Jump location `λ_j²`.
    pub location: f64,
    /// Jump size `1/α_j`.
    pub weight: f64,
}

/// Nondecreasing step function `ρ(λ) = Σ_{λ_j² < λ} 1/α_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralFunction {
    jumps: Vec<Jump>,
}

impl SpectralFunction {
    pub fn new(jumps: Vec<Jump>) -> Result<Self> {
        if let Some(j) = jumps
            .iter()
            .find(|j| !(j.weight.is_finite() && j.weight > 0.0))
        {
            return Err(Error::validation(format!(
                "spectral jump at {} has nonpositive weight {}",
                j.location, j.weight
            )));
        }
        if jumps.windows(2).any(|w| !(w[1].location > w[0].location)) {
            return Err(Error::validation(
                "spectral jump locations must be strictly increasing",
            ));
        }
        Ok(SpectralFunction { jumps })
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        self.jumps
            .iter()
            .take_while(|j| j.location < lambda)
            .map(|j| j.weight)
            .sum()
    }
}

/// What a sampled curve represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[allow(non_camel_case_types)]
pub enum CurveKind {
    G_of_lambda,
    g_of_r,
    field_slice,
}

impl CurveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::G_of_lambda => "G_of_lambda",
            CurveKind::g_of_r => "g_of_r",
            CurveKind::field_slice => "field_slice",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "G_of_lambda" => Some(CurveKind::G_of_lambda),
            "g_of_r" => Some(CurveKind::g_of_r),
            "field_slice" => Some(CurveKind::field_slice),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveValues {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl CurveValues {
    pub fn len(&self) -> usize {
        match self {
            CurveValues::Real(v) => v.len(),
            CurveValues::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Ordered `(abscissa, value)` samples of `G(λ)`, `g(r)` or a field slice.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    abscissae: Vec<f64>,
    values: CurveValues,
    kind: CurveKind,
}

impl SampledCurve {
    pub fn new(abscissae: Vec<f64>, values: CurveValues, kind: CurveKind) -> Result<Self> {
        if abscissae.len() != values.len() {
            return Err(Error::validation(format!(
                "curve has {} abscissae but {} values",
                abscissae.len(),
                values.len()
            )));
        }
        if abscissae.iter().any(|x| !x.is_finite()) {
            return Err(Error::validation("curve abscissae must be finite"));
        }
        if abscissae.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::validation(
                "curve abscissae must be strictly increasing",
            ));
        }
        Ok(SampledCurve {
            abscissae,
            values,
            kind,
        })
    }

    pub fn real(abscissae: Vec<f64>, values: Vec<f64>, kind: CurveKind) -> Result<Self> {
        Self::new(abscissae, CurveValues::Real(values), kind)
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn values(&self) -> &CurveValues {
        &self.values
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.abscissae.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissae.is_empty()
    }

    /// Real parts of the values (the values themselves for real curves).
    pub fn real_values(&self) -> Vec<f64> {
        match &self.values {
            CurveValues::Real(v) => v.clone(),
            CurveValues::Complex(v) => v.iter().map(|c| c.re).collect(),
        }
    }
}

/// `n` points geometrically spaced on `[lo, hi]`, endpoints exact.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let ratio = (hi / lo).ln() / (n - 1) as f64;
    let mut g: Vec<f64> = (0..n).map(|i| lo * (ratio * i as f64).exp()).collect();
    g[0] = lo;
    g[n - 1] = hi;
    g
}
