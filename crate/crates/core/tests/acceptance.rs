//! Acceptance criteria 1–10. Each criterion prints one PASS/FAIL line; the
//! test fails if any criterion fails.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;
use waveguide_inverse::cli::profile_errors;
use waveguide_inverse::forward::{
    eigen_data, eigen_data_checked, eigenvalues, Propagator, DEFAULT_GRID,
};
use waveguide_inverse::glevitan::{gl_kernel, gl_solve, reconstruct, DEFAULT_M_GL, DEFAULT_N_FREE};
use waveguide_inverse::invert::{
    alphas, char_product, extract_spectral_data, gamma_const, ProductModel,
};
use waveguide_inverse::model::{
    free_eigenvalue, geometric_grid, Mode, PotentialProfile, SpectralData,
};
use waveguide_inverse::specfun::{bessel_j0, bessel_k0, bessel_y0, k0_leading_asymptotic};
use waveguide_inverse::synth::{
    greens_g, hankel_transform, inversion_lambda_grid, modal_g, modal_g_complex,
    synthesize_g_of_lambda, synthesize_g_of_r, Tail,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn constant(c: f64) -> PotentialProfile {
    PotentialProfile::constant(c, 1.0).unwrap()
}

fn sine_bump() -> PotentialProfile {
    PotentialProfile::from_fn(400, 1.0, |z| 0.5 + 0.3 * (PI * z).sin()).unwrap()
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

fn free_case_identity() -> Outcome {
    let t0 = Instant::now();
    let sd = SpectralData::free(50);
    let err = max_of((0..=50).map(|i| {
        let l = 0.1 + 9.9 * i as f64 / 50.0;
        let g = modal_g(&sd, l, Tail::ConstantShift).unwrap();
        let want = l.tanh() / l;
        ((g - want) / want).abs()
    }));
    let elapsed = t0.elapsed().as_secs_f64();
    // independent confirmation of the closed form by brute-force summation
    let brute: f64 = (1..=1_000_000)
        .rev()
        .map(|j| 2.0 / (1.0 + free_eigenvalue(j)))
        .sum::<f64>()
        + 2.0 / (PI * PI * 1e6);
    let brute_err = (brute - 1f64.tanh()).abs();
    check(
        err <= 1e-6 && elapsed < 1.0 && brute_err < 1e-10,
        format!(
            "max rel err {err:.2e} in {elapsed:.3} s; brute force at λ=1 off by {brute_err:.1e}"
        ),
    )
}

fn greens_function_oracle() -> Outcome {
    let mut worst = 0.0f64;
    for q in [
        constant(0.0),
        constant(1.0),
        PotentialProfile::from_fn(400, 1.0, |z| (PI * z).sin()).unwrap(),
    ] {
        let sd = eigen_data(&q, 200, DEFAULT_GRID).unwrap().spectral_data();
        let prop = Propagator::new(&q, DEFAULT_GRID).unwrap();
        for l in [0.5, 1.0, 2.0, 5.0] {
            let a = modal_g(&sd, l, Tail::ConstantShift).unwrap();
            let b = greens_g(&prop, l).unwrap();
            worst = worst.max((a - b).abs());
        }
    }
    check(worst <= 1e-6, format!("max |modal − Green| {worst:.2e}"))
}

fn eigenvalue_closed_forms() -> Outcome {
    let mut worst = 0.0f64;
    for c in [0.0, 1.0, 3.0] {
        let ev = eigenvalues(&constant(c), 20, DEFAULT_GRID).unwrap();
        for (j, &v) in ev.iter().enumerate() {
            worst = worst.max((v - (free_eigenvalue(j + 1) - c)).abs());
        }
    }
    // λ_j² − (λ_j⁰)² + ∫q stays bounded (and small) for the first 200 modes
    let q = sine_bump();
    let ev = eigenvalues(&q, 200, DEFAULT_GRID).unwrap();
    let rem = max_of(
        ev.iter()
            .enumerate()
            .map(|(j, v)| (v - free_eigenvalue(j + 1) + q.integral()).abs()),
    );
    check(
        worst <= 1e-10 && rem < 0.1,
        format!("constant-q max err {worst:.2e}; asymptotic remainder ≤ {rem:.2e} for j ≤ 200"),
    )
}

fn norming_identity() -> Outcome {
    let profiles = [
        sine_bump(),
        PotentialProfile::from_fn(400, 1.0, |z| 2.0 * z - 0.4).unwrap(),
        PotentialProfile::from_fn(400, 1.0, |z| 3.0 * (-30.0 * (z - 0.6f64).powi(2)).exp())
            .unwrap(),
    ];
    let mut worst = 0.0f64;
    for q in &profiles {
        let (_, checks) = eigen_data_checked(q, 10, DEFAULT_GRID).unwrap();
        worst = worst.max(max_of(checks.iter().map(|c| c.relative_gap())));
    }
    check(
        worst <= 1e-8,
        format!("max relative gap {worst:.2e} over 3 profiles, j ≤ 10"),
    )
}

fn gamma_closed_form() -> Outcome {
    let mut worst = 0.0f64;
    for c in [1.0, PI * PI / 9.0] {
        let g = gamma_const(&SpectralData::shifted_free(200, c).lambda_sq(), c).unwrap();
        worst = worst.max((g - c.sqrt().cos()).abs());
    }
    check(worst <= 1e-6, format!("max |γ − cos √c| {worst:.2e}"))
}

fn product_identity_and_asymptotics() -> Outcome {
    let q = sine_bump();
    let es = eigen_data(&q, 200, DEFAULT_GRID).unwrap();
    let pm = ProductModel::new(es.lambda_sq(), es.spectral_data().tail_shift(5)).unwrap();
    let prop = Propagator::new(&q, DEFAULT_GRID).unwrap();
    let prod_err = max_of(
        [
            -400.0, -30.0, -1.0, 0.5, 3.0, 10.0, 40.0, 90.0, 250.0, 700.0,
        ]
        .iter()
        .map(|&nu| {
            let w = prop.characteristic(nu);
            (char_product(&pm, nu) - w).abs() / w.abs().max(1.0)
        }),
    );
    // W(s²) − cos s = B sin s / s + O(1/s²): bounded after scaling by s,
    // B by least squares on sin s / s
    let ss: Vec<f64> = (0..4000)
        .map(|i| 10.0 + 990.0 * i as f64 / 3999.0)
        .collect();
    let mut bound = 0.0f64;
    let (mut num, mut den) = (0.0, 0.0);
    for &s in &ss {
        let d = prop.characteristic(s * s) - s.cos();
        bound = bound.max((s * d).abs());
        let basis = s.sin() / s;
        num += basis * d;
        den += basis * basis;
    }
    let b = num / den;
    let want = -0.5 * q.integral();
    let rel = ((b - want) / want).abs();
    check(
        prod_err <= 1e-6 && bound < 1.0 && rel <= 0.05,
        format!("product err {prod_err:.2e}; max s|W − cos s| {bound:.3}; B = {b:.5} vs −½∫q = {want:.5}"),
    )
}

fn spectral_data_recovery() -> Outcome {
    let mut dl = 0.0f64;
    let mut dt = 0.0f64;
    let mut residue = 0.0f64;
    for c in [0.0, 1.0] {
        let es = eigen_data(&constant(c), 200, DEFAULT_GRID).unwrap();
        let sd = es.spectral_data();
        let curve =
            synthesize_g_of_lambda(&sd, &inversion_lambda_grid(5), Tail::ConstantShift).unwrap();
        let fit = extract_spectral_data(&curve, 5).unwrap();
        for (j, m) in fit.modes.modes().iter().enumerate() {
            dl = dl.max((m.lambda_sq - es.pairs[j].lambda_sq).abs());
            dt = dt.max((m.t - es.pairs[j].t).abs());
        }
        // (λ − iλ_j) G(λ) → t_j / (2iλ_j), averaged over λ = iλ_j ± δ
        for p in es.pairs.iter().take(5) {
            let pole = Complex64::new(0.0, p.lambda_sq.sqrt());
            let d = 1e-4;
            let lim = (modal_g_complex(&sd, pole + d, Tail::ConstantShift) * d
                - modal_g_complex(&sd, pole - d, Tail::ConstantShift) * d)
                / 2.0;
            let want = p.t / (2.0 * pole);
            residue = residue.max((lim - want).norm());
        }
    }
    check(
        dl <= 1e-5 && dt <= 1e-4 && residue <= 1e-6,
        format!("max |Δλ²| {dl:.2e}, max |Δt| {dt:.2e}, residue law err {residue:.2e}"),
    )
}

fn hankel_consistency() -> Outcome {
    let rs = geometric_grid(1e-5, 40.0, 4000);
    let single = SpectralData::new(vec![Mode {
        lambda_sq: 1.0,
        t: 1.0,
    }])
    .unwrap();
    let free = SpectralData::free(200);
    let mut worst = 0.0f64;
    for (sd, tail) in [(single, Tail::Off), (free, Tail::ConstantShift)] {
        let curve = synthesize_g_of_r(&sd, &rs, tail).unwrap();
        for l in [0.5, 1.0, 2.0, 5.0] {
            let got = hankel_transform(&curve, l).unwrap();
            let want = modal_g(&sd, l, tail).unwrap();
            worst = worst.max((got - want).abs() / want.abs());
        }
    }
    check(
        worst <= 1e-3,
        format!("max rel err {worst:.2e} (single mode and q ≡ 0)"),
    )
}

fn fitted_reconstruction(q: &PotentialProfile) -> PotentialProfile {
    let es = eigen_data(q, 200, DEFAULT_GRID).unwrap();
    let curve = synthesize_g_of_lambda(
        &es.spectral_data(),
        &inversion_lambda_grid(5),
        Tail::ConstantShift,
    )
    .unwrap();
    let fit = extract_spectral_data(&curve, 5).unwrap();
    let pm = ProductModel::from_fit(&fit).unwrap();
    let a = alphas(&fit, &pm).unwrap();
    reconstruct(&fit.modes.lambda_sq(), &a, DEFAULT_M_GL, q.k())
        .unwrap()
        .1
}

fn gelfand_levitan_round_trips() -> Outcome {
    let free = SpectralData::free(5);
    let a0: Vec<f64> = (1..=5).map(|j| 0.5 / free_eigenvalue(j)).collect();
    let sol =
        gl_solve(&gl_kernel(&free.lambda_sq(), &a0, 0.0, DEFAULT_N_FREE, DEFAULT_M_GL).unwrap())
            .unwrap();
    let fixed = max_of(sol.q_hat.iter().map(|v| v.abs()));
    let one = profile_errors(&fitted_reconstruction(&constant(1.0)), &constant(1.0)).sup_interior;
    let t0 = Instant::now();
    let sine = sine_bump();
    let rel = profile_errors(&fitted_reconstruction(&sine), &sine)
        .l2_rel
        .unwrap();
    let elapsed = t0.elapsed().as_secs_f64();
    check(
        fixed <= 1e-8 && one <= 2e-2 && rel <= 0.05 && elapsed < 60.0,
        format!(
            "free ‖q̂‖∞ {fixed:.1e}; q≡1 sup err {one:.2e}; sine rel L2 {rel:.2e}; round trip {elapsed:.2} s"
        ),
    )
}

fn special_functions() -> Outcome {
    // mpmath, 40 digits
    let jy = [
        (0.5, 0.938_469_807_240_812_9, -0.444_518_733_506_706_56),
        (3.0, -0.260_051_954_901_933_44, 0.376_850_010_012_790_4),
        (12.0, 0.047_689_310_796_833_54, -0.225_237_312_634_361_43),
        (50.0, 0.055_812_327_669_251_815, -0.098_064_995_470_077_08),
        (700.0, -0.006_288_272_465_068_767, 0.029_494_308_180_893_82),
    ];
    let k0 = [
        (1e-6, 13.931_442_073_626_42),
        (1.0, 0.421_024_438_240_708_3),
        (5.0, 0.003_691_098_334_042_594),
        (50.0, 3.410_167_749_789_495_5e-23),
        (300.0, 3.723_694_854_889_143_3e-132),
    ];
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    let mut worst = 0.0f64;
    for (x, j, y) in jy {
        worst = worst
            .max(rel(bessel_j0(x).unwrap(), j))
            .max(rel(bessel_y0(x).unwrap(), y));
    }
    for (x, k) in k0 {
        worst = worst.max(rel(bessel_k0(x).unwrap(), k));
    }
    let ratio = bessel_k0(10.0).unwrap() / k0_leading_asymptotic(10.0);
    let asym = (ratio - 1.0).abs();
    check(
        worst <= 1e-10 && asym <= 0.1,
        format!("max rel err {worst:.2e}; K0(10)/leading asymptotic − 1 = {asym:.2e}"),
    )
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("free-case data identity", free_case_identity),
        ("Green's-function oracle", greens_function_oracle),
        ("eigenvalue closed forms", eigenvalue_closed_forms),
        ("norming identity", norming_identity),
        ("γ closed form", gamma_closed_form),
        (
            "product identity and asymptotics",
            product_identity_and_asymptotics,
        ),
        ("spectral-data recovery", spectral_data_recovery),
        ("Hankel consistency", hankel_consistency),
        ("Gelfand–Levitan round trips", gelfand_levitan_round_trips),
        ("special functions", special_functions),
    ];
    // straight to the stderr handle: the harness only captures the print macros
    let mut err = std::io::stderr().lock();
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (tag, detail) = match f() {
            Ok(detail) => ("PASS", detail),
            Err(detail) => {
                failed.push(i + 1);
                ("FAIL", detail)
            }
        };
        writeln!(err, "criterion {:>2} {tag}  {name}: {detail}", i + 1).unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
