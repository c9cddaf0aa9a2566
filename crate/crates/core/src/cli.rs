//! Command-line orchestration: argument parsing, the flat `key=value`
//! config file, per-command runners and reports.
//!
//! Values resolve as flags > config file > defaults. A config key that does
//! not apply to the running command is ignored, so one file can serve a
//! whole session; a flag that does not apply is an error.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::forward::{eigen_data, eigen_data_checked, Propagator, DEFAULT_GRID};
use crate::glevitan::{gl_kernel_with, gl_solve, recover_q, Completion, Reference, DEFAULT_M_GL};
use crate::invert::{
    alphas, char_product, extract_spectral_data_with, format_spec_json, parse_spec_json,
    spectral_function, FitOptions, ProductModel, SpectralEstimate,
};
use crate::model::io::{
    format_curve_csv, format_eigen_json, format_field_slice_csv, format_q_hat_csv, format_rho_csv,
    parse_curve_csv, parse_eigen_json, parse_profile_csv, parse_spectral_json, EigenFile,
};
use crate::model::{geometric_grid, CurveKind, PotentialProfile, SampledCurve, SpectralData};
use crate::numerics::trapezoid_uniform;
use crate::specfun::{bessel_j0, bessel_k0, bessel_y0, cos_nu};
use crate::synth::{
    default_r_grid, field_u_eps, hankel_transform, inversion_lambda_grid, synthesize_g_of_lambda,
    synthesize_g_of_r, FieldPoint, Tail,
};

/// Modes computed by the forward stage of `roundtrip`, and the default for
/// `forward` and `synthesize`.
pub const FORWARD_MODES: usize = 200;
/// Modes fitted by default in `invert` and `roundtrip`.
pub const FIT_MODES: usize = 5;
/// Default relative tolerance of the `selfcheck` special-function rows.
pub const SPECFUN_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(
    name = "waveguide",
    version,
    about = "Forward synthesis and inversion for a layered acoustic waveguide"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues and norming constants of a profile.
    Forward(Flags),
    /// Sample G(λ), g(r) or a field slice.
    Synthesize(Flags),
    /// Fit G(λ) and recover eigenvalues, weights and norming constants.
    Invert(Flags),
    /// Gelfand–Levitan reconstruction of q from spec.json.
    Reconstruct(Flags),
    /// Forward, synthesize, invert and reconstruct, with error report.
    Roundtrip(Flags),
    /// Oracle table for the special functions and the product identities.
    Selfcheck(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Flat key=value configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Profile CSV (`z,q`, optional `# k=`).
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// synthesize: curve kind G, g or field; invert: curve CSV path.
    #[arg(long)]
    pub curve: Option<String>,
    /// Spectral input: spec.json, or the forward eigen file.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub modes: Option<usize>,
    /// forward/synthesize: integration steps; reconstruct/roundtrip: GL grid.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Abscissae: `geom:LO:HI:N`, `lin:LO:HI:N` or `list:X1,X2,...`.
    #[arg(long)]
    pub grid_spec: Option<String>,
    #[arg(long, value_enum)]
    pub tail: Option<OnOff>,
    /// Absorption ε of the field slice.
    #[arg(long)]
    pub eps: Option<f64>,
    /// invert/roundtrip: fit misfit tolerance; selfcheck: oracle tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON report path.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// rho.csv path for `invert`.
    #[arg(long)]
    pub rho: Option<PathBuf>,
    /// Depth of the field slice.
    #[arg(long)]
    pub depth: Option<f64>,
    /// Wavenumber used for `n = q/k²` in `reconstruct`.
    #[arg(long)]
    pub k: Option<f64>,
    /// selfcheck: relative perturbation applied to γ.
    #[arg(long)]
    pub perturb_gamma: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Forward,
    Synthesize,
    Invert,
    Reconstruct,
    Roundtrip,
    Selfcheck,
}

impl CommandKind {
    fn name(self) -> &'static str {
        match self {
            CommandKind::Forward => "forward",
            CommandKind::Synthesize => "synthesize",
            CommandKind::Invert => "invert",
            CommandKind::Reconstruct => "reconstruct",
            CommandKind::Roundtrip => "roundtrip",
            CommandKind::Selfcheck => "selfcheck",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            CommandKind::Forward => &["profile", "modes", "grid", "out", "report"],
            CommandKind::Synthesize => &[
                "profile",
                "spec",
                "curve",
                "modes",
                "grid",
                "grid_spec",
                "tail",
                "eps",
                "depth",
                "out",
                "report",
            ],
            CommandKind::Invert => &["curve", "modes", "tail", "tol", "out", "report", "rho"],
            CommandKind::Reconstruct => &["spec", "grid", "k", "out", "report"],
            CommandKind::Roundtrip => &["profile", "modes", "grid", "tail", "tol", "out", "report"],
            CommandKind::Selfcheck => &["tol", "perturb_gamma", "report"],
        }
    }
}

/// Every key the config file may carry.
pub const CONFIG_KEYS: &[&str] = &[
    "profile",
    "curve",
    "spec",
    "modes",
    "grid",
    "grid_spec",
    "tail",
    "eps",
    "tol",
    "out",
    "report",
    "rho",
    "depth",
    "k",
    "perturb_gamma",
];

/// Parses the flat config format: `key = value` per line, `#` comments,
/// blank lines ignored, `-` and `_` interchangeable in keys.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            detail: format!("expected key=value, got {line:?}"),
        })?;
        let key = k.trim().replace('-', "_");
        let value = v.trim();
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(Error::Parse {
                line: i + 1,
                detail: format!("unknown key {key:?}"),
            });
        }
        if value.is_empty() {
            return Err(Error::Parse {
                line: i + 1,
                detail: format!("empty value for {key:?}"),
            });
        }
        if out.insert(key.clone(), value.to_string()).is_some() {
            return Err(Error::Parse {
                line: i + 1,
                detail: format!("duplicate key {key:?}"),
            });
        }
    }
    Ok(out)
}

/// Abscissa specification for synthesized curves.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    Geometric { lo: f64, hi: f64, n: usize },
    Linear { lo: f64, hi: f64, n: usize },
    List(Vec<f64>),
}

impl GridSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |detail: String| Error::validation(format!("grid spec {s:?}: {detail}"));
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| bad(format!("{e} in {t:?}")))
        };
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| bad("expected geom:, lin: or list:".into()))?;
        let spec = match kind.trim() {
            "geom" | "lin" => {
                let parts: Vec<&str> = rest.split(':').collect();
                if parts.len() != 3 {
                    return Err(bad("expected LO:HI:N".into()));
                }
                let (lo, hi) = (num(parts[0])?, num(parts[1])?);
                let n = parts[2]
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| bad(e.to_string()))?;
                if !(lo.is_finite() && hi.is_finite() && hi > lo) || !(2..=1_000_000).contains(&n) {
                    return Err(bad("need finite LO < HI and 2 ≤ N ≤ 10⁶".into()));
                }
                if kind.trim() == "geom" {
                    if lo <= 0.0 {
                        return Err(bad("geometric grid needs LO > 0".into()));
                    }
                    GridSpec::Geometric { lo, hi, n }
                } else {
                    GridSpec::Linear { lo, hi, n }
                }
            }
            "list" => {
                let xs = rest.split(',').map(num).collect::<Result<Vec<f64>>>()?;
                if xs.is_empty()
                    || xs.iter().any(|x| !x.is_finite())
                    || xs.windows(2).any(|w| !(w[1] > w[0]))
                {
                    return Err(bad("list must be finite and strictly increasing".into()));
                }
                GridSpec::List(xs)
            }
            other => return Err(bad(format!("unknown grid kind {other:?}"))),
        };
        Ok(spec)
    }

    pub fn points(&self) -> Vec<f64> {
        match self {
            GridSpec::Geometric { lo, hi, n } => geometric_grid(*lo, *hi, *n),
            GridSpec::Linear { lo, hi, n } => {
                let h = (hi - lo) / (*n - 1) as f64;
                (0..*n)
                    .map(|i| if i == n - 1 { *hi } else { lo + h * i as f64 })
                    .collect()
            }
            GridSpec::List(xs) => xs.clone(),
        }
    }
}

/// Flags merged over the config file, before command defaults.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn resolve(command: CommandKind, flags: &Flags) -> Result<Self> {
        let mut values = match &flags.config {
            Some(path) => parse_config(&read_text(path)?)?,
            None => BTreeMap::new(),
        };
        values.retain(|k, _| command.keys().contains(&k.as_str()));
        let given: Vec<(&str, Option<String>)> = vec![
            (
                "profile",
                flags.profile.as_ref().map(|p| p.display().to_string()),
            ),
            ("curve", flags.curve.clone()),
            ("spec", flags.spec.as_ref().map(|p| p.display().to_string())),
            ("modes", flags.modes.map(|v| v.to_string())),
            ("grid", flags.grid.map(|v| v.to_string())),
            ("grid_spec", flags.grid_spec.clone()),
            (
                "tail",
                flags
                    .tail
                    .map(|t| if t == OnOff::On { "on" } else { "off" }.to_string()),
            ),
            ("eps", flags.eps.map(|v| v.to_string())),
            ("tol", flags.tol.map(|v| v.to_string())),
            ("out", flags.out.as_ref().map(|p| p.display().to_string())),
            (
                "report",
                flags.report.as_ref().map(|p| p.display().to_string()),
            ),
            ("rho", flags.rho.as_ref().map(|p| p.display().to_string())),
            ("depth", flags.depth.map(|v| v.to_string())),
            ("k", flags.k.map(|v| v.to_string())),
            ("perturb_gamma", flags.perturb_gamma.map(|v| v.to_string())),
        ];
        for (key, v) in given {
            if let Some(v) = v {
                if !command.keys().contains(&key) {
                    return Err(Error::validation(format!(
                        "--{} does not apply to `{}`",
                        key.replace('_', "-"),
                        command.name()
                    )));
                }
                values.insert(key.to_string(), v);
            }
        }
        Ok(RunConfig { command, values })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(PathBuf::from)
    }

    fn require_path(&self, key: &str) -> Result<PathBuf> {
        self.path(key).ok_or_else(|| {
            Error::validation(format!(
                "`{}` needs --{}",
                self.command.name(),
                key.replace('_', "-")
            ))
        })
    }

    fn count(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => match v.parse::<usize>() {
                Ok(n) if n > 0 => Ok(n),
                _ => Err(Error::validation(format!(
                    "{key} must be a positive integer, got {v:?}"
                ))),
            },
        }
    }

    fn real(&self, key: &str, default: f64, ok: impl Fn(f64) -> bool, what: &str) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => match v.parse::<f64>() {
                Ok(x) if x.is_finite() && ok(x) => Ok(x),
                _ => Err(Error::validation(format!(
                    "{key} must be {what}, got {v:?}"
                ))),
            },
        }
    }

    fn tail(&self) -> Result<Tail> {
        match self.get("tail") {
            None | Some("on") => Ok(Tail::ConstantShift),
            Some("off") => Ok(Tail::Off),
            Some(v) => Err(Error::validation(format!(
                "tail must be on or off, got {v:?}"
            ))),
        }
    }
}

/// What a command hands back to `main`.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: String,
    pub report: Value,
    /// False when a check-style command found failures.
    pub passed: bool,
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::validation(format!("cannot read {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)
        .map_err(|e| Error::validation(format!("cannot write {}: {e}", path.display())))
}

fn read_profile_at(path: &Path) -> Result<PotentialProfile> {
    parse_profile_csv(&read_text(path)?)
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let (kind, flags) = match &cli.command {
        Command::Forward(f) => (CommandKind::Forward, f),
        Command::Synthesize(f) => (CommandKind::Synthesize, f),
        Command::Invert(f) => (CommandKind::Invert, f),
        Command::Reconstruct(f) => (CommandKind::Reconstruct, f),
        Command::Roundtrip(f) => (CommandKind::Roundtrip, f),
        Command::Selfcheck(f) => (CommandKind::Selfcheck, f),
    };
    let cfg = RunConfig::resolve(kind, flags)?;
    let outcome = match kind {
        CommandKind::Forward => run_forward(&cfg),
        CommandKind::Synthesize => run_synthesize(&cfg),
        CommandKind::Invert => run_invert(&cfg),
        CommandKind::Reconstruct => run_reconstruct(&cfg),
        CommandKind::Roundtrip => run_roundtrip(&cfg),
        CommandKind::Selfcheck => run_selfcheck(&cfg),
    }?;
    if let Some(path) = cfg.path("report") {
        let mut text = serde_json::to_string_pretty(&outcome.report)?;
        text.push('\n');
        write_text(&path, &text)?;
    }
    Ok(outcome)
}

fn eigen_file(es: &crate::forward::EigenSet) -> EigenFile {
    EigenFile {
        profile_hash: es.profile_hash.clone(),
        grid: es.grid,
        modes: es.pairs.clone(),
    }
}

pub fn run_forward(cfg: &RunConfig) -> Result<Outcome> {
    let q = read_profile_at(&cfg.require_path("profile")?)?;
    let out = cfg.require_path("out")?;
    let n = cfg.count("modes", FORWARD_MODES)?;
    let m = cfg.count("grid", DEFAULT_GRID)?;
    let t0 = Instant::now();
    let (es, checks) = eigen_data_checked(&q, n, m)?;
    let elapsed = t0.elapsed().as_secs_f64();
    write_text(&out, &format_eigen_json(&eigen_file(&es)))?;
    let gap = checks.iter().map(|c| c.relative_gap()).fold(0.0, f64::max);
    let mut summary = format!(
        "forward: {n} modes of profile {} on {m} steps\n",
        es.profile_hash
    );
    for p in es.pairs.iter().take(5) {
        let _ = writeln!(
            summary,
            "  λ² = {:>14.8}  α = {:.8e}  t = {:.8}",
            p.lambda_sq, p.alpha, p.t
        );
    }
    let _ = writeln!(summary, "  max norming-identity gap {gap:.2e}");
    let _ = writeln!(summary, "  wrote {}", out.display());
    let report = json!({
        "command": "forward",
        "profile_hash": es.profile_hash,
        "modes": n,
        "grid": m,
        "integral_q": q.integral(),
        "max_norming_gap": gap,
        "asymptotic_remainder": es.asymptotic_remainder(),
        "runtime_s": elapsed,
    });
    Ok(Outcome {
        summary,
        report,
        passed: true,
    })
}

/// Spectral data from `--spec` (any file with a `modes` array) or computed
/// from `--profile`.
fn spectral_source(cfg: &RunConfig, n: usize, m: usize) -> Result<SpectralData> {
    match (cfg.path("spec"), cfg.path("profile")) {
        (Some(_), Some(_)) => Err(Error::validation(
            "give either --spec or --profile, not both",
        )),
        (Some(spec), None) => parse_spectral_json(&read_text(&spec)?),
        (None, Some(profile)) => Ok(eigen_data(&read_profile_at(&profile)?, n, m)?.spectral_data()),
        (None, None) => Err(Error::validation("`synthesize` needs --spec or --profile")),
    }
}

pub fn run_synthesize(cfg: &RunConfig) -> Result<Outcome> {
    let out = cfg.require_path("out")?;
    let n = cfg.count("modes", FORWARD_MODES)?;
    let m = cfg.count("grid", DEFAULT_GRID)?;
    let tail = cfg.tail()?;
    let kind = cfg.get("curve").unwrap_or("G");
    let grid = cfg.get("grid_spec").map(GridSpec::parse).transpose()?;
    let t0 = Instant::now();
    let (text, points) = match kind {
        "G" => {
            let sd = spectral_source(cfg, n, m)?;
            let xs = grid.map_or_else(|| inversion_lambda_grid(FIT_MODES), |g| g.points());
            if xs.iter().any(|&x| !(x > 0.0)) {
                return Err(Error::validation("G(λ) abscissae must be positive"));
            }
            (
                format_curve_csv(&synthesize_g_of_lambda(&sd, &xs, tail)?),
                xs.len(),
            )
        }
        "g" => {
            let sd = spectral_source(cfg, n, m)?;
            let xs = grid.map_or_else(default_r_grid, |g| g.points());
            if xs.iter().any(|&x| !(x > 0.0)) {
                return Err(Error::validation("g(r) abscissae must be positive"));
            }
            (
                format_curve_csv(&synthesize_g_of_r(&sd, &xs, tail)?),
                xs.len(),
            )
        }
        "field" => {
            if cfg.get("spec").is_some() {
                return Err(Error::validation(
                    "field slices need eigenfunctions: use --profile",
                ));
            }
            let q = read_profile_at(&cfg.require_path("profile")?)?;
            let eps = cfg.real("eps", 0.0, |e| e >= 0.0, "≥ 0")?;
            let z = cfg.real("depth", 0.5, |z| (0.0..=1.0).contains(&z), "in [0, 1]")?;
            let es = eigen_data(&q, n, m)?;
            let rs = grid.map_or_else(default_r_grid, |g| g.points());
            let u = rs
                .iter()
                .map(|&r| field_u_eps(&es, FieldPoint::new(r, z, eps)?))
                .collect::<Result<Vec<_>>>()?;
            (format_field_slice_csv(&rs, z, &u), rs.len())
        }
        other => {
            return Err(Error::validation(format!(
                "--curve must be G, g or field, got {other:?}"
            )))
        }
    };
    write_text(&out, &text)?;
    let elapsed = t0.elapsed().as_secs_f64();
    let summary = format!(
        "synthesize: {points} samples of {kind} → {}\n",
        out.display()
    );
    let report = json!({
        "command": "synthesize",
        "curve": kind,
        "samples": points,
        "modes": n,
        "tail": tail == Tail::ConstantShift,
        "runtime_s": elapsed,
    });
    Ok(Outcome {
        summary,
        report,
        passed: true,
    })
}

/// Brings a `g(r)` curve onto the inversion λ grid by Hankel transform.
fn as_g_of_lambda(curve: SampledCurve, m: usize) -> Result<SampledCurve> {
    match curve.kind() {
        CurveKind::G_of_lambda => Ok(curve),
        CurveKind::g_of_r => {
            let lambdas = inversion_lambda_grid(m);
            let values = lambdas
                .iter()
                .map(|&l| hankel_transform(&curve, l))
                .collect::<Result<Vec<f64>>>()?;
            SampledCurve::real(lambdas, values, CurveKind::G_of_lambda)
        }
        CurveKind::field_slice => Err(Error::validation(
            "cannot invert a field slice; give G(λ) or g(r)",
        )),
    }
}

struct Inversion {
    estimate: SpectralEstimate,
    iterations: usize,
    merged: usize,
}

fn invert_stage(curve: &SampledCurve, m: usize, opts: &FitOptions) -> Result<Inversion> {
    let fit = extract_spectral_data_with(curve, m, opts)?;
    let pm = ProductModel::from_fit(&fit)?;
    let alpha = alphas(&fit, &pm)?;
    Ok(Inversion {
        estimate: SpectralEstimate {
            lambda_sq: fit.modes.lambda_sq(),
            t: fit.modes.t(),
            alpha,
            gamma: pm.gamma,
            c_bar: pm.c_bar,
            residual: fit.residual,
        },
        iterations: fit.iterations,
        merged: fit.merged,
    })
}

fn fit_options(cfg: &RunConfig) -> Result<FitOptions> {
    let defaults = FitOptions::default();
    Ok(FitOptions {
        tail: cfg.tail()?,
        tol: cfg.real("tol", defaults.tol, |t| t > 0.0, "> 0")?,
        ..defaults
    })
}

pub fn run_invert(cfg: &RunConfig) -> Result<Outcome> {
    let path = cfg.require_path("curve")?;
    let out = cfg.require_path("out")?;
    let m = cfg.count("modes", FIT_MODES)?;
    let opts = fit_options(cfg)?;
    let curve = as_g_of_lambda(
        parse_curve_csv(&read_text(&path)?, CurveKind::G_of_lambda)?,
        m,
    )?;
    let t0 = Instant::now();
    let inv = invert_stage(&curve, m, &opts)?;
    let elapsed = t0.elapsed().as_secs_f64();
    let est = &inv.estimate;
    write_text(&out, &format_spec_json(est))?;
    if let Some(rho) = cfg.path("rho") {
        write_text(&rho, &format_rho_csv(&est.spectral_function()?))?;
    }
    let mut summary = format!(
        "invert: {} modes, misfit {:.2e} after {} iterations, γ = {:.10}, c̄ = {:.6}\n",
        est.lambda_sq.len(),
        est.residual,
        inv.iterations,
        est.gamma,
        est.c_bar
    );
    for j in 0..est.lambda_sq.len() {
        let _ = writeln!(
            summary,
            "  λ² = {:>14.8}  t = {:.8}  α = {:.8e}",
            est.lambda_sq[j], est.t[j], est.alpha[j]
        );
    }
    if inv.merged > 0 {
        let _ = writeln!(summary, "  warning: {} coincident poles merged", inv.merged);
    }
    let _ = writeln!(summary, "  wrote {}", out.display());
    let report = json!({
        "command": "invert",
        "modes": est.lambda_sq.len(),
        "residual": est.residual,
        "iterations": inv.iterations,
        "merged": inv.merged,
        "gamma": est.gamma,
        "c_bar": est.c_bar,
        "runtime_s": elapsed,
    });
    Ok(Outcome {
        summary,
        report,
        passed: true,
    })
}

/// `(λ², α)` from spec.json or from the forward eigen file.
fn norming_data(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    match parse_spec_json(text) {
        Ok(est) => Ok((est.lambda_sq, est.alpha)),
        Err(spec_err) => match parse_eigen_json(text) {
            Ok(file) => Ok((
                file.modes.iter().map(|p| p.lambda_sq).collect(),
                file.modes.iter().map(|p| p.alpha).collect(),
            )),
            Err(_) => Err(spec_err),
        },
    }
}

struct Reconstruction {
    q_hat: PotentialProfile,
    completion: Completion,
    k11: f64,
    condition: f64,
    defect: f64,
}

fn reconstruct_stage(
    lambda_sq: &[f64],
    alpha: &[f64],
    m_gl: usize,
    k: f64,
) -> Result<Reconstruction> {
    let completion = Completion::estimate(lambda_sq, alpha);
    let kern = gl_kernel_with(
        lambda_sq,
        alpha,
        &completion,
        Reference::Shifted(completion.c_bar),
        m_gl,
    )?;
    let sol = gl_solve(&kern)?;
    Ok(Reconstruction {
        q_hat: recover_q(&sol, k)?,
        completion,
        k11: *sol.k_diag.last().expect("grid is nonempty"),
        condition: sol.condition,
        defect: sol.defect,
    })
}

pub fn run_reconstruct(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.require_path("spec")?;
    let out = cfg.require_path("out")?;
    let m_gl = cfg.count("grid", DEFAULT_M_GL)?;
    let k = cfg.real("k", 1.0, |k| k > 0.0, "> 0")?;
    let (lambda_sq, alpha) = norming_data(&read_text(&spec)?)?;
    let t0 = Instant::now();
    let rec = reconstruct_stage(&lambda_sq, &alpha, m_gl, k)?;
    let elapsed = t0.elapsed().as_secs_f64();
    write_text(&out, &format_q_hat_csv(&rec.q_hat))?;
    let integral = rec.q_hat.integral();
    let summary = format!(
        "reconstruct: {} modes on {m_gl} intervals, c̄ = {:.6}, κ = {:.6}\n  K(1,1) = {:.6} (−½∫q̂ = {:.6}), pivot ratio {:.2e}\n  wrote {}\n",
        lambda_sq.len(),
        rec.completion.c_bar,
        rec.completion.kappa,
        rec.k11,
        -0.5 * integral,
        rec.condition,
        out.display()
    );
    let report = json!({
        "command": "reconstruct",
        "modes": lambda_sq.len(),
        "grid": m_gl,
        "completion": {"c_bar": rec.completion.c_bar, "sigma": rec.completion.sigma, "kappa": rec.completion.kappa},
        "k11": rec.k11,
        "integral_q_hat": integral,
        "condition": rec.condition,
        "defect": rec.defect,
        "runtime_s": elapsed,
    });
    Ok(Outcome {
        summary,
        report,
        passed: true,
    })
}

/// Errors of a reconstruction against the true profile.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProfileErrors {
    pub l2_abs: f64,
    /// `‖q̂ − q‖/‖q‖`, or `null` for `q ≡ 0`.
    pub l2_rel: Option<f64>,
    /// Sup error on `[0.05, 0.95]`.
    pub sup_interior: f64,
    pub sup: f64,
}

pub fn profile_errors(q_hat: &PotentialProfile, q: &PotentialProfile) -> ProfileErrors {
    let z = q_hat.nodes();
    let h = z[1] - z[0];
    let diff: Vec<f64> = z
        .iter()
        .zip(q_hat.values())
        .map(|(&z, &v)| v - q.eval(z))
        .collect();
    let sq: Vec<f64> = diff.iter().map(|d| d * d).collect();
    let norm: Vec<f64> = z.iter().map(|&z| q.eval(z).powi(2)).collect();
    let l2_abs = trapezoid_uniform(h, &sq).sqrt();
    let qn = trapezoid_uniform(h, &norm).sqrt();
    let sup_interior = z
        .iter()
        .zip(&diff)
        .filter(|(z, _)| (0.05..=0.95).contains(*z))
        .map(|(_, d)| d.abs())
        .fold(0.0, f64::max);
    ProfileErrors {
        l2_abs,
        l2_rel: (qn > 0.0).then(|| l2_abs / qn),
        sup_interior,
        sup: diff.iter().map(|d| d.abs()).fold(0.0, f64::max),
    }
}

pub fn run_roundtrip(cfg: &RunConfig) -> Result<Outcome> {
    let q = read_profile_at(&cfg.require_path("profile")?)?;
    let m = cfg.count("modes", FIT_MODES)?;
    let m_gl = cfg.count("grid", DEFAULT_M_GL)?;
    let opts = fit_options(cfg)?;
    let tail = opts.tail;
    let dir = cfg.path("out");
    if let Some(d) = &dir {
        std::fs::create_dir_all(d)
            .map_err(|e| Error::validation(format!("cannot create {}: {e}", d.display())))?;
    }
    let save = |name: &str, text: &str| -> Result<()> {
        match &dir {
            Some(d) => write_text(&d.join(name), text),
            None => Ok(()),
        }
    };
    let total = Instant::now();

    let t = Instant::now();
    let es = eigen_data(&q, FORWARD_MODES.max(m), DEFAULT_GRID)?;
    let t_forward = t.elapsed().as_secs_f64();
    save("eig.json", &format_eigen_json(&eigen_file(&es)))?;

    let t = Instant::now();
    let curve = synthesize_g_of_lambda(&es.spectral_data(), &inversion_lambda_grid(m), tail)?;
    let t_synth = t.elapsed().as_secs_f64();
    save("G.csv", &format_curve_csv(&curve))?;

    let t = Instant::now();
    let inv = invert_stage(&curve, m, &opts)?;
    let t_invert = t.elapsed().as_secs_f64();
    let est = &inv.estimate;
    save("spec.json", &format_spec_json(est))?;
    save(
        "rho.csv",
        &format_rho_csv(&spectral_function(&est.lambda_sq, &est.alpha)?),
    )?;

    let t = Instant::now();
    let rec = reconstruct_stage(&est.lambda_sq, &est.alpha, m_gl, q.k())?;
    let t_gl = t.elapsed().as_secs_f64();
    save("q_hat.csv", &format_q_hat_csv(&rec.q_hat))?;
    let t_total = total.elapsed().as_secs_f64();

    let n = est.lambda_sq.len().min(m);
    let d_l2: Vec<f64> = (0..n)
        .map(|j| (est.lambda_sq[j] - es.pairs[j].lambda_sq).abs())
        .collect();
    let d_t: Vec<f64> = (0..n).map(|j| (est.t[j] - es.pairs[j].t).abs()).collect();
    let d_a: Vec<f64> = (0..n)
        .map(|j| ((est.alpha[j] - es.pairs[j].alpha) / es.pairs[j].alpha).abs())
        .collect();
    let errs = profile_errors(&rec.q_hat, &q);
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);

    let mut summary = format!(
        "roundtrip: profile {} with {m} fitted modes, m_gl = {m_gl}\n",
        es.profile_hash
    );
    let _ = writeln!(
        summary,
        "  {:>4} {:>12} {:>12} {:>12}",
        "j", "|Δλ²|", "|Δt|", "|Δα|/α"
    );
    for j in 0..n {
        let _ = writeln!(
            summary,
            "  {:>4} {:>12.3e} {:>12.3e} {:>12.3e}",
            j + 1,
            d_l2[j],
            d_t[j],
            d_a[j]
        );
    }
    let _ = writeln!(
        summary,
        "  fit misfit {:.2e}, {} iterations",
        est.residual, inv.iterations
    );
    let rel = errs
        .l2_rel
        .map_or_else(|| "n/a".to_string(), |r| format!("{r:.3e}"));
    let _ = writeln!(
        summary,
        "  q̂: L2 {:.3e} (relative {rel}), sup on [0.05,0.95] {:.3e}",
        errs.l2_abs, errs.sup_interior
    );
    let _ = writeln!(
        summary,
        "  runtime {t_total:.2} s (forward {t_forward:.2}, synthesize {t_synth:.2}, invert {t_invert:.2}, reconstruct {t_gl:.2})"
    );
    let report = json!({
        "command": "roundtrip",
        "profile_hash": es.profile_hash,
        "modes_fitted": m,
        "forward_modes": es.pairs.len(),
        "m_gl": m_gl,
        "tail": tail == Tail::ConstantShift,
        "lambda_sq_errors": d_l2,
        "t_errors": d_t,
        "alpha_rel_errors": d_a,
        "max_lambda_sq_error": max(&d_l2),
        "max_t_error": max(&d_t),
        "max_alpha_rel_error": max(&d_a),
        "fit_residual": est.residual,
        "fit_iterations": inv.iterations,
        "gamma": est.gamma,
        "completion": {"c_bar": rec.completion.c_bar, "sigma": rec.completion.sigma, "kappa": rec.completion.kappa},
        "q_errors": errs,
        "runtimes_s": {
            "forward": t_forward,
            "synthesize": t_synth,
            "invert": t_invert,
            "reconstruct": t_gl,
            "total": t_total,
        },
    });
    Ok(Outcome {
        summary,
        report,
        passed: true,
    })
}

/// One row of the selfcheck table.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub check: String,
    pub x: f64,
    pub value: f64,
    pub oracle: f64,
    pub relerr: f64,
    pub tol: f64,
    pub pass: bool,
}

impl CheckRow {
    fn new(check: &str, x: f64, value: f64, oracle: f64, tol: f64) -> Self {
        let relerr = (value - oracle).abs() / oracle.abs().max(f64::MIN_POSITIVE);
        CheckRow {
            check: check.to_string(),
            x,
            value,
            oracle,
            relerr,
            tol,
            pass: relerr <= tol,
        }
    }
}

/// Reference values computed with mpmath at 40 digits, chosen on both
/// sides of every regime crossover.
const JY_ORACLE: &[(f64, f64, f64)] = &[
    (0.5, 0.938_469_807_240_812_9, -0.444_518_733_506_706_56),
    (1.0, 0.765_197_686_557_966_6, 0.088_256_964_215_676_96),
    (7.9, 0.194_361_844_841_278_24, 0.206_520_948_144_375_77),
    (8.1, 0.147_517_454_044_377_67, 0.238_091_328_702_234_8),
    (24.9, 0.083_245_968_353_015_49, -0.136_499_183_996_765_24),
    (25.1, 0.108_275_671_499_949_45, -0.116_767_707_638_036_95),
    (100.0, 0.019_985_850_304_223_122, -0.077_244_313_365_083_15),
];

const K0_ORACLE: &[(f64, f64)] = &[
    (0.1, 2.427_069_024_702_016_6),
    (1.99, 0.115_301_767_551_776_8),
    (2.01, 0.112_504_360_998_728_05),
    (10.0, 1.778_006_231_616_765_2e-5),
    (24.9, 3.836_096_520_989_492e-12),
    (25.1, 3.128_312_714_321_117e-12),
    (100.0, 4.656_628_229_175_902e-45),
];

/// Product and γ-limit checks run on `0.4 cos 2πz`: zero mean, so
/// `W(ν)/cos √ν → 1` at rate `1/|ν|` rather than `1/√|ν|`.
fn selfcheck_profile() -> Result<PotentialProfile> {
    PotentialProfile::from_fn(400, 1.0, |z| 0.4 * (2.0 * std::f64::consts::PI * z).cos())
}

pub fn selfcheck_rows(tol: f64, perturb_gamma: f64) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for &(x, j, y) in JY_ORACLE {
        rows.push(CheckRow::new("J0", x, bessel_j0(x)?, j, tol));
        rows.push(CheckRow::new("Y0", x, bessel_y0(x)?, y, tol));
    }
    for &(x, k) in K0_ORACLE {
        rows.push(CheckRow::new("K0", x, bessel_k0(x)?, k, tol));
    }

    // norming identity: quadrature vs −Ψ(1)Ψ̇'(1)
    let sine =
        PotentialProfile::from_fn(400, 1.0, |z| 0.5 + 0.3 * (std::f64::consts::PI * z).sin())?;
    let (_, checks) = eigen_data_checked(&sine, 10, DEFAULT_GRID)?;
    for (j, c) in checks.iter().enumerate() {
        rows.push(CheckRow::new(
            "norming_identity",
            (j + 1) as f64,
            c.alpha_identity,
            c.alpha_quadrature,
            1e-8,
        ));
    }

    let q = selfcheck_profile()?;
    let es = eigen_data(&q, FORWARD_MODES, DEFAULT_GRID)?;
    let mut pm = ProductModel::new(es.lambda_sq(), es.spectral_data().tail_shift(5))?;
    pm.gamma *= 1.0 + perturb_gamma;
    let prop = Propagator::new(&q, DEFAULT_GRID)?;
    for nu in [
        -400.0, -30.0, -1.0, 0.5, 3.0, 10.0, 40.0, 90.0, 250.0, 700.0,
    ] {
        let w = prop.characteristic(nu);
        let p = char_product(&pm, nu);
        // absolute near the zeros of W
        let scale = w.abs().max(1.0);
        let mut row = CheckRow::new("product_identity", nu, p, w, 1e-6);
        row.relerr = (p - w).abs() / scale;
        row.pass = row.relerr <= row.tol;
        rows.push(row);
    }
    for (nu, t) in [(-1e2, 1e-3), (-1e3, 1e-4), (-1e4, 1e-5)] {
        rows.push(CheckRow::new(
            "gamma_limit",
            nu,
            char_product(&pm, nu) / cos_nu(1.0, nu),
            1.0,
            t,
        ));
    }
    Ok(rows)
}

pub fn run_selfcheck(cfg: &RunConfig) -> Result<Outcome> {
    let tol = cfg.real("tol", SPECFUN_TOL, |t| t > 0.0, "> 0")?;
    let perturb = cfg.real("perturb_gamma", 0.0, |p| p > -1.0, "> -1")?;
    let rows = selfcheck_rows(tol, perturb)?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    let mut summary = format!(
        "{:<18} {:>10} {:>24} {:>24} {:>10} {:>6}\n",
        "function", "x", "value", "oracle", "relerr", ""
    );
    for r in &rows {
        let _ = writeln!(
            summary,
            "{:<18} {:>10} {:>24.16e} {:>24.16e} {:>10.2e} {:>6}",
            r.check,
            r.x,
            r.value,
            r.oracle,
            r.relerr,
            if r.pass { "ok" } else { "FAIL" }
        );
    }
    let _ = writeln!(summary, "{} checks, {failed} failed", rows.len());
    let report = json!({
        "command": "selfcheck",
        "specfun_tol": tol,
        "perturb_gamma": perturb,
        "failed": failed,
        "rows": rows,
    });
    Ok(Outcome {
        summary,
        report,
        passed: failed == 0,
    })
}
