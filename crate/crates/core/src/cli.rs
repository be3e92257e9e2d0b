//! Command-line front end. Every command prints one JSON document on stdout;
//! tabular results go to files in the output directory.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::asymptotics::{
    asym_error_table, asym_prediction, exponent_certificate, index_samples, leading_terms, rational,
    sharpness_sequence, CANONICAL_POINTS,
};
use crate::cubic::{certified_roots, companion_roots, discriminant_parts, triple_distance};
use crate::decay::{default_time_grid, simulate_decay, ModeState};
use crate::error::{LabError, Result};
use crate::io::{fmt_f64, fmt_opt, to_json_string, write_csv, write_json, Table};
use crate::modal::block_coeffs;
use crate::regions::{classify_point, region_grid, summary_row, ParamPoint, RegionLabel};
use crate::resolvent::{lower_bound_check, scan_and_fit};
use crate::spectrum::SpectrumModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "gevrey-lab",
    version,
    about = "Regularity, spectrum and decay of the per-mode thermoelastic-type generator"
)]
pub struct RunConfig {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Directory for tabular artifacts.
    #[arg(long, global = true, env = "GEVREY_LAB_OUT", default_value = ".")]
    pub out: PathBuf,

    /// Format of tabular artifacts.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Seed for randomised inputs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct PointArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
}

impl PointArgs {
    fn point(&self) -> Result<ParamPoint> {
        ParamPoint::with_coupling(self.alpha, self.beta, self.gamma, self.k)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum Initial {
    /// Equal energy per mode in the velocity component.
    Equidistributed,
    /// Equal energy per mode along the slow real eigenvector.
    Slow,
    /// Seeded random coefficients.
    Random,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Region, index, regularity and stability at one point.
    Classify {
        #[command(flatten)]
        point: PointArgs,
    },
    /// Classification over a lattice of the unit square.
    RegionGrid {
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Roots of one mode cubic, closed form against the companion oracle.
    Eigs {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        mu: f64,
    },
    /// Relative errors of the eigenvalue asymptotics along a μ grid.
    AsymCheck {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, value_delimiter = ',', default_value = "1e6,1e8,1e10,1e12")]
        mu_grid: Vec<f64>,
    },
    /// Resolvent norm along the imaginary axis and its log-log slope.
    ResolventScan {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 1_000_000_000)]
        n_max: u64,
        /// Restrict the supremum to the listed modes instead of the continuous range.
        #[arg(long)]
        discrete: bool,
        #[arg(long, default_value_t = 1e4)]
        lambda_min: f64,
        #[arg(long, default_value_t = 1e8)]
        lambda_max: f64,
        #[arg(long, default_value_t = 33)]
        points: usize,
    },
    /// Eigenvalue sequence ratios and resolvent lower bounds at eigenfrequencies.
    Sharpness {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 10_000_000)]
        n_max: u64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Lower-bound samples use modes with μₙ at least this large.
        #[arg(long, default_value_t = 1e8)]
        lb_min_mu: f64,
    },
    /// Truncated semigroup simulation and decay fits.
    Decay {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 200)]
        n_max: u64,
        #[arg(long, default_value_t = 1e-2)]
        t_min: f64,
        #[arg(long, default_value_t = 1e5)]
        t_max: f64,
        #[arg(long, default_value_t = 281)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Initial::Equidistributed)]
        initial: Initial,
    },
    /// Summary table at the canonical sample points.
    Table,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::RegionGrid { .. } => "region-grid",
            Command::Eigs { .. } => "eigs",
            Command::AsymCheck { .. } => "asym-check",
            Command::ResolventScan { .. } => "resolvent-scan",
            Command::Sharpness { .. } => "sharpness",
            Command::Decay { .. } => "decay",
            Command::Table => "table",
        }
    }
}

/// Parse arguments, run, and return the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cfg) {
        Ok(doc) => {
            print!("{doc}");
            0
        }
        Err(e) => {
            let code = if e.is_usage() { 2 } else { 1 };
            let diag = json!({
                "error": {
                    "kind": e.kind(),
                    "message": e.to_string(),
                    "command": cfg.command.name(),
                    "exit_code": code,
                }
            });
            eprint!("{}", to_json_string(&diag).unwrap_or_else(|_| format!("{e}\n")));
            code
        }
    }
}

/// Run one command; returns the stdout document.
pub fn dispatch(cfg: &RunConfig) -> Result<String> {
    if let Some(n) = cfg.threads {
        if n == 0 {
            return Err(LabError::InvalidParameter("--threads must be positive".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| LabError::InvalidParameter(e.to_string()))?;
        return pool.install(|| run(cfg)).and_then(|v| to_json_string(&v));
    }
    run(cfg).and_then(|v| to_json_string(&v))
}

fn run(cfg: &RunConfig) -> Result<Value> {
    match &cfg.command {
        Command::Classify { point } => classify(point),
        Command::RegionGrid { step } => grid(cfg, *step),
        Command::Eigs { point, mu } => eigs(point, *mu),
        Command::AsymCheck { point, mu_grid } => asym_check(cfg, point, mu_grid),
        Command::ResolventScan {
            point,
            c,
            p,
            n_max,
            discrete,
            lambda_min,
            lambda_max,
            points,
        } => {
            let s = SpectrumModel::new(*c, *p, *n_max, !discrete)?;
            resolvent_scan(cfg, point, &s, *lambda_min, *lambda_max, *points)
        }
        Command::Sharpness {
            point,
            c,
            p,
            n_max,
            eps,
            samples,
            lb_min_mu,
        } => {
            let s = SpectrumModel::new(*c, *p, *n_max, false)?;
            sharpness(cfg, point, &s, *eps, *samples, *lb_min_mu)
        }
        Command::Decay {
            point,
            c,
            p,
            n_max,
            t_min,
            t_max,
            points,
            initial,
        } => {
            let s = SpectrumModel::new(*c, *p, *n_max, false)?;
            decay(cfg, point, &s, (*t_min, *t_max, *points), *initial)
        }
        Command::Table => Ok(table()),
    }
}

fn ext(cfg: &RunConfig) -> &'static str {
    match cfg.format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

/// Write `table` (CSV) or `records` (JSON) as `<stem>.<ext>` in the output directory.
fn emit<T: Serialize>(cfg: &RunConfig, stem: &str, table: &Table, records: &T) -> Result<String> {
    let name = format!("{stem}.{}", ext(cfg));
    let path = cfg.out.join(&name);
    match cfg.format {
        Format::Csv => write_csv(&path, table)?,
        Format::Json => write_json(&path, records)?,
    }
    Ok(name)
}

fn write_summary(dir: &Path, stem: &str, v: &Value) -> Result<String> {
    let name = format!("{stem}_summary.json");
    write_json(&dir.join(&name), v)?;
    Ok(name)
}

fn classify(point: &PointArgs) -> Result<Value> {
    let p = point.point()?;
    Ok(serde_json::to_value(summary_row(&p))?)
}

fn grid(cfg: &RunConfig, step: f64) -> Result<Value> {
    let rows = region_grid(step)?;
    let mut t = Table::new(&["alpha", "beta", "label", "mu", "regularity", "stability", "on_boundary"]);
    for r in &rows {
        t.push(vec![
            fmt_f64(r.alpha),
            fmt_f64(r.beta),
            r.label.to_string(),
            fmt_opt(r.mu),
            r.regularity.to_string(),
            r.stability.to_string(),
            r.on_boundary.to_string(),
        ]);
    }
    let artifact = emit(cfg, "region_grid", &t, &rows)?;
    let mut counts = serde_json::Map::new();
    for l in RegionLabel::ALL {
        counts.insert(l.to_string(), json!(rows.iter().filter(|r| r.label == l).count()));
    }
    Ok(json!({
        "step": step,
        "points": rows.len(),
        "counts": counts,
        "artifacts": [artifact],
    }))
}

fn eigs(point: &PointArgs, mu: f64) -> Result<Value> {
    let p = point.point()?;
    let co = block_coeffs(mu, &p)?;
    if !(co.b.is_finite() && co.c.is_finite() && co.d.is_finite()) {
        return Err(LabError::Overflow(format!("cubic coefficients at mu = {mu:e}")));
    }
    let cardano = certified_roots(&co)?;
    let oracle = companion_roots(&co)?;
    let disc = discriminant_parts(&co);
    Ok(json!({
        "alpha": p.alpha,
        "beta": p.beta,
        "gamma": p.gamma,
        "k": p.k,
        "mu": mu,
        "region": classify_point(&p),
        "coefficients": {"b": co.b, "c": co.c, "d": co.d},
        "discriminant": {"p": disc.p, "q": disc.q, "delta": disc.delta},
        "cardano": cardano,
        "oracle": oracle,
        "distance": triple_distance(&cardano, &oracle),
        "vieta_errors": cardano.vieta_errors(&co),
    }))
}

fn asym_check(cfg: &RunConfig, point: &PointArgs, mu_grid: &[f64]) -> Result<Value> {
    let p = point.point()?;
    let (dl, ql) = leading_terms(&p)?;
    let pred = asym_prediction(&p)?;
    let cert = exponent_certificate(rational(p.alpha)?, rational(p.beta)?)?;
    let tab = asym_error_table(&p, mu_grid)?;
    let mut t = Table::new(&["mu", "err_lambda0", "err_re_pm", "err_im_pm"]);
    for r in &tab.rows {
        t.push(vec![
            fmt_f64(r.mu),
            fmt_f64(r.err_lambda0),
            fmt_f64(r.err_re_pm),
            fmt_f64(r.err_im_pm),
        ]);
    }
    let artifact = emit(cfg, "asym_errors", &t, &tab.rows)?;
    Ok(json!({
        "alpha": p.alpha,
        "beta": p.beta,
        "region": dl.region,
        "subcase": dl.subcase,
        "leading_terms": {
            "delta": {"coefficient": dl.coefficient, "exponent": dl.exponent},
            "q": {"coefficient": ql.coefficient, "exponent": ql.exponent},
        },
        "certificate": cert,
        "prediction": pred,
        "rows": tab.rows,
        "trend": tab.trend,
        "artifacts": [artifact],
    }))
}

fn resolvent_scan(
    cfg: &RunConfig,
    point: &PointArgs,
    s: &SpectrumModel,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<Value> {
    let p = point.point()?;
    let r = scan_and_fit(&p, s, lo, hi, points)?;
    let mut t = Table::new(&["lambda", "norm", "scaled", "argmax_mu"]);
    for row in &r.rows {
        t.push(vec![
            fmt_f64(row.lambda),
            fmt_f64(row.norm),
            fmt_f64(row.scaled),
            fmt_f64(row.argmax_mu),
        ]);
    }
    let artifact = emit(cfg, "resolvent_scan", &t, &r.rows)?;
    let summary = r.summary_json();
    let summary_name = write_summary(&cfg.out, "resolvent_scan", &summary)?;
    Ok(json!({
        "alpha": p.alpha,
        "beta": p.beta,
        "region": classify_point(&p),
        "spectrum": s,
        "slope": r.slope,
        "slope_ci": r.slope_ci,
        "expected_slope": r.expected_slope,
        "tolerance": r.tolerance,
        "pass": r.pass,
        "max_scaled": r.max_scaled(),
        "artifacts": [artifact, summary_name],
    }))
}

fn sharpness(
    cfg: &RunConfig,
    point: &PointArgs,
    s: &SpectrumModel,
    eps: f64,
    samples: usize,
    lb_min_mu: f64,
) -> Result<Value> {
    let p = point.point()?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(LabError::InvalidParameter(format!("eps = {eps} must be positive")));
    }
    let seq = sharpness_sequence(&p, s, eps, samples)?;
    let mut t = Table::new(&["n", "mu", "re", "im", "modulus", "ratio"]);
    for r in &seq {
        t.push(vec![
            r.n.to_string(),
            fmt_f64(r.mu),
            fmt_f64(r.re),
            fmt_f64(r.im),
            fmt_f64(r.modulus),
            fmt_opt(r.ratio),
        ]);
    }
    let mut artifacts = vec![emit(cfg, "sharpness", &t, &seq)?];

    let ns: Vec<u64> = index_samples(s.n_max, samples)
        .into_iter()
        .filter(|&n| s.mu(n) >= lb_min_mu)
        .collect();
    let lb = lower_bound_check(&p, s, &ns)?;
    let mut t = Table::new(&["n", "mu", "lambda", "re", "norm", "scaled", "eigen_bound"]);
    for r in &lb {
        t.push(vec![
            r.n.to_string(),
            fmt_f64(r.mu),
            fmt_f64(r.lambda),
            fmt_f64(r.re),
            fmt_f64(r.norm),
            fmt_f64(r.scaled),
            fmt_f64(r.eigen_bound),
        ]);
    }
    artifacts.push(emit(cfg, "lower_bound", &t, &lb)?);
    let last = seq.last().copied();
    Ok(json!({
        "alpha": p.alpha,
        "beta": p.beta,
        "region": classify_point(&p),
        "eps": eps,
        "samples": seq.len(),
        "last": last,
        "min_scaled": lb.iter().map(|r| r.scaled).reduce(f64::min),
        "min_eigen_bound": lb.iter().map(|r| r.eigen_bound).reduce(f64::min),
        "lower_bound_samples": lb.len(),
        "artifacts": artifacts,
    }))
}

fn decay(
    cfg: &RunConfig,
    point: &PointArgs,
    s: &SpectrumModel,
    grid: (f64, f64, usize),
    initial: Initial,
) -> Result<Value> {
    let p = point.point()?;
    let (t_min, t_max, points) = grid;
    if !(t_min > 0.0 && t_max > t_min && t_max.is_finite()) || points < 2 {
        return Err(LabError::InvalidParameter(
            "need 0 < t_min < t_max and at least two points".into(),
        ));
    }
    let n = usize::try_from(s.n_max).map_err(|_| LabError::InvalidParameter("n_max too large".into()))?;
    let u0 = match initial {
        Initial::Equidistributed => ModeState::equidistributed(n),
        Initial::Slow => ModeState::slow_polarized(&p, s)?,
        Initial::Random => ModeState::random(n, cfg.seed),
    };
    let r = simulate_decay(&p, s, &u0, &default_time_grid(t_min, t_max, points))?;
    let mut t = Table::new(&["t", "energy", "smoothed_energy"]);
    for i in 0..r.times.len() {
        t.push(vec![
            fmt_f64(r.times[i]),
            fmt_f64(r.energies[i]),
            fmt_f64(r.smoothed_energies[i]),
        ]);
    }
    let records: Vec<Value> = (0..r.times.len())
        .map(|i| json!({"t": r.times[i], "energy": r.energies[i], "smoothed_energy": r.smoothed_energies[i]}))
        .collect();
    let artifact = emit(cfg, "decay", &t, &records)?;
    let mut summary = r.summary_json();
    let summary_name = write_summary(&cfg.out, "decay", &summary)?;
    summary["artifacts"] = json!([artifact, summary_name]);
    Ok(summary)
}

fn table() -> Value {
    let rows: Vec<Value> = CANONICAL_POINTS
        .iter()
        .map(|&(name, a, b)| {
            let p = ParamPoint::new(a, b).expect("canonical points lie in the unit square");
            let r = summary_row(&p);
            json!({
                "name": name,
                "alpha": a,
                "beta": b,
                "label": r.label,
                "mu": r.mu,
                "regularity": r.regularity,
                "stability": r.stability,
                "regularity_text": r.regularity.to_string(),
                "stability_text": r.stability.to_string(),
            })
        })
        .collect();
    json!({ "rows": rows })
}
