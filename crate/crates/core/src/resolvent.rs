//! Resolvent norm of the generator along the imaginary axis.
//!
//! `N(λ) = sup_n ‖(iλ − Bₙ)⁻¹‖`. Near a resonance `Im λₙ,₊ ≈ λ` the direct
//! determinant `det(iλ − Bₙ)` cancels to far below the spacing of `λ`, so
//! every block norm here is `‖adj‖₂ / Π|iλ − λⱼ|` with the roots taken from
//! the certified cubic solver.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cubic::{certified_roots, EigTriple};
use crate::error::{LabError, Result};
use crate::modal::{block_coeffs, BlockEntries};
use crate::numeric::mat3;
use crate::regions::{classify_point, mu_index, ParamPoint, RegionLabel};
pub use crate::spectrum::SpectrumModel;

use num_complex::Complex64;

const LOW_MODES: u64 = 64;
const GRID_PER_DECADE: usize = 8;
const GOLDEN_ITERS: usize = 60;

fn roots_at(mu: f64, p: &ParamPoint) -> Result<EigTriple> {
    certified_roots(&block_coeffs(mu, p)?)
}

/// `‖(iλ − B)⁻¹‖₂` from certified roots. With `resonant` set the detuning of
/// `λ₊` is taken as zero: the value is the peak attained by a mode with
/// `μ` within rounding of the given one.
fn factored_norm(lambda: f64, mu: f64, p: &ParamPoint, resonant: bool) -> Result<f64> {
    let e = BlockEntries::new(mu, p)?;
    let t = roots_at(mu, p)?;
    let dist = |z: Complex64, detuned: bool| {
        let dy = if detuned { lambda - z.im } else { 0.0 };
        z.re.hypot(dy)
    };
    let den = dist(t.lambda0, true) * dist(t.lambda_plus, !(resonant && t.complex_pair)) * dist(t.lambda_minus, true);
    let adj = e.resolvent_adjugate(Complex64::new(0.0, lambda));
    let v = mat3::spectral_norm(&adj) / den;
    if den == 0.0 || !v.is_finite() {
        return Err(LabError::OnSpectrum {
            det_abs: den,
            mode: None,
        });
    }
    Ok(v)
}

fn upper_im(mu: f64, p: &ParamPoint) -> Result<f64> {
    let t = roots_at(mu, p)?;
    Ok(if t.complex_pair { t.lambda_plus.im } else { 0.0 })
}

/// `μ*` in `[lo, hi]` with `Im λ₊(μ*) = λ`, by bisection in `ln μ`.
pub fn resonance_mu(lambda: f64, p: &ParamPoint, lo: f64, hi: f64) -> Result<Option<f64>> {
    if upper_im(hi, p)? < lambda || upper_im(lo, p)? >= lambda {
        return Ok(None);
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if upper_im(m.exp(), p)? < lambda {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(Some(b.exp()))
}

fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    // Whole decades times the density, so doubling the density nests the grids.
    let decades = ((hi / lo).log10().ceil() as usize).max(1);
    let n = decades * per_decade.max(1);
    let (a, b) = (lo.ln(), hi.ln());
    (0..=n).map(|i| (a + (b - a) * i as f64 / n as f64).exp()).collect()
}

/// Maximise `f` over `[a, b]` by golden-section search.
pub fn golden_max(mut a: f64, mut b: f64, iters: usize, mut f: impl FnMut(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..iters {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalNorm {
    pub norm: f64,
    pub argmax_mu: f64,
    pub resonance_mu: Option<f64>,
    /// The maximiser sits on the edge of the searched `μ` range.
    pub at_edge: bool,
}

pub fn resolvent_norm_global(lambda: f64, p: &ParamPoint, s: &SpectrumModel) -> Result<(f64, f64)> {
    let g = resolvent_norm_search(lambda, p, s, GRID_PER_DECADE)?;
    Ok((g.norm, g.argmax_mu))
}

/// Supremum search with an explicit coarse-grid density.
pub fn resolvent_norm_search(lambda: f64, p: &ParamPoint, s: &SpectrumModel, per_decade: usize) -> Result<GlobalNorm> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(LabError::InvalidParameter(format!(
            "lambda = {lambda} must be finite and non-negative"
        )));
    }
    let (lo, hi) = (s.mu_min(), s.mu_max());
    let mut best = (f64::NEG_INFINITY, lo);
    let consider = |best: &mut (f64, f64), mu: f64, v: f64| {
        if v > best.0 {
            *best = (v, mu);
        }
    };
    let eval = |mu: f64, n: Option<u64>| {
        factored_norm(lambda, mu, p, false).map_err(|e| match e {
            LabError::OnSpectrum { det_abs, .. } => LabError::OnSpectrum {
                det_abs,
                mode: n.map(|n| (n as usize, mu)),
            },
            e => e,
        })
    };

    for n in 1..=s.n_max.min(LOW_MODES) {
        let mu = s.mu(n);
        consider(&mut best, mu, eval(mu, Some(n))?);
    }
    let star = resonance_mu(lambda, p, lo, hi)?;
    if s.continuous {
        for mu in log_grid(lo, hi, per_decade) {
            consider(&mut best, mu, eval(mu, None)?);
        }
        if let Some(ms) = star {
            consider(&mut best, ms, factored_norm(lambda, ms, p, true)?);
        }
        // Broad maxima away from the resonance.
        let (a, b) = ((best.1 / 2.0).max(lo).ln(), (best.1 * 2.0).min(hi).ln());
        if b > a {
            let (x, v) = golden_max(a, b, GOLDEN_ITERS, |x| eval(x.exp(), None))?;
            consider(&mut best, x.exp(), v);
        }
    } else {
        let mut idx: Vec<u64> = log_grid(1.0, s.n_max as f64, per_decade)
            .into_iter()
            .map(|x| (x.round() as u64).clamp(1, s.n_max))
            .collect();
        if let Some(ms) = star {
            let c = s.index_of(ms).round() as u64;
            idx.extend(c.saturating_sub(2).max(1)..=(c + 2).min(s.n_max));
        }
        idx.sort_unstable();
        idx.dedup();
        for n in idx {
            let mu = s.mu(n);
            consider(&mut best, mu, eval(mu, Some(n))?);
        }
    }
    let (norm, argmax_mu) = best;
    let at_edge = s.continuous && (argmax_mu >= hi * (1.0 - 1e-12) || (argmax_mu <= lo * (1.0 + 1e-12) && s.n_max > 1));
    Ok(GlobalNorm {
        norm,
        argmax_mu,
        resonance_mu: star,
        at_edge,
    })
}

/// Expected log-log slope of `N(λ)`: `−μ(α,β)`.
pub fn expected_slope(p: &ParamPoint) -> Result<f64> {
    Ok(-mu_index(p)?)
}

fn slope_tolerance(label: RegionLabel) -> f64 {
    match label {
        RegionLabel::S1 | RegionLabel::S2 | RegionLabel::SI => 0.1,
        _ => 0.05,
    }
}

/// Ordinary least squares `y = a + b x`; returns `(b, standard error of b)`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let n = x.len();
    if n < 3 || n != y.len() {
        return Err(LabError::DegenerateFit(format!("{n} points")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(LabError::DegenerateFit("abscissae do not vary".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
    let se = (rss / (nf - 2.0) / sxx).sqrt();
    Ok((slope, se))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub lambda: f64,
    pub norm: f64,
    pub scaled: f64,
    pub argmax_mu: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub point: ParamPoint,
    pub spectrum: SpectrumModel,
    pub rows: Vec<ScanRow>,
    pub slope: f64,
    /// 95% half-width.
    pub slope_ci: f64,
    pub expected_slope: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub lower_bound_samples: Vec<LowerBoundSample>,
}

impl ScanReport {
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "slope": self.slope,
            "slope_ci": self.slope_ci,
            "expected_slope": self.expected_slope,
            "pass": self.pass,
        })
    }

    pub fn max_scaled(&self) -> f64 {
        self.rows.iter().map(|r| r.scaled).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `points` log-spaced values from `lo` to `hi`, both endpoints exact.
pub fn log_spaced(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| match i {
            0 => lo,
            _ if i + 1 == points => hi,
            _ => (a + (b - a) * i as f64 / (points - 1) as f64).exp(),
        })
        .collect()
}

pub fn scan_and_fit(
    p: &ParamPoint,
    s: &SpectrumModel,
    lambda_min: f64,
    lambda_max: f64,
    points: usize,
) -> Result<ScanReport> {
    scan_and_fit_with(p, s, lambda_min, lambda_max, points, GRID_PER_DECADE)
}

pub fn scan_and_fit_with(
    p: &ParamPoint,
    s: &SpectrumModel,
    lambda_min: f64,
    lambda_max: f64,
    points: usize,
    per_decade: usize,
) -> Result<ScanReport> {
    if !(lambda_min >= 1e2) {
        return Err(LabError::InvalidParameter(format!(
            "lambda_min = {lambda_min} must be at least 1e2"
        )));
    }
    if !(lambda_max > lambda_min && lambda_max.is_finite()) {
        return Err(LabError::InvalidParameter("lambda_max must exceed lambda_min".into()));
    }
    if points < 8 {
        return Err(LabError::DegenerateFit(format!(
            "{points} grid points, need at least 8"
        )));
    }
    let mu = mu_index(p)?;
    let expected = -mu;
    let rows = log_spaced(lambda_min, lambda_max, points)
        .into_par_iter()
        .map(|lambda| {
            let g = resolvent_norm_search(lambda, p, s, per_decade)?;
            Ok(ScanRow {
                lambda,
                norm: g.norm,
                scaled: lambda.powf(mu) * g.norm,
                argmax_mu: g.argmax_mu,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = rows.iter().map(|r| r.lambda.ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.norm.ln()).collect();
    let (slope, se) = ols_slope(&x, &y)?;
    let tolerance = slope_tolerance(classify_point(p));
    Ok(ScanReport {
        point: *p,
        spectrum: *s,
        rows,
        slope,
        slope_ci: 1.96 * se,
        expected_slope: expected,
        tolerance,
        pass: (slope - expected).abs() <= tolerance,
        lower_bound_samples: Vec::new(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundSample {
    pub n: u64,
    pub mu: f64,
    /// `Im λₙ,₊`, the probe frequency.
    pub lambda: f64,
    pub re: f64,
    pub norm: f64,
    /// `|λ|^{μ(α,β)} N(λ)`.
    pub scaled: f64,
    /// `|Re λₙ,₊| N(Im λₙ,₊)`, at least one for every eigenvalue.
    pub eigen_bound: f64,
}

/// Scaled resolvent norms at the eigenfrequencies `Im λₙ,₊` of the listed modes.
pub fn lower_bound_check(p: &ParamPoint, s: &SpectrumModel, n_range: &[u64]) -> Result<Vec<LowerBoundSample>> {
    let label = classify_point(p);
    if label == RegionLabel::R1 {
        return Err(LabError::InvalidParameter(
            "lower bound check is not defined on R1".into(),
        ));
    }
    let mu_idx = mu_index(p)?;
    let discrete = SpectrumModel {
        continuous: false,
        ..*s
    };
    n_range
        .par_iter()
        .map(|&n| {
            if n == 0 || n > s.n_max {
                return Err(LabError::InvalidParameter(format!("mode {n} outside 1..={}", s.n_max)));
            }
            let mu = s.mu(n);
            let t = roots_at(mu, p)?;
            if !t.complex_pair {
                return Err(LabError::Consistency(format!("mode {n} has no complex pair")));
            }
            let lambda = t.lambda_plus.im;
            // The mode itself sits exactly on resonance.
            let own = factored_norm(lambda, mu, p, true)?;
            let g = resolvent_norm_search(lambda, p, &discrete, GRID_PER_DECADE)?;
            let norm = own.max(g.norm);
            Ok(LowerBoundSample {
                n,
                mu,
                lambda,
                re: t.lambda_plus.re,
                norm,
                scaled: lambda.abs().powf(mu_idx) * norm,
                eigen_bound: t.lambda_plus.re.abs() * norm,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modal::block_resolvent_norm;

    fn pt(a: f64, b: f64) -> ParamPoint {
        ParamPoint::new(a, b).unwrap()
    }

    #[test]
    fn factored_matches_direct_off_resonance() {
        let p = pt(0.5, 0.75);
        for (lambda, mu) in [(3.0, 1.0), (100.0, 50.0), (1e3, 4e6), (0.5, 9.0)] {
            let a = factored_norm(lambda, mu, &p, false).unwrap();
            let b = block_resolvent_norm(lambda, mu, &p).unwrap();
            assert!((a - b).abs() <= 1e-9 * b, "{lambda} {mu}: {a} vs {b}");
        }
    }

    #[test]
    fn bounded_generator_decay() {
        let s = SpectrumModel::squares(2);
        let p = pt(0.5, 0.75);
        let lambda = 1e7;
        let (n, _) = resolvent_norm_global(lambda, &p, &s).unwrap();
        assert!((n * lambda - 1.0).abs() < 1e-6);
    }

    #[test]
    fn resonance_brackets() {
        let s = SpectrumModel::new(1.0, 2.0, 1_000_000_000, true).unwrap();
        let (_, m) = resolvent_norm_global(1e6, &pt(0.5, 0.75), &s).unwrap();
        assert!((0.5e12..=2e12).contains(&m), "{m:e}");
        let (_, m) = resolvent_norm_global(1e6, &pt(0.75, 0.25), &s).unwrap();
        assert!((0.25e8..=4e8).contains(&m), "{m:e}");
    }

    #[test]
    fn ols_exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let (b, se) = ols_slope(&x, &y).unwrap();
        assert!((b - 2.0).abs() < 1e-12 && se < 1e-12);
        assert!(ols_slope(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn scan_rejects_small_grid() {
        let s = SpectrumModel::squares(10).relaxed();
        assert!(matches!(
            scan_and_fit(&pt(0.5, 0.75), &s, 1e4, 1e8, 4),
            Err(LabError::DegenerateFit(_))
        ));
    }
}
