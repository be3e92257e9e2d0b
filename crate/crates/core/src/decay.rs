//! Mode-by-mode evolution `e^{Bₙt}` over a truncated spectrum.

use nalgebra::Matrix3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cubic::{certified_roots, EigTriple};
use crate::error::{LabError, Result};
use crate::modal::{block_coeffs, build_mode_block, BlockEntries, ModeBlock};
use crate::numeric::dd::{compensated_sum, DoubleDouble};
use crate::numeric::mat3::{self, Mat3, Vec3};
use crate::regions::{summary_row, ParamPoint, Stability};
use crate::resolvent::ols_slope;
use crate::spectrum::SpectrumModel;

/// Roots closer than this (relative to the largest) trigger the fallback.
const CLUSTER_TOL: f64 = 1e-6;
/// Spectral projectors larger than this make the eigen-sum unreliable.
const PROJECTOR_CAP: f64 = 1e4;
const HORIZON_SLACK: f64 = 0.01;
const EXP_FIT_FLOOR: f64 = 1e-10;

/// Spectral decomposition `B = Σ λⱼ Pⱼ` with `Pⱼ = adj(λⱼ − B) / Π_{k≠j}(λⱼ − λₖ)`.
#[derive(Clone, Debug)]
pub struct ModeSpectrum {
    pub roots: [Complex64; 3],
    pub projectors: [Mat3; 3],
}

impl ModeSpectrum {
    pub fn new(e: &BlockEntries, t: &EigTriple) -> Option<Self> {
        let roots = t.roots();
        let scale = roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut projectors = [mat3::zeros(); 3];
        for j in 0..3 {
            let mut den = Complex64::new(1.0, 0.0);
            for k in 0..3 {
                if k != j {
                    let gap = roots[j] - roots[k];
                    if gap.norm() <= CLUSTER_TOL * scale {
                        return None;
                    }
                    den *= gap;
                }
            }
            let pj = mat3::scale(&e.resolvent_adjugate(roots[j]), den.inv());
            if mat3::frobenius(&pj) > PROJECTOR_CAP || !mat3::frobenius(&pj).is_finite() {
                return None;
            }
            projectors[j] = pj;
        }
        Some(Self { roots, projectors })
    }

    /// `Σ f(λⱼ) Pⱼ`.
    pub fn apply(&self, f: impl Fn(Complex64) -> Complex64) -> Mat3 {
        let mut out = mat3::zeros();
        for (z, pj) in self.roots.iter().zip(&self.projectors) {
            let w = f(*z);
            for (orow, prow) in out.iter_mut().zip(pj) {
                for (o, v) in orow.iter_mut().zip(prow) {
                    *o += w * v;
                }
            }
        }
        out
    }
}

fn exp_t(z: Complex64, t: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let (s, c) = (z.im * t).sin_cos();
    (z.re * t).exp() * Complex64::new(c, s)
}

fn to_na(m: &Mat3) -> Matrix3<Complex64> {
    Matrix3::from_fn(|r, c| m[r][c])
}

fn from_na(m: &Matrix3<Complex64>) -> Mat3 {
    let mut out = mat3::zeros();
    for r in 0..3 {
        for c in 0..3 {
            out[r][c] = m[(r, c)];
        }
    }
    out
}

/// `e^{Bt}` by scaling and squaring (nalgebra's Padé implementation).
pub fn expm_reference(m: &Mat3, t: f64) -> Mat3 {
    from_na(&(to_na(m) * Complex64::from(t)).exp())
}

/// Evolution operator of one mode, with or without the `B⁻¹` smoothing.
#[derive(Clone, Debug)]
pub struct ModePropagator {
    pub block: ModeBlock,
    spectrum: Option<ModeSpectrum>,
    inverse: Mat3,
}

impl ModePropagator {
    pub fn new(mu: f64, p: &ParamPoint) -> Result<Self> {
        let block = build_mode_block(mu, p)?;
        let triple = certified_roots(&block_coeffs(mu, p)?)?;
        let spectrum = ModeSpectrum::new(&block.entries, &triple);
        let inverse = mat3::inverse(&block.matrix)
            .ok_or_else(|| LabError::Consistency(format!("mode block at mu = {mu:e} is singular")))?;
        Ok(Self {
            block,
            spectrum,
            inverse,
        })
    }

    /// True when the eigen-sum is in use rather than the fallback.
    pub fn is_spectral(&self) -> bool {
        self.spectrum.is_some()
    }

    pub fn exp(&self, t: f64) -> Result<Mat3> {
        check_t(t)?;
        let m = match &self.spectrum {
            Some(s) => s.apply(|z| exp_t(z, t)),
            None => expm_reference(&self.block.matrix, t),
        };
        finite(m, self.block.mu)
    }

    /// `e^{Bt} B⁻¹`.
    pub fn exp_smoothed(&self, t: f64) -> Result<Mat3> {
        check_t(t)?;
        let m = match &self.spectrum {
            Some(s) => s.apply(|z| exp_t(z, t) / z),
            None => mat3::mul(&expm_reference(&self.block.matrix, t), &self.inverse),
        };
        finite(m, self.block.mu)
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(LabError::InvalidParameter(format!(
            "t = {t} must be finite and non-negative"
        )));
    }
    Ok(())
}

fn finite(m: Mat3, mu: f64) -> Result<Mat3> {
    if m.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(m)
    } else {
        Err(LabError::Overflow(format!("mode exponential at mu = {mu:e}")))
    }
}

/// `e^{Bt}` for one mode block.
pub fn mode_exponential(block: &ModeBlock, t: f64) -> Result<Mat3> {
    ModePropagator::new(block.mu, &block.point)?.exp(t)
}

/// Coefficients `(μ^{1/2}u, v, w)` of each included mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeState {
    pub modes: Vec<Vec3>,
}

impl ModeState {
    /// Equal energy per mode in the `(0, v, 0)` polarization, unit total.
    pub fn equidistributed(n_modes: usize) -> Self {
        let a = Complex64::new(1.0 / (n_modes as f64).sqrt(), 0.0);
        let z = Complex64::new(0.0, 0.0);
        Self {
            modes: vec![[z, a, z]; n_modes],
        }
    }

    /// Equal energy per mode along the real eigenvector of `λₙ,₀`, the
    /// slowest channel on the non-decaying regions.
    pub fn slow_polarized(p: &ParamPoint, s: &SpectrumModel) -> Result<Self> {
        let w = 1.0 / (s.n_max as f64).sqrt();
        let modes = (1..=s.n_max)
            .map(|n| {
                let mu = s.mu(n);
                let e = BlockEntries::new(mu, p)?;
                let t = certified_roots(&block_coeffs(mu, p)?)?;
                let v = e.eigenvector(t.lambda0);
                let norm = mat3::vec_norm(&v);
                Ok(v.map(|z| z * (w / norm)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { modes })
    }

    /// Gaussian coefficients normalised to unit energy.
    pub fn random(n_modes: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut modes: Vec<Vec3> = (0..n_modes)
            .map(|_| std::array::from_fn(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)))
            .collect();
        let n = Self { modes: modes.clone() }.energy();
        for m in &mut modes {
            for z in m.iter_mut() {
                *z /= n;
            }
        }
        Self { modes }
    }

    /// `‖U‖_ℋ`.
    pub fn energy(&self) -> f64 {
        let sq: Vec<f64> = self.modes.iter().flat_map(|m| m.iter().map(|z| z.norm_sqr())).collect();
        compensated_sum(&sq).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecayFit {
    Exponential {
        rate: f64,
    },
    Polynomial {
        order: f64,
        expected: f64,
        window: [f64; 2],
    },
    NonDecay {
        /// Smallest `sup_n ‖e^{Bₙt}‖` up to the horizon.
        floor: f64,
        /// Smallest `‖U(t)‖ / ‖U₀‖` up to the horizon.
        energy_floor: f64,
    },
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub point: ParamPoint,
    pub spectrum: SpectrumModel,
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    pub smoothed_energies: Vec<f64>,
    /// `sup_n ‖e^{Bₙt}‖`.
    pub operator_norms: Vec<f64>,
    /// `sup_n ‖e^{Bₙt}Bₙ⁻¹‖`.
    pub smoothed_operator_norms: Vec<f64>,
    pub stability: Stability,
    pub fit: DecayFit,
    /// Last time at which the excluded modes change the reported supremum
    /// by at most 1%; `None` when that holds on the whole grid.
    pub truncation_validity_horizon: Option<f64>,
    pub fallback_modes: usize,
}

impl DecayReport {
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "alpha": self.point.alpha,
            "beta": self.point.beta,
            "n_max": self.spectrum.n_max,
            "stability": self.stability,
            "fit": self.fit,
            "truncation_validity_horizon": self.truncation_validity_horizon,
            "initial_energy": self.energies.first(),
            "final_energy": self.energies.last(),
            "fallback_modes": self.fallback_modes,
        })
    }

    fn within_horizon(&self) -> impl Iterator<Item = usize> + '_ {
        let h = self.truncation_validity_horizon.unwrap_or(f64::INFINITY);
        (0..self.times.len()).filter(move |&i| self.times[i] <= h)
    }
}

/// `[0]` followed by `points` log-spaced times in `[t_min, t_max]`.
pub fn default_time_grid(t_min: f64, t_max: f64, points: usize) -> Vec<f64> {
    let mut v = vec![0.0];
    v.extend(crate::resolvent::log_spaced(t_min, t_max, points));
    v
}

/// Largest per-mode growth factor `max_j e^{Re λⱼ t}`, divided by `|λⱼ|`
/// when smoothed. Used to estimate modes that are not simulated.
fn mode_estimate(t: &EigTriple, time: f64, smoothed: bool) -> f64 {
    t.roots()
        .iter()
        .map(|z| {
            let g = (z.re * time).exp();
            if smoothed {
                g / z.norm()
            } else {
                g
            }
        })
        .fold(0.0, f64::max)
}

/// Supremum of [`mode_estimate`] over a set of modes at each time.
fn sup_estimate(triples: &[EigTriple], times: &[f64], smoothed: bool) -> Vec<f64> {
    times
        .iter()
        .map(|&t| {
            triples
                .iter()
                .map(|tr| mode_estimate(tr, t, smoothed))
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Modes above the truncation, sampled on a log grid reaching twelve
/// decades past `μ_{N+1}`.
fn excluded_triples(p: &ParamPoint, s: &SpectrumModel) -> Result<Vec<EigTriple>> {
    let mu_next = s.mu(s.n_max + 1);
    let per_decade = 16;
    let n = 12 * per_decade;
    (0..=n)
        .map(|i| mu_next * 10f64.powf(i as f64 / per_decade as f64))
        .map(|mu| certified_roots(&block_coeffs(mu, p)?))
        .collect()
}

pub fn simulate_decay(p: &ParamPoint, s: &SpectrumModel, u0: &ModeState, t_grid: &[f64]) -> Result<DecayReport> {
    if s.n_max == 0 || u0.modes.is_empty() {
        return Err(LabError::EmptySpectrum);
    }
    if u0.modes.len() as u64 != s.n_max {
        return Err(LabError::InvalidParameter(format!(
            "initial state has {} modes, spectrum has {}",
            u0.modes.len(),
            s.n_max
        )));
    }
    let e0 = u0.energy();
    if !(e0 > 0.0) {
        return Err(LabError::InvalidParameter("initial state is zero".into()));
    }
    if t_grid.first() != Some(&0.0)
        || t_grid.windows(2).any(|w| !(w[1] > w[0]))
        || !t_grid.iter().all(|t| t.is_finite())
    {
        return Err(LabError::InvalidParameter(
            "time grid must start at 0 and increase strictly".into(),
        ));
    }

    let props = (1..=s.n_max)
        .into_par_iter()
        .map(|n| ModePropagator::new(s.mu(n), p))
        .collect::<Result<Vec<_>>>()?;
    let fallback_modes = props.iter().filter(|m| !m.is_spectral()).count();

    let rows = t_grid
        .par_iter()
        .map(|&t| {
            let mut e = Vec::with_capacity(3 * props.len());
            let mut es = Vec::with_capacity(3 * props.len());
            let (mut op, mut ops) = (0.0f64, 0.0f64);
            for (m, x) in props.iter().zip(&u0.modes) {
                let et = m.exp(t)?;
                let ets = m.exp_smoothed(t)?;
                e.extend(mat3::mul_vec(&et, x).iter().map(|z| z.norm_sqr()));
                es.extend(mat3::mul_vec(&ets, x).iter().map(|z| z.norm_sqr()));
                op = op.max(mat3::spectral_norm(&et));
                ops = ops.max(mat3::spectral_norm(&ets));
            }
            Ok((compensated_sum(&e).sqrt(), compensated_sum(&es).sqrt(), op, ops))
        })
        .collect::<Result<Vec<_>>>()?;

    let stability = summary_row(p).stability;
    let smoothed = matches!(stability, Stability::Polynomial { .. });
    let included: Vec<EigTriple> = props
        .iter()
        .map(|m| certified_roots(&m.block.coeffs()?))
        .collect::<Result<_>>()?;
    let inc = sup_estimate(&included, t_grid, smoothed);
    let exc = sup_estimate(&excluded_triples(p, s)?, t_grid, smoothed);
    let horizon = match stability {
        // λₙ,₀ → 0, so the supremum over the full spectrum stays at one.
        Stability::NotAsymptoticallyStable => first_violation(t_grid, &inc, |_| 1.0),
        _ => first_violation(t_grid, &inc, |i| exc[i]),
    };

    let mut report = DecayReport {
        point: *p,
        spectrum: *s,
        times: t_grid.to_vec(),
        energies: rows.iter().map(|r| r.0).collect(),
        smoothed_energies: rows.iter().map(|r| r.1).collect(),
        operator_norms: rows.iter().map(|r| r.2).collect(),
        smoothed_operator_norms: rows.iter().map(|r| r.3).collect(),
        stability,
        fit: DecayFit::None,
        truncation_validity_horizon: horizon,
        fallback_modes,
    };
    report.fit = fit_report(&report, e0)?;
    Ok(report)
}

/// Last grid time before the estimate over excluded modes exceeds the
/// included value by more than the slack.
fn first_violation(times: &[f64], included: &[f64], excluded: impl Fn(usize) -> f64) -> Option<f64> {
    for i in 0..times.len() {
        if excluded(i) > (1.0 + HORIZON_SLACK) * included[i] {
            return Some(if i == 0 { 0.0 } else { times[i - 1] });
        }
    }
    None
}

fn fit_report(r: &DecayReport, e0: f64) -> Result<DecayFit> {
    let idx: Vec<usize> = r.within_horizon().collect();
    let t_end = idx.last().map(|&i| r.times[i]).unwrap_or(0.0);
    Ok(match r.stability {
        Stability::Exponential => {
            // Above the rounding floor of the eigen-sum.
            let live: Vec<usize> = idx
                .iter()
                .copied()
                .filter(|&i| r.operator_norms[i] > EXP_FIT_FLOOR)
                .collect();
            let t_live = live.last().map(|&i| r.times[i]).unwrap_or(0.0);
            let mut sel: Vec<usize> = live.iter().copied().filter(|&i| r.times[i] >= 0.5 * t_live).collect();
            if sel.len() < 3 {
                sel = live[live.len().saturating_sub(3)..].to_vec();
            }
            let x: Vec<f64> = sel.iter().map(|&i| r.times[i]).collect();
            let y: Vec<f64> = sel.iter().map(|&i| r.operator_norms[i].ln()).collect();
            let (b, _) = ols_slope(&x, &y)?;
            DecayFit::Exponential { rate: -b }
        }
        Stability::Polynomial { order } => {
            let t1 = t_end / 100.0;
            let sel: Vec<usize> = idx
                .iter()
                .copied()
                .filter(|&i| r.times[i] >= t1 && r.times[i] > 0.0)
                .collect();
            let x: Vec<f64> = sel.iter().map(|&i| r.times[i].ln()).collect();
            let y: Vec<f64> = sel.iter().map(|&i| r.smoothed_operator_norms[i].ln()).collect();
            let (b, _) = ols_slope(&x, &y)?;
            DecayFit::Polynomial {
                order: -b,
                expected: order,
                window: [t1, t_end],
            }
        }
        Stability::NotAsymptoticallyStable => DecayFit::NonDecay {
            floor: idx.iter().map(|&i| r.operator_norms[i]).fold(f64::INFINITY, f64::min),
            energy_floor: idx.iter().map(|&i| r.energies[i] / e0).fold(f64::INFINITY, f64::min),
        },
        Stability::Undetermined => DecayFit::None,
    })
}

type DdVec = [DoubleDouble; 3];

/// `e^{τB}y` for one real component by Taylor series in double-double; only
/// meant for `|τ|‖B‖ ≪ 1`.
fn taylor_step(e: &BlockEntries, y: &[f64; 3], tau: f64) -> DdVec {
    let (s, g, h) = (
        DoubleDouble::from(e.s * tau),
        DoubleDouble::from(e.g * tau),
        DoubleDouble::from(e.h * tau),
    );
    let mut term: DdVec = y.map(DoubleDouble::from);
    let mut sum = term;
    for k in 1..=24 {
        let next = [s * term[1], g * term[2] - s * term[0], -(g * term[1]) - h * term[2]];
        let inv = 1.0 / k as f64;
        term = next.map(|z| z.scale(inv));
        sum = [sum[0] + term[0], sum[1] + term[1], sum[2] + term[2]];
        if term
            .iter()
            .all(|z| z.hi.abs() <= 1e-34 * sum.iter().map(|w| w.hi.abs()).fold(0.0, f64::max))
        {
            break;
        }
    }
    sum
}

fn dd_energy(e: &BlockEntries, re: &[f64; 3], im: &[f64; 3], tau: f64) -> DoubleDouble {
    let a = taylor_step(e, re, tau);
    let b = taylor_step(e, im, tau);
    (0..3).fold(DoubleDouble::ZERO, |acc, i| acc + a[i].square() + b[i].square())
}

/// Small-step differencing of `d/dt ‖e^{Bt}x‖²` against `−2h|w(t)|²`; returns
/// both and their relative difference.
///
/// The state at `t` comes from the propagator. The four-point stencil around
/// it (step `10⁻⁵/‖B‖`) is propagated and summed in double-double, so the
/// energy differences do not cancel at the scale of `‖B‖`. Both sides are
/// quadratic, so they refer to the state normalised to unit norm at `t`.
pub fn energy_derivative_check(mu: f64, p: &ParamPoint, x: &Vec3, t: f64) -> Result<(f64, f64, f64)> {
    let m = ModePropagator::new(mu, p)?;
    let e = m.block.entries;
    let y = mat3::mul_vec(&m.exp(t)?, x);
    let norm = mat3::vec_norm(&y);
    if norm == 0.0 || !norm.is_finite() {
        return Err(LabError::Consistency(format!("state at t = {t} has norm {norm}")));
    }
    let y = y.map(|z| z / norm);
    let re = y.map(|z| z.re);
    let im = y.map(|z| z.im);
    let step = 1e-5 / mat3::spectral_norm(&m.block.matrix);
    let en = |k: f64| dd_energy(&e, &re, &im, k * step);
    let diff = (en(1.0) - en(-1.0)).scale(8.0) - (en(2.0) - en(-2.0));
    let fd = diff.to_f64() / (12.0 * step);
    let exact = -2.0 * e.h * y[2].norm_sqr();
    let rel = (fd - exact).abs() / exact.abs().max(f64::MIN_POSITIVE);
    Ok((fd, exact, rel))
}
