//! Per-eigenvalue 3×3 blocks of the generator in energy coordinates.
//!
//! For an eigenvalue `μ` of `A` the block acts on `(μ^{1/2}u, v, w)` as
//!
//! ```text
//! [  0      s     0 ]      s = μ^{1/2}
//! [ -s      0     g ]      g = γ μ^α
//! [  0     -g    -h ]      h = k μ^β
//! ```
//!
//! and its characteristic polynomial is `z³ + h z² + (g² + s²) z + s² h`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::numeric::dd::CompensatedSum;
use crate::numeric::mat3::{self, Mat3};
use crate::regions::ParamPoint;

/// `μ^θ` via `exp(θ ln μ)`, rejecting results that leave the f64 range.
pub fn mu_pow(mu: f64, theta: f64) -> Result<f64> {
    check_mu(mu)?;
    let v = if theta == 0.0 { 1.0 } else { mu.powf(theta) };
    if !v.is_finite() {
        return Err(LabError::Overflow(format!("mu^{theta} at mu = {mu:e}")));
    }
    Ok(v)
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(LabError::Domain(format!("mu = {mu} must be finite and positive")));
    }
    Ok(())
}

/// `ln(e^x + e^y)` without overflow.
pub fn log_add_exp(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Scalar entries `(s, g, h)` of the block at `μ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockEntries {
    pub s: f64,
    pub g: f64,
    pub h: f64,
}

impl BlockEntries {
    pub fn new(mu: f64, p: &ParamPoint) -> Result<Self> {
        Ok(Self {
            s: mu_pow(mu, 0.5)?,
            g: p.gamma * mu_pow(mu, p.alpha)?,
            h: p.k * mu_pow(mu, p.beta)?,
        })
    }

    pub fn matrix(&self) -> Mat3 {
        let c = |x: f64| Complex64::new(x, 0.0);
        let (s, g, h) = (self.s, self.g, self.h);
        [[c(0.0), c(s), c(0.0)], [c(-s), c(0.0), c(g)], [c(0.0), c(-g), c(-h)]]
    }

    /// Adjugate of `zI − B`, so that `(zI − B)⁻¹ = adj / det`.
    pub fn resolvent_adjugate(&self, z: Complex64) -> Mat3 {
        let (s, g, h) = (self.s, self.g, self.h);
        let zh = z + h;
        [
            [z * zh + g * g, Complex64::from(s) * zh, Complex64::from(s * g)],
            [-s * zh, z * zh, z * g],
            [Complex64::from(s * g), -z * g, z * z + s * s],
        ]
    }

    /// `det(iλ − B)` with the differences `s² − λ²` formed as `(s − λ)(s + λ)`.
    pub fn det_on_axis(&self, lambda: f64) -> Complex64 {
        let (s, g, h) = (self.s, self.g, self.h);
        let diff = (s - lambda) * (s + lambda);
        Complex64::new(h * diff, lambda * (diff + g * g))
    }

    /// Eigenvector of `B` for an eigenvalue `z` (unnormalised).
    pub fn eigenvector(&self, z: Complex64) -> [Complex64; 3] {
        let (s, g) = (self.s, self.g);
        [Complex64::from(s * g), z * g, z * z + s * s]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeBlock {
    pub mu: f64,
    pub point: ParamPoint,
    pub entries: BlockEntries,
    pub matrix: Mat3,
}

impl ModeBlock {
    /// `Re⟨Bx, x⟩`, which equals `−h |x₃|²`.
    pub fn dissipation(&self, x: &[Complex64; 3]) -> f64 {
        let bx = mat3::mul_vec(&self.matrix, x);
        bx.iter().zip(x).map(|(a, b)| (a * b.conj()).re).sum()
    }

    pub fn coeffs(&self) -> Result<CubicCoeffs> {
        block_coeffs(self.mu, &self.point)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<[f64; 2]>> = self
            .matrix
            .iter()
            .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        serde_json::json!({
            "mu": self.mu,
            "alpha": self.point.alpha,
            "beta": self.point.beta,
            "gamma": self.point.gamma,
            "k": self.point.k,
            "matrix": rows,
        })
    }
}

pub fn build_mode_block(mu: f64, p: &ParamPoint) -> Result<ModeBlock> {
    check_mu(mu)?;
    let entries = BlockEntries::new(mu, p)?;
    Ok(ModeBlock {
        mu,
        point: *p,
        entries,
        matrix: entries.matrix(),
    })
}

/// Where a set of cubic coefficients came from, when it is a mode cubic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicOrigin {
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub k: f64,
}

impl CubicOrigin {
    pub fn has_unit_coupling(&self) -> bool {
        self.gamma == 1.0 && self.k == 1.0
    }
}

/// Coefficients of the monic cubic `λ³ + bλ² + cλ + d`.
///
/// Linear values may be `+inf` for very large `μ`; the log mirrors are
/// always finite and are what the solvers scale with.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicCoeffs {
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub ln_b: f64,
    pub ln_c: f64,
    pub ln_d: f64,
    pub origin: Option<CubicOrigin>,
}

impl CubicCoeffs {
    pub fn new(b: f64, c: f64, d: f64) -> Result<Self> {
        for (name, v) in [("b", b), ("c", c), ("d", d)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(LabError::Domain(format!(
                    "cubic coefficient {name} = {v} must be finite and positive"
                )));
            }
        }
        Ok(Self {
            b,
            c,
            d,
            ln_b: b.ln(),
            ln_c: c.ln(),
            ln_d: d.ln(),
            origin: None,
        })
    }

    /// Coefficients given by their logarithms; linear values may overflow.
    pub fn from_logs(ln_b: f64, ln_c: f64, ln_d: f64) -> Self {
        Self {
            b: ln_b.exp(),
            c: ln_c.exp(),
            d: ln_d.exp(),
            ln_b,
            ln_c,
            ln_d,
            origin: None,
        }
    }

    /// `ln` of the root scale `max(b, √c, ∛d)`.
    pub fn ln_scale(&self) -> f64 {
        self.ln_b.max(self.ln_c / 2.0).max(self.ln_d / 3.0)
    }

    /// Coefficients of the cubic with roots `λ / 2^k`, together with `2^k`.
    ///
    /// The power of two is chosen so that the scaled roots are of order one.
    pub fn scaled(&self) -> (f64, [f64; 3]) {
        let k = (self.ln_scale() / std::f64::consts::LN_2).round() as i32;
        let k = k.clamp(-1000, 1000);
        if self.b.is_finite() && self.c.is_finite() && self.d.is_finite() {
            let inv = pow2(-k);
            let (b, c, d) = (self.b * inv, self.c * inv * inv, self.d * inv * inv * inv);
            if b.is_normal() && c.is_normal() && d.is_normal() {
                return (pow2(k), [b, c, d]);
            }
        }
        let ls = k as f64 * std::f64::consts::LN_2;
        (
            pow2(k),
            [
                (self.ln_b - ls).exp(),
                (self.ln_c - 2.0 * ls).exp(),
                (self.ln_d - 3.0 * ls).exp(),
            ],
        )
    }

    /// `f(z) = z³ + bz² + cz + d` summed with compensation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        eval_scaled(&[self.b, self.c, self.d], z)
    }

    /// `|f(z)| / (|z|³ + b|z|² + c|z| + d)`.
    pub fn rel_residual(&self, z: Complex64) -> f64 {
        rel_residual_scaled(&[self.b, self.c, self.d], z)
    }
}

fn pow2(k: i32) -> f64 {
    2f64.powi(k)
}

pub(crate) fn eval_scaled(co: &[f64; 3], z: Complex64) -> Complex64 {
    let [b, c, d] = *co;
    let z2 = z * z;
    let z3 = z2 * z;
    let terms = [z3, z2 * b, z * c, Complex64::from(d)];
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for t in terms {
        re.add(t.re);
        im.add(t.im);
    }
    Complex64::new(re.value(), im.value())
}

pub(crate) fn rel_residual_scaled(co: &[f64; 3], z: Complex64) -> f64 {
    let [b, c, d] = *co;
    let r = z.norm();
    let denom = r * r * r + b * r * r + c * r + d;
    eval_scaled(co, z).norm() / denom
}

/// Mode cubic coefficients for arbitrary coupling: `(kμ^β, γ²μ^{2α} + μ, kμ^{β+1})`.
pub fn block_coeffs(mu: f64, p: &ParamPoint) -> Result<CubicCoeffs> {
    check_mu(mu)?;
    let l = mu.ln();
    let ln_k = p.k.ln();
    let ln_g2 = 2.0 * p.gamma.abs().ln();
    let ln_b = ln_k + p.beta * l;
    let ln_c = log_add_exp(ln_g2 + 2.0 * p.alpha * l, l);
    let ln_d = ln_k + (p.beta + 1.0) * l;
    let g2 = p.gamma * p.gamma;
    let b = p.k * mu.powf(p.beta);
    let c = g2 * mu.powf(2.0 * p.alpha) + mu;
    let d = p.k * mu.powf(p.beta + 1.0);
    Ok(CubicCoeffs {
        b,
        c,
        d,
        ln_b,
        ln_c,
        ln_d,
        origin: Some(CubicOrigin {
            mu,
            alpha: p.alpha,
            beta: p.beta,
            gamma: p.gamma,
            k: p.k,
        }),
    })
}

/// `(b, c, d) = (μ^β, μ^{2α} + μ, μ^{β+1})`; requires `γ = k = 1`.
pub fn char_coeffs(mu: f64, p: &ParamPoint) -> Result<CubicCoeffs> {
    if !p.has_unit_coupling() {
        return Err(LabError::UnitCouplingRequired { gamma: p.gamma, k: p.k });
    }
    block_coeffs(mu, p)
}

pub fn eval_f(lambda: Complex64, mu: f64, p: &ParamPoint) -> Result<Complex64> {
    Ok(char_coeffs(mu, p)?.eval(lambda))
}

/// Spectral norm of `(iλ − B)⁻¹`.
pub fn block_resolvent_norm(lambda: f64, mu: f64, p: &ParamPoint) -> Result<f64> {
    check_mu(mu)?;
    let e = BlockEntries::new(mu, p)?;
    let det = e.det_on_axis(lambda);
    resolvent_norm_from_det(&e, lambda, det)
}

/// `‖adj(iλ − B)‖₂ / |det|` for a determinant supplied by the caller.
pub fn resolvent_norm_from_det(e: &BlockEntries, lambda: f64, det: Complex64) -> Result<f64> {
    let det_abs = det.norm();
    if det_abs == 0.0 || !det_abs.is_finite() {
        return Err(LabError::OnSpectrum { det_abs, mode: None });
    }
    let adj = e.resolvent_adjugate(Complex64::new(0.0, lambda));
    let v = mat3::spectral_norm(&adj) / det_abs;
    if !v.is_finite() {
        return Err(LabError::OnSpectrum { det_abs, mode: None });
    }
    Ok(v)
}

/// Hölder interpolation `‖Aᵖx‖ ≤ ‖A^q x‖^θ ‖A^r x‖^{1−θ}`, `θ = (p−r)/(q−r)`,
/// for `A` diagonal with the given weights. Evaluated in the log domain.
pub fn interpolation_check(x: &[Complex64], weights: &[f64], r: f64, p: f64, q: f64) -> Result<bool> {
    if !(r <= p && p <= q) || r < 0.0 {
        return Err(LabError::Domain(format!(
            "need 0 <= r <= p <= q, got r = {r}, p = {p}, q = {q}"
        )));
    }
    if x.len() != weights.len() {
        return Err(LabError::Domain("vector and weight list differ in length".into()));
    }
    if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(LabError::Domain("weights must be finite and positive".into()));
    }
    if x.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(LabError::Domain("vector entries must be finite".into()));
    }
    let ln_norm = |e: f64| -> f64 {
        let terms: Vec<f64> = x
            .iter()
            .zip(weights)
            .filter(|(z, _)| z.norm() > 0.0)
            .map(|(z, w)| 2.0 * (e * w.ln() + z.norm().ln()))
            .collect();
        let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return m;
        }
        0.5 * (m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln())
    };
    let lhs = ln_norm(p);
    if lhs == f64::NEG_INFINITY || q == r {
        return Ok(true);
    }
    let theta = (p - r) / (q - r);
    let rhs = theta * ln_norm(q) + (1.0 - theta) * ln_norm(r);
    Ok(lhs <= rhs + 1e-12)
}
