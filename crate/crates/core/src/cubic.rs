//! Roots of the mode cubic `λ³ + bλ² + cλ + d` with `b, c, d > 0`.
//!
//! All work happens on the cubic rescaled by a power of two so that its
//! roots are of order one; results are scaled back at the end.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::modal::{eval_scaled, log_add_exp, rel_residual_scaled, CubicCoeffs};
use crate::numeric::dd::{compensated_sum, DoubleDouble, SignedLog};

const RESIDUAL_TOL: f64 = 1e-9;
const DELTA_AGREEMENT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantParts {
    /// `9c − 3b²`
    pub p: f64,
    /// `2b³ − 9bc + 27d`
    pub q: f64,
    /// `(q/2)² + (p/3)³`, or its double-double value when the two forms disagree.
    pub delta: f64,
    /// The expanded form: the eight monomials in `μ` for a unit-coupling mode
    /// cubic, otherwise `(27/4)(27d² + 4b³d + 4c³ − 18bcd − b²c²)`.
    pub delta_expanded: f64,
    /// `−q/2 ± √Δ` when `Δ ≥ 0`.
    pub phi_plus: Option<f64>,
    pub phi_minus: Option<f64>,
    pub ln_p: SignedLog,
    pub ln_q: SignedLog,
    pub ln_delta: SignedLog,
    pub ln_delta_expanded: SignedLog,
    pub ln_phi_plus: Option<SignedLog>,
    pub ln_phi_minus: Option<SignedLog>,
    pub extended_precision: bool,
    /// Power of two the roots were divided by.
    pub scale: f64,
}

/// Scaled working values behind [`DiscriminantParts`].
#[derive(Clone, Copy, Debug)]
struct Scaled {
    s: f64,
    co: [f64; 3],
    /// `p/3`
    p3: f64,
    /// `q/2`
    q2: f64,
    delta: f64,
    delta_expanded: f64,
    extended: bool,
}

impl Scaled {
    fn phis(&self) -> Option<(f64, f64)> {
        if self.delta < 0.0 {
            return None;
        }
        let sq = self.delta.sqrt();
        let sign = if self.q2 >= 0.0 { 1.0 } else { -1.0 };
        let big = -self.q2 - sign * sq;
        let small = if big == 0.0 {
            0.0
        } else {
            -(self.p3 * self.p3 * self.p3) / big
        };
        Some(if sign > 0.0 { (small, big) } else { (big, small) })
    }
}

fn dd(x: f64) -> DoubleDouble {
    DoubleDouble::from_f64(x)
}

/// `p/3 = 3c − b²` and `q/2 = b³ − 4.5bc + 13.5d` in double-double.
fn pq_dd(co: &[f64; 3]) -> (DoubleDouble, DoubleDouble) {
    let [b, c, d] = co.map(dd);
    let b2 = b.square();
    let p3 = c.scale(3.0) - b2;
    let q2 = b2 * b - (b * c).scale(4.5) + d.scale(13.5);
    (p3, q2)
}

/// `(27/4)(27d² + 4b³d + 4c³ − 18bcd − b²c²)` and the sum of the term magnitudes.
fn delta_generic(co: &[f64; 3]) -> (f64, f64) {
    let [b, c, d] = *co;
    let terms = [
        27.0 * d * d,
        4.0 * b * b * b * d,
        4.0 * c * c * c,
        -18.0 * b * c * d,
        -(b * b * c * c),
    ];
    (
        6.75 * compensated_sum(&terms),
        6.75 * terms.iter().map(|t| t.abs()).sum::<f64>(),
    )
}

/// The eight signed monomials of `Δ` for `γ = k = 1`, each divided by `s⁶`,
/// and the sum of their magnitudes.
fn delta_monomials(mu: f64, alpha: f64, beta: f64, ln_s: f64) -> (f64, f64) {
    let l = mu.ln();
    let (a, b) = (alpha, beta);
    let mono: [(f64, f64); 8] = [
        (54.0, 2.0 * b + 2.0),
        (27.0, 4.0 * b + 1.0),
        (27.0, 6.0 * a),
        (81.0, 4.0 * a + 1.0),
        (81.0, 2.0 * a + 2.0),
        (27.0, 3.0),
        (-135.0, 2.0 * a + 2.0 * b + 1.0),
        (-6.75, 4.0 * a + 2.0 * b),
    ];
    let terms: Vec<f64> = mono.iter().map(|(c, e)| c * (e * l - 6.0 * ln_s).exp()).collect();
    (compensated_sum(&terms), terms.iter().map(|t| t.abs()).sum())
}

fn rel_gap(x: f64, y: f64) -> f64 {
    let m = x.abs().max(y.abs());
    if m == 0.0 {
        0.0
    } else {
        (x - y).abs() / m
    }
}

fn scaled_parts(co: &CubicCoeffs) -> Scaled {
    let (s, sc) = co.scaled();
    let (p3d, q2d) = pq_dd(&sc);
    let (p3, q2) = (p3d.to_f64(), q2d.to_f64());
    let delta_pq = q2 * q2 + p3 * p3 * p3;
    let (delta_expanded, expanded_mass) = match co.origin {
        Some(o) if o.has_unit_coupling() => delta_monomials(o.mu, o.alpha, o.beta, s.ln()),
        _ => delta_generic(&sc),
    };
    let (delta, extended) = if rel_gap(delta_pq, delta_expanded) > DELTA_AGREEMENT {
        // Take whichever evaluation has the smaller a-priori error bound.
        let dd_mass = q2 * q2 + (p3 * p3 * p3).abs();
        if 1e-31 * dd_mass <= 4.0 * f64::EPSILON * expanded_mass {
            ((q2d.square() + p3d.square() * p3d).to_f64(), true)
        } else {
            (delta_expanded, false)
        }
    } else {
        (delta_pq, false)
    };
    Scaled {
        s,
        co: sc,
        p3,
        q2,
        delta,
        delta_expanded,
        extended,
    }
}

fn lift(x: f64, ln_s: f64, power: f64) -> SignedLog {
    let v = SignedLog::from_f64(x);
    if v.sign == 0 {
        v
    } else {
        SignedLog::new(v.sign, v.ln_abs + power * ln_s)
    }
}

pub fn discriminant_parts(co: &CubicCoeffs) -> DiscriminantParts {
    let sp = scaled_parts(co);
    let ln_s = sp.s.ln();
    let (s2, s3) = (sp.s * sp.s, sp.s * sp.s * sp.s);
    let phis = sp.phis();
    DiscriminantParts {
        p: 3.0 * sp.p3 * s2,
        q: 2.0 * sp.q2 * s3,
        delta: sp.delta * s3 * s3,
        delta_expanded: sp.delta_expanded * s3 * s3,
        phi_plus: phis.map(|(a, _)| a * s3),
        phi_minus: phis.map(|(_, b)| b * s3),
        ln_p: lift(3.0 * sp.p3, ln_s, 2.0),
        ln_q: lift(2.0 * sp.q2, ln_s, 3.0),
        ln_delta: lift(sp.delta, ln_s, 6.0),
        ln_delta_expanded: lift(sp.delta_expanded, ln_s, 6.0),
        ln_phi_plus: phis.map(|(a, _)| lift(a, ln_s, 3.0)),
        ln_phi_minus: phis.map(|(_, b)| lift(b, ln_s, 3.0)),
        extended_precision: sp.extended,
        scale: sp.s,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Cardano,
    Companion,
    AsymptoticSeedPolished,
}

/// The three roots of a mode cubic.
///
/// With one real root and a conjugate pair, `lambda0` is the real root and
/// `lambda_plus` has positive imaginary part. With three real roots they
/// are ordered `lambda_plus ≥ lambda0 ≥ lambda_minus`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigTriple {
    pub lambda0: Complex64,
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub method: Method,
    pub residuals: [f64; 3],
    pub complex_pair: bool,
    /// Real parts of the pair recomputed from the shifted cubic.
    pub refined: bool,
}

impl EigTriple {
    pub fn roots(&self) -> [Complex64; 3] {
        [self.lambda0, self.lambda_plus, self.lambda_minus]
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    /// Relative errors of `Σλ = −b`, `Σλᵢλⱼ = c`, `Πλ = −d`.
    pub fn vieta_errors(&self, co: &CubicCoeffs) -> [f64; 3] {
        let [x, y, z] = self.roots();
        let sum = x + y + z;
        let pairs = x * y + x * z + y * z;
        let prod = x * y * z;
        [
            (sum + co.b).norm() / co.b,
            (pairs - co.c).norm() / co.c,
            (prod + co.d).norm() / co.d,
        ]
    }
}

/// Smallest over root pairings of the largest `|aᵢ − bⱼ| / (1 + |aᵢ|)`.
pub fn triple_distance(a: &EigTriple, b: &EigTriple) -> f64 {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let (ra, rb) = (a.roots(), b.roots());
    PERMS
        .iter()
        .map(|perm| {
            (0..3)
                .map(|i| (ra[i] - rb[perm[i]]).norm() / (1.0 + ra[i].norm()))
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

fn polish_real(co: &[f64; 3], x0: f64) -> (f64, f64) {
    let [b, c, _] = *co;
    let res = |x: f64| rel_residual_scaled(co, Complex64::from(x));
    let (mut x, mut r) = (x0, res(x0));
    for _ in 0..3 {
        if r == 0.0 {
            break;
        }
        let f = eval_scaled(co, Complex64::from(x)).re;
        let fp = (3.0 * x + 2.0 * b) * x + c;
        if fp == 0.0 || !fp.is_finite() {
            break;
        }
        let xn = x - f / fp;
        let rn = res(xn);
        if rn < r {
            x = xn;
            r = rn;
        } else {
            break;
        }
    }
    (x, r)
}

fn polish_complex(co: &[f64; 3], z0: Complex64) -> (Complex64, f64) {
    let [b, c, _] = *co;
    let (mut z, mut r) = (z0, rel_residual_scaled(co, z0));
    for _ in 0..3 {
        if r == 0.0 {
            break;
        }
        let f = eval_scaled(co, z);
        let fp = (z * 3.0 + 2.0 * b) * z + c;
        if fp.norm() == 0.0 {
            break;
        }
        let zn = z - f / fp;
        let rn = rel_residual_scaled(co, zn);
        if rn < r {
            z = zn;
            r = rn;
        } else {
            break;
        }
    }
    (z, r)
}

/// Cardano seeds on the scaled cubic when `Δ > 0`: the real-root seed
/// `(U + V − b)/3` and the upper pair member, with `U ± V` formed without
/// cancellation.
fn cardano_seeds(sp: &Scaled) -> Option<(f64, Complex64)> {
    if sp.delta <= 0.0 {
        return None;
    }
    let (phi_plus, phi_minus) = sp.phis()?;
    let b = sp.co[0];
    let u = phi_plus.cbrt();
    let v = phi_minus.cbrt();
    let (sum, diff) = if u * v > 0.0 {
        (u + v, 2.0 * sp.delta.sqrt() / (u * u + u * v + v * v))
    } else {
        (-2.0 * sp.q2 / (u * u - u * v + v * v), u - v)
    };
    let re = -(sum + 2.0 * b) / 6.0;
    let im = 3f64.sqrt() * diff.abs() / 6.0;
    Some(((sum - b) / 3.0, Complex64::new(re, im)))
}

/// The real root `x ≈ −d/c` when `|x|b/c` and `|x|²/c` are below rounding;
/// evaluated from the log mirrors, so it survives dynamic ranges that the
/// rescaled cubic cannot represent. Returns the root and its relative residual.
fn tiny_real_root(co: &CubicCoeffs) -> Option<(f64, f64)> {
    let t = co.ln_d - co.ln_c;
    let r1 = t + co.ln_b - co.ln_c;
    let r2 = 2.0 * t - co.ln_c;
    let x = t.exp();
    (r1 < -36.0 && r2 < -36.0 && x.is_normal()).then(|| (-x, r1.exp() + r2.exp()))
}

/// Unique real root of a cubic with one real root and a conjugate pair,
/// unscaled, with its relative residual.
fn real_root(co: &CubicCoeffs) -> Option<(f64, f64)> {
    if let Some(t) = tiny_real_root(co) {
        return Some(t);
    }
    let sp = scaled_parts(co);
    let (x_seed, pair_seed) = cardano_seeds(&sp)?;
    let (pair, _) = polish_complex(&sp.co, pair_seed);
    let d = sp.co[2];
    [x_seed, -d / pair.norm_sqr(), -d / pair_seed.norm_sqr()]
        .iter()
        .filter(|x| x.is_finite())
        .map(|&x| polish_real(&sp.co, x))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(x, r)| (x * sp.s, r))
}

/// `Λ³ + 2bΛ² + (b² + c)Λ + (bc − d)`, built in the log domain.
fn shifted_coeffs(co: &CubicCoeffs) -> Result<CubicCoeffs> {
    let ln_e = match co.origin {
        Some(o) => o.k.ln() + 2.0 * o.gamma.abs().ln() + (2.0 * o.alpha + o.beta) * o.mu.ln(),
        None => {
            let (s, [b, c, d]) = co.scaled();
            let e = b.mul_add(c, -d);
            if !(e > 0.0) {
                return Err(LabError::Consistency(format!(
                    "shifted cubic constant bc - d = {:e} is not positive; no negative real root",
                    e * s * s * s
                )));
            }
            e.ln() + 3.0 * s.ln()
        }
    };
    Ok(CubicCoeffs::from_logs(
        std::f64::consts::LN_2 + co.ln_b,
        log_add_exp(2.0 * co.ln_b, co.ln_c),
        ln_e,
    ))
}

/// Three real roots of the scaled cubic, descending.
fn trig_roots(sp: &Scaled) -> [(f64, f64); 3] {
    let [b, _, _] = sp.co;
    // Depressed cubic y³ + Py + Q with P = p/9, Q = q/27.
    let pp = sp.p3 / 3.0;
    let qq = 2.0 * sp.q2 / 27.0;
    let shift = -b / 3.0;
    let ys = if pp >= 0.0 {
        let y = (-qq).cbrt();
        [y, y, y]
    } else {
        let m = 2.0 * (-pp / 3.0).sqrt();
        let arg = ((3.0 * qq / (2.0 * pp)) * (-3.0 / pp).sqrt()).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let tau = 2.0 * std::f64::consts::PI / 3.0;
        [m * theta.cos(), m * (theta - tau).cos(), m * (theta - 2.0 * tau).cos()]
    };
    let mut roots = ys.map(|y| polish_real(&sp.co, y + shift));
    roots.sort_by(|a, b| b.0.total_cmp(&a.0));
    roots
}

fn ill_conditioned(co: &CubicCoeffs, residual: f64) -> LabError {
    LabError::IllConditionedCubic {
        b: co.b,
        c: co.c,
        d: co.d,
        residual,
    }
}

fn check_positive(co: &CubicCoeffs) -> Result<()> {
    if [co.ln_b, co.ln_c, co.ln_d].iter().any(|v| !v.is_finite()) {
        return Err(LabError::Domain(
            "cubic coefficients must be positive and finite in log form".into(),
        ));
    }
    Ok(())
}

/// Cardano's formula with signed real cube roots when `Δ > 0` and the
/// trigonometric form otherwise; every root Newton-polished.
pub fn cardano_roots(co: &CubicCoeffs) -> Result<EigTriple> {
    check_positive(co)?;
    let sp = scaled_parts(co);
    let s = sp.s;
    let triple = match cardano_seeds(&sp) {
        Some((x_seed, pair_seed)) => {
            let d = sp.co[2];
            let (mut pair, mut rp) = polish_complex(&sp.co, pair_seed);
            let (x0, r0) = match tiny_real_root(co) {
                Some(t) => t,
                None => {
                    let (x, r) = [x_seed, -d / pair.norm_sqr()]
                        .iter()
                        .filter(|x| x.is_finite())
                        .map(|&x| polish_real(&sp.co, x))
                        .min_by(|a, b| a.1.total_cmp(&b.1))
                        .unwrap_or((f64::NAN, f64::INFINITY));
                    (x * s, r)
                }
            };
            if !(rp <= RESIDUAL_TOL) {
                // Pair far below the scale: Vieta, |λ±|² = −d/λ₀ and 2 Re λ± = Λ₀.
                if let Some(z) = vieta_pair(co, x0, s) {
                    let rz = rel_residual_scaled(&sp.co, z);
                    if rz < rp {
                        (pair, rp) = (z, rz);
                    }
                }
            }
            let pair = Complex64::new(pair.re, pair.im.abs());
            EigTriple {
                lambda0: Complex64::from(x0),
                lambda_plus: pair * s,
                lambda_minus: pair.conj() * s,
                method: Method::Cardano,
                residuals: [r0, rp, rp],
                complex_pair: true,
                refined: false,
            }
        }
        None => {
            let [(hi, rh), (mid, rm), (lo, rl)] = trig_roots(&sp);
            EigTriple {
                lambda0: Complex64::from(mid * s),
                lambda_plus: Complex64::from(hi * s),
                lambda_minus: Complex64::from(lo * s),
                method: Method::Cardano,
                residuals: [rm, rh, rl],
                complex_pair: false,
                refined: false,
            }
        }
    };
    if !(triple.max_residual() <= RESIDUAL_TOL) {
        return Err(ill_conditioned(co, triple.max_residual()));
    }
    Ok(triple)
}

/// Upper pair member divided by `s`, from the real roots of the cubic and of
/// its shifted cubic.
fn vieta_pair(co: &CubicCoeffs, lambda0: f64, s: f64) -> Option<Complex64> {
    if !(lambda0 < 0.0) {
        return None;
    }
    let (big_lambda, _) = real_root(&shifted_coeffs(co).ok()?)?;
    let re = 0.5 * big_lambda / s;
    let modulus2 = (co.ln_d - (-lambda0).ln() - 2.0 * s.ln()).exp();
    let im2 = modulus2 - re * re;
    (im2 > 0.0).then(|| Complex64::new(re, im2.sqrt()))
}

/// Polishes caller-supplied seeds `(λ₀, λ₊)`, e.g. asymptotic predictions.
pub fn polish_from_seeds(co: &CubicCoeffs, lambda0: f64, lambda_plus: Complex64) -> Result<EigTriple> {
    check_positive(co)?;
    let (s, sc) = co.scaled();
    let (x0, r0) = polish_real(&sc, lambda0 / s);
    let (z, rz) = polish_complex(&sc, lambda_plus / s);
    let z = Complex64::new(z.re, z.im.abs());
    let triple = EigTriple {
        lambda0: Complex64::from(x0 * s),
        lambda_plus: z * s,
        lambda_minus: z.conj() * s,
        method: Method::AsymptoticSeedPolished,
        residuals: [r0, rz, rz],
        complex_pair: true,
        refined: false,
    };
    if !(triple.max_residual() <= RESIDUAL_TOL) {
        return Err(ill_conditioned(co, triple.max_residual()));
    }
    Ok(triple)
}

/// Recomputes `Re λ± = Λ₀/2` from the real root `Λ₀ = λ₊ + λ₋` of
/// `Λ³ + 2bΛ² + (b² + c)Λ + (bc − d)`, whose roots are the pairwise sums of
/// the original roots. For a mode cubic `bc − d = kγ²μ^{2α+β}` exactly.
pub fn refine_real_part(co: &CubicCoeffs, triple: &EigTriple) -> Result<EigTriple> {
    if !triple.complex_pair {
        return Err(LabError::Consistency(
            "refine_real_part needs a complex-conjugate pair".into(),
        ));
    }
    let shifted = shifted_coeffs(co)?;
    let big_lambda = match real_root(&shifted) {
        Some((x, _)) => x,
        None => {
            let target = 2.0 * triple.lambda_plus.re;
            let sp = scaled_parts(&shifted);
            trig_roots(&sp)
                .iter()
                .map(|(x, _)| x * sp.s)
                .min_by(|x, y| (x - target).abs().total_cmp(&(y - target).abs()))
                .unwrap_or(f64::NAN)
        }
    };
    if !(big_lambda < 0.0) {
        return Err(LabError::Consistency(format!(
            "shifted cubic real root {big_lambda:e} is not negative"
        )));
    }
    let re = 0.5 * big_lambda;
    let plus = Complex64::new(re, triple.lambda_plus.im);
    let rp = co.rel_residual_on_scale(plus);
    let out = EigTriple {
        lambda_plus: plus,
        lambda_minus: plus.conj(),
        residuals: [triple.residuals[0], rp, rp],
        refined: true,
        ..*triple
    };
    if !(out.max_residual() <= RESIDUAL_TOL) {
        return Err(ill_conditioned(co, out.max_residual()));
    }
    Ok(out)
}

/// Cardano roots with the real parts of a conjugate pair refined.
pub fn certified_roots(co: &CubicCoeffs) -> Result<EigTriple> {
    let t = cardano_roots(co)?;
    if t.complex_pair {
        refine_real_part(co, &t)
    } else {
        Ok(t)
    }
}

fn nalgebra_companion(co: &[f64; 3]) -> Result<[Complex64; 3]> {
    if co.iter().any(|v| !v.is_finite()) {
        return Err(LabError::Overflow(
            "companion balancing overflowed; use the log-domain Cardano path".into(),
        ));
    }
    let [b, c, d] = *co;
    let mut m = nalgebra::Matrix3::new(-b, -c, -d, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
    nalgebra::linalg::balancing::balance_parlett_reinsch(&mut m);
    let ev = m.complex_eigenvalues();
    Ok([ev[0], ev[1], ev[2]])
}

/// Eigenvalues of the balanced companion matrix: the independent oracle.
///
/// Roots much smaller than the scale are taken from the reversed polynomial
/// when that gives a smaller residual.
pub fn companion_roots(co: &CubicCoeffs) -> Result<EigTriple> {
    check_positive(co)?;
    let (s, sc) = co.scaled();
    let fwd = nalgebra_companion(&sc)?;
    let rev_co = CubicCoeffs {
        b: sc[1] / sc[2],
        c: sc[0] / sc[2],
        d: 1.0 / sc[2],
        ln_b: sc[1].ln() - sc[2].ln(),
        ln_c: sc[0].ln() - sc[2].ln(),
        ln_d: -sc[2].ln(),
        origin: None,
    };
    let (rs, rsc) = rev_co.scaled();
    let rev: Vec<Complex64> = nalgebra_companion(&rsc)?
        .iter()
        .map(|z| Complex64::from(1.0) / (z * rs))
        .collect();
    let mut roots = [Complex64::from(0.0); 3];
    let mut res = [0.0; 3];
    for (i, z) in fwd.iter().enumerate() {
        let w = rev
            .iter()
            .min_by(|a, b| (*a - z).norm().total_cmp(&(*b - z).norm()))
            .copied()
            .unwrap_or(*z);
        let (rz, rw) = (rel_residual_scaled(&sc, *z), rel_residual_scaled(&sc, w));
        (roots[i], res[i]) = if rw < rz { (w, rw) } else { (*z, rz) };
    }
    let scale_tol = 1e-12;
    let all_real = roots.iter().all(|z| z.im.abs() <= scale_tol * (1.0 + z.norm()));
    let mut idx = [0usize, 1, 2];
    let triple = if all_real {
        idx.sort_by(|&a, &b| roots[b].re.total_cmp(&roots[a].re));
        let r = |k: usize| Complex64::from(roots[idx[k]].re * s);
        EigTriple {
            lambda0: r(1),
            lambda_plus: r(0),
            lambda_minus: r(2),
            method: Method::Companion,
            residuals: [res[idx[1]], res[idx[0]], res[idx[2]]],
            complex_pair: false,
            refined: false,
        }
    } else {
        idx.sort_by(|&a, &b| roots[a].im.abs().total_cmp(&roots[b].im.abs()));
        let real = idx[0];
        let (pa, pb) = (idx[1], idx[2]);
        let (plus, minus) = if roots[pa].im >= roots[pb].im {
            (pa, pb)
        } else {
            (pb, pa)
        };
        EigTriple {
            lambda0: Complex64::from(roots[real].re * s),
            lambda_plus: roots[plus] * s,
            lambda_minus: roots[minus] * s,
            method: Method::Companion,
            residuals: [res[real], res[plus], res[minus]],
            complex_pair: true,
            refined: false,
        }
    };
    Ok(triple)
}

impl CubicCoeffs {
    /// Relative residual evaluated on the power-of-two rescaled cubic, so
    /// that it is defined even when the linear coefficients overflow.
    pub fn rel_residual_on_scale(&self, z: Complex64) -> f64 {
        let (s, sc) = self.scaled();
        rel_residual_scaled(&sc, z / s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modal::char_coeffs;
    use crate::regions::ParamPoint;

    fn co(b: f64, c: f64, d: f64) -> CubicCoeffs {
        CubicCoeffs::new(b, c, d).unwrap()
    }

    #[test]
    fn discriminant_examples() {
        let dp = discriminant_parts(&co(1.0, 1.0, 1.0));
        assert_eq!((dp.p, dp.q), (6.0, 20.0));
        assert!((dp.delta - 108.0).abs() < 1e-12);
        let dp = discriminant_parts(&co(1.0, 2.0, 1.0));
        assert_eq!((dp.p, dp.q), (15.0, 11.0));
        assert!((dp.delta - 155.25).abs() < 1e-12);
        assert!((dp.delta_expanded - 155.25).abs() < 1e-12);
        let pp = dp.phi_plus.unwrap() * dp.phi_minus.unwrap();
        assert!((pp + 125.0).abs() < 1e-10);
    }

    #[test]
    fn discriminant_leading_term_r2() {
        let p = ParamPoint::new(0.5, 0.75).unwrap();
        let mu: f64 = 1e10;
        let dp = discriminant_parts(&char_coeffs(mu, &p).unwrap());
        let lead = 27.0 * mu.powf(4.0);
        assert!((dp.delta / lead - 1.0).abs() < 0.01);
        assert!(!dp.extended_precision);
    }

    #[test]
    fn reference_triple() {
        let t = cardano_roots(&co(1.0, 2.0, 1.0)).unwrap();
        assert!((t.lambda0.re + 0.569_840_290_998_053).abs() < 1e-12);
        assert!((t.lambda_plus.re + 0.215_079_854_500_973_4).abs() < 1e-12);
        assert!((t.lambda_plus.im - 1.307_141_278_682_045).abs() < 1e-12);
        assert!((t.lambda0.re * t.lambda_plus.norm_sqr() + 1.0).abs() < 1e-12);
        let o = companion_roots(&co(1.0, 2.0, 1.0)).unwrap();
        assert!(triple_distance(&t, &o) < 1e-10);
    }

    #[test]
    fn triple_root() {
        let t = cardano_roots(&co(3.0, 3.0, 1.0)).unwrap();
        for z in t.roots() {
            assert!((z + 1.0).norm() < 1e-12);
        }
        let o = companion_roots(&co(3.0, 3.0, 1.0)).unwrap();
        for z in o.roots() {
            assert!((z + 1.0).norm() < 1e-4);
        }
    }

    #[test]
    fn r4_point_at_large_mu() {
        let p = ParamPoint::new(0.75, 0.25).unwrap();
        let c = char_coeffs(1e8, &p).unwrap();
        let t = certified_roots(&c).unwrap();
        assert!((t.lambda_plus.re / -50.0 - 1.0).abs() < 0.05);
        assert!((t.lambda_plus.im / 1e6 - 1.0).abs() < 0.05);
        assert!((t.lambda0.re / -1e-2 - 1.0).abs() < 0.05);
    }

    #[test]
    fn refined_real_part_r2() {
        let p = ParamPoint::new(0.5, 0.75).unwrap();
        let mu: f64 = 1e10;
        let c = char_coeffs(mu, &p).unwrap();
        let t = certified_roots(&c).unwrap();
        assert!(t.refined);
        let pred = -0.5 * mu.powf(0.25);
        assert!((t.lambda_plus.re / pred - 1.0).abs() < 0.01);
        let v = t.vieta_errors(&c);
        assert!(v[0] < 1e-12, "{v:?}");
    }

    #[test]
    fn refine_rejects_unstable_pair() {
        // λ³ + λ² + λ + 5: bc − d < 0, so the pair has positive real part.
        let c = co(1.0, 1.0, 5.0);
        let t = cardano_roots(&c).unwrap();
        assert!(t.lambda_plus.re > 0.0);
        assert!(matches!(refine_real_part(&c, &t), Err(LabError::Consistency(_))));
    }

    #[test]
    fn three_real_roots_ordered() {
        // (λ+1)(λ+2)(λ+3)
        let t = cardano_roots(&co(6.0, 11.0, 6.0)).unwrap();
        assert!(!t.complex_pair);
        assert!((t.lambda_plus.re + 1.0).abs() < 1e-12);
        assert!((t.lambda0.re + 2.0).abs() < 1e-12);
        assert!((t.lambda_minus.re + 3.0).abs() < 1e-12);
    }
}
