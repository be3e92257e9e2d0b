//! Leading terms of the discriminant and of `q`, eigenvalue asymptotics per
//! region, and measured convergence of exact roots towards them.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cubic::{certified_roots, EigTriple};
use crate::error::{LabError, Result};
use crate::modal::char_coeffs;
use crate::regions::{classify_coords, mu_for_label, ParamPoint, RegionLabel};
use crate::spectrum::SpectrumModel;

/// Interior sample points, one per asymptotic branch and region.
pub const CANONICAL_POINTS: [(&str, f64, f64); 9] = [
    ("R2", 0.5, 0.75),
    ("R3", 0.4, 0.3),
    ("R3/alpha=1/2", 0.5, 0.25),
    ("R3/beta=1/2", 0.3, 0.5),
    ("R4", 0.75, 0.5),
    ("R5", 0.9, 0.2),
    ("S1", 0.1, 0.8),
    ("S2", 0.05, 0.2),
    ("SI", 0.75, 0.0),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subcase {
    Generic,
    AlphaHalf,
    BetaHalf,
}

/// The five rows of the leading-term table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `R2 ∪ S1`
    UpperWedge,
    /// `R3` with `α = 1/2`
    AlphaHalf,
    /// `R3 ∪ S2` with `β = 1/2`, `α < 1/2`
    BetaHalf,
    /// `R3 ∪ S2` with `α, β < 1/2`
    LowerWedge,
    /// `R4 ∪ R5 ∪ S_I`
    Right,
}

impl Branch {
    pub fn subcase(self) -> Subcase {
        match self {
            Branch::AlphaHalf => Subcase::AlphaHalf,
            Branch::BetaHalf => Subcase::BetaHalf,
            _ => Subcase::Generic,
        }
    }

    /// `(coefficient, exponent)` of the leading term of `Δ`.
    pub fn delta_term(self, alpha: f64, beta: f64) -> (f64, f64) {
        match self {
            Branch::UpperWedge => (27.0, 4.0 * beta + 1.0),
            Branch::AlphaHalf => (216.0, 3.0),
            Branch::BetaHalf => (108.0, 3.0),
            Branch::LowerWedge => (27.0, 3.0),
            Branch::Right => (27.0, 6.0 * alpha),
        }
    }

    /// `(coefficient, exponent)` of the leading term of `q`.
    pub fn q_term(self, alpha: f64, beta: f64) -> (f64, f64) {
        match self {
            Branch::UpperWedge => (2.0, 3.0 * beta),
            Branch::AlphaHalf => (9.0, beta + 1.0),
            Branch::BetaHalf => (20.0, 1.5),
            Branch::LowerWedge => (18.0, beta + 1.0),
            Branch::Right => (-9.0, 2.0 * alpha + beta),
        }
    }
}

pub fn branch_of<T: crate::regions::Coord>(alpha: T, beta: T) -> Result<Branch> {
    let half = T::frac(1, 2);
    match classify_coords(alpha, beta) {
        RegionLabel::R2 | RegionLabel::S1 => Ok(Branch::UpperWedge),
        RegionLabel::R3 | RegionLabel::S2 => Ok(if alpha == half {
            Branch::AlphaHalf
        } else if beta == half {
            Branch::BetaHalf
        } else {
            Branch::LowerWedge
        }),
        RegionLabel::R4 | RegionLabel::R5 | RegionLabel::SI => Ok(Branch::Right),
        label => Err(LabError::NoAsymptoticBranch(label)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeadingTerm {
    pub coefficient: f64,
    pub exponent: f64,
    pub region: RegionLabel,
    pub subcase: Subcase,
}

impl LeadingTerm {
    pub fn at(&self, mu: f64) -> f64 {
        self.coefficient * mu.powf(self.exponent)
    }
}

/// Leading terms `(Δ, q)` as `μ → ∞`.
pub fn leading_terms(p: &ParamPoint) -> Result<(LeadingTerm, LeadingTerm)> {
    let branch = branch_of(p.alpha, p.beta)?;
    let region = classify_coords(p.alpha, p.beta);
    let mk = |(coefficient, exponent): (f64, f64)| LeadingTerm {
        coefficient,
        exponent,
        region,
        subcase: branch.subcase(),
    };
    Ok((
        mk(branch.delta_term(p.alpha, p.beta)),
        mk(branch.q_term(p.alpha, p.beta)),
    ))
}

/// Signed monomials `(coefficient, exponent)` of `Δ` in `μ` for `γ = k = 1`.
pub fn delta_monomials(alpha: Ratio<i64>, beta: Ratio<i64>) -> [(Ratio<i64>, Ratio<i64>); 8] {
    let r = |n: i64| Ratio::from_integer(n);
    let (a, b) = (alpha, beta);
    [
        (r(54), r(2) * b + r(2)),
        (r(27), r(4) * b + r(1)),
        (r(27), r(6) * a),
        (r(81), r(4) * a + r(1)),
        (r(81), r(2) * a + r(2)),
        (r(27), r(3)),
        (r(-135), r(2) * a + r(2) * b + r(1)),
        (Ratio::new(-27, 4), r(4) * a + r(2) * b),
    ]
}

/// Signed monomials of `q = 2μ^{3β} − 9μ^{2α+β} + 18μ^{β+1}`.
pub fn q_monomials(alpha: Ratio<i64>, beta: Ratio<i64>) -> [(Ratio<i64>, Ratio<i64>); 3] {
    let r = |n: i64| Ratio::from_integer(n);
    [(r(2), r(3) * beta), (r(-9), r(2) * alpha + beta), (r(18), beta + r(1))]
}

/// Sum of the coefficients attaining the largest exponent, with that exponent.
pub fn dominant(monomials: &[(Ratio<i64>, Ratio<i64>)]) -> (Ratio<i64>, Ratio<i64>) {
    let top = monomials.iter().map(|m| m.1).max().expect("nonempty monomial list");
    let coeff = monomials
        .iter()
        .filter(|m| m.1 == top)
        .fold(Ratio::from_integer(0), |acc, m| acc + m.0);
    (coeff, top)
}

/// Exact check that a branch's tabulated leading terms are the dominant
/// monomials at a rational point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentCertificate {
    pub branch: Branch,
    pub delta_dominant: (f64, f64),
    pub q_dominant: (f64, f64),
    pub delta_matches: bool,
    pub q_matches: bool,
}

impl ExponentCertificate {
    pub fn holds(&self) -> bool {
        self.delta_matches && self.q_matches
    }
}

pub fn exponent_certificate(alpha: Ratio<i64>, beta: Ratio<i64>) -> Result<ExponentCertificate> {
    let branch = branch_of(alpha, beta)?;
    let to_f = |r: Ratio<i64>| *r.numer() as f64 / *r.denom() as f64;
    let (af, bf) = (to_f(alpha), to_f(beta));
    let (dc, de) = dominant(&delta_monomials(alpha, beta));
    let (qc, qe) = dominant(&q_monomials(alpha, beta));
    let table_d = branch.delta_term(af, bf);
    let table_q = branch.q_term(af, bf);
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * (1.0 + y.abs());
    Ok(ExponentCertificate {
        branch,
        delta_dominant: (to_f(dc), to_f(de)),
        q_dominant: (to_f(qc), to_f(qe)),
        delta_matches: close(to_f(dc), table_d.0) && close(to_f(de), table_d.1),
        q_matches: close(to_f(qc), table_q.0) && close(to_f(qe), table_q.1),
    })
}

/// Rational approximation of a float coordinate (exact for short decimals).
pub fn rational(x: f64) -> Result<Ratio<i64>> {
    Ratio::<i64>::approximate_float(x)
        .map(|r| {
            // Prefer the short decimal if the float came from one.
            let dec = Ratio::new((x * 1e6).round() as i64, 1_000_000);
            if (*dec.numer() as f64 / *dec.denom() as f64) == x {
                dec
            } else {
                r
            }
        })
        .ok_or_else(|| LabError::InvalidParameter(format!("{x} has no rational approximation")))
}

/// `coefficient · μ^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub coefficient: f64,
    pub exponent: f64,
}

impl PowerLaw {
    pub fn at(&self, mu: f64) -> f64 {
        self.coefficient * mu.powf(self.exponent)
    }
}

fn law(coefficient: f64, exponent: f64) -> PowerLaw {
    PowerLaw { coefficient, exponent }
}

/// Leading behaviour of `λ₀`, `Re λ±` and `Im λ₊` as `μ → ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymPrediction {
    pub branch: Branch,
    pub lambda0: PowerLaw,
    pub re_pm: PowerLaw,
    pub im_pm: PowerLaw,
}

pub fn asym_prediction(p: &ParamPoint) -> Result<AsymPrediction> {
    if !p.has_unit_coupling() {
        return Err(LabError::UnitCouplingRequired { gamma: p.gamma, k: p.k });
    }
    let (a, b) = (p.alpha, p.beta);
    let branch = branch_of(a, b)?;
    let (lambda0, re_pm, im_pm) = match branch {
        Branch::UpperWedge => (law(-1.0, b), law(-0.5, 2.0 * a - b), law(1.0, 0.5)),
        Branch::LowerWedge => (law(-1.0, b), law(-0.5, 2.0 * a + b - 1.0), law(1.0, 0.5)),
        Branch::AlphaHalf => (law(-0.5, b), law(-0.25, b), law(2f64.sqrt(), 0.5)),
        // λ₀ = −μ^{1/2}, which coincides with −μ^β at β = 1/2.
        Branch::BetaHalf => (law(-1.0, 0.5), law(-0.25, 2.0 * a - 0.5), law(1.0, 0.5)),
        Branch::Right => (law(-1.0, 1.0 + b - 2.0 * a), law(-0.5, b), law(1.0, a)),
    };
    Ok(AsymPrediction {
        branch,
        lambda0,
        re_pm,
        im_pm,
    })
}

/// Predicted `(λ₀, Re λ±, Im λ₊)` at a given `μ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictedEigs {
    pub mu: f64,
    pub lambda0: f64,
    pub re_pm: f64,
    pub im_pm: f64,
}

pub fn predict_eigs(p: &ParamPoint, mu: f64) -> Result<PredictedEigs> {
    let a = asym_prediction(p)?;
    Ok(PredictedEigs {
        mu,
        lambda0: a.lambda0.at(mu),
        re_pm: a.re_pm.at(mu),
        im_pm: a.im_pm.at(mu),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymErrorRow {
    pub mu: f64,
    pub err_lambda0: f64,
    pub err_re_pm: f64,
    pub err_im_pm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymErrorTable {
    pub point: ParamPoint,
    pub rows: Vec<AsymErrorRow>,
    /// Spearman correlation of each error column with `μ` (three or more rows).
    pub trend: Option<[f64; 3]>,
}

fn rel_err(exact: f64, predicted: f64) -> f64 {
    (exact - predicted).abs() / exact.abs()
}

/// Relative errors of the predictions against certified roots.
pub fn asym_error_row(p: &ParamPoint, mu: f64) -> Result<(AsymErrorRow, EigTriple)> {
    let pred = predict_eigs(p, mu)?;
    let t = certified_roots(&char_coeffs(mu, p)?)?;
    if !t.complex_pair {
        return Err(LabError::Consistency(format!("no complex pair at mu = {mu:e}")));
    }
    let row = AsymErrorRow {
        mu,
        err_lambda0: rel_err(t.lambda0.re, pred.lambda0),
        err_re_pm: rel_err(t.lambda_plus.re, pred.re_pm),
        err_im_pm: rel_err(t.lambda_plus.im, pred.im_pm),
    };
    Ok((row, t))
}

pub fn asym_error_table(p: &ParamPoint, mu_grid: &[f64]) -> Result<AsymErrorTable> {
    if mu_grid.is_empty() {
        return Err(LabError::InvalidParameter("empty mu grid".into()));
    }
    if mu_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(LabError::InvalidParameter("mu grid must be strictly increasing".into()));
    }
    let rows = mu_grid
        .par_iter()
        .map(|&mu| asym_error_row(p, mu).map(|(r, _)| r))
        .collect::<Result<Vec<_>>>()?;
    let trend = (rows.len() >= 3).then(|| {
        let mus: Vec<f64> = rows.iter().map(|r| r.mu).collect();
        [
            spearman(&mus, &rows.iter().map(|r| r.err_lambda0).collect::<Vec<_>>()),
            spearman(&mus, &rows.iter().map(|r| r.err_re_pm).collect::<Vec<_>>()),
            spearman(&mus, &rows.iter().map(|r| r.err_im_pm).collect::<Vec<_>>()),
        ]
    });
    Ok(AsymErrorTable { point: *p, rows, trend })
}

fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            r[idx[k]] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessRow {
    pub n: u64,
    pub mu: f64,
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    /// `Re λₙ / |Im λₙ|^{μ(α,β)+ε}` on `R2..R5`; absent on the `R6` labels.
    pub ratio: Option<f64>,
}

/// The upper eigenvalue branch `λₙ,₊` along the spectrum model.
///
/// For `n_max` above `samples` the indices are log-spaced.
pub fn sharpness_sequence(
    p: &ParamPoint,
    spectrum: &SpectrumModel,
    eps: f64,
    samples: usize,
) -> Result<Vec<SharpnessRow>> {
    let label = classify_coords(p.alpha, p.beta);
    let exponent = match label {
        RegionLabel::R2 | RegionLabel::R3 | RegionLabel::R4 | RegionLabel::R5 => {
            Some(mu_for_label(label, p.alpha, p.beta)? + eps)
        }
        RegionLabel::S1 | RegionLabel::S2 | RegionLabel::SI => None,
        other => return Err(LabError::NoAsymptoticBranch(other)),
    };
    let ns = index_samples(spectrum.n_max, samples);
    ns.par_iter()
        .map(|&n| {
            let mu = spectrum.mu(n);
            let t = certified_roots(&char_coeffs(mu, p)?)?;
            let z = t.lambda_plus;
            Ok(SharpnessRow {
                n,
                mu,
                re: z.re,
                im: z.im,
                modulus: z.norm(),
                ratio: exponent.map(|e| z.re / z.im.abs().powf(e)),
            })
        })
        .collect()
}

/// `1..=n_max` when short, otherwise up to `samples` distinct log-spaced indices.
pub fn index_samples(n_max: u64, samples: usize) -> Vec<u64> {
    if n_max as usize <= samples || samples < 2 {
        return (1..=n_max).collect();
    }
    let ln_max = (n_max as f64).ln();
    let mut out: Vec<u64> = (0..samples)
        .map(|i| (ln_max * i as f64 / (samples - 1) as f64).exp().round() as u64)
        .map(|n| n.clamp(1, n_max))
        .collect();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(a: f64, b: f64) -> ParamPoint {
        ParamPoint::new(a, b).unwrap()
    }

    #[test]
    fn leading_term_examples() {
        let (d, q) = leading_terms(&pt(0.5, 0.75)).unwrap();
        assert_eq!((d.coefficient, d.exponent), (27.0, 4.0));
        assert_eq!((q.coefficient, q.exponent), (2.0, 2.25));
        let (d, q) = leading_terms(&pt(0.5, 0.25)).unwrap();
        assert_eq!((d.coefficient, d.exponent), (216.0, 3.0));
        assert_eq!((q.coefficient, q.exponent), (9.0, 1.25));
        assert_eq!(d.subcase, Subcase::AlphaHalf);
        let (d, q) = leading_terms(&pt(0.75, 0.25)).unwrap();
        assert_eq!((d.coefficient, d.exponent), (27.0, 4.5));
        assert_eq!((q.coefficient, q.exponent), (-9.0, 1.75));
        assert!(matches!(
            leading_terms(&pt(1.0, 1.0)),
            Err(LabError::NoAsymptoticBranch(RegionLabel::R1))
        ));
    }

    #[test]
    fn certificates_at_canonical_points() {
        for (_, a, b) in CANONICAL_POINTS {
            let c = exponent_certificate(rational(a).unwrap(), rational(b).unwrap()).unwrap();
            assert!(c.holds(), "({a}, {b}): {c:?}");
        }
    }

    #[test]
    fn prediction_examples() {
        let e = predict_eigs(&pt(0.5, 0.75), 1e8).unwrap();
        assert!((e.lambda0 + 1e6).abs() < 1e-6);
        assert!((e.re_pm + 50.0).abs() < 1e-9);
        assert!((e.im_pm - 1e4).abs() < 1e-9);
        let e = predict_eigs(&pt(0.4, 0.3), 1e10).unwrap();
        assert!((e.re_pm + 5.0).abs() < 1e-9);
        assert!((e.im_pm - 1e5).abs() < 1e-6);
        assert!((e.lambda0 + 1e3).abs() < 1e-9);
        let e = predict_eigs(&pt(0.75, 0.25), 1e8).unwrap();
        assert!((e.lambda0 + 0.01).abs() < 1e-15);
        assert!((e.re_pm + 50.0).abs() < 1e-9);
        assert!((e.im_pm - 1e6).abs() < 1e-6);
    }

    #[test]
    fn imaginary_exponent_by_region() {
        for (a, b) in [(0.5, 0.75), (0.4, 0.3), (0.1, 0.8), (0.05, 0.2)] {
            assert_eq!(asym_prediction(&pt(a, b)).unwrap().im_pm.exponent, 0.5);
        }
        for (a, b) in [(0.75, 0.5), (0.9, 0.2), (0.75, 0.0)] {
            assert_eq!(asym_prediction(&pt(a, b)).unwrap().im_pm.exponent, a);
        }
    }

    #[test]
    fn single_mu_table() {
        let t = asym_error_table(&pt(0.4, 0.3), &[1e6]).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert!(t.rows[0].err_re_pm.is_finite());
        assert!(t.trend.is_none());
    }

    #[test]
    fn spearman_signs() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-12);
        assert!((spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 5.0, 7.0, 9.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn index_sampling() {
        assert_eq!(index_samples(5, 10), vec![1, 2, 3, 4, 5]);
        let s = index_samples(1_000_000, 50);
        assert_eq!(*s.first().unwrap(), 1);
        assert_eq!(*s.last().unwrap(), 1_000_000);
        assert!(s.windows(2).all(|w| w[1] > w[0]));
    }
}
