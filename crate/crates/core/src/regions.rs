//! Partition of the parameter square `(α, β) ∈ [0,1]²` into regularity and
//! stability regions, and the regularity index `μ(α, β)`.
//!
//! Membership follows the defining inequalities exactly, including their
//! strict/non-strict senses. Classification is generic over the coordinate
//! type so that boundary-exact questions can be asked in rational arithmetic
//! (see [`classify_exact`]).

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// A point of the parameter square plus the coupling constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub k: f64,
}

impl ParamPoint {
    /// A point with unit coupling `γ = k = 1`.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        Self::with_coupling(alpha, beta, 1.0, 1.0)
    }

    pub fn with_coupling(alpha: f64, beta: f64, gamma: f64, k: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(LabError::InvalidParameter(format!("alpha = {alpha} outside [0, 1]")));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(LabError::InvalidParameter(format!("beta = {beta} outside [0, 1]")));
        }
        if gamma == 0.0 || !gamma.is_finite() {
            return Err(LabError::InvalidParameter(format!(
                "gamma = {gamma} must be finite and nonzero"
            )));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(LabError::InvalidParameter(format!(
                "k = {k} must be finite and positive"
            )));
        }
        Ok(Self { alpha, beta, gamma, k })
    }

    pub fn has_unit_coupling(&self) -> bool {
        self.gamma == 1.0 && self.k == 1.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionLabel {
    R1,
    R2,
    R3,
    R4,
    R5,
    S1,
    S2,
    SI,
    /// In the complement of `R1 ∪ … ∪ R5` but in none of `S1`, `S2`, `S_I`.
    #[serde(rename = "BRES")]
    BoundaryResidual,
}

impl RegionLabel {
    pub const ALL: [RegionLabel; 9] = [
        RegionLabel::R1,
        RegionLabel::R2,
        RegionLabel::R3,
        RegionLabel::R4,
        RegionLabel::R5,
        RegionLabel::S1,
        RegionLabel::S2,
        RegionLabel::SI,
        RegionLabel::BoundaryResidual,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RegionLabel::R1 => "R1",
            RegionLabel::R2 => "R2",
            RegionLabel::R3 => "R3",
            RegionLabel::R4 => "R4",
            RegionLabel::R5 => "R5",
            RegionLabel::S1 => "S1",
            RegionLabel::S2 => "S2",
            RegionLabel::SI => "SI",
            RegionLabel::BoundaryResidual => "BRES",
        }
    }

    /// Complement of `R1 ∪ … ∪ R5`.
    pub fn is_r6(self) -> bool {
        matches!(
            self,
            RegionLabel::S1 | RegionLabel::S2 | RegionLabel::SI | RegionLabel::BoundaryResidual
        )
    }

    /// Regions where the semigroup is of some Gevrey class.
    pub fn is_gevrey(self) -> bool {
        matches!(
            self,
            RegionLabel::R2 | RegionLabel::R3 | RegionLabel::R4 | RegionLabel::R5
        )
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regularity {
    Analytic,
    /// Gevrey class `δ` for every `δ > order_lower_bound`.
    Gevrey {
        order_lower_bound: f64,
    },
    NotDifferentiable,
    Undetermined,
}

impl fmt::Display for Regularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regularity::Analytic => f.write_str("analytic"),
            Regularity::Gevrey { order_lower_bound } => write!(f, "gevrey:{order_lower_bound}"),
            Regularity::NotDifferentiable => f.write_str("not_differentiable"),
            Regularity::Undetermined => f.write_str("undetermined"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Stability {
    Exponential,
    Polynomial { order: f64 },
    NotAsymptoticallyStable,
    Undetermined,
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stability::Exponential => f.write_str("exponential"),
            Stability::Polynomial { order } => write!(f, "polynomial:{order}"),
            Stability::NotAsymptoticallyStable => f.write_str("not_asymptotically_stable"),
            Stability::Undetermined => f.write_str("undetermined"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub alpha: f64,
    pub beta: f64,
    pub label: RegionLabel,
    /// `None` on the residual boundary, where the index is undefined.
    pub mu: Option<f64>,
    pub regularity: Regularity,
    pub stability: Stability,
    pub on_boundary: bool,
}

/// Coordinate arithmetic shared by the floating-point and the exact paths.
pub trait Coord: Copy + PartialOrd + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    fn frac(num: i64, den: i64) -> Self;
}

impl Coord for f64 {
    fn frac(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
}

impl Coord for Ratio<i64> {
    fn frac(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }
}

fn max<T: Coord>(a: T, b: T) -> T {
    if a >= b {
        a
    } else {
        b
    }
}

fn consts<T: Coord>() -> (T, T, T, T) {
    (T::frac(0, 1), T::frac(1, 2), T::frac(1, 1), T::frac(2, 1))
}

/// `α ≤ β ≤ 2α − 1/2`
pub fn in_r1<T: Coord>(a: T, b: T) -> bool {
    let (_, half, _, two) = consts::<T>();
    a <= b && b <= two * a - half
}

/// `(2α − 1/2) ∨ 1/2 < β < 2α`
pub fn in_r2<T: Coord>(a: T, b: T) -> bool {
    let (_, half, _, two) = consts::<T>();
    max(two * a - half, half) < b && b < two * a
}

/// `0 ≤ 1 − 2α < β ≤ 1/2`, excluding `(1/2, 1/2)`
pub fn in_r3<T: Coord>(a: T, b: T) -> bool {
    let (zero, half, one, two) = consts::<T>();
    let gap = one - two * a;
    zero <= gap && gap < b && b <= half && !(a == half && b == half)
}

/// `0 < 2α − 1 ≤ β < α`
pub fn in_r4<T: Coord>(a: T, b: T) -> bool {
    let (zero, _, one, two) = consts::<T>();
    let lo = two * a - one;
    zero < lo && lo <= b && b < a
}

/// `0 < β < 2α − 1`
pub fn in_r5<T: Coord>(a: T, b: T) -> bool {
    let (zero, _, one, two) = consts::<T>();
    zero < b && b < two * a - one
}

/// `2α ∨ 1/2 < β`
pub fn in_s1<T: Coord>(a: T, b: T) -> bool {
    let (_, half, _, two) = consts::<T>();
    max(two * a, half) < b
}

/// `β < 1 − 2α`, `β ≤ 1/2`
pub fn in_s2<T: Coord>(a: T, b: T) -> bool {
    let (_, half, one, two) = consts::<T>();
    b < one - two * a && b <= half
}

/// `(1/2, 1] × {0}`
pub fn in_si<T: Coord>(a: T, b: T) -> bool {
    let (zero, half, one, _) = consts::<T>();
    half < a && a <= one && b == zero
}

/// The exponential-stability set `S = {|2α − 1| ≤ β ≤ 2α}`.
pub fn in_stability_set<T: Coord>(a: T, b: T) -> bool {
    let (zero, _, one, two) = consts::<T>();
    let x = two * a - one;
    let abs = if x < zero { zero - x } else { x };
    abs <= b && b <= two * a
}

fn in_closure_s1_s2<T: Coord>(a: T, b: T) -> bool {
    let (_, half, one, two) = consts::<T>();
    b >= max(two * a, half) || (b <= one - two * a && b <= half)
}

/// Membership predicates in label order, without the residual label.
pub fn predicates<T: Coord>(a: T, b: T) -> [(RegionLabel, bool); 8] {
    [
        (RegionLabel::R1, in_r1(a, b)),
        (RegionLabel::R2, in_r2(a, b)),
        (RegionLabel::R3, in_r3(a, b)),
        (RegionLabel::R4, in_r4(a, b)),
        (RegionLabel::R5, in_r5(a, b)),
        (RegionLabel::S1, in_s1(a, b)),
        (RegionLabel::S2, in_s2(a, b)),
        (RegionLabel::SI, in_si(a, b)),
    ]
}

pub fn classify_coords<T: Coord>(a: T, b: T) -> RegionLabel {
    predicates(a, b)
        .into_iter()
        .find(|(_, holds)| *holds)
        .map(|(l, _)| l)
        .unwrap_or(RegionLabel::BoundaryResidual)
}

pub fn classify_point(p: &ParamPoint) -> RegionLabel {
    classify_coords(p.alpha, p.beta)
}

/// Boundary-exact classification for rational `(α, β)`.
pub fn classify_exact(alpha: Ratio<i64>, beta: Ratio<i64>) -> RegionLabel {
    classify_coords(alpha, beta)
}

/// A defining inequality holds with equality and the label changes in an
/// arbitrarily small neighbourhood.
pub fn on_boundary_coords<T: Coord>(a: T, b: T) -> bool {
    let (zero, half, one, two) = consts::<T>();
    let equalities = [
        b == a,
        b == two * a - half,
        b == half,
        b == two * a,
        b == one - two * a,
        a == half,
        b == zero,
    ];
    if !equalities.iter().any(|e| *e) {
        return false;
    }
    let here = classify_coords(a, b);
    let delta = T::frac(1, 1_000_000_000);
    let clamp = |x: T| {
        if x < zero {
            zero
        } else if x > one {
            one
        } else {
            x
        }
    };
    let steps = [zero - delta, zero, delta];
    steps.iter().any(|&da| {
        steps
            .iter()
            .any(|&db| classify_coords(clamp(a + da), clamp(b + db)) != here)
    })
}

/// The regularity index: 1 on `R1`, `2[(2α−β) ∧ (2α+β−1)]` on
/// `R2 ∪ R3 ∪ S1 ∪ S2`, `β/α` on `R4 ∪ R5 ∪ S_I`.
pub fn mu_for_label(label: RegionLabel, alpha: f64, beta: f64) -> Result<f64> {
    match label {
        RegionLabel::R1 => Ok(1.0),
        RegionLabel::R2 | RegionLabel::R3 | RegionLabel::S1 | RegionLabel::S2 => {
            Ok(2.0 * (2.0 * alpha - beta).min(2.0 * alpha + beta - 1.0))
        }
        RegionLabel::R4 | RegionLabel::R5 | RegionLabel::SI => Ok(beta / alpha),
        RegionLabel::BoundaryResidual => Err(LabError::IndexUndefined { alpha, beta }),
    }
}

pub fn mu_index(p: &ParamPoint) -> Result<f64> {
    mu_for_label(classify_point(p), p.alpha, p.beta)
}

fn report_for(alpha: f64, beta: f64, label: RegionLabel, on_boundary: bool, in_s: bool, in_cl: bool) -> RegionReport {
    let mu = mu_for_label(label, alpha, beta).ok();
    let (regularity, stability) = match label {
        RegionLabel::R1 => (Regularity::Analytic, Stability::Exponential),
        RegionLabel::R2 | RegionLabel::R3 | RegionLabel::R4 => (
            Regularity::Gevrey {
                order_lower_bound: 1.0 / mu.unwrap_or(f64::NAN),
            },
            Stability::Exponential,
        ),
        RegionLabel::R5 => (
            Regularity::Gevrey {
                order_lower_bound: 1.0 / mu.unwrap_or(f64::NAN),
            },
            Stability::NotAsymptoticallyStable,
        ),
        RegionLabel::SI => (Regularity::NotDifferentiable, Stability::NotAsymptoticallyStable),
        RegionLabel::S1 => (
            Regularity::NotDifferentiable,
            Stability::Polynomial {
                order: 1.0 / (2.0 * (beta - 2.0 * alpha)),
            },
        ),
        RegionLabel::S2 => (
            Regularity::NotDifferentiable,
            Stability::Polynomial {
                order: 1.0 / (2.0 - 2.0 * (2.0 * alpha + beta)),
            },
        ),
        RegionLabel::BoundaryResidual => {
            if in_s && in_cl {
                (Regularity::NotDifferentiable, Stability::Exponential)
            } else {
                (Regularity::Undetermined, Stability::Undetermined)
            }
        }
    };
    RegionReport {
        alpha,
        beta,
        label,
        mu,
        regularity,
        stability,
        on_boundary: on_boundary || label == RegionLabel::BoundaryResidual,
    }
}

/// One row of the regularity/stability summary table.
pub fn summary_row(p: &ParamPoint) -> RegionReport {
    let (a, b) = (p.alpha, p.beta);
    report_for(
        a,
        b,
        classify_coords(a, b),
        on_boundary_coords(a, b),
        in_stability_set(a, b),
        in_closure_s1_s2(a, b),
    )
}

/// Summary row with the label decided in exact rational arithmetic.
pub fn summary_row_exact(alpha: Ratio<i64>, beta: Ratio<i64>) -> RegionReport {
    let to_f = |r: Ratio<i64>| *r.numer() as f64 / *r.denom() as f64;
    report_for(
        to_f(alpha),
        to_f(beta),
        classify_exact(alpha, beta),
        on_boundary_coords(alpha, beta),
        in_stability_set(alpha, beta),
        in_closure_s1_s2(alpha, beta),
    )
}

/// Lattice of the unit square with spacing `step`, β-major (β outer, α inner).
///
/// Lattice coordinates are the exact fractions `i/n`, so points on the
/// oblique boundary lines are classified exactly.
pub fn region_grid(step: f64) -> Result<Vec<RegionReport>> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(LabError::InvalidParameter(format!(
            "grid step {step} must lie in (0, 0.5]"
        )));
    }
    let n = (1.0 / step).round();
    if (n * step - 1.0).abs() > 1e-9 || n > 100_000.0 {
        return Err(LabError::InvalidParameter(format!(
            "grid step {step} must divide 1 into an integer number (<= 100000) of cells"
        )));
    }
    let n = n as i64;
    let rows: Vec<RegionReport> = (0..=n)
        .into_par_iter()
        .flat_map_iter(|j| (0..=n).map(move |i| summary_row_exact(Ratio::new(i, n), Ratio::new(j, n))))
        .collect();
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, b: f64) -> ParamPoint {
        ParamPoint::new(a, b).unwrap()
    }

    #[test]
    fn spec_classification_examples() {
        assert_eq!(classify_point(&p(0.75, 0.875)), RegionLabel::R1);
        assert_eq!(classify_point(&p(0.5, 0.5)), RegionLabel::R1);
        assert_eq!(classify_point(&p(0.75, 0.0)), RegionLabel::SI);
        assert_eq!(classify_point(&p(0.25, 0.5)), RegionLabel::BoundaryResidual);
    }

    #[test]
    fn mu_examples() {
        assert!((mu_index(&p(0.5, 0.75)).unwrap() - 0.5).abs() < 1e-15);
        assert!((mu_index(&p(0.75, 0.5)).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(mu_index(&p(1.0, 1.0)).unwrap(), 1.0);
        assert!(matches!(mu_index(&p(0.25, 0.5)), Err(LabError::IndexUndefined { .. })));
    }

    #[test]
    fn summary_row_examples() {
        let r = summary_row(&p(0.1, 0.8));
        assert_eq!(r.label, RegionLabel::S1);
        assert!((r.mu.unwrap() + 1.2).abs() < 1e-12);
        assert_eq!(r.regularity, Regularity::NotDifferentiable);
        match r.stability {
            Stability::Polynomial { order } => assert!((order - 1.0 / 1.2).abs() < 1e-12),
            s => panic!("unexpected {s:?}"),
        }

        let r = summary_row(&p(0.05, 0.2));
        assert_eq!(r.label, RegionLabel::S2);
        match r.stability {
            Stability::Polynomial { order } => assert!((order - 1.0 / 1.4).abs() < 1e-12),
            s => panic!("unexpected {s:?}"),
        }

        // (0.6, 0.7) lies on β = 2α − 1/2, which R1 includes.
        let r = summary_row(&p(0.6, 0.7));
        assert_eq!(r.label, RegionLabel::R1);
        assert!(r.on_boundary);
        assert_eq!(r.mu, Some(1.0));

        let r = summary_row(&p(0.6, 0.8));
        assert_eq!(r.label, RegionLabel::R2);
        assert!((r.mu.unwrap() - 0.8).abs() < 1e-12);
        match r.regularity {
            Regularity::Gevrey { order_lower_bound } => assert!((order_lower_bound - 1.25).abs() < 1e-12),
            g => panic!("unexpected {g:?}"),
        }
        assert_eq!(r.stability, Stability::Exponential);
    }

    #[test]
    fn residual_rows_use_closure_rule() {
        let r = summary_row(&p(0.25, 0.5));
        assert!(r.on_boundary);
        assert_eq!(r.mu, None);
        assert_eq!(r.regularity, Regularity::NotDifferentiable);
        assert_eq!(r.stability, Stability::Exponential);
    }

    #[test]
    fn alpha_half_line_is_r3_and_on_boundary() {
        let r = summary_row(&p(0.5, 0.25));
        assert_eq!(r.label, RegionLabel::R3);
        assert!(r.on_boundary);
        assert!(!summary_row(&p(0.4, 0.3)).on_boundary);
    }

    #[test]
    fn exact_classification_on_oblique_line() {
        // β = 2α − 1/2 at α = 51/100: R1 in exact arithmetic.
        let a = Ratio::new(51, 100);
        let b = Ratio::new(52, 100);
        assert_eq!(classify_exact(a, b), RegionLabel::R1);
        assert!(on_boundary_coords(a, b));
    }

    #[test]
    fn grid_counts_and_order() {
        let g = region_grid(0.5).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!((g[1].alpha, g[1].beta), (0.5, 0.0));
        assert_eq!((g[3].alpha, g[3].beta), (0.0, 0.5));
        let g = region_grid(0.25).unwrap();
        let row = g.iter().find(|r| r.alpha == 0.5 && r.beta == 0.25).unwrap();
        assert_eq!(row.label, RegionLabel::R3);
        assert!(row.on_boundary);
    }

    #[test]
    fn grid_rejects_bad_steps() {
        assert!(region_grid(0.0).is_err());
        assert!(region_grid(0.3).is_err());
        assert!(region_grid(0.7).is_err());
    }

    #[test]
    fn invalid_points_rejected() {
        assert!(ParamPoint::new(1.1, 0.0).is_err());
        assert!(ParamPoint::with_coupling(0.5, 0.5, 0.0, 1.0).is_err());
        assert!(ParamPoint::with_coupling(0.5, 0.5, 1.0, 0.0).is_err());
    }
}
