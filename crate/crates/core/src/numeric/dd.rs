//! Double-double arithmetic and compensated summation.
//!
//! A [`DoubleDouble`] carries an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
//! giving roughly 106 bits of significand. Only the handful of operations needed
//! for cubic discriminants and polynomial residuals are provided.

use std::ops::{Add, Mul, Neg, Sub};

/// Error-free sum: returns `(s, e)` with `s = fl(a + b)` and `a + b = s + e` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free product via fused multiply-add.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };

    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn scale(self, k: f64) -> Self {
        self * Self::from_f64(k)
    }

    #[inline]
    pub fn square(self) -> Self {
        self * self
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

/// Neumaier's compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of a slice.
pub fn compensated_sum(terms: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    for &t in terms {
        acc.add(t);
    }
    acc.value()
}

/// A real number stored as `sign * exp(ln_abs)`; lets discriminant monomials far
/// outside the f64 range be compared and summed.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SignedLog {
    /// -1, 0 or +1.
    pub sign: i8,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: Self = Self {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self {
                sign: if x > 0.0 { 1 } else { -1 },
                ln_abs: x.abs().ln(),
            }
        }
    }

    pub fn new(sign: i8, ln_abs: f64) -> Self {
        if sign == 0 || ln_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self { sign, ln_abs }
        }
    }

    pub fn to_f64(self) -> f64 {
        f64::from(self.sign) * self.ln_abs.exp()
    }

    /// Signed sum of terms in log representation; the terms are rescaled by the
    /// largest magnitude and summed with compensation.
    pub fn sum(terms: &[SignedLog]) -> SignedLog {
        let ln_max = terms
            .iter()
            .filter(|t| t.sign != 0)
            .map(|t| t.ln_abs)
            .fold(f64::NEG_INFINITY, f64::max);
        if ln_max == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        let mut acc = CompensatedSum::new();
        for t in terms.iter().filter(|t| t.sign != 0) {
            acc.add(f64::from(t.sign) * (t.ln_abs - ln_max).exp());
        }
        let s = acc.value();
        if s == 0.0 {
            Self::ZERO
        } else {
            Self {
                sign: if s > 0.0 { 1 } else { -1 },
                ln_abs: s.abs().ln() + ln_max,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sum_is_exact() {
        let (s, e) = two_sum(1.0, 1e-20);
        assert_eq!(s, 1.0);
        assert_eq!(e, 1e-20);
    }

    #[test]
    fn dd_recovers_cancelled_product() {
        // (1 + 2^-30)^2 - 1 - 2^-29 = 2^-60, invisible in plain f64 products.
        let x = DoubleDouble::from_f64(1.0 + 2f64.powi(-30));
        let r = x.square() - DoubleDouble::from_f64(1.0) - DoubleDouble::from_f64(2f64.powi(-29));
        assert_eq!(r.to_f64(), 2f64.powi(-60));
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let terms = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(&terms), 2.0);
    }

    #[test]
    fn signed_log_sum_handles_huge_terms() {
        let a = SignedLog::new(1, 2000.0);
        let b = SignedLog::new(-1, 2000.0 + (0.5f64).ln());
        let s = SignedLog::sum(&[a, b]);
        assert_eq!(s.sign, 1);
        assert!((s.ln_abs - (2000.0 + (0.5f64).ln())).abs() < 1e-12);
        assert_eq!(SignedLog::sum(&[]).sign, 0);
    }
}
