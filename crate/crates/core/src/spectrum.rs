use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Eigenvalues `μₙ = c·nᵖ`, `n = 1..=n_max`, of the diagonal model of `A`.
///
/// With `continuous` set, `μ` ranges over the whole interval `[μ₁, μ_{n_max}]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumModel {
    pub c: f64,
    pub p: f64,
    pub n_max: u64,
    pub continuous: bool,
}

impl SpectrumModel {
    pub fn new(c: f64, p: f64, n_max: u64, continuous: bool) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(LabError::InvalidParameter(format!(
                "spectrum constant c = {c} must be positive"
            )));
        }
        if !(p > 0.0 && p.is_finite()) {
            return Err(LabError::InvalidParameter(format!(
                "spectrum power p = {p} must be positive"
            )));
        }
        if n_max == 0 {
            return Err(LabError::EmptySpectrum);
        }
        Ok(Self {
            c,
            p,
            n_max,
            continuous,
        })
    }

    /// `μₙ = n²`, the Dirichlet Laplacian on an interval up to a constant.
    pub fn squares(n_max: u64) -> Self {
        Self {
            c: 1.0,
            p: 2.0,
            n_max,
            continuous: false,
        }
    }

    pub fn mu(&self, n: u64) -> f64 {
        self.c * (n as f64).powf(self.p)
    }

    pub fn mu_min(&self) -> f64 {
        self.c
    }

    pub fn mu_max(&self) -> f64 {
        self.mu(self.n_max)
    }

    /// Real index `n` with `μₙ = μ`.
    pub fn index_of(&self, mu: f64) -> f64 {
        (mu / self.c).powf(1.0 / self.p)
    }

    pub fn relaxed(self) -> Self {
        Self {
            continuous: true,
            ..self
        }
    }
}
