use thiserror::Error;

use crate::regions::RegionLabel;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    /// Bad user input: reported with exit status 2 by the CLI.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("index undefined on residual boundary at (alpha, beta) = ({alpha}, {beta})")]
    IndexUndefined { alpha: f64, beta: f64 },

    #[error("cubic path requires unit coupling (gamma = {gamma}, k = {k})")]
    UnitCouplingRequired { gamma: f64, k: f64 },

    #[error("on spectrum: |det| = {det_abs:e}{}", mode.map(|(n, mu)| format!(" at mode n = {n}, mu = {mu:e}")).unwrap_or_default())]
    OnSpectrum { det_abs: f64, mode: Option<(usize, f64)> },

    #[error("ill-conditioned cubic (b, c, d) = ({b:e}, {c:e}, {d:e}): relative residual {residual:e}")]
    IllConditionedCubic { b: f64, c: f64, d: f64, residual: f64 },

    #[error("floating-point overflow: {0}")]
    Overflow(String),

    #[error("no asymptotic branch tabulated for {0}")]
    NoAsymptoticBranch(RegionLabel),

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("empty spectrum")]
    EmptySpectrum,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl LabError {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            LabError::InvalidParameter(_) => "invalid_parameter",
            LabError::Domain(_) => "domain",
            LabError::IndexUndefined { .. } => "index_undefined",
            LabError::UnitCouplingRequired { .. } => "unit_coupling_required",
            LabError::OnSpectrum { .. } => "on_spectrum",
            LabError::IllConditionedCubic { .. } => "ill_conditioned_cubic",
            LabError::Overflow(_) => "overflow",
            LabError::NoAsymptoticBranch(_) => "no_asymptotic_branch",
            LabError::Consistency(_) => "consistency",
            LabError::DegenerateFit(_) => "degenerate_fit",
            LabError::EmptySpectrum => "empty_spectrum",
            LabError::Io(_) => "io",
            LabError::Json(_) => "json",
            LabError::Csv(_) => "csv",
        }
    }

    /// Whether the error stems from invalid input rather than a numerical failure.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            LabError::InvalidParameter(_)
                | LabError::Domain(_)
                | LabError::IndexUndefined { .. }
                | LabError::UnitCouplingRequired { .. }
                | LabError::NoAsymptoticBranch(_)
                | LabError::EmptySpectrum
        )
    }
}
