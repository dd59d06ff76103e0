use thiserror::Error;

/// Errors raised by the transfer-matrix engine and the analyses built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate resonance at k = {k0}: D'' = {curvature} is not positive")]
    DegenerateResonance { k0: f64, curvature: f64 },

    #[error("overlapping resonance at k = {k0}: half-maximum points are not resolved before the neighbouring mode")]
    OverlappingResonance { k0: f64 },

    #[error("resonance at k = {k0} jumped branch under displacement (|dk| = {shift} > spacing/4 = {limit})")]
    BranchJump { k0: f64, shift: f64, limit: f64 },

    #[error("no resonance found near k = {k}")]
    ResonanceLost { k: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("closed form outside its validity range: {0}")]
    OutsideValidity(String),

    #[error("designed stack has no resonance within 1e-6 of k = {target_k} (nearest: {nearest:?})")]
    DesignNotResonant { target_k: f64, nearest: Option<f64> },
}

impl Error {
    /// Stable, machine-readable name of the variant, used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::DegenerateResonance { .. } => "DegenerateResonance",
            Error::OverlappingResonance { .. } => "OverlappingResonance",
            Error::BranchJump { .. } => "BranchJump",
            Error::ResonanceLost { .. } => "ResonanceLost",
            Error::Domain(_) => "Domain",
            Error::OutsideValidity(_) => "OutsideValidity",
            Error::DesignNotResonant { .. } => "DesignNotResonant",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be finite, got {value}")))
    }
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be finite and > 0, got {value}")))
    }
}
