use std::fmt;

use thiserror::Error;

/// A single named violation found while validating a [`crate::model::DrivenSystem`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("NonPositiveRate: {name} = {value} must be > 0")]
    NonPositiveRate { name: &'static str, value: f64 },
    #[error("NegativeRate: {name} = {value} must be >= 0")]
    NegativeRate { name: &'static str, value: f64 },
    #[error("BranchExceedsTotal: branches out of level {level} sum to {sum} > total decay {total}")]
    BranchExceedsTotal { level: char, sum: f64, total: f64 },
    #[error("CoherenceWidthTooSmall: Γ_{name} = {value} < (Γ_i + Γ_j)/2 = {bound}")]
    CoherenceWidthTooSmall { name: &'static str, value: f64, bound: f64 },
    #[error("NonFinite: {name} is not finite")]
    NonFinite { name: &'static str },
}

impl Violation {
    /// Short machine-readable name of the violation.
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::NonPositiveRate { .. } => "NonPositiveRate",
            Violation::NegativeRate { .. } => "NegativeRate",
            Violation::BranchExceedsTotal { .. } => "BranchExceedsTotal",
            Violation::CoherenceWidthTooSmall { .. } => "CoherenceWidthTooSmall",
            Violation::NonFinite { .. } => "NonFinite",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violations(pub Vec<Violation>);

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid system: {0}")]
    Invalid(Violations),
    #[error("saturation determinant {det:e} is numerically zero")]
    SingularSaturation { det: f64 },
    #[error("denominator of {what} is numerically zero ({magnitude:e})")]
    DegenerateDenominator { what: &'static str, magnitude: f64 },
    #[error("reference value {what} is zero")]
    ZeroReference { what: &'static str },
    #[error("grid half-span {half_span} is below the required {required}")]
    GridTooNarrow { half_span: f64, required: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("velocity average did not converge: relative change {rel_change:e} at order {order}")]
    NonConvergent { order: usize, rel_change: f64 },
    #[error("invalid Doppler configuration: {0}")]
    InvalidDoppler(&'static str),
    #[error("Fano parameter requested with zero induced width")]
    ZeroWidth,
    #[error("{value} is not a nonnegative half-integer")]
    NonHalfInteger { value: f64 },
    #[error("reference Einstein coefficient A_m1n1 must be positive, got {value}")]
    ZeroReferenceA { value: f64 },
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },
}

impl Error {
    /// Stable error name, used in machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Invalid(_) => "ValidationError",
            Error::SingularSaturation { .. } => "SingularSaturation",
            Error::DegenerateDenominator { .. } => "DegenerateDenominator",
            Error::ZeroReference { .. } => "ZeroReference",
            Error::GridTooNarrow { .. } => "GridTooNarrow",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::NonConvergent { .. } => "NonConvergent",
            Error::InvalidDoppler(_) => "InvalidDoppler",
            Error::ZeroWidth => "ZeroWidth",
            Error::NonHalfInteger { .. } => "NonHalfInteger",
            Error::ZeroReferenceA { .. } => "ZeroReferenceA",
            Error::InvalidParameter { .. } => "InvalidParameter",
        }
    }

    /// Whether the error is an input-validation problem (as opposed to a
    /// numerical failure on valid input).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Invalid(_)
                | Error::InvalidGrid(_)
                | Error::InvalidDoppler(_)
                | Error::NonHalfInteger { .. }
                | Error::InvalidParameter { .. }
                | Error::GridTooNarrow { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
