use thiserror::Error;

use crate::certify::SubintervalCertificate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// The three hypotheses a rank bound needs before it may be emitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankCondition {
    /// Φ(D) > c on the whole domain interval, backed by a certificate.
    A,
    /// B(ε/2) > c.
    B,
    /// (B(R) − b(ε/2))/c is not an integer.
    C,
}

impl std::fmt::Display for RankCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match self {
            RankCondition::A => "(a)",
            RankCondition::B => "(b)",
            RankCondition::C => "(c)",
        };
        f.write_str(tag)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input for `{name}`: {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("quadrature did not converge: estimated error {error:e} exceeds tolerance {tolerance:e} after {subdivisions} subdivisions")]
    Quadrature {
        error: f64,
        tolerance: f64,
        subdivisions: usize,
    },

    #[error("cell {index} of the published partition failed: {reason}")]
    PartitionCell {
        index: usize,
        reason: String,
        cell: Box<SubintervalCertificate>,
    },

    #[error("could not certify c > {target}: {reason}")]
    Uncertified {
        target: f64,
        reason: String,
        witness: Box<SubintervalCertificate>,
    },

    #[error("rank bound condition {condition} not satisfied: {detail}")]
    RankPrecondition {
        condition: RankCondition,
        detail: String,
    },
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }
}

/// Rejects NaN and infinities.
pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { name, value })
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    finite(name, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParams(format!("`{name}` must be positive, got {value}")))
    }
}
