//! Exact computation engine for splitting radii of rational maps on the
//! Berkovich projective line over non-Archimedean valued fields.
//!
//! Everything here is exact: coefficients live in ℚ with a p-adic valuation
//! (mixed characteristic) or in F_p(u) with the u-adic valuation (equal
//! characteristic), optionally extended by a transcendental parameter t of
//! prescribed valuation. Radii are tracked as rational valuations; no
//! floating point enters any computation.
//!
//! The library is organised around the spine of the problem:
//!
//! * [`valfield`] — valued coefficient domains and exact elements,
//! * [`polygon`] — Newton polygons and Gauss-norm evaluation,
//! * [`roots`] — ultrametric root clustering and the resultant distance oracle,
//! * [`berkline`] — points, trees and retractions on the projective line,
//! * [`charts`] — projective chart bookkeeping and radius/tuple conversions,
//! * [`splitting`] — the splitting radius itself, skeleta and verification,
//! * [`cli`] — the problem-file surface used by the `splitrad` binary.

pub mod berkline;
pub mod charts;
pub mod cli;
pub mod polygon;
pub mod roots;
pub mod splitting;
pub mod valfield;

pub use valfield::{CoeffDomain, Elem, ValQ};

use thiserror::Error;

/// Crate-wide error type. Variants mirror the failure modes of the
/// individual modules so that errors propagate unchanged from the root
/// clustering engine up through the CLI.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("valuation is negative, element is outside the valuation ring")]
    NegativeValuation,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("inseparable residual: derivative vanishes at this level")]
    InseparableResidual,
    #[error("unresolved cluster: {reason}")]
    UnresolvedCluster { reason: String },
    #[error("both points at infinity")]
    BothInfinite,
    #[error("empty tree")]
    EmptyTree,
    #[error("radius out of range")]
    RadiusOutOfRange,
    #[error("malformed poly-radius tuple: {0}")]
    MalformedTuple(String),
    #[error("zero map")]
    ZeroMap,
    #[error("center lies outside the closed unit disk")]
    OutsideUnitDisk,
    #[error("sampling budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn unresolved(reason: impl Into<String>) -> Self {
        Error::UnresolvedCluster {
            reason: reason.into(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
