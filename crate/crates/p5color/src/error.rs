//! Solver-level errors.
//!
//! The dependency-removal machinery is only guaranteed to work on
//! P5-free graphs. Each structural lemma it relies on is checked at
//! runtime; when a check fails, the failure is converted into an
//! explicit induced-P5 witness and surfaces as [`SolveError::NotP5Free`],
//! so an unvalidated non-P5-free input produces a certificate instead of
//! silent nonsense.

use thiserror::Error;

use crate::p5::P5Certificate;

/// Which check produced a P5 certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    /// Up-front scan requested via the solve configuration.
    InputValidation,
    /// No vertex of X′ dominates Y′ during stable-pair removal.
    NoLemma1Vertex,
    /// The dependent components of two dynamic blocks fall apart into
    /// disconnected clusters.
    HDisconnected,
    /// Two components of one dynamic block cross two components of the
    /// other in opposite patterns.
    TwoCrossingComponents,
    /// No vertex of a dynamic block reaches every dependent component of
    /// the other, or one misses two of them.
    ClaimViolated,
}

impl std::fmt::Display for Origin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Origin::InputValidation => "input-validation",
            Origin::NoLemma1Vertex => "no-lemma1-vertex",
            Origin::HDisconnected => "h-disconnected",
            Origin::TwoCrossingComponents => "two-crossing-components",
            Origin::ClaimViolated => "claim-violated",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    /// The input contains an induced P5; the certificate names it
    /// (validated, in path order).
    #[error("graph is not P5-free (found by {origin}): induced P5 at {certificate}")]
    NotP5Free {
        origin: Origin,
        certificate: P5Certificate,
    },
    /// The configured instance budget ran out.
    #[error("instance budget exceeded: created {created} of allowed {budget}")]
    BudgetExceeded { created: u64, budget: u64 },
}

impl SolveError {
    pub fn certificate(&self) -> Option<&P5Certificate> {
        match self {
            SolveError::NotP5Free { certificate, .. } => Some(certificate),
            SolveError::BudgetExceeded { .. } => None,
        }
    }

    pub fn origin(&self) -> Option<Origin> {
        match self {
            SolveError::NotP5Free { origin, .. } => Some(*origin),
            SolveError::BudgetExceeded { .. } => None,
        }
    }
}
