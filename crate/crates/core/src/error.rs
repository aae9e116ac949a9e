//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while setting up or solving a model.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A physical input is outside its valid domain (non-positive
    /// capacitance, negative temperature, zero ports, ...).
    #[error("parameter out of domain: {what} = {value} ({requirement})")]
    ParameterDomain {
        /// Name of the offending quantity.
        what: &'static str,
        /// The value that was supplied.
        value: f64,
        /// What would have been acceptable.
        requirement: &'static str,
    },

    /// Matrix or vector dimensions are inconsistent.
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// A matrix that must be Hermitian is not (within tolerance).
    #[error("matrix not Hermitian in {context}: max |A - A†| element = {deviation:.3e}")]
    NotHermitian {
        context: &'static str,
        deviation: f64,
    },

    /// A linear solve hit a numerically singular pivot.
    #[error("singular linear system in {context} (pivot magnitude {pivot:.3e})")]
    SingularSystem { context: &'static str, pivot: f64 },

    /// The Liouvillian kernel is (numerically) more than one-dimensional,
    /// so "the" steady state is not unique.
    #[error("degenerate Liouvillian kernel: steady state is not unique")]
    DegenerateKernel,

    /// An iterative numerical routine failed to converge.
    #[error("{routine} failed to converge: {detail}")]
    NoConvergence {
        routine: &'static str,
        detail: String,
    },

    /// A computed result failed its own consistency check.
    #[error("numerical check failed in {context}: {detail}")]
    NumericalCheck {
        context: &'static str,
        detail: String,
    },

    /// A supplied rate combination implies a negative pure-dephasing
    /// contribution, i.e. it is not realizable by any Lindblad model.
    #[error("unphysical rate combination: {detail}")]
    UnphysicalRates { detail: String },

    /// A closed-form path was asked to handle a case it does not cover
    /// (the numeric path usually does).
    #[error("closed form not applicable: {detail}")]
    ClosedFormUnavailable { detail: String },

    /// Hilbert-space truncation could not be made large enough to reach
    /// the requested convergence.
    #[error("truncation not converged: {detail}")]
    TruncationNotConverged { detail: String },

    /// A correlation function was requested for a field carrying no
    /// photons (zero denominator).
    #[error("zero photon flux in {context}: correlation undefined")]
    ZeroFlux { context: &'static str },
}
