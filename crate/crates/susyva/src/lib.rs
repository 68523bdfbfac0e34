//! Exact computational models for supersymmetric vertex algebras in the
//! superfield formalism: formal distribution calculus, mode algebras with
//! PBW straightening, commutator/iterate mode formulas, Li filtrations with
//! their graded Poisson structures, C2 quotients, and superjet models.
//!
//! Everything is exact: rationals, polynomials in the central charge, and
//! half-integer gradings. Truncations are explicit windows that error on
//! overflow instead of silently dropping terms.

pub mod combinat;
pub mod scalars;
pub mod linalg;
pub mod distrib;
pub mod modealg;

/// Supervariable flavor: which odd-variable calculus the algebra uses.
/// NW: odd translations S^i anticommute and square to zero.
/// NK: odd translations S_K^i satisfy [S_K^i, S_K^j] = 2 delta_ij T.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    NW,
    NK,
}

/// Shared error type for window/truncation and configuration failures.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("truncation window overflow: {0}")]
    WindowOverflow(String),
    #[error("unsupported extension: {0}")]
    UnsupportedExtension(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
