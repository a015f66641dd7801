//! Lie-algebraic models of the 3-Sasakian homogeneous spaces and the
//! invariant affine connections they carry.
//!
//! The crate builds compact simple Lie algebras from structure constants
//! (classical families from matrix realizations, exceptional ones through
//! composition and Jordan algebras), equips the associated reductive pairs
//! with their 3-Sasakian frames, and exposes the correspondence between
//! invariant connections and equivariant bilinear maps on the reductive
//! complement. On top of that it computes torsion, curvature and Ricci
//! data for whole families of metric connections with skew torsion and
//! the dimensions of the relevant spaces of equivariant tensors.

// Force linkage of the system OpenBLAS (BLAS + LAPACK symbols).
extern crate openblas_src as _;

pub mod composition;
pub mod equivariant;
pub mod families;
pub mod frame;
pub mod jordan;
pub mod lie;
pub mod linalg;
pub mod nomizu;
pub mod report;
pub mod tits;
pub mod zoo;

pub use composition::CompositionAlgebra;
pub use equivariant::{HomKind, HomSpaceResult};
pub use families::{ClassificationVerdict, ConnectionSpec, TorsionBasis};
pub use frame::SasakiFrame;
pub use jordan::JordanAlgebra;
pub use lie::{BilinearForm, JacobiReport, LieAlgebra, Subspace};
pub use nomizu::{AlphaMap, TensorAtOrigin};
pub use zoo::{Family, ReductivePair, SpaceId};

/// Library-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("internal consistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Residual tolerance for identities that hold exactly in real arithmetic.
pub const TOL_EXACT: f64 = 1e-9;
/// Tolerance for quantities obtained by chaining several computations.
pub const TOL_CHAINED: f64 = 1e-8;
/// Tolerance for n-scaled sums (closed curvature formulas over many terms).
pub const TOL_SUMMED: f64 = 1e-6;
