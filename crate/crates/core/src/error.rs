//! Error type shared by the whole crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building operators, closing algebras,
/// or decomposing a space. Variants carry enough context to report the
/// offending object by name where one exists.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator `{name}` is not Hermitian (residual {residual:.3e})")]
    NotHermitian { name: String, residual: f64 },

    #[error("operator `{name}` is not unitary (residual {residual:.3e})")]
    NotUnitary { name: String, residual: f64 },

    #[error("operator `{name}` violates `{property}` (residual {residual:.3e})")]
    PropertyViolation {
        name: String,
        property: String,
        residual: f64,
    },

    #[error("degenerate random draw persisted after {attempts} attempts (seed {seed:#x}); {context}")]
    DegenerateDraw {
        seed: u64,
        attempts: usize,
        context: String,
    },

    #[error("algebra `{name}` restricted to the code space is not a factor: dimension {dim} is not a perfect square")]
    NotFactorBlock { name: String, dim: usize },

    #[error("subsystem axioms not satisfied: {which} fails")]
    AxiomsNotSatisfied {
        which: String,
        report: Box<crate::algebra::AxiomReport>,
    },

    #[error("code space is not invariant under algebra `{name}` (residual {residual:.3e})")]
    CodeSpaceNotInvariant { name: String, residual: f64 },

    #[error("chain inclusion violated at level {level}: `{name}` is not contained in the previous algebra (residual {residual:.3e})")]
    ChainInclusion {
        level: usize,
        name: String,
        residual: f64,
    },

    #[error("chain dimensions must strictly decrease at level {level}: {outer} -> {inner}")]
    ChainNotStrict {
        level: usize,
        outer: usize,
        inner: usize,
    },

    #[error("charge algebra is not abelian (worst commutator residual {residual:.3e})")]
    ChargeNotAbelian { residual: f64 },

    #[error("state lies outside the code subspace: out-of-code norm {out_norm:.3e}")]
    StateOutsideCode { out_norm: f64 },

    #[error("density matrix is invalid: {0}")]
    InvalidDensity(String),

    #[error("pulse group did not close within {limit} elements")]
    GroupTooLarge { limit: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code this error maps to: 1 for a clean run whose checks
    /// failed, 2 for bad input, 3 for numerical degeneracy that a reseed may
    /// fix.
    pub fn exit_code(&self) -> i32 {
        match self {
            // verdicts on well-formed input: the run completed and found the
            // claimed structure absent
            Error::AxiomsNotSatisfied { .. }
            | Error::ChainInclusion { .. }
            | Error::ChainNotStrict { .. }
            | Error::ChargeNotAbelian { .. }
            | Error::StateOutsideCode { .. } => 1,
            Error::DegenerateDraw { .. } => 3,
            _ => 2,
        }
    }
}
