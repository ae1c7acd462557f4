//! Operator-algebra toolkit for finite-dimensional quantum systems.
//!
//! Given a set of observables on a Hilbert space, this crate closes them into
//! a *-algebra, computes commutants and centers, decomposes the space into
//! the algebra's irreducible blocks, and builds the explicit isometry that
//! exhibits each block as a tensor product. On top of that sit nested
//! subsystem chains, encoded (stabilizer-style) subsystems, superselection
//! analysis, entanglement of states relative to a computed factorization, and
//! stroboscopic refocusing of dynamics.
//!
//! Everything is generic over the real scalar through [`scalar::Real`]
//! (implemented for `f32` and `f64`); the crate root exports `f64`-backed
//! aliases, which are what the command-line tool and the test suite use.

pub mod algebra;
pub mod builders;
pub mod dynamics;
pub mod entangle;
pub mod error;
pub mod factorize;
pub mod mat;
pub mod random;
pub mod superselect;
pub mod scalar;

pub use error::{Error, Result};

/// Default seed for stochastic steps when none is supplied.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// `f64`-backed aliases; the precision used by the CLI and tests.
pub type Mat64 = mat::Mat<f64>;
pub type Tolerances64 = mat::Tolerances<f64>;
pub type C64 = scalar::C<f64>;
pub type Algebra64 = algebra::Algebra<f64>;
