//! Entrywise maps on rank-constrained positive semidefinite cones.
//!
//! The crate is generic over a [`Scalar`] backend: [`Rational`] for exact
//! decisions, `f64`/`f32` for non-integer powers. The aliases below fix the
//! two backends used by the file formats and the CLI.

pub mod classify;
pub mod cone;
pub mod error;
pub mod funcalg;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod random;
pub mod scalar;
pub mod sweep;
pub mod tol;
pub mod witness;

pub use cone::{cone_member, ConeSpec, Interval, IntervalKind, Membership, Radius, Role};
pub use error::{Error, Result};
pub use funcalg::{PowerSum, PowerTerm};
pub use io::AnyMatrix;
pub use matrix::{block_diag, Dense, SymMatrix};
pub use scalar::{Backend, Flavor, Rational, Scalar};
pub use tol::Tolerances;

pub type ExactMatrix = SymMatrix<Rational>;
pub type FloatMatrix = SymMatrix<f64>;
pub type ExactDense = Dense<Rational>;
