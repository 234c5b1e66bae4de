//! Curvature of left-invariant Weyl structures.
//!
//! The crate works entirely at the Lie algebra level. A [`MetricLieAlgebra`]
//! carries structure constants re-expressed in an orthonormal frame, and
//! every curvature routine (Levi-Civita, Weyl, homogeneous) consumes
//! vectors written in that frame.
//!
//! Modules:
//! - [`liealg`]: structure constants, metrics, orthonormal frames.
//! - [`levicivita`]: Koszul connection, Riemann tensor, field classification.
//! - [`weyl`]: Weyl connections, the bivector curvature form, certification
//!   of non-positivity and stretched non-positivity.
//! - [`families`]: Milnor triples, solvable extensions of abelian algebras,
//!   products and the four-dimensional extension check.
//! - [`homogeneous`]: reductive spaces `g = h + p` and the curvature at the
//!   base point.
//! - [`thermostat`]: Gaussian thermostat integration in the moving frame.

pub mod error;
pub mod families;
pub mod homogeneous;
pub mod levicivita;
pub mod liealg;
pub mod linalg;
pub mod thermostat;
pub mod tolerances;
pub mod weyl;

pub use error::{Error, Result};
pub use liealg::{LieAlgebra, Metric, MetricLieAlgebra};
pub use tolerances::Tolerances;
pub use weyl::{BivectorForm, Certificate, Plane, Verdict, WeylStructure};

/// Column vector type used throughout the crate.
pub type Vector = nalgebra::DVector<f64>;
/// Dense matrix type used throughout the crate.
pub type Matrix = nalgebra::DMatrix<f64>;
