//! Exact computations for logarithmic connections on equivariant vector
//! bundles over toric varieties.
//!
//! Fans and Laurent calculus sit at the bottom. Weight data, residues and
//! Chern classes live in [`equivariant`] and [`chern`]; Čech-level Atiyah
//! cocycles and the graded coboundary solver in [`cocycle`] and [`splitting`].

pub mod error;
pub mod fan;
pub mod lattice;
pub mod chern;
pub mod cli;
pub mod cocycle;
pub mod equivariant;
pub mod laurent;
pub mod linsolve;
pub mod matrix;
pub mod model;
pub mod report;
pub mod splitting;
pub mod transitions;
pub mod vfield;

pub use error::{Error, Result};
pub use fan::{Cone, ConeId, Fan};
pub use lattice::{CharacterVector, LatticeVector};
pub use laurent::{LaurentPoly, Rational};
pub use matrix::LaurentMatrix;
