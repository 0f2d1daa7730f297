//! Integrals of rational symmetric functions over one- and two-matrix
//! eigenvalue ensembles.
//!
//! Every integral is taken against a measure with finite discrete support, so
//! each determinantal formula in [`formulas`] can be compared with an exact
//! brute-force summation from [`oracle`].

#![allow(clippy::needless_range_loop)]

pub mod biorth;
pub mod cli;
pub mod error;
pub mod formats;
pub mod formulas;
pub mod kernels;
pub mod measure;
pub mod oracle;

pub use biorth::{BiorthogonalSystem, OrthogonalSystem};
pub use error::{Error, Result};
pub use formulas::{integral_two, CaseKind, EvaluationReport, IntegrandSpec, OneMatrixSpec};
pub use kernels::KernelTable;
pub use measure::{BimomentTable, DiscreteBiMeasure, DiscreteMeasure};
pub use oracle::OracleBudget;

/// Complex scalar used throughout: an explicit `(re, im)` pair of `f64`.
pub type Complex = num_complex::Complex64;

/// Minimum absolute distance between two nodes of the same measure.
pub const NODE_SEPARATION: f64 = 1e-12;

/// Minimum distance between a Hilbert-transform argument and the support.
pub const POLE_SEPARATION: f64 = 1e-10;

#[cfg(test)]
pub(crate) fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}
