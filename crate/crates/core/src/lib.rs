//! Finite-truncation toolkit for the restricted loop algebra on the index window `[-N, N]`,
//! its spin module, highest-weight modules, the cubic Dirac operator and its gauge family,
//! and the associated group and groupoid cocycles.
//!
//! [`linalg`] is generic over the real scalar; the physics modules work in `f64`.

// Negated comparisons are deliberate: they send NaN down the rejection branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod centralext;
pub mod dirac;
pub mod error;
pub mod groupoid;
pub mod hwmodule;
pub mod liealg;
pub mod linalg;
pub mod report;
pub mod spinrep;

use num_complex::Complex;

pub use error::{Error, Result};

pub type C64 = Complex<f64>;
pub type ComplexMatrix = linalg::CMatrix<f64>;
pub type SparseMatrix = linalg::CsrMatrix<f64>;
pub type ComplexMatrix32 = linalg::CMatrix<f32>;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

pub(crate) fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}
