//! Exact symbolic and numeric verification of integral identities for
//! differential forms on Euclidean balls.
//!
//! Polynomial forms on `R^m` are integrated exactly over `B^m(R)` and its
//! boundary sphere; harmonic fields, boundary spectra, and curvature terms
//! are built on top of that arithmetic.

#![allow(clippy::needless_range_loop)]

pub mod ballgeom;
pub mod curvature;
pub mod error;
pub mod exalg;
pub mod harmonic;
pub mod identities;
pub mod linalg;
pub mod polyform;
pub mod quad;
pub mod runner;
pub mod sample;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::{Scalar, Q};
