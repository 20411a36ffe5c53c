//! Exact and numeric computation with systems of subspaces of a complex
//! Hilbert space: decomposition into indecomposables, the Gelfand–Ponomarev
//! defect, Coxeter functors, canonical catalogs and Toeplitz symbol indices.

pub mod angles;
pub mod catalog;
pub mod coxeter;
pub mod decompose;
pub mod error;
pub mod matrix;
pub mod numeric;
pub mod poly;
pub mod scalar;
pub mod subspace;
pub mod system;
pub mod toeplitz;
pub mod verify;

pub use error::{Error, ParseError, Result};
pub use matrix::{CMatrix, Matrix, QMatrix};
pub use poly::Polynomial;
pub use scalar::{Field, GaussRat, C64};
pub use subspace::Subspace;
pub use system::{CSystem, QSystem, SubspaceSystem};
