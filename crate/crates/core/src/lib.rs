//! Polar n-complex (`K_n`) and polar n-bicomplex (`CK_n`) linear algebra,
//! transform-parameterized tensor SVD, the associated proximity operators and
//! inexact-ALM principal component pursuit.
//!
//! Hypercomplex matrices are stored as `l x m x n` coefficient tensors with
//! tube-contiguous layout; all spectral work goes through [`TubeTransform`].

pub mod cli;
pub mod error;
pub mod hyperalgebra;
pub mod hypermatrix;
mod linalg;
pub mod prox;
pub mod simlab;
pub mod solvers;
pub mod transform;
pub mod tsvd;

pub use error::{Error, Result};
pub use hyperalgebra::{AngleSet, Field, PolarScalar};
pub use hypermatrix::{HyperMatrix, SpectralMatrix};
pub use transform::{Normalization, TransformKind, TubeTransform};
pub use tsvd::TSVDFactors;

pub use num_complex::Complex64;
