//! Cauchy-type integrals, Szegő-type projections and Toeplitz operators for
//! constant-coefficient Dirac operators in ℂⁿ, discretized on circles and on
//! the unit sphere S³ ⊂ ℂ².
//!
//! Real coordinates on ℂⁿ are ordered `(x₁, …, xₙ, xₙ₊₁, …, x₂ₙ)` with
//! `zⱼ = xⱼ + i·xₙ₊ⱼ`; covectors use the same ordering.

pub mod boundary_ops;
pub mod cayley;
pub mod clifford;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod linalg;
pub mod quadrature;
pub mod symbols;
pub mod toeplitz;

pub use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub use clifford::{DiracOperator, PolySolutionBasis};
pub use error::{Error, Result};

pub use boundary_ops::{BoundaryOperator, Density, TorusBlocks};
pub use cayley::{DicksonMatrix, Octonion, Quaternion, RealLinearMap};
pub use geometry::{BoundaryGrid, Domain, GridLayout, VolumeGrid};
pub use kernels::KernelContext;
pub use symbols::CosphereSample;
pub use toeplitz::Multiplier;
