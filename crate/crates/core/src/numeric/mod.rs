//! Numeric core: exact Gaussian rationals, arbitrary-precision complex floats, polynomials
//! and certified roots.

pub mod bigfloat;
pub mod exact;
pub mod poly;
pub mod qw;
pub mod ring;
pub mod roots;
pub mod scalar;

pub use bigfloat::BigComplex;
pub use exact::GaussRational;
pub use poly::{discriminant_quadratic, poly_add, poly_derive, poly_mul, Poly};
pub use qw::QwNumber;
pub use ring::{Field, Ring};
pub use roots::{poly_roots, poly_roots_with, Root, RootOptions, RootSet};
pub use scalar::{Regime, Scalar, DEFAULT_PRECISION, DEFAULT_TOL};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum NumericError {
    #[error("operands come from different regimes (exact and float)")]
    MixedRegime,
    #[error("division by zero")]
    DivisionByZero,
    #[error("leading coefficient is zero")]
    LeadingZero,
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("cannot parse number: {0}")]
    Parse(String),
    #[error("value is not exact")]
    NotExact,
    #[error("polynomial degree is too small")]
    InvalidDegree,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
