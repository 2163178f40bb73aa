//! Exact arithmetic: rationals, truncated series, noncommutative
//! polynomials and sparse graded linear maps.

pub mod graded;
pub mod linalg;
pub mod ncpoly;
pub mod rational;
pub mod series;

pub use graded::{GradedMap, GradedSpace, Idx, Vector};
pub use ncpoly::{NCPoly, TruncAlgebra};
pub use rational::Rational;
pub use series::{Coeff, HSeries};
