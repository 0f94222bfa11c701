//! Exact symbolic layer: the field Q(√2), noncommutative polynomials in the
//! (2,2,2) observables, and dense matrices over Q(√2).

pub mod matrix;
pub mod poly;
mod qsqrt2;

pub use matrix::{ExactMatrix, PsdVerdict, Rref};
pub use poly::{Letter, LetterMap, Monomial, NCPolynomial, Party};
pub use qsqrt2::QSqrt2;
