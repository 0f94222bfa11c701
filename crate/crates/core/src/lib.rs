//! Exact and numerical tools for Bell expressions in the two-party,
//! two-setting, two-outcome scenario.
//!
//! Exact arithmetic lives over `Q(√2)` ([`QSqrt2`]) so that Tsirelson-type
//! identities can be checked with zero tolerance; [`optimize`] supplies the
//! floating-point side (SDP relaxations, certificate search, qubit scans).

pub mod certificates;
pub mod error;
pub mod exact;
pub mod io;
pub mod linalg;
pub mod optimize;
pub mod scalar;
pub mod scenario;
pub mod slice;

pub use error::{Error, Result};
pub use exact::{ExactMatrix, Letter, LetterMap, Monomial, NCPolynomial, QSqrt2};
pub use scalar::Scalar;
