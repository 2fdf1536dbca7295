//! Exact computational toolkit for degree-p Frobenius sandwiches of the
//! projective plane and of Hirzebruch surfaces.
//!
//! Everything is computed over F_p with exact arithmetic: sparse multivariate
//! polynomials, rational vector fields and their p-th iterates, invariant
//! rings by degree-truncated linear algebra, rank-2 fans with overlattice
//! refinements, and the classification of the globally F-regular quotients.

pub mod atlas;
pub mod checks;
pub mod classify;
pub mod derivation;
pub mod extfield;
pub mod field;
pub mod invariant;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod ratfunc;
pub mod report;
pub mod toric;

pub use derivation::{Derivation, NormalizedDerivation};
pub use field::PrimeField;
pub use poly::{Poly, VarSet};
pub use ratfunc::RatFunc;

/// Tool version reported in CLI envelopes and over FFI.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
