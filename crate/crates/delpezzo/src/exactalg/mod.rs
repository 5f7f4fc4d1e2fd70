//! Exact arithmetic: prime fields, small extension fields, rationals,
//! sparse multivariate polynomials, truncated nilpotent extensions (dual
//! numbers and jets), and the local Hensel solver used for branch germs.

mod field;
pub mod linalg;
mod local;
mod poly;
mod ring;

pub use field::{dual_extend, fq_make, Field, FieldKind, KElem};
pub use local::{hensel_graph, LocalPoly};
pub use poly::{parse_poly, Mono, MultiPoly};
pub use ring::{DualRing, Ring, RingOver, TruncEl};

use thiserror::Error;

/// Errors of the exact-arithmetic layer and everything built on it.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("extension degree {0} out of range (1..=4)")]
    BadExtensionDegree(usize),
    #[error("attempt to invert a non-unit")]
    NonUnit,
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("singular germ: the linear coefficient of the solved variable vanishes")]
    SingularGerm,
    #[error("point does not lie on the curve")]
    NotOnCurve,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
}
