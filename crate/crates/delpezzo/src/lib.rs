//! Exact-arithmetic toolkit for weak del Pezzo surfaces presented as blow-ups
//! of the projective plane.
//!
//! The library represents a surface by its blow-up data: a set of towers of
//! infinitely near points, each tower following the branch of a smooth plane
//! curve germ. On top of that it enumerates (−1)- and (−2)-curves through the
//! Picard lattice, classifies (−2)-configurations into ADE types, and computes
//! the space of global vector fields h⁰(X,T_X) together with a point-counting
//! probe for the dimension of the connected automorphism scheme. Everything is
//! exact: ℚ or small finite fields, no floating point anywhere.

pub mod cluster;
pub mod corpus;
pub mod exactalg;
pub mod negcurves;
pub mod plane;
pub mod vectorfields;

pub use exactalg::{AlgError, Field, KElem};
