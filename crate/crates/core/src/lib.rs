//! Invertibility and spectra of binomial functional operators `A = aI - bW`
//! where `(Wf)(t) = f(α(t))` for a diffeomorphism `α` of the unit circle.
//!
//! The pipeline is: parse coefficient and lift expressions ([`expr`]),
//! build the shift and its periodic structure ([`circle`]), classify the
//! circle by the signs of the η functions and decide one- and two-sided
//! invertibility ([`analysis`]), and compute annulus spectra of weighted
//! shifts ([`spectrum`]). [`oracle`] discretizes the same operators on a
//! grid so verdicts can be corroborated numerically.

pub mod analysis;
pub mod circle;
pub mod coeff;
pub mod config;
pub mod expr;
pub mod fixtures;
pub mod indices;
pub mod oracle;
pub mod spectrum;

pub use analysis::{decide, OperatorSpec, Verdict};
pub use circle::{PeriodicStructure, Shift};
pub use expr::{parse, Expr};
pub use indices::SpaceIndices;
