//! Exact computational engine for one-dimensional translational scissors
//! congruence.
//!
//! The crate models the scissors-congruence groupoid of the line at the level
//! where everything is decidable and exact:
//!
//! * [`scalar`] — real numbers as rational vectors over a declared
//!   rationally-independent basis, with guarded ordering;
//! * [`polytope`] — the polytope group of the line in step-function normal
//!   form, its volume map, and the maps of the short exact sequence into the
//!   group ring of the reals;
//! * [`iet`] — interval exchange transformations as exact piecewise
//!   translations of `[0, L)`;
//! * [`spans`] — tuples of intervals, moves, covering sub-maps, DMC-spans and
//!   viaducts, with their factorization, refinement and subdivision
//!   algorithms;
//! * [`homology`] — bar-complex chains for the translation group, the
//!   shuffle product, wedge-class extraction and the snake-map pipeline;
//! * [`regulator`] — measures and the regulator from viaducts (hence flags
//!   of interval exchanges) to bar chains;
//! * [`generators`] — the rotation torus complexes, their regulator classes
//!   and verification against the closed-form formula, plus the graded
//!   product bookkeeping;
//! * [`rect`] — rectangle exchange transformations as componentwise products
//!   of interval exchanges, with tensor-class bookkeeping;
//! * [`json`] — the canonical JSON forms used by the `sciscal` CLI.

pub mod error;
pub mod generators;
pub mod homology;
pub mod iet;
pub mod json;
pub mod polytope;
pub mod rational;
pub mod rect;
pub mod regulator;
pub mod scalar;
pub mod spans;

pub use error::{Error, Result};
pub use rational::Q;
pub use scalar::{Scalar, ScalarContext};
