//! Exact computation in the intersection theory of moduli of curves.
//!
//! The crate computes psi-class intersection numbers on moduli spaces of
//! stable curves, single and one-part double Hurwitz numbers, linear Hodge
//! integrals, and semisimple two-dimensional topological field theory
//! invariants. All arithmetic is exact rational arithmetic; there are no
//! floating-point numbers anywhere in the crate.
//!
//! Every headline quantity is computed by at least two independent routes
//! and the library exposes the cross-checks (KdV, Virasoro, and KP
//! constraints, polynomiality of Hurwitz counts, cobordism functoriality)
//! as callable verifications rather than trusting any single pipeline.

pub mod cache;
pub mod cli;
pub mod coeffs;
pub mod dhstruct;
pub mod elsv;
pub mod error;
pub mod hurwitz;
pub mod linalg;
pub mod linear;
pub mod partition;
pub mod perm;
pub mod rat;
pub mod residuals;
pub mod series;
pub mod sympoly;
pub mod tft;
pub mod virasoro;
pub mod witten;

pub use error::{Error, Result};
