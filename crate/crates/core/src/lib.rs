//! Exact invariant calculus for the geography of symplectic 4-manifolds with
//! prescribed fundamental group.
//!
//! The crate is organized bottom-up:
//!
//! * [`linalg`]: integer matrices, Smith normal form, determinant divisors.
//! * [`presentation`]: words, presentations, abelianization, and the
//!   positive rewriting used by the fibered construction.
//! * [`manifold`]: invariant records for atomic manifolds and the operations
//!   (connected sum, blow-up, torus fiber sum) that combine them, plus the
//!   named constructions as auditable traces.
//! * [`bounds`]: lower and upper bounds on χ and χ+σ with provenance.
//! * [`geography`]: exact piecewise-linear envelopes b ↦ min(χ + bσ),
//!   unboundedness directions, and the reference tables.
//! * [`export`]: CSV, SVG and text renderings.

pub mod bounds;
pub mod error;
pub mod export;
pub mod geography;
pub mod linalg;
pub mod manifold;
pub mod parallel;
pub mod presentation;
pub mod rational;
mod serde_big;

pub use error::Error;
