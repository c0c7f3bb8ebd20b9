//! Computational convex analysis on uniform 1-D and 2-D grids.
//!
//! Functions are sampled into [`GridFn`] values (extended reals, `+inf`
//! outside the domain) and transformed exactly on the grid: Legendre–Fenchel
//! conjugates, inf-convolutions, Moreau envelopes and proximal points,
//! Fitzpatrick functions of sampled operators, and the Asplund averaging of
//! two norms. The [`special`] module holds the Gamma-function and
//! coupon-collector identities.
//!
//! Data-parallel kernels run on rayon with the default `parallel` feature
//! and fall back to sequential loops without it; results are identical.

// Negated comparisons like `!(x > 0.0)` are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atom;
pub mod convexity;
pub mod error;
pub mod extreal;
pub mod fenchel;
pub mod grid;
pub mod io;
pub mod monotone;
pub mod moreau;
mod par;
pub mod renorm;
pub mod special;

pub use atom::{FnAtom, NormKind};
pub use convexity::{discrete_convexity_check, ConvexityReport};
pub use error::{Error, Result};
pub use extreal::ExtReal;
pub use grid::{Axis, Grid, GridFn};
