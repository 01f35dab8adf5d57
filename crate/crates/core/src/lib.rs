//! Sum-of-squares and Lasserre relaxations compiled to block-diagonal conic
//! SDPs, solved by regularization methods (boundary point and Newton-CG
//! augmented Lagrangian), with bound recovery and minimizer extraction.

// NaN-rejecting checks are written `!(x > 0.0)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cone;
pub mod error;
pub mod extract;
pub mod poly;
pub mod relax;
pub mod sdp;
pub mod solver;

pub use error::{Error, Result};
