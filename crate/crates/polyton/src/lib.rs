//! polyton: exact matchings and fractional vertex covers on step graphons.
//!
//! Everything here runs over arbitrary-precision rationals. The central
//! objects are step graphons (block-constant symmetric kernels on `[0,1)^2`),
//! their fractional matchings and vertex covers, and the linear programs
//! relating the two. On top of that sit structure tests (bipartiteness via
//! odd-cycle densities, k-partiteness), exact cut norms, the
//! matching-transfer construction between nearby graphons, and W-random graph
//! sampling with a convergence harness.

#![forbid(unsafe_code)]
// Dense block matrices are addressed by index throughout; iterator rewrites
// of these loops obscure the (i, j) symmetry they rely on.
#![allow(clippy::needless_range_loop)]

pub mod covers;
pub mod cutnorm;
pub mod lp;
pub mod matchings;
pub mod rat;
pub mod sampling;
pub mod step;
pub mod structure;
pub mod transfer;

pub use rat::Rat;
pub use step::{StepCover, StepGraphon, StepKernel};
