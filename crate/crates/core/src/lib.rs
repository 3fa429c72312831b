//! Computing with compact convex set-valued random variables in `R^d`.
//!
//! The crate is organised in four layers:
//!
//! - [`convex_sets`]: convex bodies in several exact representations, direction
//!   grids discretizing the unit sphere, support functions, Minkowski arithmetic
//!   and the Hausdorff metric in its support-function form.
//! - [`random_sets`]: reproducibly seeded generators of set-valued sequences,
//!   including interval families built from points uniform in an ellipsoid,
//!   which are pairwise uncorrelated without being independent.
//! - [`set_statistics`]: support covariances, uncorrelation verdicts, Aumann
//!   mean estimation and the variance conditions behind the laws of large numbers.
//! - [`lln_harness`]: seeded Monte Carlo experiments for the weak and strong
//!   laws of large numbers, with Chebyshev-type analytic bounds.

pub mod convex_sets;
mod error;
pub mod lln_harness;
pub mod random_sets;
pub mod set_statistics;

pub use error::{Error, Result};
