//! Nonempty compact convex sets of `R^d` and their support-function calculus.
//!
//! Every body answers support-function queries exactly. Hausdorff distances
//! are evaluated as `max_u |s(u, A) - s(u, B)|` over a [`DirectionGrid`]:
//! exact on the real line, where the unit sphere is `{+1, -1}`, and a lower
//! bound that converges under grid refinement in higher dimensions.

mod body;
mod direction;
mod hull;
mod text;

pub use body::{AxisBox, ConvexBody, Ellipsoid, Embedded, Interval, Polytope, SupportVector, SUBLINEAR_TOL};
pub use direction::{
    default_grid, make_direction_grid, Direction, DirectionGrid, GridId, GridScheme, DIRECTION_MATCH_TOL, UNIT_NORM_TOL,
};
pub use hull::convex_hull_2d;
