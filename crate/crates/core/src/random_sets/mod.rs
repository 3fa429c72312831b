//! Reproducibly seeded generators of set-valued sequences.

mod family;
mod sample;
mod sampling;
mod seed;

pub use family::{make_generic_family, make_interval_family, AxisSchedule, BoundForm, FamilySpec, ScalarProcess};
pub use sample::SetSample;
pub use sampling::{ellipsoid_box_hit_rate, sample_ellipse_pair, sample_ellipsoid_uniform, EllipsoidFamilySpec, Shift};
pub use seed::SeedSpec;
