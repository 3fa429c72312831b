use std::sync::Arc;

use super::summation::sum;
use crate::convex_sets::{ConvexBody, DirectionGrid, Embedded};
use crate::random_sets::SetSample;
use crate::{Error, Result};

/// Minkowski average `(1/n) sum_k V_k` on `grid`, computed as the mean of the
/// support vectors. By additivity of supports this is the embedding of the
/// average itself, not an approximation of it.
pub fn aumann_mean_of(bodies: &[ConvexBody], grid: &Arc<DirectionGrid>) -> Result<ConvexBody> {
    let Some(first) = bodies.first() else {
        return Err(Error::InsufficientSamples {
            what: "bodies",
            needed: 1,
            got: 0,
        });
    };
    let d = first.dim();
    if let Some(b) = bodies.iter().find(|b| b.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: b.dim(),
        });
    }
    if d != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            found: d,
        });
    }
    let n = bodies.len() as f64;
    let values = (0..grid.len())
        .map(|i| {
            let total = sum(bodies
                .iter()
                .map(|b| b.support_on(grid, i))
                .collect::<Result<Vec<_>>>()?);
            if !total.is_finite() {
                return Err(Error::NonFinite("support sum"));
            }
            Ok(total / n)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvexBody::Embedded(Embedded::from_exact(Arc::clone(grid), values)))
}

/// Estimate of the Aumann mean of a sample: its Minkowski average on `grid`.
pub fn aumann_mean_estimate(sample: &SetSample, grid: &Arc<DirectionGrid>) -> Result<ConvexBody> {
    aumann_mean_of(sample.bodies(), grid)
}
