use std::sync::Arc;

use rayon::prelude::*;

use super::summation::{mean, sum};
use crate::convex_sets::{ConvexBody, Direction, DirectionGrid, GridId};
use crate::random_sets::SetSample;
use crate::{Error, Result};

/// Deviations from the mean. A constant sequence gives exact zeros even when
/// its floating-point mean is off by an ulp.
pub(crate) fn centered(xs: &[f64]) -> Vec<f64> {
    if xs.windows(2).all(|w| w[0] == w[1]) {
        return vec![0.0; xs.len()];
    }
    let m = mean(xs);
    xs.iter().map(|x| x - m).collect()
}

/// Unbiased covariance of two centered sequences of equal length `>= 2`.
pub(crate) fn centered_covariance(dx: &[f64], dy: &[f64]) -> f64 {
    sum(dx.iter().zip(dy).map(|(a, b)| a * b)) / (dx.len() - 1) as f64
}

/// `(covariance, correlation)`; the correlation is 0 when either side has
/// zero variance.
pub(crate) fn centered_correlation(dx: &[f64], dy: &[f64]) -> (f64, f64) {
    let cov = centered_covariance(dx, dy);
    let vx = centered_covariance(dx, dx);
    let vy = centered_covariance(dy, dy);
    if vx == 0.0 || vy == 0.0 {
        return (cov, 0.0);
    }
    (cov, cov / (vx.sqrt() * vy.sqrt()))
}

fn supports_at(bodies: &[ConvexBody], u: &Direction, what: &'static str) -> Result<Vec<f64>> {
    let xs = bodies.iter().map(|b| b.support(u)).collect::<Result<Vec<_>>>()?;
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(what));
    }
    Ok(xs)
}

/// Unbiased sample covariance of `s(u, A_t)` and `s(u, B_t)` over paired draws.
pub fn empirical_support_covariance(samples_a: &[ConvexBody], samples_b: &[ConvexBody], u: &Direction) -> Result<f64> {
    if samples_a.len() != samples_b.len() {
        return Err(Error::InvalidConfig(format!(
            "{} draws paired with {} draws",
            samples_a.len(),
            samples_b.len()
        )));
    }
    if samples_a.len() < 2 {
        return Err(Error::InsufficientSamples {
            what: "paired draws",
            needed: 2,
            got: samples_a.len(),
        });
    }
    let xs = supports_at(samples_a, u, "support values of the first sample")?;
    let ys = supports_at(samples_b, u, "support values of the second sample")?;
    Ok(centered_covariance(&centered(&xs), &centered(&ys)))
}

/// Per-replication supports `s(u_i, V_k)` rearranged as `[k][i] -> values over r`.
pub(crate) fn support_panel(replications: &[SetSample], grid: &DirectionGrid) -> Result<Vec<Vec<Vec<f64>>>> {
    let len = replications.first().map_or(0, SetSample::len);
    if let Some(bad) = replications.iter().find(|s| s.len() != len) {
        return Err(Error::InvalidConfig(format!(
            "replications must have equal lengths, found {len} and {}",
            bad.len()
        )));
    }
    let embedded = replications
        .par_iter()
        .map(|s| {
            s.bodies()
                .iter()
                .map(|b| b.embed(grid).map(|v| v.into_values()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let panel: Vec<Vec<Vec<f64>>> = (0..len)
        .map(|k| {
            (0..grid.len())
                .map(|i| embedded.iter().map(|rep| rep[k][i]).collect())
                .collect()
        })
        .collect();
    if panel.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("support values"));
    }
    Ok(panel)
}

/// Covariances of `s(u, V_k)` and `s(u, V_l)` across independent replications
/// of a sequence, for every `k <= l` and grid direction `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportCovMatrix {
    grid: Arc<DirectionGrid>,
    len: usize,
    replications: usize,
    covariances: Vec<Vec<f64>>,
    correlations: Vec<Vec<f64>>,
}

impl SupportCovMatrix {
    pub fn from_replications(replications: &[SetSample], grid: &Arc<DirectionGrid>) -> Result<Self> {
        if replications.len() < 2 {
            return Err(Error::InsufficientSamples {
                what: "replications",
                needed: 2,
                got: replications.len(),
            });
        }
        if let Some(d) = replications[0].dim() {
            if d != grid.dim() {
                return Err(Error::DimensionMismatch {
                    expected: grid.dim(),
                    found: d,
                });
            }
        }
        let panel: Vec<Vec<Vec<f64>>> = support_panel(replications, grid)?
            .into_iter()
            .map(|per_dir| per_dir.iter().map(|xs| centered(xs)).collect())
            .collect();
        let len = panel.len();
        let pairs: Vec<(usize, usize)> = (0..len).flat_map(|k| (k..len).map(move |l| (k, l))).collect();
        let (covariances, correlations): (Vec<Vec<f64>>, Vec<Vec<f64>>) = pairs
            .par_iter()
            .map(|&(k, l)| {
                (0..grid.len())
                    .map(|i| centered_correlation(&panel[k][i], &panel[l][i]))
                    .unzip()
            })
            .collect::<Vec<(Vec<f64>, Vec<f64>)>>()
            .into_iter()
            .unzip();
        Ok(Self {
            grid: Arc::clone(grid),
            len,
            replications: replications.len(),
            covariances,
            correlations,
        })
    }

    pub fn grid(&self) -> &Arc<DirectionGrid> {
        &self.grid
    }

    pub fn grid_id(&self) -> GridId {
        self.grid.id()
    }

    /// Sequence length.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn replications(&self) -> usize {
        self.replications
    }

    fn slot(&self, k: usize, l: usize) -> usize {
        let (k, l) = if k <= l { (k, l) } else { (l, k) };
        assert!(l < self.len, "index {l} out of range for length {}", self.len);
        // rows k = 0, 1, .. hold len, len - 1, .. entries
        k * self.len - k * k.saturating_sub(1) / 2 + (l - k)
    }

    /// Per-direction covariances of `s(u, V_k)` and `s(u, V_l)`.
    pub fn covariance(&self, k: usize, l: usize) -> &[f64] {
        &self.covariances[self.slot(k, l)]
    }

    /// Per-direction correlations, 0 where either variance vanishes.
    pub fn correlation(&self, k: usize, l: usize) -> &[f64] {
        &self.correlations[self.slot(k, l)]
    }
}
