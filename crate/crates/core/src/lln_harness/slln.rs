use std::sync::Arc;

use rayon::prelude::*;

use super::family_notes;
use super::report::{ConvergenceReport, ConvergenceRow, PathVerdict, ReportDetail, ReportMetadata, SllnRecord};
use crate::convex_sets::{default_grid, DirectionGrid};
use crate::random_sets::{FamilySpec, SeedSpec};
use crate::set_statistics::summation::{sum, Accumulator};
use crate::set_statistics::{evaluate_variance_condition, VarianceCondition};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SllnConfig {
    pub family: FamilySpec,
    pub max_n: usize,
    /// Sorted checkpoints containing every square `m^2 <= max_n`.
    pub checkpoints: Vec<usize>,
    pub paths: usize,
    pub grid: Arc<DirectionGrid>,
    pub seed: SeedSpec,
    /// Each path must end with `S_n / n` below this value.
    pub threshold: f64,
    /// Checkpoints per window in the windowed-median decrease check.
    pub window: usize,
    /// Must be `SllnBounded` or `SllnLog2`.
    pub condition: VarianceCondition,
}

/// The squares `1, 4, 9, .. <= max_n`, plus `max_n` itself.
pub fn default_checkpoints(max_n: usize) -> Vec<usize> {
    let mut c: Vec<usize> = (1..).map(|m| m * m).take_while(|&s| s <= max_n).collect();
    if c.last() != Some(&max_n) {
        c.push(max_n);
    }
    c
}

fn isqrt(n: usize) -> usize {
    let mut m = (n as f64).sqrt() as usize;
    while m * m > n {
        m -= 1;
    }
    while (m + 1) * (m + 1) <= n {
        m += 1;
    }
    m
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let h = v.len() / 2;
    if v.len() % 2 == 1 {
        v[h]
    } else {
        (v[h - 1] + v[h]) / 2.0
    }
}

impl SllnConfig {
    pub const DEFAULT_THRESHOLD: f64 = 0.05;
    pub const DEFAULT_WINDOW: usize = 5;

    /// Config with default checkpoints, grid, threshold, window and the
    /// bounded-variance condition with bound 1.
    pub fn new(family: FamilySpec, max_n: usize, paths: usize, seed: SeedSpec) -> Result<Self> {
        let grid = Arc::new(default_grid(family.dim())?);
        let config = Self {
            family,
            max_n,
            checkpoints: default_checkpoints(max_n),
            paths,
            grid,
            seed,
            threshold: Self::DEFAULT_THRESHOLD,
            window: Self::DEFAULT_WINDOW,
            condition: VarianceCondition::SllnBounded { bound: 1.0 },
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        if self.max_n == 0 || self.paths == 0 || self.window == 0 {
            return Err(Error::InvalidConfig("max_n, paths and window must be positive".into()));
        }
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "threshold must be positive, got {}",
                self.threshold
            )));
        }
        let c = &self.checkpoints;
        if c.is_empty() || c[0] == 0 || c.windows(2).any(|w| w[0] >= w[1]) || *c.last().expect("nonempty") > self.max_n
        {
            return Err(Error::InvalidConfig(
                "checkpoints must be strictly increasing values in 1..=max_n".into(),
            ));
        }
        if let Some(s) = (1..=isqrt(self.max_n))
            .map(|m| m * m)
            .find(|s| c.binary_search(s).is_err())
        {
            return Err(Error::InvalidConfig(format!("checkpoints lack the square {s}")));
        }
        if self.window > c.len() {
            return Err(Error::InvalidConfig(format!(
                "window {} exceeds the {} checkpoints",
                self.window,
                c.len()
            )));
        }
        if matches!(self.condition, VarianceCondition::WllnEq4 { .. }) {
            return Err(Error::InvalidConfig(
                "the strong law needs the slln_bounded or slln_log2 condition".into(),
            ));
        }
        if !self.family.is_prefix_consistent() {
            return Err(Error::InvalidConfig(format!(
                "family {} regenerates per length; paths need a blocked family",
                self.family.describe()
            )));
        }
        if self.grid.dim() != self.family.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.family.dim(),
                found: self.grid.dim(),
            });
        }
        Ok(())
    }

    /// Simulation length: `max_n` extended to `(m+1)^2 - 1` for the largest
    /// square `m^2 <= max_n`, so its interblock window is complete.
    pub fn horizon(&self) -> usize {
        let m = isqrt(self.max_n);
        self.max_n.max((m + 1) * (m + 1) - 1)
    }
}

/// `S_1, .., S_len` with `S_n = d_H(sum V_k, sum E[V_k]) = max_u |sum_k (s(u, V_k) - s(u, E V_k))|`.
fn partial_distances(
    bodies: &[crate::convex_sets::ConvexBody],
    expected: &[Vec<f64>],
    grid: &DirectionGrid,
) -> Result<Vec<f64>> {
    let mut acc = vec![Accumulator::default(); grid.len()];
    bodies
        .iter()
        .zip(expected)
        .map(|(b, e)| {
            let s = b.embed(grid)?;
            Ok(acc
                .iter_mut()
                .zip(s.values().iter().zip(e))
                .map(|(a, (v, ev))| {
                    a.add(v - ev);
                    a.value().abs()
                })
                .fold(0.0, f64::max))
        })
        .collect()
}

/// Strong-law experiment: `P` independent paths with `S_n / n` at every
/// checkpoint, plus the square-subsequence values and interblock maxima.
///
/// Path `p` uses stream `seed.child(p)`.
pub fn run_slln(config: &SllnConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    let family = &config.family;
    let horizon = config.horizon();
    let schedule = family.support_variances(horizon, &config.grid)?;
    let outcome = evaluate_variance_condition(&schedule, config.condition)?;
    if !outcome.satisfied {
        return Err(Error::ConditionViolated(format!(
            "{}: statistic {} over {horizon} indices",
            config.condition.name(),
            outcome.statistic
        )));
    }
    let expected = family
        .expectations(horizon)?
        .iter()
        .map(|e| e.embed(&config.grid).map(|s| s.into_values()))
        .collect::<Result<Vec<_>>>()?;

    let per_path = (0..config.paths)
        .into_par_iter()
        .map(|p| {
            let bodies = family.draw_bodies(horizon, config.seed.child(p as u64))?;
            partial_distances(&bodies, &expected, &config.grid)
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;

    let checkpoints = &config.checkpoints;
    let mut records = Vec::with_capacity(config.paths * checkpoints.len());
    let mut paths = Vec::with_capacity(config.paths);
    for (path, s) in per_path.iter().enumerate() {
        let at = |n: usize| s[n - 1];
        let mut values = Vec::with_capacity(checkpoints.len());
        let mut final_square = (0, 0.0, 0.0);
        for &n in checkpoints {
            let m = isqrt(n);
            let is_square = m * m == n;
            let interblock_max = is_square.then(|| {
                let base = at(n);
                (n + 1..(m + 1) * (m + 1))
                    .map(|k| (at(k) - base).abs())
                    .fold(0.0, f64::max)
                    / n as f64
            });
            let v = at(n) / n as f64;
            if let Some(ib) = interblock_max {
                final_square = (n, v, ib);
            }
            values.push(v);
            records.push(SllnRecord {
                path,
                n,
                s_n_over_n: v,
                is_square,
                interblock_max,
            });
        }
        let final_value = *values.last().expect("checkpoints are nonempty");
        let window_decreasing = median(&values[values.len() - config.window..]) <= median(&values[..config.window]);
        paths.push(PathVerdict {
            path,
            final_value,
            final_square: final_square.0,
            final_square_value: final_square.1,
            final_interblock: final_square.2,
            window_decreasing,
            passed: final_value < config.threshold && window_decreasing,
        });
    }

    let rows = checkpoints
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let vals: Vec<f64> = (0..config.paths)
                .map(|p| records[p * checkpoints.len() + i].s_n_over_n)
                .collect();
            let exceedance_count = vals.iter().filter(|&&v| v >= config.threshold).count();
            ConvergenceRow {
                n,
                mean: sum(vals.iter().copied()) / config.paths as f64,
                max: vals.iter().copied().fold(0.0, f64::max),
                exceedance: exceedance_count as f64 / config.paths as f64,
                exceedance_count,
                bound: None,
                bound_ok: None,
            }
        })
        .collect();

    let mut notes = family_notes(family, &config.grid);
    notes.push(format!(
        "variance condition {}: {} ({})",
        config.condition.name(),
        outcome.statistic,
        outcome.note
    ));
    notes.push(format!(
        "paths simulated to n = {horizon} so the last square's interblock window is complete"
    ));
    notes.push(format!(
        "path passes when S_n/n < {} at n = {} and the median of the last {} checkpoints is at most the median of the first {}",
        config.threshold, config.max_n, config.window, config.window
    ));
    Ok(ConvergenceReport {
        metadata: ReportMetadata {
            kind: "slln",
            master_seed: config.seed.master_seed,
            stream_index: config.seed.stream_index,
            grid_description: config.grid.description().to_string(),
            grid_size: config.grid.len(),
            family: family.describe(),
            replications: config.paths,
            notes,
        },
        rows,
        detail: ReportDetail::Slln {
            threshold: config.threshold,
            records,
            paths,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoint_helpers() {
        assert_eq!(default_checkpoints(10), vec![1, 4, 9, 10]);
        assert_eq!(default_checkpoints(16), vec![1, 4, 9, 16]);
        assert_eq!(isqrt(99), 9);
        assert_eq!(isqrt(100), 10);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
