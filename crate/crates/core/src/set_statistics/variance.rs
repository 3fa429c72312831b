use std::fmt::Write as _;
use std::sync::Arc;

use super::covariance::{centered, centered_covariance, support_panel};
use super::summation::Accumulator;
use crate::convex_sets::DirectionGrid;
use crate::random_sets::SetSample;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScheduleSource {
    Analytic,
    Empirical,
}

impl ScheduleSource {
    pub fn name(self) -> &'static str {
        match self {
            ScheduleSource::Analytic => "analytic",
            ScheduleSource::Empirical => "empirical",
        }
    }
}

/// `Var(s(u, V_k))` for `k = 1..=len` and every direction `u` of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VarianceSchedule {
    grid: Arc<DirectionGrid>,
    per_index: Vec<Vec<f64>>,
    source: ScheduleSource,
}

impl VarianceSchedule {
    pub fn new(grid: Arc<DirectionGrid>, per_index: Vec<Vec<f64>>, source: ScheduleSource) -> Result<Self> {
        for (index, row) in per_index.iter().enumerate() {
            if row.len() != grid.len() {
                return Err(Error::InvalidConfig(format!(
                    "variance row {} has {} entries for {} directions",
                    index + 1,
                    row.len(),
                    grid.len()
                )));
            }
            for (direction, &value) in row.iter().enumerate() {
                if !value.is_finite() {
                    return Err(Error::NonFinite("variance entry"));
                }
                if value < 0.0 {
                    return Err(Error::NegativeVariance {
                        index: index + 1,
                        direction,
                        value,
                    });
                }
            }
        }
        Ok(Self {
            grid,
            per_index,
            source,
        })
    }

    /// Schedule with `Var_k(u) = f(k, i)` for one-based `k` and direction index `i`.
    pub fn from_fn(grid: Arc<DirectionGrid>, len: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let per_index = (1..=len).map(|k| (0..grid.len()).map(|i| f(k, i)).collect()).collect();
        Self::new(grid, per_index, ScheduleSource::Analytic)
    }

    /// Unbiased per-index variances across independent replications of a sequence.
    pub fn from_replications(replications: &[SetSample], grid: &Arc<DirectionGrid>) -> Result<Self> {
        if replications.len() < 2 {
            return Err(Error::InsufficientSamples {
                what: "replications",
                needed: 2,
                got: replications.len(),
            });
        }
        let per_index = support_panel(replications, grid)?
            .iter()
            .map(|per_dir| {
                per_dir
                    .iter()
                    .map(|xs| {
                        let d = centered(xs);
                        centered_covariance(&d, &d)
                    })
                    .collect()
            })
            .collect();
        Self::new(Arc::clone(grid), per_index, ScheduleSource::Empirical)
    }

    pub fn grid(&self) -> &Arc<DirectionGrid> {
        &self.grid
    }

    pub fn per_index(&self) -> &[Vec<f64>] {
        &self.per_index
    }

    pub fn source(&self) -> ScheduleSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.per_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_index.is_empty()
    }

    /// `sum_{k <= n} Var_k(u)` per direction, `n` clamped to the schedule length.
    pub fn direction_totals(&self, n: usize) -> Vec<f64> {
        let mut acc = vec![Accumulator::default(); self.grid.len()];
        for row in self.per_index.iter().take(n) {
            for (a, v) in acc.iter_mut().zip(row) {
                a.add(*v);
            }
        }
        acc.iter().map(Accumulator::value).collect()
    }

    pub const CSV_HEADER: &'static str = "k,direction,variance";

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for (k, row) in self.per_index.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                writeln!(out, "{},{i},{v}", k + 1).expect("writing to a String");
            }
        }
        out
    }
}

/// Variance hypotheses of the laws of large numbers, checked at finite length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VarianceCondition {
    /// `max_u (1/n^2) sum_{k <= n} Var_k(u) -> 0`. Judged satisfied when the
    /// final value is at most `tail_threshold` and not above the value at
    /// half the length.
    WllnEq4 { tail_threshold: f64 },
    /// `Var_k(u) <= bound` for every `k` and `u`.
    SllnBounded { bound: f64 },
    /// `sum_k Var_k(u) log^2 k / k^2 < infinity`. Judged satisfied when the
    /// partial sums grow by at most `tail_threshold` over the second half.
    SllnLog2 { tail_threshold: f64 },
}

impl VarianceCondition {
    pub const DEFAULT_EQ4_TAIL: f64 = 0.01;
    pub const DEFAULT_LOG2_TAIL: f64 = 0.05;

    pub fn name(&self) -> &'static str {
        match self {
            VarianceCondition::WllnEq4 { .. } => "wlln_eq4",
            VarianceCondition::SllnBounded { .. } => "slln_bounded",
            VarianceCondition::SllnLog2 { .. } => "slln_log2",
        }
    }

    fn validate(&self) -> Result<()> {
        let (what, x) = match *self {
            VarianceCondition::WllnEq4 { tail_threshold } => ("tail threshold", tail_threshold),
            VarianceCondition::SllnBounded { bound } => ("variance bound", bound),
            VarianceCondition::SllnLog2 { tail_threshold } => ("tail threshold", tail_threshold),
        };
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::InvalidConfig(format!("{what} must be positive, got {x}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionOutcome {
    pub satisfied: bool,
    /// Indexed by `n - 1`: `max_u (1/n^2) sum Var` (eq4), the running maximum
    /// of `Var` (bounded), or the partial sums of `max_u Var log^2 k / k^2` (log2).
    pub trajectory: Vec<f64>,
    /// The value compared against the threshold.
    pub statistic: f64,
    pub note: &'static str,
}

/// Evaluates `condition` on `schedule`. Conditions on infinite sequences are
/// judged from the finite trajectory; the outcome's note says how.
pub fn evaluate_variance_condition(
    schedule: &VarianceSchedule,
    condition: VarianceCondition,
) -> Result<ConditionOutcome> {
    condition.validate()?;
    if schedule.is_empty() {
        return Err(Error::InsufficientSamples {
            what: "schedule entries",
            needed: 1,
            got: 0,
        });
    }
    let rows = schedule.per_index();
    let n_max = rows.len();
    let row_max = |row: &Vec<f64>| row.iter().copied().fold(0.0, f64::max);
    let outcome = match condition {
        VarianceCondition::WllnEq4 { tail_threshold } => {
            let mut acc = vec![Accumulator::default(); schedule.grid().len()];
            let trajectory: Vec<f64> = rows
                .iter()
                .enumerate()
                .map(|(k, row)| {
                    let n = (k + 1) as f64;
                    acc.iter_mut()
                        .zip(row)
                        .map(|(a, v)| {
                            a.add(*v);
                            a.value() / (n * n)
                        })
                        .fold(0.0, f64::max)
                })
                .collect();
            let last = trajectory[n_max - 1];
            let half = trajectory[n_max.div_ceil(2) - 1];
            ConditionOutcome {
                satisfied: last <= tail_threshold && last <= half,
                statistic: last,
                trajectory,
                note: "heuristic: final value below the tail threshold and not above the value at half length",
            }
        }
        VarianceCondition::SllnBounded { bound } => {
            let mut running = 0.0f64;
            let trajectory: Vec<f64> = rows
                .iter()
                .map(|row| {
                    running = running.max(row_max(row));
                    running
                })
                .collect();
            ConditionOutcome {
                satisfied: running <= bound,
                statistic: running,
                trajectory,
                note: "exact over the listed indices and grid directions",
            }
        }
        VarianceCondition::SllnLog2 { tail_threshold } => {
            let mut acc = Accumulator::default();
            let trajectory: Vec<f64> = rows
                .iter()
                .enumerate()
                .map(|(k, row)| {
                    let k = (k + 1) as f64;
                    let l = k.ln();
                    acc.add(row_max(row) * l * l / (k * k));
                    acc.value()
                })
                .collect();
            let increment = trajectory[n_max - 1] - if n_max >= 2 { trajectory[n_max / 2 - 1] } else { 0.0 };
            ConditionOutcome {
                satisfied: increment <= tail_threshold,
                statistic: increment,
                trajectory,
                note: "heuristic: partial-sum increment over the second half below the tail threshold",
            }
        }
    };
    Ok(outcome)
}
