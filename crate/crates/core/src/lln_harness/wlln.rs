use std::sync::Arc;

use rayon::prelude::*;

use super::family_notes;
use super::report::{bound_ok, ConvergenceReport, ConvergenceRow, ReportDetail, ReportMetadata, WllnRecord};
use crate::convex_sets::{default_grid, DirectionGrid};
use crate::random_sets::{BoundForm, FamilySpec, SeedSpec};
use crate::set_statistics::summation::sum;
use crate::set_statistics::{aumann_mean_of, evaluate_variance_condition, VarianceCondition, VarianceSchedule};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct WllnConfig {
    pub family: FamilySpec,
    /// Strictly increasing sequence lengths.
    pub n_grid: Vec<usize>,
    pub epsilon: f64,
    pub replications: usize,
    pub grid: Arc<DirectionGrid>,
    pub seed: SeedSpec,
    /// Tail threshold of the variance precondition.
    pub tail_threshold: f64,
}

impl WllnConfig {
    pub const MIN_REPLICATIONS: usize = 100;

    /// Config on the default grid for the family's dimension.
    pub fn new(
        family: FamilySpec,
        n_grid: Vec<usize>,
        epsilon: f64,
        replications: usize,
        seed: SeedSpec,
    ) -> Result<Self> {
        let grid = Arc::new(default_grid(family.dim())?);
        let config = Self {
            family,
            n_grid,
            epsilon,
            replications,
            grid,
            seed,
            tail_threshold: VarianceCondition::DEFAULT_EQ4_TAIL,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        if self.n_grid.is_empty() || self.n_grid[0] == 0 || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "n_grid must be a nonempty, strictly increasing list of positive lengths".into(),
            ));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.replications < Self::MIN_REPLICATIONS {
            return Err(Error::InsufficientSamples {
                what: "replications",
                needed: Self::MIN_REPLICATIONS,
                got: self.replications,
            });
        }
        if self.grid.dim() != self.family.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.family.dim(),
                found: self.grid.dim(),
            });
        }
        Ok(())
    }
}

/// Chebyshev bound on `P{D_n > eps}` from the analytic variances.
pub(crate) fn chebyshev_bound(family: &FamilySpec, schedule: &VarianceSchedule, n: usize, epsilon: f64) -> f64 {
    let totals = schedule.direction_totals(n);
    let scale = (epsilon * n as f64).powi(2);
    match family.bound_form() {
        BoundForm::DoubledUpperVariance => {
            // the +1 direction carries Var(Y_k); the -1 support is identically 0
            let upper = schedule
                .grid()
                .iter()
                .position(|u| u[0] > 0.0)
                .map_or(0.0, |i| totals[i]);
            2.0 * upper / scale
        }
        BoundForm::SupportSum => sum(totals) / scale,
    }
}

/// Weak-law experiment: for every `n`, `R` replications of
/// `D_n = d_H((1/n) sum V_k, (1/n) sum E[V_k])` and the frequency of `D_n > eps`.
///
/// Replication `r` at length `n` uses stream `seed.child(n).child(r)`, so the
/// report does not depend on the number of worker threads.
pub fn run_wlln(config: &WllnConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    let family = &config.family;
    let n_last = *config.n_grid.last().expect("validated nonempty");
    let last_schedule = family.support_variances(n_last, &config.grid)?;
    let condition = VarianceCondition::WllnEq4 {
        tail_threshold: config.tail_threshold,
    };
    let outcome = evaluate_variance_condition(&last_schedule, condition)?;
    if !outcome.satisfied {
        return Err(Error::ConditionViolated(format!(
            "wlln_eq4: max_u (1/n^2) sum Var = {} at n = {n_last} (tail threshold {})",
            outcome.statistic, config.tail_threshold
        )));
    }

    let mut rows = Vec::with_capacity(config.n_grid.len());
    let mut records = Vec::with_capacity(config.n_grid.len() * config.replications);
    for &n in &config.n_grid {
        let expected = aumann_mean_of(&family.expectations(n)?, &config.grid)?;
        let stream = config.seed.child(n as u64);
        let distances = (0..config.replications)
            .into_par_iter()
            .map(|r| {
                let bodies = family.draw_bodies(n, stream.child(r as u64))?;
                aumann_mean_of(&bodies, &config.grid)?.hausdorff_distance(&expected, &config.grid)
            })
            .collect::<Result<Vec<f64>>>()?;

        let schedule = if n == n_last {
            last_schedule.clone()
        } else {
            family.support_variances(n, &config.grid)?
        };
        let bound = chebyshev_bound(family, &schedule, n, config.epsilon);
        let exceedance_count = distances.iter().filter(|&&d| d > config.epsilon).count();
        let exceedance = exceedance_count as f64 / config.replications as f64;
        rows.push(ConvergenceRow {
            n,
            mean: sum(distances.iter().copied()) / config.replications as f64,
            max: distances.iter().copied().fold(0.0, f64::max),
            exceedance,
            exceedance_count,
            bound: Some(bound),
            bound_ok: Some(bound_ok(exceedance, bound, config.replications)),
        });
        records.extend(
            distances
                .into_iter()
                .enumerate()
                .map(|(replication, d_h)| WllnRecord { n, replication, d_h }),
        );
    }

    let mut notes = family_notes(family, &config.grid);
    notes.push(format!(
        "variance precondition wlln_eq4 at n = {n_last}: {} ({})",
        outcome.statistic, outcome.note
    ));
    Ok(ConvergenceReport {
        metadata: ReportMetadata {
            kind: "wlln",
            master_seed: config.seed.master_seed,
            stream_index: config.seed.stream_index,
            grid_description: config.grid.description().to_string(),
            grid_size: config.grid.len(),
            family: family.describe(),
            replications: config.replications,
            notes,
        },
        rows,
        detail: ReportDetail::Wlln {
            epsilon: config.epsilon,
            records,
        },
    })
}
