use std::fmt::{self, Write as _};
use std::sync::Arc;

use statrs::distribution::{ContinuousCDF, Normal};

use super::covariance::{centered, centered_correlation, SupportCovMatrix};
use crate::convex_sets::{ConvexBody, DirectionGrid};
use crate::random_sets::{SeedSpec, SetSample};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Rejected,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "consistent",
            Verdict::Rejected => "rejected",
        })
    }
}

/// One `(k, l, direction)` test. Indices are zero-based.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationEntry {
    pub k: usize,
    pub l: usize,
    pub direction: usize,
    pub covariance: f64,
    pub correlation: f64,
    pub flagged: bool,
}

/// Outcome of testing pairwise uncorrelation of `s(u, V_k)` across replications.
#[derive(Clone, Debug, PartialEq)]
pub struct UncorrelationVerdict {
    pub max_abs_corr: f64,
    pub threshold: f64,
    pub significance: f64,
    pub replications: usize,
    /// Number of `(pair, direction)` tests in the Bonferroni correction.
    pub tests: usize,
    /// Largest `|corr|` over pairs, per grid direction.
    pub per_direction: Vec<f64>,
    pub entries: Vec<CorrelationEntry>,
    pub verdict: Verdict,
}

impl UncorrelationVerdict {
    fn from_entries(
        mut entries: Vec<CorrelationEntry>,
        directions: usize,
        threshold: f64,
        significance: f64,
        replications: usize,
    ) -> Self {
        let mut per_direction = vec![0.0f64; directions];
        for e in &mut entries {
            e.flagged = e.correlation.abs() > threshold;
            per_direction[e.direction] = per_direction[e.direction].max(e.correlation.abs());
        }
        let max_abs_corr = per_direction.iter().copied().fold(0.0, f64::max);
        Self {
            max_abs_corr,
            threshold,
            significance,
            replications,
            tests: entries.len(),
            per_direction,
            verdict: if max_abs_corr > threshold {
                Verdict::Rejected
            } else {
                Verdict::Consistent
            },
            entries,
        }
    }

    pub const CSV_HEADER: &'static str = "k,l,direction,covariance,correlation,threshold,flag";

    /// One row per `(k, l, direction)` with one-based `k` and `l`.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for e in &self.entries {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                e.k + 1,
                e.l + 1,
                e.direction,
                e.covariance,
                e.correlation,
                self.threshold,
                u8::from(e.flagged)
            )
            .expect("writing to a String");
        }
        out
    }
}

/// `z_{1 - alpha / (2 tests)} / sqrt(replications)`: the two-sided
/// Bonferroni-corrected cutoff for sample correlations under the null.
pub fn bonferroni_threshold(significance: f64, tests: usize, replications: usize) -> Result<f64> {
    if !(significance > 0.0 && significance < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "significance must lie in (0, 1), got {significance}"
        )));
    }
    let tests = tests.max(1) as f64;
    let z = Normal::standard().inverse_cdf(1.0 - significance / (2.0 * tests));
    Ok(z / (replications as f64).sqrt())
}

fn check_replications(replications: usize) -> Result<()> {
    if replications < 3 {
        return Err(Error::InsufficientSamples {
            what: "replications",
            needed: 3,
            got: replications,
        });
    }
    Ok(())
}

/// Tests whether `s(u, V_k)` and `s(u, V_l)` are uncorrelated for all `k != l`
/// and grid directions `u`, from independent replications of the whole
/// sequence. Exact in the direction set for `d = 1`; for `d >= 2` only a
/// necessary condition checked on the grid.
pub fn test_uncorrelated(
    replications: &[SetSample],
    grid: &Arc<DirectionGrid>,
    significance: f64,
) -> Result<UncorrelationVerdict> {
    check_replications(replications.len())?;
    let len = replications[0].len();
    if len < 2 {
        return Err(Error::InsufficientSamples {
            what: "sequence length",
            needed: 2,
            got: len,
        });
    }
    let m = SupportCovMatrix::from_replications(replications, grid)?;
    let tests = len * (len - 1) / 2 * grid.len();
    let threshold = bonferroni_threshold(significance, tests, replications.len())?;
    let mut entries = Vec::with_capacity(tests);
    for k in 0..len {
        for l in k + 1..len {
            let (cov, corr) = (m.covariance(k, l), m.correlation(k, l));
            for direction in 0..grid.len() {
                entries.push(CorrelationEntry {
                    k,
                    l,
                    direction,
                    covariance: cov[direction],
                    correlation: corr[direction],
                    flagged: false,
                });
            }
        }
    }
    Ok(UncorrelationVerdict::from_entries(
        entries,
        grid.len(),
        threshold,
        significance,
        replications.len(),
    ))
}

/// The two verdicts compared by [`test_interval_endpoint_reduction`]:
/// the set-level test on `{+1, -1}` and the direct test of the left-endpoint
/// and right-endpoint pairs, with the same threshold.
pub fn endpoint_reduction_verdicts(
    pairs: &[(ConvexBody, ConvexBody)],
    significance: f64,
) -> Result<(Verdict, Verdict)> {
    check_replications(pairs.len())?;
    let mut lo = (Vec::with_capacity(pairs.len()), Vec::with_capacity(pairs.len()));
    let mut hi = (Vec::with_capacity(pairs.len()), Vec::with_capacity(pairs.len()));
    for (f, g) in pairs {
        for b in [f, g] {
            if !matches!(b, ConvexBody::Interval(_)) {
                return Err(Error::NotAnInterval(b.kind().to_string()));
            }
        }
        let (f_lo, f_hi) = f.endpoints()?;
        let (g_lo, g_hi) = g.endpoints()?;
        lo.0.push(f_lo);
        lo.1.push(g_lo);
        hi.0.push(f_hi);
        hi.1.push(g_hi);
    }

    let grid = Arc::new(DirectionGrid::exact_1d());
    let replications = pairs
        .iter()
        .map(|(f, g)| SetSample::new(vec![f.clone(), g.clone()], SeedSpec::new(0), "pair"))
        .collect::<Result<Vec<_>>>()?;
    let set_level = test_uncorrelated(&replications, &grid, significance)?.verdict;

    let threshold = bonferroni_threshold(significance, 2, pairs.len())?;
    let rejected = [lo, hi].iter().any(|(f, g)| {
        let (_, corr) = centered_correlation(&centered(f), &centered(g));
        corr.abs() > threshold
    });
    let endpoint_level = if rejected {
        Verdict::Rejected
    } else {
        Verdict::Consistent
    };
    Ok((set_level, endpoint_level))
}

/// Whether the set-level and endpoint-level verdicts agree on replicated
/// interval pairs `(F, G)`. For intervals the support at `+1` is the right
/// endpoint and at `-1` the negated left endpoint, so the two tests coincide.
pub fn test_interval_endpoint_reduction(pairs: &[(ConvexBody, ConvexBody)], significance: f64) -> Result<bool> {
    let (set_level, endpoint_level) = endpoint_reduction_verdicts(pairs, significance)?;
    Ok(set_level == endpoint_level)
}
