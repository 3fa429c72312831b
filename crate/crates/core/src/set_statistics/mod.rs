//! Empirical statistics of set-valued samples: support covariances,
//! uncorrelation verdicts, Aumann means and the variance conditions of the
//! laws of large numbers.
//!
//! Reductions use compensated summation in a fixed order, so results do not
//! depend on thread count.

mod aumann;
mod covariance;
pub mod summation;
mod uncorrelation;
mod variance;

pub use aumann::{aumann_mean_estimate, aumann_mean_of};
pub use covariance::{empirical_support_covariance, SupportCovMatrix};
pub use uncorrelation::{
    bonferroni_threshold, endpoint_reduction_verdicts, test_interval_endpoint_reduction, test_uncorrelated,
    CorrelationEntry, UncorrelationVerdict, Verdict,
};
pub use variance::{
    evaluate_variance_condition, ConditionOutcome, ScheduleSource, VarianceCondition, VarianceSchedule,
};
