//! Seeded Monte Carlo experiments for the weak and strong laws of large
//! numbers of uncorrelated set-valued sequences.
//!
//! Almost-sure statements cannot be falsified by finite simulation, so the
//! strong-law run reports per-path threshold checks and the square-subsequence
//! diagnostics instead.

mod report;
mod slln;
mod wlln;

use crate::convex_sets::DirectionGrid;
use crate::random_sets::FamilySpec;

pub use report::{
    bound_ok, compare_bound, BoundCheck, ConvergenceReport, ConvergenceRow, PathVerdict, ReportDetail, ReportMetadata,
    SllnRecord, WllnRecord,
};
pub use slln::{default_checkpoints, run_slln, SllnConfig};
pub use wlln::{run_wlln, WllnConfig};

fn family_notes(family: &FamilySpec, grid: &DirectionGrid) -> Vec<String> {
    let mut notes = Vec::new();
    match family {
        FamilySpec::EllipsoidIntervals { block: None, .. } => {
            notes.push("semi-axes regenerated per n as min(a_i, sqrt(n))".to_string());
        }
        FamilySpec::EllipsoidIntervals { block: Some(b), .. } => notes.push(format!(
            "independent {b}-dimensional ellipsoid blocks concatenated, semi-axes min(a_i, sqrt({b}))"
        )),
        _ => {}
    }
    if !family.is_uncorrelated() {
        notes.push("family is correlated: the analytic bound assumes uncorrelation and need not hold".to_string());
    }
    if grid.dim() >= 2 {
        notes.push(format!("d_H is the lower bound over {} grid directions", grid.len()));
    }
    notes
}
