use std::fmt::Write as _;

use crate::{Error, Result};

/// Run-level facts recorded with every report.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportMetadata {
    /// `"wlln"` or `"slln"`.
    pub kind: &'static str,
    pub master_seed: u64,
    pub stream_index: u64,
    pub grid_description: String,
    pub grid_size: usize,
    pub family: String,
    /// Replications (weak law) or paths (strong law).
    pub replications: usize,
    pub notes: Vec<String>,
}

/// Per-`n` summary. For the strong law the statistic is `S_n / n` across
/// paths and the exceedance is relative to the path threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub mean: f64,
    pub max: f64,
    pub exceedance: f64,
    pub exceedance_count: usize,
    pub bound: Option<f64>,
    pub bound_ok: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WllnRecord {
    pub n: usize,
    pub replication: usize,
    pub d_h: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SllnRecord {
    pub path: usize,
    pub n: usize,
    pub s_n_over_n: f64,
    pub is_square: bool,
    /// `max_{m^2 < k < (m+1)^2} |S_k - S_{m^2}| / m^2` on square checkpoints.
    pub interblock_max: Option<f64>,
}

/// Per-path outcome of the strong-law checks.
#[derive(Clone, Debug, PartialEq)]
pub struct PathVerdict {
    pub path: usize,
    /// `S_n / n` at the last checkpoint.
    pub final_value: f64,
    /// Largest square `m^2` among the checkpoints.
    pub final_square: usize,
    /// `S_{m^2} / m^2` at `final_square`.
    pub final_square_value: f64,
    /// Interblock maximum at `final_square`.
    pub final_interblock: f64,
    /// Median of the last window of checkpoint values is at most the median
    /// of the first window.
    pub window_decreasing: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ReportDetail {
    Wlln {
        epsilon: f64,
        records: Vec<WllnRecord>,
    },
    Slln {
        threshold: f64,
        records: Vec<SllnRecord>,
        paths: Vec<PathVerdict>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub metadata: ReportMetadata,
    /// Sorted by `n`.
    pub rows: Vec<ConvergenceRow>,
    pub detail: ReportDetail,
}

/// Empirical exceedance frequency against an analytic bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundCheck {
    pub n: usize,
    pub empirical: f64,
    pub bound: f64,
    pub ok: bool,
}

/// `empirical <= min(1, bound) + 3 sqrt(b (1 - b) / R)` with `b = min(1, bound)`.
pub fn bound_ok(empirical: f64, bound: f64, replications: usize) -> bool {
    let b = bound.min(1.0);
    empirical <= b + 3.0 * (b * (1.0 - b) / replications as f64).sqrt()
}

/// Checks every row of a weak-law report against its analytic bound.
pub fn compare_bound(report: &ConvergenceReport) -> Result<Vec<BoundCheck>> {
    report
        .rows
        .iter()
        .map(|row| {
            let bound = row.bound.ok_or(Error::MissingBound)?;
            Ok(BoundCheck {
                n: row.n,
                empirical: row.exceedance,
                bound,
                ok: bound_ok(row.exceedance, bound, report.metadata.replications),
            })
        })
        .collect()
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

impl ConvergenceReport {
    pub const WLLN_HEADER: &'static str = "n,replication,d_h,epsilon,exceeded,bound";
    pub const SLLN_HEADER: &'static str = "path,n,s_n_over_n,is_square_checkpoint,interblock_max";
    pub const SUMMARY_HEADER: &'static str = "n,mean,max,exceedance,exceedance_count,bound,bound_ok";
    pub const PATHS_HEADER: &'static str =
        "path,final_value,final_square,final_square_value,final_interblock,window_decreasing,passed";

    /// Whether every row is within its bound (weak law) or every path passed
    /// (strong law).
    pub fn passed(&self) -> bool {
        match &self.detail {
            ReportDetail::Wlln { .. } => self.rows.iter().all(|r| r.bound_ok != Some(false)),
            ReportDetail::Slln { paths, .. } => paths.iter().all(|p| p.passed),
        }
    }

    /// One row per replication (weak law) or per path and checkpoint (strong law).
    pub fn records_csv(&self) -> String {
        let mut out = String::new();
        match &self.detail {
            ReportDetail::Wlln { epsilon, records } => {
                writeln!(out, "{}", Self::WLLN_HEADER).expect("writing to a String");
                let mut rows = self.rows.iter().peekable();
                for r in records {
                    while rows.peek().is_some_and(|row| row.n < r.n) {
                        rows.next();
                    }
                    let bound = rows.peek().filter(|row| row.n == r.n).and_then(|row| row.bound);
                    writeln!(
                        out,
                        "{},{},{},{epsilon},{},{}",
                        r.n,
                        r.replication,
                        r.d_h,
                        u8::from(r.d_h > *epsilon),
                        opt(bound)
                    )
                    .expect("writing to a String");
                }
            }
            ReportDetail::Slln { records, .. } => {
                writeln!(out, "{}", Self::SLLN_HEADER).expect("writing to a String");
                for r in records {
                    writeln!(
                        out,
                        "{},{},{},{},{}",
                        r.path,
                        r.n,
                        r.s_n_over_n,
                        u8::from(r.is_square),
                        opt(r.interblock_max)
                    )
                    .expect("writing to a String");
                }
            }
        }
        out
    }

    /// One row per `n`.
    pub fn summary_csv(&self) -> String {
        let mut out = format!("{}\n", Self::SUMMARY_HEADER);
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.n,
                r.mean,
                r.max,
                r.exceedance,
                r.exceedance_count,
                opt(r.bound),
                opt(r.bound_ok.map(u8::from))
            )
            .expect("writing to a String");
        }
        out
    }

    /// Strong-law path verdicts; `None` for a weak-law report.
    pub fn paths_csv(&self) -> Option<String> {
        let ReportDetail::Slln { paths, .. } = &self.detail else {
            return None;
        };
        let mut out = format!("{}\n", Self::PATHS_HEADER);
        for p in paths {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                p.path,
                p.final_value,
                p.final_square,
                p.final_square_value,
                p.final_interblock,
                u8::from(p.window_decreasing),
                u8::from(p.passed)
            )
            .expect("writing to a String");
        }
        Some(out)
    }

    /// Two-column `n,value` series, one block per curve, each headed by
    /// `# curve <name>`.
    pub fn plot_data(&self) -> String {
        let mut curves: Vec<(&str, Vec<(usize, f64)>)> = vec![
            ("mean", self.rows.iter().map(|r| (r.n, r.mean)).collect()),
            ("max", self.rows.iter().map(|r| (r.n, r.max)).collect()),
            ("exceedance", self.rows.iter().map(|r| (r.n, r.exceedance)).collect()),
        ];
        let bounds: Vec<(usize, f64)> = self.rows.iter().filter_map(|r| r.bound.map(|b| (r.n, b))).collect();
        if !bounds.is_empty() {
            curves.push(("bound", bounds));
        }
        if let ReportDetail::Slln { records, .. } = &self.detail {
            let squares = |f: fn(&SllnRecord) -> Option<f64>| -> Vec<(usize, f64)> {
                let mut by_n: Vec<(usize, f64)> = Vec::new();
                for r in records.iter().filter(|r| r.is_square) {
                    if let Some(v) = f(r) {
                        match by_n.iter_mut().find(|(n, _)| *n == r.n) {
                            Some(slot) => slot.1 = slot.1.max(v),
                            None => by_n.push((r.n, v)),
                        }
                    }
                }
                by_n.sort_by_key(|(n, _)| *n);
                by_n
            };
            curves.push(("max_square_subsequence", squares(|r| Some(r.s_n_over_n))));
            curves.push(("max_interblock", squares(|r| r.interblock_max)));
        }
        let mut out = String::new();
        for (name, points) in curves {
            writeln!(out, "# curve {name}\nn,value").expect("writing to a String");
            for (n, v) in points {
                writeln!(out, "{n},{v}").expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }
}
