//! Runs a [`RunConfig`] and writes its outputs.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use setlaw_core::convex_sets::{default_grid, make_direction_grid, ConvexBody, DirectionGrid, GridScheme};
use setlaw_core::lln_harness::{
    default_checkpoints, run_slln, run_wlln, ConvergenceReport, ReportDetail, SllnConfig, WllnConfig,
};
use setlaw_core::random_sets::{AxisSchedule, FamilySpec, ScalarProcess, SeedSpec, SetSample};
use setlaw_core::set_statistics::{evaluate_variance_condition, test_uncorrelated, VarianceCondition, Verdict};
use sha2::{Digest, Sha256};

use crate::config::{Command, RunConfig};

/// What a run produced.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    /// Files written, relative to the output directory.
    pub files: Vec<String>,
    /// Text for standard output.
    pub stdout: String,
    /// One-line reason when an acceptance flag failed.
    pub failure: Option<String>,
}

const FAMILY_KEYS: [&str; 7] = ["axes", "block", "template", "process", "rho", "body", "family"];

fn family_from(config: &RunConfig) -> Result<FamilySpec> {
    let family = config.text("family").unwrap_or("ellipsoid_intervals");
    let axes = || match config.float_list("axes") {
        None => AxisSchedule::Constant(1.0),
        Some([a]) => AxisSchedule::Constant(*a),
        Some(list) => AxisSchedule::Cycle(list.to_vec()),
    };
    let block = config.uint("block").map(|b| b as usize);
    let parse_body = |key: &str, default: Option<&str>| -> Result<ConvexBody> {
        let text = config
            .text(key)
            .or(default)
            .ok_or_else(|| anyhow!("missing required key `{key}`"))?;
        text.parse::<ConvexBody>().with_context(|| format!("parsing `{key}`"))
    };
    let (spec, used): (FamilySpec, &[&str]) = match family {
        "ellipsoid_intervals" => (FamilySpec::ellipsoid_intervals(axes(), block), &["axes", "block"]),
        "scaled" => {
            let template = parse_body("template", Some("interval 0 1"))?;
            let process = config.text("process").unwrap_or("iid_uniform");
            let (process, used): (ScalarProcess, &[&str]) = match process {
                "iid_uniform" => (ScalarProcess::IidUniform, &["template", "process"]),
                "uncorrelated_ellipsoid" => (
                    ScalarProcess::UncorrelatedEllipsoid { axes: axes(), block },
                    &["template", "process", "axes", "block"],
                ),
                "ar1" => {
                    let rho = config
                        .float("rho")
                        .ok_or_else(|| anyhow!("missing required key `rho`"))?;
                    (ScalarProcess::CorrelatedAr1 { rho }, &["template", "process", "rho"])
                }
                other => bail!("unknown process `{other}` (expected iid_uniform, uncorrelated_ellipsoid or ar1)"),
            };
            (FamilySpec::Scaled { template, process }, used)
        }
        "constant" => (
            FamilySpec::Constant {
                body: parse_body("body", None)?,
            },
            &["body"],
        ),
        other => bail!("unknown family `{other}` (expected ellipsoid_intervals, scaled or constant)"),
    };
    if let Some(k) = FAMILY_KEYS
        .iter()
        .find(|k| **k != "family" && config.params.contains_key(**k) && !used.contains(k))
    {
        bail!("key `{k}` does not apply to family {family}");
    }
    spec.validate()?;
    Ok(spec)
}

fn grid_from(config: &RunConfig, dim: usize) -> Result<Arc<DirectionGrid>> {
    let count = config.uint("grid_count").map(|c| c as usize);
    let scheme = match config.text("grid").unwrap_or("default") {
        "default" => {
            if count.is_some() || config.uint("grid_seed").is_some() {
                bail!("`grid_count` and `grid_seed` need an explicit `grid` scheme");
            }
            return Ok(Arc::new(default_grid(dim)?));
        }
        "exact1d" => GridScheme::Exact1d,
        "uniform_angles_2d" => GridScheme::UniformAngles2d,
        "fibonacci_3d" => GridScheme::Fibonacci3d,
        "seeded_random" => GridScheme::SeededRandom {
            seed: config.uint("grid_seed").unwrap_or(0),
        },
        other => bail!(
            "unknown grid `{other}` (expected default, exact1d, uniform_angles_2d, fibonacci_3d or seeded_random)"
        ),
    };
    let count = match (scheme, count) {
        (_, Some(c)) => c,
        (GridScheme::Exact1d, None) => 2,
        (_, None) => default_grid(dim)?.len(),
    };
    Ok(Arc::new(make_direction_grid(dim, count, scheme)?))
}

fn condition_from(config: &RunConfig, name: &str) -> Result<VarianceCondition> {
    Ok(match name {
        "wlln_eq4" => VarianceCondition::WllnEq4 {
            tail_threshold: config
                .float("tail_threshold")
                .unwrap_or(VarianceCondition::DEFAULT_EQ4_TAIL),
        },
        "slln_bounded" => VarianceCondition::SllnBounded {
            bound: config.float("variance_bound").unwrap_or(1.0),
        },
        "slln_log2" => VarianceCondition::SllnLog2 {
            tail_threshold: config
                .float("tail_threshold")
                .unwrap_or(VarianceCondition::DEFAULT_LOG2_TAIL),
        },
        other => bail!("unknown condition `{other}` (expected wlln_eq4, slln_bounded or slln_log2)"),
    })
}

struct Run {
    files: Vec<(String, String)>,
    stdout: String,
    failure: Option<String>,
    family: Option<String>,
    grid: Option<Arc<DirectionGrid>>,
    notes: Vec<String>,
}

impl Run {
    fn new() -> Self {
        Self {
            files: Vec::new(),
            stdout: String::new(),
            failure: None,
            family: None,
            grid: None,
            notes: Vec::new(),
        }
    }

    fn file(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    fn report(&mut self, prefix: &str, report: &ConvergenceReport) {
        self.file(&format!("{prefix}.csv"), report.records_csv());
        self.file(&format!("{prefix}_summary.csv"), report.summary_csv());
        if let Some(paths) = report.paths_csv() {
            self.file(&format!("{prefix}_paths.csv"), paths);
        }
        self.file(&format!("{prefix}_plot.dat"), report.plot_data());
        self.notes.extend(report.metadata.notes.iter().cloned());
    }
}

fn seed_of(config: &RunConfig) -> SeedSpec {
    SeedSpec::new(config.master_seed)
}

fn run_sample(config: &RunConfig, run: &mut Run) -> Result<()> {
    let family = family_from(config)?;
    let sample = family.draw(config.required_uint("count") as usize, seed_of(config))?;
    run.file("sample.txt", sample.to_text());
    run.family = Some(family.describe());
    Ok(())
}

fn run_hausdorff(config: &RunConfig, run: &mut Run) -> Result<()> {
    let parse = |key: &str| -> Result<ConvexBody> {
        config
            .text(key)
            .expect("validated as required")
            .parse()
            .with_context(|| format!("parsing `{key}`"))
    };
    let (a, b) = (parse("a")?, parse("b")?);
    let grid = grid_from(config, a.dim())?;
    let d = a.hausdorff_distance(&b, &grid)?;
    writeln!(run.stdout, "{d}").expect("writing to a String");
    Ok(())
}

fn run_test_uncorr(config: &RunConfig, run: &mut Run) -> Result<()> {
    let family = family_from(config)?;
    let grid = grid_from(config, family.dim())?;
    let len = config.required_uint("length") as usize;
    let r = config.required_uint("replications") as usize;
    let significance = config.float("significance").unwrap_or(0.05);
    let seed = seed_of(config);
    let replications = {
        use rayon::prelude::*;
        (0..r)
            .into_par_iter()
            .map(|i| family.draw(len, seed.child(i as u64)))
            .collect::<setlaw_core::Result<Vec<SetSample>>>()?
    };
    let verdict = test_uncorrelated(&replications, &grid, significance)?;
    run.file("uncorrelation.csv", verdict.to_csv());
    let mut summary = String::from("max_abs_corr,threshold,significance,replications,tests,verdict\n");
    writeln!(
        summary,
        "{},{},{},{},{},{}",
        verdict.max_abs_corr,
        verdict.threshold,
        verdict.significance,
        verdict.replications,
        verdict.tests,
        verdict.verdict
    )
    .expect("writing to a String");
    run.file("uncorrelation_summary.csv", summary);
    writeln!(
        run.stdout,
        "{}: max |corr| {} against threshold {}",
        verdict.verdict, verdict.max_abs_corr, verdict.threshold
    )
    .expect("writing to a String");
    let expected = if family.is_uncorrelated() {
        Verdict::Consistent
    } else {
        Verdict::Rejected
    };
    if verdict.verdict != expected {
        run.failure = Some(format!(
            "uncorrelation verdict {} for a family constructed to be {}",
            verdict.verdict,
            if family.is_uncorrelated() {
                "uncorrelated"
            } else {
                "correlated"
            }
        ));
    }
    if grid.dim() >= 2 {
        run.notes
            .push("uncorrelation checked on grid directions only (necessary condition)".to_string());
    }
    run.family = Some(family.describe());
    run.grid = Some(grid);
    Ok(())
}

fn run_wlln_command(config: &RunConfig, run: &mut Run) -> Result<()> {
    let family = family_from(config)?;
    let grid = grid_from(config, family.dim())?;
    let n_grid = config
        .uint_list("n_grid")
        .expect("validated as required")
        .iter()
        .map(|&n| n as usize)
        .collect();
    let mut wcfg = WllnConfig::new(
        family.clone(),
        n_grid,
        config.float("epsilon").expect("validated as required"),
        config.required_uint("replications") as usize,
        seed_of(config),
    )?;
    wcfg.grid = Arc::clone(&grid);
    if let Some(t) = config.float("tail_threshold") {
        wcfg.tail_threshold = t;
    }
    let report = run_wlln(&wcfg)?;
    run.report("wlln", &report);
    if let Some(row) = report.rows.iter().find(|r| r.bound_ok == Some(false)) {
        run.failure = Some(format!(
            "exceedance {} above bound {} at n = {}",
            row.exceedance,
            row.bound.unwrap_or(f64::NAN),
            row.n
        ));
    }
    writeln!(
        run.stdout,
        "wlln: {} rows, bound {}",
        report.rows.len(),
        if report.passed() { "held" } else { "exceeded" }
    )
    .expect("writing to a String");
    run.family = Some(family.describe());
    run.grid = Some(grid);
    Ok(())
}

fn run_slln_command(config: &RunConfig, run: &mut Run) -> Result<()> {
    let mut family = family_from(config)?;
    if let FamilySpec::EllipsoidIntervals {
        block: block @ None, ..
    } = &mut family
    {
        *block = Some(10);
    }
    let grid = grid_from(config, family.dim())?;
    let max_n = config.required_uint("max_n") as usize;
    let mut scfg = SllnConfig {
        checkpoints: config.uint_list("checkpoints").map_or_else(
            || default_checkpoints(max_n),
            |c| c.iter().map(|&n| n as usize).collect(),
        ),
        family: family.clone(),
        max_n,
        paths: config.required_uint("paths") as usize,
        grid: Arc::clone(&grid),
        seed: seed_of(config),
        threshold: config.float("threshold").unwrap_or(SllnConfig::DEFAULT_THRESHOLD),
        window: config.uint("window").map_or(SllnConfig::DEFAULT_WINDOW, |w| w as usize),
        condition: VarianceCondition::SllnBounded { bound: 1.0 },
    };
    scfg.condition = condition_from(config, config.text("condition").unwrap_or("slln_bounded"))?;
    let report = run_slln(&scfg)?;
    run.report("slln", &report);
    if let ReportDetail::Slln { paths, .. } = &report.detail {
        if let Some(p) = paths.iter().find(|p| !p.passed) {
            run.failure = Some(format!(
                "path {} failed: S_n/n = {} at n = {} (threshold {}), windowed median decreasing: {}",
                p.path, p.final_value, max_n, scfg.threshold, p.window_decreasing
            ));
        }
        let passed = paths.iter().filter(|p| p.passed).count();
        writeln!(run.stdout, "slln: {passed} of {} paths passed", paths.len()).expect("writing to a String");
    }
    run.family = Some(family.describe());
    run.grid = Some(grid);
    Ok(())
}

fn run_check_cond(config: &RunConfig, run: &mut Run) -> Result<()> {
    let family = family_from(config)?;
    let grid = grid_from(config, family.dim())?;
    let len = config.required_uint("length") as usize;
    let condition = condition_from(config, config.text("condition").expect("validated as required"))?;
    let schedule = family.support_variances(len, &grid)?;
    let outcome = evaluate_variance_condition(&schedule, condition)?;
    run.file("variance_schedule.csv", schedule.to_csv());
    run.file(
        "condition.csv",
        format!(
            "condition,satisfied,statistic\n{},{},{}\n",
            condition.name(),
            u8::from(outcome.satisfied),
            outcome.statistic
        ),
    );
    let mut trajectory = String::from("n,value\n");
    for (i, v) in outcome.trajectory.iter().enumerate() {
        writeln!(trajectory, "{},{v}", i + 1).expect("writing to a String");
    }
    run.file("condition_trajectory.csv", trajectory);
    writeln!(
        run.stdout,
        "{}: {} (statistic {})",
        condition.name(),
        if outcome.satisfied {
            "satisfied"
        } else {
            "not satisfied"
        },
        outcome.statistic
    )
    .expect("writing to a String");
    if !outcome.satisfied {
        run.failure = Some(format!(
            "{} not satisfied: statistic {}",
            condition.name(),
            outcome.statistic
        ));
    }
    run.notes.push(outcome.note.to_string());
    run.family = Some(family.describe());
    run.grid = Some(grid);
    Ok(())
}

fn manifest(config: &RunConfig, run: &Run) -> String {
    let digest = Sha256::digest(config.render_without_output_dir().as_bytes());
    let hash: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    let mut out = String::new();
    let mut line = |k: &str, v: &dyn std::fmt::Display| writeln!(out, "{k} = {v}").expect("writing to a String");
    line("command", &config.command);
    line("config_sha256", &hash);
    line("master_seed", &config.master_seed);
    if let Some(g) = &run.grid {
        line("grid", &g.description());
        line("grid_size", &g.len());
    }
    if let Some(f) = &run.family {
        line("family", f);
    }
    line("version", &env!("CARGO_PKG_VERSION"));
    let files: Vec<&str> = run.files.iter().map(|(n, _)| n.as_str()).collect();
    line("files", &files.join(","));
    for n in &run.notes {
        line("note", n);
    }
    out
}

/// Runs `config`, writing its files and a `manifest` into the output
/// directory. `hausdorff` only prints the distance.
pub fn dispatch(config: &RunConfig) -> Result<Outcome> {
    let mut run = Run::new();
    match config.command {
        Command::Sample => run_sample(config, &mut run)?,
        Command::Hausdorff => run_hausdorff(config, &mut run)?,
        Command::TestUncorr => run_test_uncorr(config, &mut run)?,
        Command::Wlln => run_wlln_command(config, &mut run)?,
        Command::Slln => run_slln_command(config, &mut run)?,
        Command::CheckCond => run_check_cond(config, &mut run)?,
    }
    if config.command != Command::Hausdorff {
        let manifest = manifest(config, &run);
        run.file("manifest", manifest);
        let dir: &PathBuf = &config.output_dir;
        fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        for (name, contents) in &run.files {
            let path = dir.join(name);
            fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(Outcome {
        files: run.files.into_iter().map(|(n, _)| n).collect(),
        stdout: run.stdout,
        failure: run.failure,
    })
}
