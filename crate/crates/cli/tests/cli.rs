use std::fs;
use std::path::Path;
use std::process::{Command as Process, Output};

use proptest::prelude::*;
use setlaw_cli::{dispatch, Command, Overrides, RunConfig, Value};

fn setlaw(config: &str, dir: &Path, extra: &[&str]) -> Output {
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, config).unwrap();
    Process::new(env!("CARGO_BIN_EXE_setlaw"))
        .arg("--config")
        .arg(&cfg)
        .args(extra)
        .env_remove("SETLAW_THREADS")
        .output()
        .unwrap()
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

const WLLN: &str = "command = wlln\nn_grid = 10,100\nepsilon = 0.5\nreplications = 200\nseed = 42\n";

#[test]
fn hausdorff_of_disjoint_intervals_prints_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = setlaw(
        "command = hausdorff\na = interval 0 1\nb = interval 2 3\n",
        tmp.path(),
        &[],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "2\n");
    assert_eq!(read_all(tmp.path()).len(), 1, "hausdorff writes no files");
}

#[test]
fn repeated_runs_write_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let out = setlaw(WLLN, tmp.path(), &["--out", dir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (fa, fb) = (read_all(&a), read_all(&b));
    assert_eq!(
        fa.iter().map(|f| f.0.as_str()).collect::<Vec<_>>(),
        ["manifest", "wlln.csv", "wlln_plot.dat", "wlln_summary.csv"]
    );
    assert_eq!(fa, fb);
}

#[test]
fn in_process_dispatch_matches_the_binary() {
    let tmp = tempfile::tempdir().unwrap();
    let config = "command = slln\nmax_n = 200\npaths = 4\nseed = 5\n";
    let inproc = tmp.path().join("inproc");
    let parsed = RunConfig::parse_with(
        config,
        &Overrides {
            seed: None,
            output_dir: Some(inproc.clone()),
        },
    )
    .unwrap();
    let outcome = dispatch(&parsed).unwrap();
    assert_eq!(outcome.failure, None);
    let binary = tmp.path().join("binary");
    let out = setlaw(
        config,
        tmp.path(),
        &["--out", binary.to_str().unwrap(), "--threads", "3"],
    );
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), outcome.stdout);
    assert_eq!(read_all(&inproc), read_all(&binary));
}

#[test]
fn seed_override_changes_outputs_but_not_the_schema() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    setlaw(WLLN, tmp.path(), &["--out", a.to_str().unwrap()]);
    setlaw(WLLN, tmp.path(), &["--out", b.to_str().unwrap(), "--seed", "43"]);
    let (fa, fb) = (read_all(&a), read_all(&b));
    let csv_a = &fa.iter().find(|f| f.0 == "wlln.csv").unwrap().1;
    let csv_b = &fb.iter().find(|f| f.0 == "wlln.csv").unwrap().1;
    assert_ne!(csv_a, csv_b);
    assert_eq!(csv_a.split(|c| *c == b'\n').next(), csv_b.split(|c| *c == b'\n').next());
    let manifest = String::from_utf8(fb.iter().find(|f| f.0 == "manifest").unwrap().1.clone()).unwrap();
    assert!(manifest.contains("master_seed = 43"));
}

#[test]
fn strict_mode_exits_two_on_a_failed_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let config = "command = check-cond\nlength = 50\ncondition = slln_bounded\nvariance_bound = 0.001\n";
    let out = setlaw(
        config,
        tmp.path(),
        &["--out", tmp.path().join("o").to_str().unwrap(), "--strict"],
    );
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().count(), 1, "{stderr}");
    assert!(stderr.contains("slln_bounded"));
    let out = setlaw(config, tmp.path(), &["--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn correlated_family_is_rejected_without_a_failure_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let config = "command = test-uncorr\nfamily = scaled\nprocess = ar1\nrho = 0.8\nlength = 4\nreplications = 400\n";
    let out = setlaw(
        config,
        tmp.path(),
        &["--out", tmp.path().join("o").to_str().unwrap(), "--strict"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("rejected"));
}

#[test]
fn errors_exit_one_and_name_the_problem() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("command = wlln\nepsilon = 0.5\nreplications = 100\n", "n_grid"),
        ("command = wlln\nn_grid = 10\nepsilon = 0.5\nreplications = 100\ncolour = red\n", "colour"),
        ("command = wlln\nn_grid = 10\nepsilon = 0.5\nreplications = 99\n", "replications"),
        ("command = sample\ncount = 3\nrho = 0.5\n", "rho"),
        ("command = sample\ncount = 3\nfamily = scaled\nprocess = ar1\n", "rho"),
        ("command = hausdorff\na = interval 0 1\nb = box 2 0 0 1 1\n", "dimension"),
        ("command = slln\nmax_n = 100\npaths = 2\ngrid = seeded_random\n", "dimension 1"),
        (
            "command = test-uncorr\nlength = 3\nreplications = 10\nfamily = scaled\ntemplate = box 2 0 0 1 1\ngrid = uniform_angles_2d\ngrid_count = 7\n",
            "even",
        ),
    ];
    for (config, needle) in cases {
        let out = setlaw(config, tmp.path(), &["--out", tmp.path().join("o").to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1), "{config}");
        let stderr = String::from_utf8(out.stderr).unwrap();
        assert!(stderr.to_lowercase().contains(needle), "{config}: {stderr}");
    }
}

#[test]
fn unwritable_output_directory_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = setlaw(WLLN, tmp.path(), &["--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn every_command_writes_its_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        (
            "command = sample\ncount = 5\naxes = 1,2\n",
            vec!["manifest", "sample.txt"],
        ),
        (
            "command = test-uncorr\nlength = 3\nreplications = 50\n",
            vec!["manifest", "uncorrelation.csv", "uncorrelation_summary.csv"],
        ),
        (
            "command = slln\nmax_n = 100\npaths = 2\n",
            vec![
                "manifest",
                "slln.csv",
                "slln_paths.csv",
                "slln_plot.dat",
                "slln_summary.csv",
            ],
        ),
        (
            "command = check-cond\nlength = 20\ncondition = slln_log2\n",
            vec![
                "condition.csv",
                "condition_trajectory.csv",
                "manifest",
                "variance_schedule.csv",
            ],
        ),
    ];
    for (i, (config, files)) in cases.into_iter().enumerate() {
        let dir = tmp.path().join(i.to_string());
        let out = setlaw(config, tmp.path(), &["--out", dir.to_str().unwrap()]);
        assert!(
            out.status.success(),
            "{config}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let names: Vec<String> = read_all(&dir).into_iter().map(|f| f.0).collect();
        assert_eq!(names, files, "{config}");
    }
}

#[test]
fn sample_file_parses_back() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("o");
    setlaw(
        "command = sample\ncount = 6\nseed = 11\n",
        tmp.path(),
        &["--out", dir.to_str().unwrap()],
    );
    let text = fs::read_to_string(dir.join("sample.txt")).unwrap();
    let sample = setlaw_core::random_sets::SetSample::from_text(&text).unwrap();
    assert_eq!(sample.len(), 6);
    assert_eq!(sample.seed().master_seed, 11);
}

fn wlln_config() -> impl Strategy<Value = RunConfig> {
    (
        prop::collection::btree_set(1u64..5000, 1..6),
        0.001f64..10.0,
        100u64..100_000,
        any::<u64>(),
        prop::option::of(0.0001f64..1.0),
        prop::collection::vec(0.01f64..100.0, 1..4),
    )
        .prop_map(|(n_grid, epsilon, replications, seed, tail, axes)| {
            let mut params = std::collections::BTreeMap::new();
            params.insert("n_grid".to_string(), Value::UIntList(n_grid.into_iter().collect()));
            params.insert("epsilon".to_string(), Value::Float(epsilon));
            params.insert("replications".to_string(), Value::UInt(replications));
            params.insert("axes".to_string(), Value::FloatList(axes));
            if let Some(t) = tail {
                params.insert("tail_threshold".to_string(), Value::Float(t));
            }
            RunConfig {
                command: Command::Wlln,
                params,
                output_dir: "out/run".into(),
                master_seed: seed,
            }
        })
}

proptest! {
    #[test]
    fn render_round_trips(config in wlln_config()) {
        prop_assert_eq!(RunConfig::parse(&config.render()).unwrap(), config);
    }
}
