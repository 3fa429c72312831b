//! Flat `key = value` run configuration.
//!
//! One pair per line, `#` starts a comment, list values are comma-separated.
//! Every key has a fixed type, and each command accepts a fixed set of keys.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { key: String, line: usize },
    #[error("unknown command `{0}` (expected sample, hausdorff, test-uncorr, wlln, slln or check-cond)")]
    UnknownCommand(String),
    #[error("unknown key `{key}` for command {command}")]
    UnknownKey { key: String, command: Command },
    #[error("key `{key}` expects {expected}, got `{found}`")]
    TypeMismatch {
        key: String,
        expected: &'static str,
        found: String,
    },
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("invalid `{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Command {
    Sample,
    Hausdorff,
    TestUncorr,
    Wlln,
    Slln,
    CheckCond,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Sample,
        Command::Hausdorff,
        Command::TestUncorr,
        Command::Wlln,
        Command::Slln,
        Command::CheckCond,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Hausdorff => "hausdorff",
            Command::TestUncorr => "test-uncorr",
            Command::Wlln => "wlln",
            Command::Slln => "slln",
            Command::CheckCond => "check-cond",
        }
    }

    /// `(key, required)` pairs accepted besides `command`, `seed` and `output_dir`.
    fn keys(self) -> Vec<(&'static str, bool)> {
        const FAMILY: [&str; 7] = ["family", "axes", "block", "template", "process", "rho", "body"];
        const GRID: [&str; 3] = ["grid", "grid_count", "grid_seed"];
        let own: &[(&str, bool)] = match self {
            Command::Sample => &[("count", true)],
            Command::Hausdorff => &[("a", true), ("b", true)],
            Command::TestUncorr => &[("length", true), ("replications", true), ("significance", false)],
            Command::Wlln => &[
                ("n_grid", true),
                ("epsilon", true),
                ("replications", true),
                ("tail_threshold", false),
            ],
            Command::Slln => &[
                ("max_n", true),
                ("paths", true),
                ("checkpoints", false),
                ("threshold", false),
                ("window", false),
                ("condition", false),
                ("variance_bound", false),
                ("tail_threshold", false),
            ],
            Command::CheckCond => &[
                ("length", true),
                ("condition", true),
                ("variance_bound", false),
                ("tail_threshold", false),
            ],
        };
        let mut keys: Vec<(&str, bool)> = own.to_vec();
        if self != Command::Hausdorff {
            keys.extend(FAMILY.iter().map(|k| (*k, false)));
        }
        if self != Command::Sample {
            keys.extend(GRID.iter().map(|k| (*k, false)));
        }
        keys
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| ConfigError::UnknownCommand(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    UInt,
    Float,
    Text,
    UIntList,
    FloatList,
}

impl Kind {
    fn of(key: &str) -> Kind {
        match key {
            "count" | "length" | "replications" | "max_n" | "paths" | "window" | "block" | "grid_count"
            | "grid_seed" => Kind::UInt,
            "significance" | "epsilon" | "tail_threshold" | "threshold" | "variance_bound" | "rho" => Kind::Float,
            "n_grid" | "checkpoints" => Kind::UIntList,
            "axes" => Kind::FloatList,
            _ => Kind::Text,
        }
    }

    fn describe(self) -> &'static str {
        match self {
            Kind::UInt => "a non-negative integer",
            Kind::Float => "a number",
            Kind::Text => "text",
            Kind::UIntList => "a comma-separated list of non-negative integers",
            Kind::FloatList => "a comma-separated list of numbers",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    UInt(u64),
    Float(f64),
    Text(String),
    UIntList(Vec<u64>),
    FloatList(Vec<f64>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join<T: ToString>(xs: &[T]) -> String {
            xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
        }
        match self {
            Value::UInt(x) => write!(f, "{x}"),
            Value::Float(x) => write!(f, "{x}"),
            Value::Text(s) => f.write_str(s),
            Value::UIntList(xs) => f.write_str(&join(xs)),
            Value::FloatList(xs) => f.write_str(&join(xs)),
        }
    }
}

fn parse_value(key: &str, raw: &str) -> Result<Value> {
    let kind = Kind::of(key);
    let mismatch = || ConfigError::TypeMismatch {
        key: key.to_string(),
        expected: kind.describe(),
        found: raw.to_string(),
    };
    let float = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(mismatch)
    };
    let uint = |s: &str| s.trim().parse::<u64>().map_err(|_| mismatch());
    Ok(match kind {
        Kind::UInt => Value::UInt(uint(raw)?),
        Kind::Float => Value::Float(float(raw)?),
        Kind::Text => Value::Text(raw.to_string()),
        Kind::UIntList => Value::UIntList(raw.split(',').map(uint).collect::<Result<_>>()?),
        Kind::FloatList => Value::FloatList(raw.split(',').map(float).collect::<Result<_>>()?),
    })
}

/// Splits a document into `(key, value, line)` triples, rejecting syntax
/// errors and duplicate keys.
pub fn parse_document(text: &str) -> Result<Vec<(String, String, usize)>> {
    let mut pairs: Vec<(String, String, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                message: "empty key or value".into(),
            });
        }
        if pairs.iter().any(|(k, _, _)| k == key) {
            return Err(ConfigError::Duplicate {
                key: key.to_string(),
                line,
            });
        }
        pairs.push((key.to_string(), value.to_string(), line));
    }
    Ok(pairs)
}

/// A validated run: the command, its typed parameters, where outputs go and
/// the master seed.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: BTreeMap<String, Value>,
    pub output_dir: PathBuf,
    pub master_seed: u64,
}

/// Command-line values that take precedence over the document.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with(text, &Overrides::default())
    }

    pub fn parse_with(text: &str, overrides: &Overrides) -> Result<Self> {
        let pairs = parse_document(text)?;
        let mut command = None;
        let mut seed = None;
        let mut output_dir = None;
        let mut rest = Vec::new();
        for (key, value, _) in pairs {
            match key.as_str() {
                "command" => command = Some(value.parse::<Command>()?),
                "seed" => {
                    seed = Some(value.parse::<u64>().map_err(|_| ConfigError::TypeMismatch {
                        key: key.clone(),
                        expected: Kind::UInt.describe(),
                        found: value.clone(),
                    })?)
                }
                "output_dir" => output_dir = Some(PathBuf::from(value)),
                _ => rest.push((key, value)),
            }
        }
        let command = command.ok_or_else(|| ConfigError::Missing("command".into()))?;
        let keys = command.keys();
        let mut params = BTreeMap::new();
        for (key, value) in rest {
            if !keys.iter().any(|(k, _)| *k == key) {
                return Err(ConfigError::UnknownKey { key, command });
            }
            params.insert(key.clone(), parse_value(&key, &value)?);
        }
        if let Some((missing, _)) = keys.iter().find(|(k, required)| *required && !params.contains_key(*k)) {
            return Err(ConfigError::Missing((*missing).to_string()));
        }
        let config = Self {
            command,
            params,
            output_dir: overrides
                .output_dir
                .clone()
                .or(output_dir)
                .unwrap_or_else(|| PathBuf::from(".")),
            master_seed: overrides.seed.or(seed).unwrap_or(0),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        let invalid = |key: &str, reason: String| {
            Err(ConfigError::Invalid {
                key: key.to_string(),
                reason,
            })
        };
        for (key, value) in &self.params {
            match (key.as_str(), value) {
                ("epsilon" | "tail_threshold" | "threshold" | "variance_bound", Value::Float(x)) if *x <= 0.0 => {
                    return invalid(key, format!("must be > 0, got {x}"));
                }
                ("significance", Value::Float(x)) if !(*x > 0.0 && *x < 1.0) => {
                    return invalid(key, format!("must lie in (0, 1), got {x}"));
                }
                ("rho", Value::Float(x)) if x.abs() >= 1.0 => {
                    return invalid(key, format!("must satisfy |rho| < 1, got {x}"));
                }
                ("count" | "length" | "max_n" | "paths" | "window" | "block" | "grid_count", Value::UInt(0)) => {
                    return invalid(key, "must be positive".into());
                }
                ("axes", Value::FloatList(xs)) if xs.iter().any(|a| *a <= 0.0) => {
                    return invalid(key, "semi-axes must be positive".into());
                }
                ("n_grid" | "checkpoints", Value::UIntList(xs))
                    if xs[0] == 0 || xs.windows(2).any(|w| w[0] >= w[1]) =>
                {
                    return invalid(key, "must be strictly increasing positive integers".into());
                }
                _ => {}
            }
        }
        if self.command == Command::Wlln {
            if let Some(Value::UInt(r)) = self.params.get("replications") {
                if *r < 100 {
                    return invalid("replications", format!("the weak-law run needs at least 100, got {r}"));
                }
            }
        }
        if self.command == Command::TestUncorr {
            if let Some(Value::UInt(r)) = self.params.get("replications") {
                if *r < 3 {
                    return invalid("replications", format!("needs at least 3, got {r}"));
                }
            }
            if let Some(Value::UInt(l)) = self.params.get("length") {
                if *l < 2 {
                    return invalid("length", format!("needs at least 2, got {l}"));
                }
            }
        }
        Ok(())
    }

    /// Canonical document: `command`, `seed`, `output_dir`, then parameters
    /// in key order. `RunConfig::parse(&c.render()) == Ok(c)`.
    pub fn render(&self) -> String {
        self.render_lines(true)
    }

    /// The rendered document minus `output_dir`, hashed into the manifest so
    /// the hash does not depend on where the outputs were written.
    pub fn render_without_output_dir(&self) -> String {
        self.render_lines(false)
    }

    fn render_lines(&self, with_output_dir: bool) -> String {
        let mut out = format!("command = {}\nseed = {}\n", self.command, self.master_seed);
        if with_output_dir {
            writeln!(out, "output_dir = {}", self.output_dir.display()).expect("writing to a String");
        }
        for (k, v) in &self.params {
            writeln!(out, "{k} = {v}").expect("writing to a String");
        }
        out
    }

    pub fn uint(&self, key: &str) -> Option<u64> {
        match self.params.get(key) {
            Some(Value::UInt(x)) => Some(*x),
            _ => None,
        }
    }

    pub fn float(&self, key: &str) -> Option<f64> {
        match self.params.get(key) {
            Some(Value::Float(x)) => Some(*x),
            _ => None,
        }
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        match self.params.get(key) {
            Some(Value::Text(s)) => Some(s),
            _ => None,
        }
    }

    pub fn uint_list(&self, key: &str) -> Option<&[u64]> {
        match self.params.get(key) {
            Some(Value::UIntList(x)) => Some(x),
            _ => None,
        }
    }

    pub fn float_list(&self, key: &str) -> Option<&[f64]> {
        match self.params.get(key) {
            Some(Value::FloatList(x)) => Some(x),
            _ => None,
        }
    }

    /// Value of a key that `parse` guarantees to be present.
    pub fn required_uint(&self, key: &str) -> u64 {
        self.uint(key)
            .unwrap_or_else(|| panic!("`{key}` is validated as required"))
    }
}
