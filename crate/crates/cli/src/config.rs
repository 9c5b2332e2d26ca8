//! Experiment configuration: command-line flags layered over an optional `key = value` file.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Height,
    CanonicalHeight,
    Orbit,
    Classify,
    DynDegree,
    ArithDegree,
    Zfd,
    FamilyUbc,
    EllTorsion,
    AbelianCheck,
    Verify,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(
            self.to_possible_value()
                .expect("no skipped variants")
                .get_name(),
        )
    }
}

/// Keys accepted in config files; each matches a long flag.
pub const KEYS: &[&str] = &[
    "map",
    "point",
    "d",
    "B",
    "tol",
    "n-max",
    "max-steps",
    "height-choice",
    "family",
    "param-name",
    "c",
    "curve",
    "a-range",
    "b-range",
    "matrix",
    "translation",
    "generator",
    "hypothesis",
    "p",
    "multiples",
    "ceiling",
    "workers",
    "output",
    "input",
];

/// Keys that may be given several times.
const REPEATABLE: &[&str] = &["point", "curve"];

#[derive(Clone, Debug)]
pub enum Origin {
    Flag,
    Config {
        path: PathBuf,
        line: usize,
        column: usize,
    },
}

impl Origin {
    fn locate(&self, key: &str, msg: impl fmt::Display) -> CliError {
        match self {
            Origin::Flag => CliError::Input(format!("--{}: {}", key, msg)),
            Origin::Config { path, line, column } => CliError::Input(format!(
                "{}: line {}, column {}: {}: {}",
                path.display(),
                line,
                column,
                key,
                msg
            )),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Setting {
    pub key: String,
    pub value: String,
    pub origin: Origin,
}

/// Reads `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn read_config_file(path: &Path) -> Result<Vec<Setting>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read config {}: {}", path.display(), e)))?;
    parse_config(&text, path)
}

pub fn parse_config(text: &str, path: &Path) -> Result<Vec<Setting>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let key_col = line.len() - line.trim_start().len() + 1;
        let err = |column: usize, msg: String| {
            CliError::Input(format!(
                "{}: line {}, column {}: {}",
                path.display(),
                i + 1,
                column,
                msg
            ))
        };
        let Some(eq) = line.find('=') else {
            return Err(err(
                line.trim_end().len() + 1,
                "expected 'key = value'".into(),
            ));
        };
        let key = line[..eq].trim();
        if !KEYS.contains(&key) {
            return Err(err(key_col, format!("unknown key '{}'", key)));
        }
        let value = line[eq + 1..].trim();
        if value.is_empty() {
            return Err(err(eq + 2, format!("missing value for '{}'", key)));
        }
        let value_col = eq + 2 + (line[eq + 1..].len() - line[eq + 1..].trim_start().len());
        out.push(Setting {
            key: key.to_string(),
            value: value.to_string(),
            origin: Origin::Config {
                path: path.to_path_buf(),
                line: i + 1,
                column: value_col,
            },
        });
    }
    Ok(out)
}

/// Flag settings replace config settings with the same key.
pub fn merge(config: Vec<Setting>, flags: Vec<Setting>) -> Vec<Setting> {
    let flagged: Vec<&str> = flags.iter().map(|s| s.key.as_str()).collect();
    let mut out: Vec<Setting> = config
        .into_iter()
        .filter(|s| !flagged.contains(&s.key.as_str()))
        .collect();
    out.extend(flags);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeightChoiceArg {
    Sum,
    Max,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub command: Command,
    pub map: Option<String>,
    pub points: Vec<String>,
    pub d: u32,
    pub bound: Option<f64>,
    pub tol: Option<f64>,
    pub n_max: usize,
    pub max_steps: usize,
    pub height_choice: HeightChoiceArg,
    pub family: Option<String>,
    pub param_name: String,
    pub params: Option<String>,
    pub curves: Vec<String>,
    pub a_range: Option<String>,
    pub b_range: Option<String>,
    pub matrix: Option<String>,
    pub translation: Option<String>,
    pub generator: Option<String>,
    pub hypothesis: Option<String>,
    pub p: Option<String>,
    pub multiples: i64,
    pub ceiling: u32,
    pub workers: Option<usize>,
    pub output: Option<PathBuf>,
    pub input: Option<PathBuf>,
}

/// `log100`, `log 100`, `log(100)`, `ln(20)` or a plain non-negative number.
pub fn parse_bound(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let lower = t.to_ascii_lowercase();
    let arg = lower
        .strip_prefix("log")
        .or_else(|| lower.strip_prefix("ln"));
    let v = match arg {
        Some(rest) => {
            let rest = rest.trim();
            let rest = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .unwrap_or(rest)
                .trim();
            let x: f64 = rest
                .parse()
                .map_err(|_| format!("cannot read '{}' as log(number)", t))?;
            if x.is_nan() || x < 1.0 {
                return Err(format!("log argument must be >= 1, got {}", x));
            }
            x.ln()
        }
        None => t
            .parse()
            .map_err(|_| format!("cannot read '{}' as a number", t))?,
    };
    if !v.is_finite() || v < 0.0 {
        return Err(format!("height bound must be finite and >= 0, got {}", v));
    }
    Ok(v)
}

impl ExperimentConfig {
    pub fn from_settings(command: Command, settings: &[Setting]) -> Result<Self, CliError> {
        let mut cfg = ExperimentConfig {
            command,
            map: None,
            points: Vec::new(),
            d: 1,
            bound: None,
            tol: None,
            n_max: 20,
            max_steps: 1000,
            height_choice: HeightChoiceArg::Sum,
            family: None,
            param_name: "c".into(),
            params: None,
            curves: Vec::new(),
            a_range: None,
            b_range: None,
            matrix: None,
            translation: None,
            generator: None,
            hypothesis: None,
            p: None,
            multiples: 2,
            ceiling: aridyn::elliptic::TORSION_CEILING,
            workers: None,
            output: None,
            input: None,
        };
        let mut seen: Vec<&str> = Vec::new();
        for s in settings {
            let key = s.key.as_str();
            if seen.contains(&key) && !REPEATABLE.contains(&key) {
                return Err(s.origin.locate(key, "given more than once"));
            }
            seen.push(key);
            let v = s.value.clone();
            let bad = |msg: String| s.origin.locate(key, msg);
            let positive_usize = |v: &str| -> Result<usize, CliError> {
                match v.trim().parse::<usize>() {
                    Ok(n) if n >= 1 => Ok(n),
                    _ => Err(bad(format!("expected a positive integer, got '{}'", v))),
                }
            };
            match key {
                "map" => cfg.map = Some(v),
                "point" => cfg.points.push(v),
                "d" => {
                    cfg.d = match v.trim() {
                        "1" => 1,
                        "2" => 2,
                        _ => return Err(bad(format!("d must be 1 or 2, got '{}'", v))),
                    }
                }
                "B" => cfg.bound = Some(parse_bound(&v).map_err(bad)?),
                "tol" => {
                    cfg.tol = match v.trim().parse::<f64>() {
                        Ok(t) if t > 0.0 && t.is_finite() => Some(t),
                        _ => {
                            return Err(bad(format!("tol must be a positive number, got '{}'", v)))
                        }
                    }
                }
                "n-max" => cfg.n_max = positive_usize(&v)?,
                "max-steps" => cfg.max_steps = positive_usize(&v)?,
                "height-choice" => {
                    cfg.height_choice = match v.trim() {
                        "sum" => HeightChoiceArg::Sum,
                        "max" => HeightChoiceArg::Max,
                        _ => return Err(bad(format!("expected 'sum' or 'max', got '{}'", v))),
                    }
                }
                "family" => cfg.family = Some(v),
                "param-name" => cfg.param_name = v.trim().to_string(),
                "c" => cfg.params = Some(v),
                "curve" => cfg.curves.push(v),
                "a-range" => cfg.a_range = Some(v),
                "b-range" => cfg.b_range = Some(v),
                "matrix" => cfg.matrix = Some(v),
                "translation" => cfg.translation = Some(v),
                "generator" => cfg.generator = Some(v),
                "hypothesis" => cfg.hypothesis = Some(v),
                "p" => cfg.p = Some(v),
                "multiples" => cfg.multiples = positive_usize(&v)? as i64,
                "ceiling" => {
                    let c = positive_usize(&v)?;
                    if !(1..=16).contains(&c) {
                        return Err(bad(format!("ceiling must be between 1 and 16, got {}", c)));
                    }
                    cfg.ceiling = c as u32;
                }
                "workers" => cfg.workers = Some(positive_usize(&v)?),
                "output" => cfg.output = Some(PathBuf::from(v)),
                "input" => cfg.input = Some(PathBuf::from(v)),
                other => return Err(s.origin.locate(other, "unknown key")),
            }
        }
        Ok(cfg)
    }

    pub fn require_map(&self) -> Result<&str, CliError> {
        self.map
            .as_deref()
            .ok_or_else(|| CliError::Input(format!("{} needs --map", self.command)))
    }

    pub fn require_points(&self) -> Result<&[String], CliError> {
        if self.points.is_empty() {
            return Err(CliError::Input(format!(
                "{} needs at least one --point",
                self.command
            )));
        }
        Ok(&self.points)
    }

    pub fn require_bound(&self) -> Result<f64, CliError> {
        self.bound
            .ok_or_else(|| CliError::Input(format!("{} needs a height bound --B", self.command)))
    }
}
