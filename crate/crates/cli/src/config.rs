//! Scenario configuration from flags and an optional config file.
//!
//! File grammar, one entry per line:
//!
//! ```text
//! line    = blank | comment | entry
//! comment = "#" any*
//! entry   = key ws* "=" ws* value [ws* comment]
//! key     = a | Ai0 | Ar0 | f | branch | n | r_max | dt | t_end
//!         | record_every | drift_tolerance | plane | output
//! ```
//!
//! Keys may use `-` or `_`. Flags take precedence over file entries.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use selfbound::radial::{DEFAULT_POINTS, DEFAULT_R_MAX};
use selfbound::Branch;

use crate::error::CliError;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "SELFBOUND_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    VariationalEvolve,
    FixedPoints,
    Portrait,
    Stationary,
    StabilityModes,
    Propagate,
    Figure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    Amplitude,
    Canonical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub command: Command,
    /// Figure preset name for `figure`.
    pub preset: Option<String>,
    pub a: Option<f64>,
    pub ai0: Option<f64>,
    pub ar0: f64,
    pub f: f64,
    pub branch: Option<Branch>,
    pub n: Option<usize>,
    pub r_max: Option<f64>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub record_every: Option<usize>,
    pub drift_tolerance: Option<f64>,
    pub plane: Plane,
    pub output: PathBuf,
}

impl ScenarioConfig {
    pub fn n_or_default(&self) -> usize {
        self.n.unwrap_or(DEFAULT_POINTS)
    }

    pub fn r_max_or_default(&self) -> f64 {
        self.r_max.unwrap_or(DEFAULT_R_MAX)
    }

    pub fn require_a(&self) -> Result<f64, CliError> {
        self.a.ok_or_else(|| missing("a", self.command))
    }

    pub fn require_branch(&self) -> Result<Branch, CliError> {
        self.branch.ok_or_else(|| missing("branch", self.command))
    }
}

fn missing(key: &str, cmd: Command) -> CliError {
    let name = cmd.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default();
    CliError::Validation(format!("`{name}` needs `{key}` (flag --{key} or `{key} = ...` in the config file)"))
}

/// Raw command line; every scenario value arrives as text so flags and
/// file entries share one conversion path.
#[derive(Debug, Parser)]
#[command(name = "selfbound", version, about = "Self-bound condensates with attractive 1/r interaction")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Preset for `figure`: fig1 … fig10, fig4a, fig4b or all.
    pub preset: Option<String>,
    /// Config file of `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Scaled scattering length.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Initial `A_i` of a Gaussian.
    #[arg(long = "Ai0", allow_hyphen_values = true)]
    pub ai0: Option<String>,
    /// Initial `A_r` of a Gaussian.
    #[arg(long = "Ar0", allow_hyphen_values = true)]
    pub ar0: Option<String>,
    /// Deformation factor of the initial stationary state.
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    /// ground or excited.
    #[arg(long)]
    pub branch: Option<String>,
    /// Grid intervals.
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long = "r-max", allow_hyphen_values = true)]
    pub r_max: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub dt: Option<String>,
    #[arg(long = "t-end", allow_hyphen_values = true)]
    pub t_end: Option<String>,
    #[arg(long = "record-every")]
    pub record_every: Option<String>,
    #[arg(long = "drift-tolerance", allow_hyphen_values = true)]
    pub drift_tolerance: Option<String>,
    /// amplitude or canonical.
    #[arg(long)]
    pub plane: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub output: Option<String>,
}

const KEYS: [&str; 13] = [
    "a", "Ai0", "Ar0", "f", "branch", "n", "r_max", "dt", "t_end", "record_every", "drift_tolerance", "plane", "output",
];

fn canonical_key(raw: &str) -> Option<&'static str> {
    let k = raw.trim().replace('-', "_");
    KEYS.iter().copied().find(|key| key.eq_ignore_ascii_case(&k))
}

/// Parses the `key = value` config text.
pub fn parse_file(text: &str) -> Result<BTreeMap<&'static str, String>, CliError> {
    let mut out = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(CliError::Validation(format!("config line {}: expected `key = value`, got `{body}`", no + 1)));
        };
        let key = canonical_key(k).ok_or_else(|| {
            CliError::Validation(format!("config line {}: unknown key `{}` (known: {})", no + 1, k.trim(), KEYS.join(", ")))
        })?;
        let v = v.trim();
        if v.is_empty() {
            return Err(CliError::Validation(format!("config line {}: `{key}` has no value", no + 1)));
        }
        out.insert(key, v.to_owned());
    }
    Ok(out)
}

impl Cli {
    fn flags(&self) -> BTreeMap<&'static str, String> {
        let pairs = [
            ("a", &self.a),
            ("Ai0", &self.ai0),
            ("Ar0", &self.ar0),
            ("f", &self.f),
            ("branch", &self.branch),
            ("n", &self.n),
            ("r_max", &self.r_max),
            ("dt", &self.dt),
            ("t_end", &self.t_end),
            ("record_every", &self.record_every),
            ("drift_tolerance", &self.drift_tolerance),
            ("plane", &self.plane),
            ("output", &self.output),
        ];
        pairs.into_iter().filter_map(|(k, v)| v.clone().map(|v| (k, v))).collect()
    }
}

fn real(key: &str, v: &str) -> Result<f64, CliError> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| CliError::Validation(format!("`{key}` must be a number, got `{v}`")))?;
    if !x.is_finite() {
        return Err(CliError::Validation(format!("`{key}` must be finite, got `{v}`")));
    }
    Ok(x)
}

fn positive(key: &str, v: &str) -> Result<f64, CliError> {
    let x = real(key, v)?;
    if x <= 0.0 {
        return Err(CliError::Validation(format!("`{key}` must be positive, got {x}")));
    }
    Ok(x)
}

fn count(key: &str, v: &str, min: usize) -> Result<usize, CliError> {
    let x: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::Validation(format!("`{key}` must be a whole number, got `{v}`")))?;
    if x < min {
        return Err(CliError::Validation(format!("`{key}` must be at least {min}, got {x}")));
    }
    Ok(x)
}

/// Parses `argv` (program name first) and merges it over `file`, the text
/// of a config file. When `file` is `None` the `--config` path is read.
pub fn parse_config<I, T>(argv: I, file: Option<&str>) -> Result<ScenarioConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    let text = match (file, &cli.config) {
        (Some(t), _) => Some(t.to_owned()),
        (None, Some(path)) => Some(
            std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?,
        ),
        (None, None) => None,
    };
    let mut values = match &text {
        Some(t) => parse_file(t)?,
        None => BTreeMap::new(),
    };
    for (k, v) in cli.flags() {
        if let Some(old) = values.get(k) {
            if old != &v {
                log::warn!("`{k}` is {old} in the config file and {v} on the command line; using {v}");
            }
        }
        values.insert(k, v);
    }
    build(cli.command, cli.preset, &values)
}

fn build(
    command: Command,
    preset: Option<String>,
    values: &BTreeMap<&'static str, String>,
) -> Result<ScenarioConfig, CliError> {
    let get = |k: &str| values.get(k).map(String::as_str);
    let branch = get("branch")
        .map(|v| v.parse::<Branch>().map_err(CliError::Validation))
        .transpose()?;
    let plane = match get("plane") {
        None | Some("amplitude") => Plane::Amplitude,
        Some("canonical") => Plane::Canonical,
        Some(other) => {
            return Err(CliError::Validation(format!("`plane` must be amplitude or canonical, got `{other}`")))
        }
    };
    let output = match get("output") {
        Some(p) => PathBuf::from(p),
        None => std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".")),
    };
    let cfg = ScenarioConfig {
        command,
        preset,
        a: get("a").map(|v| real("a", v)).transpose()?,
        ai0: get("Ai0").map(|v| positive("Ai0", v)).transpose()?,
        ar0: get("Ar0").map(|v| real("Ar0", v)).transpose()?.unwrap_or(0.0),
        f: get("f").map(|v| positive("f", v)).transpose()?.unwrap_or(1.0),
        branch,
        n: get("n").map(|v| count("n", v, 4)).transpose()?,
        r_max: get("r_max").map(|v| positive("r_max", v)).transpose()?,
        dt: get("dt").map(|v| positive("dt", v)).transpose()?,
        t_end: get("t_end").map(|v| positive("t_end", v)).transpose()?,
        record_every: get("record_every").map(|v| count("record_every", v, 1)).transpose()?,
        drift_tolerance: get("drift_tolerance").map(|v| positive("drift_tolerance", v)).transpose()?,
        plane,
        output,
    };
    check_required(&cfg)?;
    Ok(cfg)
}

fn check_required(cfg: &ScenarioConfig) -> Result<(), CliError> {
    match cfg.command {
        Command::VariationalEvolve => {
            cfg.require_a()?;
            cfg.ai0.ok_or_else(|| missing("Ai0", cfg.command))?;
        }
        Command::FixedPoints | Command::Portrait | Command::StabilityModes => {
            cfg.require_a()?;
        }
        Command::Stationary | Command::Propagate => {
            cfg.require_a()?;
            cfg.require_branch()?;
        }
        Command::Figure => {
            if cfg.preset.is_none() {
                return Err(CliError::Validation(
                    "`figure` needs a preset: fig1 … fig10, fig4a, fig4b or all".into(),
                ));
            }
        }
    }
    Ok(())
}
