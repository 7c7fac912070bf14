//! Run configuration: a flat `key = value` text format with dotted keys.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! # comment; everything after `#` is ignored
//! key = value
//! cell.edge_snr_db = -5
//! schemes = equal, data_only, joint
//! ```
//!
//! Keys are lowercase `[a-z0-9_]` segments joined by dots. A key may appear
//! once per file. Lists are comma separated. Values may be wrapped in double
//! quotes. Command-line overrides `--key=value` use the same keys and win
//! over the file.

use std::fmt;
use std::path::PathBuf;

use mmimo_power::channel_sim::{CellConfig, CorrelationModel, EstimationConfig, Objective, Scheme, SweepConfig};
use mmimo_power::{Detector, SolverOptions};

/// Where a value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    CommandLine,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::CommandLine => f.write_str("command line"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{origin}: unknown key `{key}`")]
    UnknownKey { key: String, origin: Origin },
    #[error("line {line}: key `{key}` already set on line {first}")]
    Duplicate { key: String, line: usize, first: usize },
    #[error("{origin}: bad value for `{key}`: {message}")]
    Value { key: String, origin: Origin, message: String },
    #[error("invalid `{key}`: {message}")]
    Invalid { key: String, message: String },
}

impl ConfigError {
    /// The key the error is about, when there is one.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::Syntax { .. } => None,
            ConfigError::UnknownKey { key, .. }
            | ConfigError::Duplicate { key, .. }
            | ConfigError::Value { key, .. }
            | ConfigError::Invalid { key, .. } => Some(key),
        }
    }
}

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// One instance: a per-user power table.
    Solve,
    /// Monte Carlo comparison of schemes over random drops.
    Sweep,
    /// Max-min SE with known versus estimated large-scale fading.
    Estimate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Sweep => "sweep",
            Command::Estimate => "estimate",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "solve" => Some(Command::Solve),
            "sweep" => Some(Command::Sweep),
            "estimate" => Some(Command::Estimate),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    Equal,
    PerUser(Vec<f64>),
}

/// Inputs specific to `solve`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveInput {
    /// Hand-set fading; `None` draws drop `drop` of the seeded cell instead.
    pub beta: Option<Vec<f64>>,
    /// One budget for everyone or one per user; `None` uses the cell budget.
    pub energy: Option<Vec<f64>>,
    /// Angles of arrival for hand-set fading under one-ring correlation.
    pub angles_deg: Option<Vec<f64>>,
    pub drop: u64,
    pub scheme: Scheme,
}

impl Default for SolveInput {
    fn default() -> Self {
        Self { beta: None, energy: None, angles_deg: None, drop: 0, scheme: Scheme::Joint }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub cell: CellConfig,
    pub objective: Objective,
    pub detector: Detector,
    pub schemes: Vec<Scheme>,
    pub drops: usize,
    pub seed: u64,
    pub weights: Weights,
    /// One-ring correlation instead of i.i.d. fading.
    pub one_ring: bool,
    pub spread_deg: f64,
    /// CSV destination; `None` writes to standard output.
    pub output: Option<PathBuf>,
    /// Destination of the sweep quantile summary CSV.
    pub summary_output: Option<PathBuf>,
    pub solve: SolveInput,
    pub estimate_snr_db: Vec<f64>,
    pub observations: usize,
    pub opts: SolverOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sweep = SweepConfig::default();
        let est = EstimationConfig::default();
        Self {
            command: Command::Solve,
            cell: sweep.cell,
            objective: sweep.objective,
            detector: sweep.detector,
            schemes: sweep.schemes,
            drops: sweep.drops,
            seed: sweep.seed,
            weights: Weights::Equal,
            one_ring: false,
            spread_deg: 10.0,
            output: None,
            summary_output: None,
            solve: SolveInput::default(),
            estimate_snr_db: est.snr_db,
            observations: est.observations,
            opts: sweep.opts,
        }
    }
}

/// Every accepted key with a one-line description, in documentation order.
pub const KEYS: &[(&str, &str)] = &[
    ("command", "solve | sweep | estimate (default solve)"),
    ("output", "CSV path; `-` or unset writes to standard output"),
    ("summary_output", "sweep quantile summary CSV path (optional)"),
    ("seed", "64-bit seed of the drop generator (default 42)"),
    ("drops", "number of random drops for sweep and estimate (default 1000)"),
    ("objective", "maxmin | sum (default maxmin)"),
    ("detector", "mrc | zf (default mrc)"),
    ("schemes", "comma list of equal, data_only, joint, maxmin_ref, sum_ref"),
    ("weights", "`equal` or one positive weight per served user"),
    ("correlation", "iid | one_ring (default iid)"),
    ("correlation.spread_deg", "one-ring angular spread in degrees (default 10)"),
    ("cell.radius", "cell radius in meters (default 1000)"),
    ("cell.min_distance", "minimum user distance in meters (default 100)"),
    ("cell.pathloss_exponent", "path-loss exponent (default 3.76)"),
    ("cell.shadow_std_db", "log-normal shadowing deviation in dB (default 8)"),
    ("cell.users", "users placed per drop (default 10)"),
    ("cell.drop_worst", "remove the weakest placed user (default true)"),
    ("cell.edge_snr_db", "median cell-edge SNR under equal power in dB (default -5)"),
    ("cell.antennas", "base station antennas (default 100)"),
    ("cell.coherence", "coherence interval in symbols (default 200)"),
    ("solver.tolerance", "relative tolerance of the inner searches (default 1e-10)"),
    ("solver.max_iter", "iteration cap of the inner searches (default 200)"),
    ("solve.beta", "hand-set noise-normalized fading, one per user"),
    ("solve.energy", "energy budget, one value or one per user (default from the cell)"),
    ("solve.angles_deg", "angles of arrival for hand-set fading under one-ring"),
    ("solve.drop", "drop index used when solve.beta is unset (default 0)"),
    ("solve.scheme", "scheme to solve (default joint)"),
    ("estimate.snr_db", "comma list of edge SNR points in dB (default -10, -5, 0, 5, 10)"),
    ("estimate.observations", "processed pilot observations per user (default 10)"),
];

/// A `key = value` pair with its origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub origin: Origin,
}

fn valid_key(key: &str) -> bool {
    !key.is_empty()
        && key.split('.').all(|seg| {
            !seg.is_empty() && seg.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_')
        })
}

fn unquote(value: &str) -> &str {
    value.strip_prefix('"').and_then(|v| v.strip_suffix('"')).unwrap_or(value)
}

/// Splits config text into entries; rejects malformed lines and repeated keys.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>> {
    let mut entries: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax { line, message: format!("expected `key = value`, found `{content}`") });
        };
        let key = key.trim();
        if !valid_key(key) {
            return Err(ConfigError::Syntax { line, message: format!("malformed key `{key}`") });
        }
        if let Some(prev) = entries.iter().find(|e| e.key == key) {
            let first = match prev.origin {
                Origin::Line(n) => n,
                Origin::CommandLine => 0,
            };
            return Err(ConfigError::Duplicate { key: key.to_string(), line, first });
        }
        entries.push(Entry {
            key: key.to_string(),
            value: unquote(value.trim()).to_string(),
            origin: Origin::Line(line),
        });
    }
    Ok(entries)
}

/// Parses one `--key=value` argument (without validating the key).
pub fn parse_override(arg: &str) -> Option<Entry> {
    let body = arg.strip_prefix("--")?;
    let (key, value) = body.split_once('=')?;
    Some(Entry { key: key.trim().to_string(), value: unquote(value.trim()).to_string(), origin: Origin::CommandLine })
}

/// Parses a config file with all defaults applied and validated.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, &[])
}

/// Parses a config file, then applies command-line overrides in order.
pub fn parse_config_with(text: &str, overrides: &[Entry]) -> Result<RunConfig> {
    let mut config = RunConfig::default();
    for entry in parse_entries(text)?.iter().chain(overrides) {
        apply(&mut config, entry)?;
    }
    config.validate()?;
    Ok(config)
}

fn bad(entry: &Entry, message: impl Into<String>) -> ConfigError {
    ConfigError::Value { key: entry.key.clone(), origin: entry.origin, message: message.into() }
}

fn number<T: std::str::FromStr>(entry: &Entry, what: &str) -> Result<T> {
    entry.value.parse().map_err(|_| bad(entry, format!("expected {what}, found `{}`", entry.value)))
}

fn real(entry: &Entry) -> Result<f64> {
    let x: f64 = number(entry, "a number")?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(bad(entry, "must be finite"))
    }
}

fn real_list(entry: &Entry) -> Result<Vec<f64>> {
    let list = entry
        .value
        .split(',')
        .map(|item| {
            let item = item.trim();
            item.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(entry, format!("expected a finite number, found `{item}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(list)
}

fn positive_list(entry: &Entry) -> Result<Vec<f64>> {
    let list = real_list(entry)?;
    if let Some(x) = list.iter().find(|x| **x <= 0.0) {
        return Err(bad(entry, format!("entries must be positive, found {x}")));
    }
    Ok(list)
}

fn boolean(entry: &Entry) -> Result<bool> {
    match entry.value.as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(bad(entry, format!("expected true or false, found `{other}`"))),
    }
}

fn path(entry: &Entry) -> Option<PathBuf> {
    match entry.value.as_str() {
        "" | "-" => None,
        p => Some(PathBuf::from(p)),
    }
}

fn apply(c: &mut RunConfig, e: &Entry) -> Result<()> {
    match e.key.as_str() {
        "command" => {
            c.command = Command::parse(&e.value).ok_or_else(|| bad(e, "expected solve, sweep or estimate"))?;
        }
        "output" => c.output = path(e),
        "summary_output" => c.summary_output = path(e),
        "seed" => c.seed = number(e, "an unsigned 64-bit integer")?,
        "drops" => c.drops = number(e, "a count")?,
        "objective" => c.objective = e.value.parse().map_err(|err| bad(e, format!("{err}")))?,
        "detector" => c.detector = e.value.parse().map_err(|err| bad(e, format!("{err}")))?,
        "schemes" => {
            c.schemes = e
                .value
                .split(',')
                .map(|s| s.parse::<Scheme>().map_err(|err| bad(e, format!("{err}"))))
                .collect::<Result<Vec<_>>>()?;
        }
        "weights" => {
            c.weights = if e.value == "equal" { Weights::Equal } else { Weights::PerUser(positive_list(e)?) };
        }
        "correlation" => {
            c.one_ring = match e.value.as_str() {
                "iid" => false,
                "one_ring" => true,
                _ => return Err(bad(e, "expected iid or one_ring")),
            };
        }
        "correlation.spread_deg" => {
            c.spread_deg = real(e)?;
            if !(c.spread_deg > 0.0 && c.spread_deg <= 180.0) {
                return Err(bad(e, "must lie in (0, 180]"));
            }
        }
        "cell.radius" => c.cell.radius = real(e)?,
        "cell.min_distance" => c.cell.min_distance = real(e)?,
        "cell.pathloss_exponent" => c.cell.pathloss_exponent = real(e)?,
        "cell.shadow_std_db" => c.cell.shadow_std_db = real(e)?,
        "cell.users" => c.cell.users_dropped = number(e, "a count")?,
        "cell.drop_worst" => c.cell.drop_worst = boolean(e)?,
        "cell.edge_snr_db" => c.cell.edge_snr_db = real(e)?,
        "cell.antennas" => c.cell.antennas = number(e, "a count")?,
        "cell.coherence" => c.cell.coherence = number(e, "a count")?,
        "solver.tolerance" => c.opts.bisection_tol = real(e)?,
        "solver.max_iter" => c.opts.max_iter = number(e, "a count")?,
        "solve.beta" => c.solve.beta = Some(positive_list(e)?),
        "solve.energy" => c.solve.energy = Some(positive_list(e)?),
        "solve.angles_deg" => c.solve.angles_deg = Some(real_list(e)?),
        "solve.drop" => c.solve.drop = number(e, "an unsigned integer")?,
        "solve.scheme" => c.solve.scheme = e.value.parse().map_err(|err| bad(e, format!("{err}")))?,
        "estimate.snr_db" => c.estimate_snr_db = real_list(e)?,
        "estimate.observations" => c.observations = number(e, "a count")?,
        _ => return Err(ConfigError::UnknownKey { key: e.key.clone(), origin: e.origin }),
    }
    Ok(())
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.to_string(), message: message.into() }
}

impl RunConfig {
    pub fn correlation(&self) -> CorrelationModel {
        if self.one_ring {
            CorrelationModel::OneRing { spread_deg: self.spread_deg }
        } else {
            CorrelationModel::Iid
        }
    }

    /// Users served per instance: the hand-set fading for `solve`, else the
    /// cell's placed users minus the removed one.
    pub fn users(&self) -> usize {
        match (&self.command, &self.solve.beta) {
            (Command::Solve, Some(beta)) => beta.len(),
            _ => self.cell.served_users(),
        }
    }

    pub fn sweep_config(&self) -> SweepConfig {
        SweepConfig {
            cell: self.cell.clone(),
            correlation: self.correlation(),
            objective: self.objective,
            detector: self.detector,
            schemes: self.schemes.clone(),
            drops: self.drops,
            seed: self.seed,
            weights: match &self.weights {
                Weights::Equal => None,
                Weights::PerUser(w) => Some(w.clone()),
            },
            opts: self.opts,
        }
    }

    pub fn estimation_config(&self) -> EstimationConfig {
        EstimationConfig {
            cell: self.cell.clone(),
            detector: self.detector,
            snr_db: self.estimate_snr_db.clone(),
            observations: self.observations,
            drops: self.drops,
            seed: self.seed,
            opts: self.opts,
        }
    }

    /// Cross-key checks; each error names the key to change.
    pub fn validate(&self) -> Result<()> {
        let cell = &self.cell;
        if !(cell.radius > 0.0) {
            return Err(invalid("cell.radius", "must be positive"));
        }
        if !(cell.min_distance > 0.0 && cell.min_distance < cell.radius) {
            return Err(invalid("cell.min_distance", "must be positive and below cell.radius"));
        }
        if !(cell.pathloss_exponent > 0.0) {
            return Err(invalid("cell.pathloss_exponent", "must be positive"));
        }
        if cell.shadow_std_db < 0.0 {
            return Err(invalid("cell.shadow_std_db", "must be nonnegative"));
        }
        if cell.antennas == 0 {
            return Err(invalid("cell.antennas", "must be at least 1"));
        }
        let needs_cell_users = !(self.command == Command::Solve && self.solve.beta.is_some());
        if needs_cell_users && cell.served_users() == 0 {
            return Err(invalid("cell.users", "no user is left to serve"));
        }
        let k = self.users();
        if cell.coherence <= k {
            return Err(invalid("cell.coherence", format!("must exceed the {k} served users")));
        }
        if self.detector == Detector::Zf && cell.antennas <= k {
            return Err(invalid(
                "detector",
                format!("zero-forcing needs more antennas than users (cell.antennas = {}, users = {k})", cell.antennas),
            ));
        }
        if !(self.opts.bisection_tol > 0.0 && self.opts.bisection_tol < 1.0) {
            return Err(invalid("solver.tolerance", "must lie in (0, 1)"));
        }
        if self.opts.max_iter == 0 {
            return Err(invalid("solver.max_iter", "must be at least 1"));
        }
        if let Weights::PerUser(w) = &self.weights {
            if w.len() != k {
                return Err(invalid("weights", format!("{} weights for {k} users", w.len())));
            }
        }
        if self.one_ring {
            if self.detector == Detector::Zf {
                return Err(invalid("correlation", "one-ring correlation is only modelled for MRC"));
            }
            if self.objective == Objective::Sum {
                return Err(invalid("objective", "one-ring correlation supports the maxmin objective only"));
            }
        }
        match self.command {
            Command::Solve => self.validate_solve(k)?,
            Command::Sweep => {
                if self.drops == 0 {
                    return Err(invalid("drops", "a sweep needs at least one drop"));
                }
                if self.schemes.is_empty() {
                    return Err(invalid("schemes", "list at least one scheme"));
                }
            }
            Command::Estimate => {
                if self.drops == 0 {
                    return Err(invalid("drops", "estimation needs at least one drop"));
                }
                if self.estimate_snr_db.is_empty() {
                    return Err(invalid("estimate.snr_db", "list at least one SNR point"));
                }
                if self.observations == 0 {
                    return Err(invalid("estimate.observations", "must be at least 1"));
                }
                if self.objective != Objective::MaxMin {
                    return Err(invalid("objective", "estimation runs the maxmin objective"));
                }
                if self.weights != Weights::Equal {
                    return Err(invalid("weights", "estimation weighs users equally"));
                }
                if self.one_ring {
                    return Err(invalid("correlation", "estimation assumes i.i.d. fading"));
                }
            }
        }
        Ok(())
    }

    fn validate_solve(&self, k: usize) -> Result<()> {
        if let Some(e) = &self.solve.energy {
            if e.len() != 1 && e.len() != k {
                return Err(invalid("solve.energy", format!("give one budget or {k}, found {}", e.len())));
            }
        }
        if self.solve.beta.is_some() {
            match (&self.solve.angles_deg, self.one_ring) {
                (Some(a), _) if a.len() != k => {
                    return Err(invalid("solve.angles_deg", format!("{} angles for {k} users", a.len())));
                }
                (None, true) => return Err(invalid("solve.angles_deg", "one-ring correlation needs user angles")),
                _ => {}
            }
        } else if self.solve.angles_deg.is_some() {
            return Err(invalid("solve.angles_deg", "angles apply to hand-set solve.beta only"));
        }
        Ok(())
    }
}
