//! Flat key-value run configuration.
//!
//! The on-disk format is one `key = value` pair per line, `#` comments,
//! dotted keys for grouping. Numbers accept plain decimals or fractions
//! like `1/50`; lists are comma separated. Every key can be overridden by
//! an environment variable with the `SPHGRAV_` prefix and dots replaced by
//! underscores (`initial.kind` -> `SPHGRAV_INITIAL_KIND`).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sphgrav_core::scheme::{InitialData, MonitorConfig, SchemeConfig};

use crate::CliError;

pub const KNOWN_KEYS: &[&str] = &[
    "N",
    "beta",
    "l",
    "T",
    "L_max",
    "snapshot_times",
    "initial.kind",
    "initial.amplitude",
    "initial.center",
    "initial.width",
    "initial.u0",
    "initial.table",
    "monitor.enabled",
    "monitor.C",
    "monitor.alpha0",
    "monitor.tol",
    "source.enabled",
    "cutoff.enabled",
    "diagnostics.trace_eps",
    "diagnostics.xi",
    "converge.slack",
];

/// Raw key-value view of one configuration, after environment overrides.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    pub values: BTreeMap<String, String>,
    /// Directory of the config file, for resolving relative table paths.
    pub base_dir: PathBuf,
}

/// Run settings that live outside the scheme proper.
#[derive(Debug, Clone)]
pub struct RunSettings {
    pub snapshot_times: Vec<f64>,
    pub trace_eps: f64,
    pub xi_grid: Vec<f64>,
    pub converge_slack: f64,
}

pub fn env_var_name(key: &str) -> String {
    format!("SPHGRAV_{}", key.replace('.', "_").to_uppercase())
}

pub fn load(path: &Path) -> Result<RawConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Config(format!("cannot read config file {}: {e}", path.display()))
    })?;
    let mut raw = parse(&text)?;
    raw.base_dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    apply_env_overrides(&mut raw);
    Ok(raw)
}

pub fn parse(text: &str) -> Result<RawConfig, CliError> {
    let mut values = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "line {}: expected `key = value`, got `{line}`",
                lineno + 1
            )));
        };
        let key = key.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!(
                "line {}: unknown key `{key}`",
                lineno + 1
            )));
        }
        let value = value.trim().trim_matches('"').to_string();
        values.insert(key, value);
    }
    Ok(RawConfig {
        values,
        base_dir: PathBuf::from("."),
    })
}

fn apply_env_overrides(raw: &mut RawConfig) {
    for key in KNOWN_KEYS {
        if let Ok(value) = std::env::var(env_var_name(key)) {
            raw.values.insert((*key).to_string(), value);
        }
    }
}

/// Parse a number, accepting fractions like `1/200`.
pub fn parse_number(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: f64 = num
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("bad number `{s}`")))?;
        let d: f64 = den
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("bad number `{s}`")))?;
        if d == 0.0 {
            return Err(CliError::Config(format!("zero denominator in `{s}`")));
        }
        Ok(n / d)
    } else {
        s.parse()
            .map_err(|_| CliError::Config(format!("bad number `{s}`")))
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_number).collect()
}

fn parse_bool(s: &str) -> Result<bool, CliError> {
    match s.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(CliError::Config(format!("bad boolean `{other}`"))),
    }
}

impl RawConfig {
    fn number(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.values.get(key) {
            Some(v) => parse_number(v)
                .map(Some)
                .map_err(|e| CliError::Config(format!("key `{key}`: {e}"))),
            None => Ok(None),
        }
    }

    fn required_number(&self, key: &str) -> Result<f64, CliError> {
        self.number(key)?
            .ok_or_else(|| CliError::Config(format!("missing required key `{key}`")))
    }

    fn boolean(&self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.values.get(key) {
            Some(v) => parse_bool(v),
            None => Ok(default),
        }
    }

    /// Resolve into the scheme configuration plus driver settings.
    pub fn resolve(&self) -> Result<(SchemeConfig, RunSettings), CliError> {
        let dim = self.number("N")?.unwrap_or(3.0);
        if dim.fract() != 0.0 || dim < 2.0 {
            return Err(CliError::Config("N must be an integer >= 2".into()));
        }
        let l = self.required_number("l")?;
        let t_final = self.required_number("T")?;
        let l_max = self.required_number("L_max")?;

        let kind = self
            .values
            .get("initial.kind")
            .map(String::as_str)
            .unwrap_or("floor");
        let initial = match kind {
            "floor" => InitialData::Floor,
            "gaussian_bump" => InitialData::GaussianBump {
                amplitude: self.number("initial.amplitude")?.unwrap_or(0.5),
                center: self.number("initial.center")?.unwrap_or(3.0),
                width: self.number("initial.width")?.unwrap_or(1.0),
                u0: self.number("initial.u0")?.unwrap_or(0.0),
            },
            "table" => {
                let rel = self.values.get("initial.table").ok_or_else(|| {
                    CliError::Config("initial.kind = table needs initial.table = <csv>".into())
                })?;
                let path = self.base_dir.join(rel);
                InitialData::Table {
                    rows: load_table(&path)?,
                }
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown initial.kind `{other}` (expected floor, gaussian_bump, table)"
                )))
            }
        };

        let mut config = SchemeConfig::new(dim as u32, l, t_final, l_max, initial);
        if let Some(beta) = self.number("beta")? {
            config.beta = beta;
        }
        config.monitor = MonitorConfig {
            enabled: self.boolean("monitor.enabled", true)?,
            c: self.number("monitor.C")?,
            alpha0: self.number("monitor.alpha0")?,
            tol: self.number("monitor.tol")?.unwrap_or(1e-9),
        };
        config.source_enabled = self.boolean("source.enabled", true)?;
        config.cutoff_enabled = self.boolean("cutoff.enabled", true)?;
        config.validate()?;

        let snapshot_times = match self.values.get("snapshot_times") {
            Some(v) => parse_list(v)?,
            None => Vec::new(),
        };
        let xi_grid = match self.values.get("diagnostics.xi") {
            Some(v) => {
                let grid = parse_list(v)?;
                for xi in &grid {
                    if !(xi.abs() < 1.0) {
                        return Err(CliError::Config(format!(
                            "diagnostics.xi entry {xi} outside (-1, 1)"
                        )));
                    }
                }
                grid
            }
            None => vec![0.0, 0.1, -0.1, 0.25, -0.25, 0.4, -0.4, 0.49, -0.49],
        };
        let settings = RunSettings {
            snapshot_times,
            trace_eps: self.number("diagnostics.trace_eps")?.unwrap_or(0.1),
            xi_grid,
            converge_slack: self.number("converge.slack")?.unwrap_or(1.0),
        };
        Ok((config, settings))
    }
}

/// Load a `(x, rho, m)` CSV table; a non-numeric first line is treated as a
/// header.
pub fn load_table(path: &Path) -> Result<Vec<(f64, f64, f64)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read table {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(CliError::Config(format!(
                "{}:{}: expected 3 columns",
                path.display(),
                lineno + 1
            )));
        }
        match (
            fields[0].parse::<f64>(),
            fields[1].parse::<f64>(),
            fields[2].parse::<f64>(),
        ) {
            (Ok(x), Ok(rho), Ok(m)) => rows.push((x, rho, m)),
            _ if lineno == 0 => continue, // header
            _ => {
                return Err(CliError::Config(format!(
                    "{}:{}: bad numeric row",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    Ok(rows)
}
