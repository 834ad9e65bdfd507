use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use crate::CliError;

/// Flags shared by every subcommand. A `--config` TOML file uses the same
/// keys (kebab-case) plus `command`; flags given on the command line win.
#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Params {
    /// oscillator | spin | random
    #[arg(long)]
    pub system: Option<String>,
    /// Spin quantum number (0.5, 1, 1.5, ...).
    #[arg(long)]
    pub j: Option<f64>,
    /// Preset spin-1 setting: paper-1 | paper-2 | paper-3.
    #[arg(long)]
    pub case: Option<String>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    /// Larmor frequency mu B / hbar.
    #[arg(long)]
    pub larmor: Option<f64>,
    /// Field tilt from the rotation axis.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// cp1 | cp2 | s4 | all
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub grid: Option<usize>,
    /// `start:end:count`; `pi`, `2pi`, `pi/2` are accepted.
    #[arg(long)]
    pub sweep: Option<String>,
    #[arg(long)]
    pub random: bool,
    /// Use the SU(2) transport instead of the U(1) phase.
    #[arg(long)]
    pub nonabelian: bool,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// json | csv (default: from the output extension, else json)
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Default)]
pub struct ConfigFile {
    pub command: Option<String>,
    pub params: Params,
}

impl std::str::FromStr for ConfigFile {
    type Err = String;

    /// Unknown keys are rejected.
    fn from_str(text: &str) -> Result<Self, String> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| e.to_string())?;
        let command = match table.remove("command") {
            None => None,
            Some(toml::Value::String(s)) => Some(s),
            Some(other) => return Err(format!("command must be a string, got {other}")),
        };
        let params = Params::deserialize(table).map_err(|e| e.to_string())?;
        Ok(Self { command, params })
    }
}

pub fn load(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    text.parse().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

impl Params {
    /// Fields set here take precedence over `base`.
    pub fn over(self, base: Params) -> Params {
        Params {
            system: self.system.or(base.system),
            j: self.j.or(base.j),
            case: self.case.or(base.case),
            theta: self.theta.or(base.theta),
            omega: self.omega.or(base.omega),
            larmor: self.larmor.or(base.larmor),
            alpha: self.alpha.or(base.alpha),
            t_final: self.t_final.or(base.t_final),
            steps: self.steps.or(base.steps),
            target: self.target.or(base.target),
            grid: self.grid.or(base.grid),
            sweep: self.sweep.or(base.sweep),
            random: self.random || base.random,
            nonabelian: self.nonabelian || base.nonabelian,
            dim: self.dim.or(base.dim),
            trials: self.trials.or(base.trials),
            seed: self.seed.or(base.seed),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
        }
    }

    pub fn steps_or(&self, default: usize) -> Result<usize, CliError> {
        let steps = self.steps.unwrap_or(default);
        if steps < 10 {
            return Err(CliError::Config(format!("--steps must be at least 10, got {steps}")));
        }
        Ok(steps)
    }

    pub fn grid_or(&self, default: usize) -> Result<usize, CliError> {
        let grid = self.grid.unwrap_or(default);
        if grid < 8 {
            return Err(CliError::Config(format!("--grid must be at least 8, got {grid}")));
        }
        Ok(grid)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

/// Parses `x`, `pi`, `k*pi`, `kpi`, `pi/k` and `k*pi/m`.
pub fn parse_angle(s: &str) -> Result<f64, CliError> {
    let bad = || CliError::Config(format!("cannot parse angle {s:?}"));
    let t = s.trim().to_ascii_lowercase();
    if let Ok(x) = t.parse::<f64>() {
        return Ok(x);
    }
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim().to_string(), b.trim().parse::<f64>().map_err(|_| bad())?),
        None => (t.clone(), 1.0),
    };
    let coeff = match num.strip_suffix("pi") {
        Some("") | Some("+") => 1.0,
        Some("-") => -1.0,
        Some(c) => c.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
        None => num.parse::<f64>().map_err(|_| bad())? / PI,
    };
    Ok(coeff * PI / den)
}

/// `start:end:count` into `count` evenly spaced points including both ends.
pub fn parse_sweep(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Config(format!("--sweep expects start:end:count, got {s:?}")));
    }
    let (a, b) = (parse_angle(parts[0])?, parse_angle(parts[1])?);
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("bad sweep count {:?}", parts[2])))?;
    if n < 2 {
        return Err(CliError::Config("--sweep needs at least 2 points".into()));
    }
    Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect())
}
