//! Experiment configuration: defaults, then a `key = value` file, then flags.

use std::fmt;
use std::path::{Path, PathBuf};

use nufactor_core::density::EulerProductConfig;
use nufactor_core::divisor::CapMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Compare,
    Minorant,
    Divisor,
    Density,
    Saddle,
    Sieve,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Compare => "compare",
            Command::Minorant => "minorant",
            Command::Divisor => "divisor",
            Command::Density => "density",
            Command::Saddle => "saddle",
            Command::Sieve => "sieve",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "compare" => Command::Compare,
            "minorant" => Command::Minorant,
            "divisor" => Command::Divisor,
            "density" => Command::Density,
            "saddle" => Command::Saddle,
            "sieve" => Command::Sieve,
            _ => return None,
        })
    }
}

/// Which density formula `compare` and `density` use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityChoice {
    /// Small-nu series below `(log log x)^2`, the saddle formula above.
    Auto,
    Saddle,
    SmallNu,
    Landau,
}

impl DensityChoice {
    pub fn as_str(&self) -> &'static str {
        match self {
            DensityChoice::Auto => "auto",
            DensityChoice::Saddle => "saddle",
            DensityChoice::SmallNu => "smallNuSeries",
            DensityChoice::Landau => "landau",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    pub x: u64,
    pub y: u64,
    pub nu_min: u32,
    pub nu_max: u32,
    pub a: f64,
    pub c: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub b: f64,
    pub k_min: u32,
    pub k_max: u32,
    pub cap_mode: CapMode,
    pub density: DensityChoice,
    pub euler: EulerProductConfig,
    pub tau_cap: Option<f64>,
    pub t_cap: Option<f64>,
    pub force: bool,
    /// 0 lets rayon pick.
    pub threads: usize,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub spot_checks: u32,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            command: None,
            x: 100_000_000,
            y: 1_000_000,
            nu_min: 1,
            nu_max: 8,
            a: 4.5,
            c: 0.5,
            gamma: 6.0,
            epsilon: 0.1,
            b: 10.0,
            k_min: 2,
            k_max: 6,
            cap_mode: CapMode::BigOmega,
            density: DensityChoice::Auto,
            euler: EulerProductConfig::default(),
            tau_cap: None,
            t_cap: None,
            force: false,
            threads: 0,
            out: None,
            seed: 0,
            spot_checks: 1_000,
        }
    }
}

/// Accepts plain integers and exact floats such as `1e8`.
fn parse_u64(key: &str, v: &str) -> Result<u64, ConfigError> {
    let v = v.replace('_', "");
    if let Ok(n) = v.parse::<u64>() {
        return Ok(n);
    }
    match v.parse::<f64>() {
        Ok(f) if f >= 0.0 && f.fract() == 0.0 && f < 1.8446744073709552e19 => Ok(f as u64),
        _ => Err(ConfigError(format!("{key}: expected a non-negative integer, got {v:?}"))),
    }
}

fn parse_u32(key: &str, v: &str) -> Result<u32, ConfigError> {
    let n = parse_u64(key, v)?;
    u32::try_from(n).map_err(|_| ConfigError(format!("{key}: {n} does not fit in 32 bits")))
}

fn parse_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse::<f64>()
        .ok()
        .filter(|f| f.is_finite())
        .ok_or_else(|| ConfigError(format!("{key}: expected a real number, got {v:?}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(ConfigError(format!("{key}: expected true or false, got {v:?}"))),
    }
}

fn optional(v: &str) -> Option<&str> {
    match v {
        "" | "none" | "off" => None,
        s => Some(s),
    }
}

impl ExperimentConfig {
    /// Apply one setting. Keys may use `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        let norm = key.trim().replace('-', "_");
        let k = norm.as_str();
        match k {
            "command" => {
                self.command = Some(
                    Command::parse(value).ok_or_else(|| ConfigError(format!("unknown command {value:?}")))?,
                )
            }
            "x" => self.x = parse_u64(k, value)?,
            "y" => self.y = parse_u64(k, value)?,
            "nu_min" => self.nu_min = parse_u32(k, value)?,
            "nu_max" => self.nu_max = parse_u32(k, value)?,
            "nu" => {
                let (lo, hi) = value.split_once("..").unwrap_or((value, value));
                self.nu_min = parse_u32(k, lo.trim())?;
                self.nu_max = parse_u32(k, hi.trim_start_matches('=').trim())?;
            }
            "a" => self.a = parse_f64(k, value)?,
            "c" => self.c = parse_f64(k, value)?,
            "gamma" => self.gamma = parse_f64(k, value)?,
            "epsilon" => self.epsilon = parse_f64(k, value)?,
            "b" => self.b = parse_f64(k, value)?,
            "k_min" => self.k_min = parse_u32(k, value)?,
            "k_max" => self.k_max = parse_u32(k, value)?,
            "cap_mode" => {
                self.cap_mode = match value {
                    "omega" => CapMode::Omega,
                    "bigOmega" | "big_omega" => CapMode::BigOmega,
                    "none" => CapMode::None,
                    _ => return Err(ConfigError(format!("cap_mode: expected omega, bigOmega or none, got {value:?}"))),
                }
            }
            "density" => {
                self.density = match value {
                    "auto" => DensityChoice::Auto,
                    "saddle" => DensityChoice::Saddle,
                    "smallNuSeries" | "small_nu" => DensityChoice::SmallNu,
                    "landau" => DensityChoice::Landau,
                    _ => {
                        return Err(ConfigError(format!(
                            "density: expected auto, saddle, smallNuSeries or landau, got {value:?}"
                        )))
                    }
                }
            }
            "prime_limit" => self.euler.prime_limit = parse_u64(k, value)?,
            "tol" | "tail_tolerance" => self.euler.tail_tolerance = parse_f64(k, value)?,
            "newton_tol" | "newton_tolerance" => self.euler.newton_tolerance = parse_f64(k, value)?,
            "max_newton_iterations" => self.euler.max_newton_iterations = parse_u32(k, value)?,
            "tau_cap" => self.tau_cap = optional(value).map(|v| parse_f64(k, v)).transpose()?,
            "t_cap" => self.t_cap = optional(value).map(|v| parse_f64(k, v)).transpose()?,
            "force" => self.force = parse_bool(k, value)?,
            "threads" => self.threads = parse_u64(k, value)? as usize,
            "out" => self.out = optional(value).map(PathBuf::from),
            "seed" => self.seed = parse_u64(k, value)?,
            "spot_checks" => self.spot_checks = parse_u32(k, value)?,
            _ => return Err(ConfigError(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Apply every `key = value` line of a config file body.
    pub fn apply_file_contents(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key = value, got {raw:?}", i + 1)))?;
            self.set(k, v).map_err(|e| ConfigError(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        self.apply_file_contents(&text)
    }

    /// Checks that do not depend on the command.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.command.is_none() {
            return Err(ConfigError("no command given".into()));
        }
        if self.nu_min == 0 {
            return Err(ConfigError("nu_min must be at least 1".into()));
        }
        if self.x.checked_add(self.y).is_none() {
            return Err(ConfigError(format!("x + y overflows: x = {}, y = {}", self.x, self.y)));
        }
        if self.k_min == 0 {
            return Err(ConfigError("k_min must be at least 1".into()));
        }
        for (name, v) in [("tau_cap", self.tau_cap), ("t_cap", self.t_cap)] {
            if v.is_some_and(|c| c < 1.0) {
                return Err(ConfigError(format!("{name} must be at least 1")));
            }
        }
        self.euler.validate().map_err(|e| ConfigError(e.to_string()))
    }

    pub fn nu_range(&self) -> std::ops::RangeInclusive<u32> {
        self.nu_min..=self.nu_max
    }

    /// Resolved settings for the report header. Threads and the output path
    /// are left out so the report does not depend on them.
    pub fn header_entries(&self) -> Vec<(&'static str, String)> {
        let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), |c| format!("{c}"));
        vec![
            ("command", self.command.map_or("none", |c| c.as_str()).to_string()),
            ("x", self.x.to_string()),
            ("y", self.y.to_string()),
            ("nu_min", self.nu_min.to_string()),
            ("nu_max", self.nu_max.to_string()),
            ("a", format!("{}", self.a)),
            ("c", format!("{}", self.c)),
            ("gamma", format!("{}", self.gamma)),
            ("epsilon", format!("{}", self.epsilon)),
            ("b", format!("{}", self.b)),
            ("k_min", self.k_min.to_string()),
            ("k_max", self.k_max.to_string()),
            ("cap_mode", self.cap_mode.as_str().to_string()),
            ("density", self.density.as_str().to_string()),
            ("prime_limit", self.euler.prime_limit.to_string()),
            ("tol", format!("{:e}", self.euler.tail_tolerance)),
            ("newton_tol", format!("{:e}", self.euler.newton_tolerance)),
            ("max_newton_iterations", self.euler.max_newton_iterations.to_string()),
            ("tau_cap", opt(self.tau_cap)),
            ("t_cap", opt(self.t_cap)),
            ("force", self.force.to_string()),
            ("seed", self.seed.to_string()),
            ("spot_checks", self.spot_checks.to_string()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_override() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_file_contents("# comment\nx = 1e9\nnu-max = 12 # trailing\n\ncap_mode = omega\ntau_cap = 1000\n")
            .unwrap();
        assert_eq!(cfg.x, 1_000_000_000);
        assert_eq!(cfg.nu_max, 12);
        assert_eq!(cfg.cap_mode, CapMode::Omega);
        assert_eq!(cfg.tau_cap, Some(1000.0));
        cfg.set("nu_max", "3").unwrap();
        assert_eq!(cfg.nu_max, 3);
        cfg.set("tau-cap", "none").unwrap();
        assert_eq!(cfg.tau_cap, None);
        cfg.set("nu", "2..=5").unwrap();
        assert_eq!((cfg.nu_min, cfg.nu_max), (2, 5));
    }

    #[test]
    fn bad_input() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.set("x", "1.5").is_err());
        assert!(cfg.set("x", "-3").is_err());
        assert!(cfg.set("bogus", "1").is_err());
        assert!(cfg.apply_file_contents("x 10").is_err());
        assert!(cfg.validate().is_err());
        cfg.set("command", "sieve").unwrap();
        cfg.validate().unwrap();
        cfg.set("prime_limit", "10").unwrap();
        assert!(cfg.validate().is_err());
    }
}
