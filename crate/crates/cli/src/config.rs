//! Run configuration: built-in defaults, overridden by an optional
//! `key = value` config file, the `VOXSHIFT_WORKERS` environment variable
//! (workers only), and finally command-line flags. Flags win.

use std::fmt;
use std::path::PathBuf;

use voxshift_core::viz::ColumnAgg;

/// One-line, machine-greppable failure: `voxshift: error[<class>]: <message>`.
#[derive(Debug)]
pub struct CliError {
    pub class: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(class: &'static str, message: impl Into<String>) -> Self {
        CliError {
            class,
            message: message.into(),
        }
    }

    pub fn io(context: &str, err: std::io::Error) -> Self {
        CliError::new("io", format!("{context}: {err}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.class, self.message)
    }
}

impl std::error::Error for CliError {}

/// Flag-shaped overrides collected before resolution; `None` means unset.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub base: Option<PathBuf>,
    pub gens: Vec<PathBuf>,
    pub classify: Option<PathBuf>,
    pub view_distance: Option<u32>,
    pub step_budget: Option<u32>,
    pub iso_fraction: Option<f64>,
    pub pair_fraction: Option<f64>,
    pub match_radius: Option<f64>,
    pub seed: Option<u64>,
    pub top_k: Option<usize>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub column_agg: Option<ColumnAgg>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub base: Option<PathBuf>,
    pub gens: Vec<PathBuf>,
    pub classify: Option<PathBuf>,
    /// View distance cap in blocks (d).
    pub view_distance: u32,
    /// Walk budget in lateral steps (n).
    pub step_budget: u32,
    pub iso_fraction: f64,
    pub pair_fraction: f64,
    pub match_radius: f64,
    pub seed: u64,
    pub top_k: usize,
    /// 0 = one worker per logical CPU.
    pub workers: usize,
    pub out: PathBuf,
    pub column_agg: ColumnAgg,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            base: None,
            gens: Vec::new(),
            classify: None,
            view_distance: 256,
            step_budget: 32,
            iso_fraction: 0.1,
            pair_fraction: 0.02,
            match_radius: 0.0,
            seed: 0,
            top_k: 5,
            workers: 0,
            out: PathBuf::from("out"),
            column_agg: ColumnAgg::Mean,
        }
    }
}

fn parse_column_agg(value: &str) -> Result<ColumnAgg, String> {
    match value {
        "mean" => Ok(ColumnAgg::Mean),
        "highest" => Ok(ColumnAgg::Highest),
        other => Err(format!("column-agg must be mean or highest, got {other:?}")),
    }
}

impl RunConfig {
    /// Applies a config file's `key = value` lines. Unknown keys error;
    /// `gen` accumulates across repeated lines.
    fn apply_file(&mut self, text: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => raw[..pos].trim(),
                None => raw.trim(),
            };
            if line.is_empty() {
                continue;
            }
            let bad = |reason: String| CliError::new("config", format!("line {}: {reason}", i + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key = value, got {line:?}")))?;
            let key = key.trim();
            let value = value.trim();
            if value.is_empty() {
                return Err(bad(format!("key {key:?} has no value")));
            }
            macro_rules! parse {
                ($ty:ty) => {
                    value
                        .parse::<$ty>()
                        .map_err(|e| bad(format!("key {key:?}: {e}")))?
                };
            }
            match key {
                "base" => self.base = Some(PathBuf::from(value)),
                "gen" => self.gens.push(PathBuf::from(value)),
                "classify" => self.classify = Some(PathBuf::from(value)),
                "d" => self.view_distance = parse!(u32),
                "n" => self.step_budget = parse!(u32),
                "iso-fraction" => self.iso_fraction = parse!(f64),
                "pair-fraction" => self.pair_fraction = parse!(f64),
                "match-radius" => self.match_radius = parse!(f64),
                "seed" => self.seed = parse!(u64),
                "top-k" => self.top_k = parse!(usize),
                "workers" => self.workers = parse!(usize),
                "out" => self.out = PathBuf::from(value),
                "column-agg" => self.column_agg = parse_column_agg(value).map_err(bad)?,
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        Ok(())
    }

    /// Resolution order: defaults, config file, VOXSHIFT_WORKERS, flags.
    pub fn resolve(
        config_path: Option<&PathBuf>,
        overrides: &Overrides,
    ) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = config_path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::io(&format!("reading config {}", path.display()), e))?;
            cfg.apply_file(&text)?;
        }
        if let Ok(value) = std::env::var("VOXSHIFT_WORKERS") {
            cfg.workers = value.parse().map_err(|_| {
                CliError::new(
                    "config",
                    format!("VOXSHIFT_WORKERS={value:?} is not a worker count"),
                )
            })?;
        }

        if let Some(v) = &overrides.base {
            cfg.base = Some(v.clone());
        }
        if !overrides.gens.is_empty() {
            cfg.gens = overrides.gens.clone();
        }
        if let Some(v) = &overrides.classify {
            cfg.classify = Some(v.clone());
        }
        if let Some(v) = overrides.view_distance {
            cfg.view_distance = v;
        }
        if let Some(v) = overrides.step_budget {
            cfg.step_budget = v;
        }
        if let Some(v) = overrides.iso_fraction {
            cfg.iso_fraction = v;
        }
        if let Some(v) = overrides.pair_fraction {
            cfg.pair_fraction = v;
        }
        if let Some(v) = overrides.match_radius {
            cfg.match_radius = v;
        }
        if let Some(v) = overrides.seed {
            cfg.seed = v;
        }
        if let Some(v) = overrides.top_k {
            cfg.top_k = v;
        }
        if let Some(v) = overrides.workers {
            cfg.workers = v;
        }
        if let Some(v) = &overrides.out {
            cfg.out = v.clone();
        }
        if let Some(v) = overrides.column_agg {
            cfg.column_agg = v;
        }

        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let frac_ok = |v: f64| v > 0.0 && v <= 1.0;
        if !frac_ok(self.iso_fraction) {
            return Err(CliError::new(
                "config",
                format!("iso-fraction {} outside (0, 1]", self.iso_fraction),
            ));
        }
        if !frac_ok(self.pair_fraction) {
            return Err(CliError::new(
                "config",
                format!("pair-fraction {} outside (0, 1]", self.pair_fraction),
            ));
        }
        if self.view_distance < 1 {
            return Err(CliError::new("config", "d must be at least 1"));
        }
        if !self.match_radius.is_finite() || self.match_radius < 0.0 {
            return Err(CliError::new(
                "config",
                format!("match-radius {} must be finite and >= 0", self.match_radius),
            ));
        }
        if self.top_k < 1 {
            return Err(CliError::new("config", "top-k must be at least 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_the_documented_values() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.view_distance, 256);
        assert_eq!(cfg.step_budget, 32);
        assert_eq!(cfg.iso_fraction, 0.1);
        assert_eq!(cfg.pair_fraction, 0.02);
        assert_eq!(cfg.match_radius, 0.0);
        assert_eq!(cfg.top_k, 5);
        assert_eq!(cfg.workers, 0);
    }

    #[test]
    fn file_values_apply_and_flags_win() {
        let mut cfg = RunConfig::default();
        cfg.apply_file("d = 32\nseed = 9\ngen = a.voxgrid\ngen = b.voxgrid\n# comment\n")
            .unwrap();
        assert_eq!(cfg.view_distance, 32);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.gens.len(), 2);

        let overrides = Overrides {
            seed: Some(42),
            ..Default::default()
        };
        let mut resolved = RunConfig::default();
        resolved.apply_file("seed = 9\n").unwrap();
        if let Some(v) = overrides.seed {
            resolved.seed = v;
        }
        assert_eq!(resolved.seed, 42);
    }

    #[test]
    fn unknown_keys_and_bad_values_error() {
        let mut cfg = RunConfig::default();
        assert!(cfg.apply_file("bogus = 1\n").is_err());
        assert!(cfg.apply_file("d = many\n").is_err());
        assert!(cfg.apply_file("just-a-key\n").is_err());
    }

    #[test]
    fn validation_rejects_out_of_range_fractions() {
        let mut cfg = RunConfig::default();
        cfg.iso_fraction = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.pair_fraction = 1.5;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.match_radius = -2.0;
        assert!(cfg.validate().is_err());
    }
}
