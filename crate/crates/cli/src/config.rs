use anyhow::{bail, Context, Result};
use qftorus::conjecture::ExperimentConfig;
use qftorus::markov::BowditchConfig;
use qftorus::pleating::SolverConfig;
use sha2::{Digest, Sha256};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

impl FromStr for Format {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "both" => Ok(Format::Both),
            other => bail!("unknown format `{other}` (csv, json or both)"),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Both => "both",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub inner_tolerance: f64,
    pub outer_tolerance: f64,
    pub residual_bound: f64,
    pub bowditch_depth: usize,
    pub bowditch_bound: f64,
    pub convergent_budget: usize,
    /// Default number of points of a one-parameter grid.
    pub grid_points: usize,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        let solver = SolverConfig::default();
        RunConfig {
            inner_tolerance: solver.inner_tolerance,
            outer_tolerance: solver.outer_tolerance,
            residual_bound: solver.residual_bound,
            bowditch_depth: solver.bowditch.depth,
            bowditch_bound: solver.bowditch.bound,
            convergent_budget: qftorus::teich::LADDER_BUDGET,
            grid_points: 50,
            seed: 0,
            output_dir: None,
            format: Format::Json,
        }
    }
}

pub const KEYS: [&str; 10] = [
    "inner_tolerance",
    "outer_tolerance",
    "residual_bound",
    "bowditch_depth",
    "bowditch_bound",
    "convergent_budget",
    "grid_points",
    "seed",
    "output_dir",
    "format",
];

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg = RunConfig::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    /// Applies `key=value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {}: expected key=value", n + 1);
            };
            self.set(key.trim(), value.trim()).with_context(|| format!("config line {}", n + 1))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value.parse().ok().with_context(|| format!("bad value `{value}` for {key}"))
        }
        match key {
            "inner_tolerance" => self.inner_tolerance = num(key, value)?,
            "outer_tolerance" => self.outer_tolerance = num(key, value)?,
            "residual_bound" => self.residual_bound = num(key, value)?,
            "bowditch_depth" => self.bowditch_depth = num(key, value)?,
            "bowditch_bound" => self.bowditch_bound = num(key, value)?,
            "convergent_budget" => self.convergent_budget = num(key, value)?,
            "grid_points" => self.grid_points = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "output_dir" => self.output_dir = (!value.is_empty()).then(|| PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            _ => bail!("unknown config key `{key}` (known: {})", KEYS.join(", ")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("inner_tolerance", self.inner_tolerance),
            ("outer_tolerance", self.outer_tolerance),
            ("residual_bound", self.residual_bound),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                bail!("{name} must be positive, got {v}");
            }
        }
        if !(self.bowditch_bound > 2.0 && self.bowditch_bound.is_finite()) {
            bail!("bowditch_bound must exceed 2, got {}", self.bowditch_bound);
        }
        if self.bowditch_depth == 0 || self.convergent_budget == 0 || self.grid_points == 0 {
            bail!("bowditch_depth, convergent_budget and grid_points must be positive");
        }
        Ok(())
    }

    /// Sorted `key=value` lines of the settings that affect results.
    pub fn canonical(&self) -> String {
        let mut lines = vec![
            format!("bowditch_bound={:e}", self.bowditch_bound),
            format!("bowditch_depth={}", self.bowditch_depth),
            format!("convergent_budget={}", self.convergent_budget),
            format!("grid_points={}", self.grid_points),
            format!("inner_tolerance={:e}", self.inner_tolerance),
            format!("outer_tolerance={:e}", self.outer_tolerance),
            format!("residual_bound={:e}", self.residual_bound),
            format!("seed={}", self.seed),
        ];
        lines.sort();
        lines.join("\n") + "\n"
    }

    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            inner_tolerance: self.inner_tolerance,
            outer_tolerance: self.outer_tolerance,
            residual_bound: self.residual_bound,
            bowditch: BowditchConfig {
                depth: self.bowditch_depth,
                bound: self.bowditch_bound,
                ..BowditchConfig::default()
            },
            ..SolverConfig::default()
        }
    }

    pub fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            solver: self.solver(),
            seed: self.seed,
            ..ExperimentConfig::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_text() {
        let mut cfg = RunConfig::default();
        cfg.apply_text("# run\nseed = 42\nformat=both\n\nbowditch_depth=20\noutput_dir=out\n").unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.format, Format::Both);
        assert_eq!(cfg.bowditch_depth, 20);
        assert_eq!(cfg.output_dir, Some(PathBuf::from("out")));
        assert!(cfg.apply_text("nonsense").is_err());
        assert!(cfg.apply_text("colour=blue").is_err());
        assert!(cfg.apply_text("seed=-1").is_err());
    }

    #[test]
    fn validation() {
        let mut cfg = RunConfig::default();
        cfg.validate().unwrap();
        cfg.inner_tolerance = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.bowditch_bound = 2.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn hash_tracks_results_only() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.output_dir = Some("elsewhere".into());
        b.format = Format::Csv;
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn every_key_is_settable() {
        let mut cfg = RunConfig::default();
        for key in KEYS {
            let value = match key {
                "format" => "csv",
                "output_dir" => "x",
                "inner_tolerance" | "outer_tolerance" | "residual_bound" => "1e-9",
                "bowditch_bound" => "2.5",
                _ => "7",
            };
            cfg.set(key, value).unwrap();
        }
        cfg.validate().unwrap();
    }
}
