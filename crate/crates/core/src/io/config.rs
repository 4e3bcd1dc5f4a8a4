use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Design,
    Spectrum,
    Evolve,
    Bicstate,
    Experiment,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    #[default]
    Atom,
    #[value(name = "p_state", alias = "p")]
    PState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Quantities a sweep can tabulate per (M, n0) point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Observable {
    OmegaBic,
    Rho0,
    BicProb,
    BicProbAsymptotic,
    NmRatio,
    NmRatioAsymptotic,
    BocEnergy,
    BocProb,
    BocProbAsymptotic,
    /// Emitter probability of the upper BOC from dense diagonalization.
    BocProbNumeric,
    /// Emitter probability of the upper BIC from dense diagonalization.
    BicProbNumeric,
}

impl Observable {
    pub fn as_str(&self) -> &'static str {
        match self {
            Observable::OmegaBic => "omega_bic",
            Observable::Rho0 => "rho0",
            Observable::BicProb => "bic_prob",
            Observable::BicProbAsymptotic => "bic_prob_asymptotic",
            Observable::NmRatio => "nm_ratio",
            Observable::NmRatioAsymptotic => "nm_ratio_asymptotic",
            Observable::BocEnergy => "boc_energy",
            Observable::BocProb => "boc_prob",
            Observable::BocProbAsymptotic => "boc_prob_asymptotic",
            Observable::BocProbNumeric => "boc_prob_numeric",
            Observable::BicProbNumeric => "bic_prob_numeric",
        }
    }
}

/// Inclusive integer range `start:stop:step`, or a single value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RangeRepr", into = "String")]
pub struct IntRange {
    pub start: usize,
    pub stop: usize,
    pub step: usize,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RangeRepr {
    Single(usize),
    Text(String),
}

impl TryFrom<RangeRepr> for IntRange {
    type Error = Error;
    fn try_from(r: RangeRepr) -> Result<Self> {
        match r {
            RangeRepr::Single(v) => Ok(IntRange::single(v)),
            RangeRepr::Text(s) => s.parse(),
        }
    }
}

impl From<IntRange> for String {
    fn from(r: IntRange) -> String {
        r.to_string()
    }
}

impl IntRange {
    pub fn single(v: usize) -> Self {
        IntRange { start: v, stop: v, step: 1 }
    }

    pub fn is_single(&self) -> bool {
        self.start == self.stop
    }

    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.stop).step_by(self.step).collect()
    }

    /// The only value of a single-point range.
    pub fn value(&self, name: &str) -> Result<usize> {
        if self.is_single() {
            Ok(self.start)
        } else {
            Err(Error::config(format!("{name} must be a single value here, got the range {self}")))
        }
    }
}

impl fmt::Display for IntRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_single() {
            write!(f, "{}", self.start)
        } else {
            write!(f, "{}:{}:{}", self.start, self.stop, self.step)
        }
    }
}

impl FromStr for IntRange {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parse = |p: &str| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::config(format!("invalid integer '{p}' in range '{s}'")))
        };
        let parts: Vec<&str> = s.split(':').collect();
        let range = match parts.as_slice() {
            [v] => IntRange::single(parse(v)?),
            [a, b] => IntRange { start: parse(a)?, stop: parse(b)?, step: 1 },
            [a, b, c] => IntRange { start: parse(a)?, stop: parse(b)?, step: parse(c)? },
            _ => return Err(Error::config(format!("range '{s}' must be 'v' or 'start:stop[:step]'"))),
        };
        if range.step == 0 || range.stop < range.start {
            return Err(Error::config(format!("range '{s}' is empty or has zero step")));
        }
        Ok(range)
    }
}

/// Everything a run needs. Mirrors the command-line flags; a JSON file with
/// the same fields can supply defaults that flags then override.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub points: IntRange,
    pub spacing: IntRange,
    pub hopping: f64,
    pub detuning: f64,
    /// Override for the designed coupling strength (required for M = 2).
    pub rho0: Option<f64>,
    /// Lattice size; `None` sizes the chain from `t_max`.
    pub sites: Option<usize>,
    pub t_max: f64,
    pub samples: usize,
    pub initial_state: InitialState,
    /// rho1 / rho0 = J' / J. `None` means 0 for dynamics and the array
    /// default for `experiment`.
    pub imperfection_ratio: Option<f64>,
    /// Lattice sites whose probability is recorded; empty picks a default set.
    pub record_sites: Vec<usize>,
    pub z_max_mm: f64,
    pub n_periods: u32,
    pub kappa0: Option<f64>,
    pub d0: Option<f64>,
    pub observable: Option<Observable>,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub threads: Option<usize>,
    pub seedless: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Design,
            points: IntRange::single(3),
            spacing: IntRange::single(4),
            hopping: 1.0,
            detuning: 0.0,
            rho0: None,
            sites: None,
            t_max: 15.0,
            samples: 2000,
            initial_state: InitialState::Atom,
            imperfection_ratio: None,
            record_sites: Vec::new(),
            z_max_mm: 100.0,
            n_periods: crate::experiment::DEFAULT_PERIODS,
            kappa0: None,
            d0: None,
            observable: None,
            out_dir: PathBuf::from("out"),
            format: OutputFormat::Csv,
            threads: None,
            seedless: false,
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
    }

    /// Check every parameter against the bounds of the operations it feeds.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be finite and > 0, got {v}")))
            }
        };
        positive("J", self.hopping)?;
        if !self.detuning.is_finite() {
            return Err(Error::config("omega_a must be finite"));
        }
        if let Some(r) = self.rho0 {
            if !(r.is_finite() && r >= 0.0) {
                return Err(Error::config(format!("rho0 must be finite and >= 0, got {r}")));
            }
        }
        if self.points.start == 0 || self.spacing.start == 0 {
            return Err(Error::config("M and n0 must be >= 1"));
        }
        if let Some(r) = self.imperfection_ratio {
            if !(0.0..1.0).contains(&r) {
                return Err(Error::config(format!("imperfection ratio must lie in [0, 1), got {r}")));
            }
        }
        if let Some(n) = self.sites {
            if n == 0 {
                return Err(Error::config("N must be >= 1"));
            }
        }
        if let Some(t) = self.threads {
            if t == 0 {
                return Err(Error::config("--threads must be >= 1"));
            }
        }
        match self.command {
            Command::Evolve => {
                positive("t_max", self.t_max)?;
                if self.samples < 2 {
                    return Err(Error::config("samples must be >= 2"));
                }
            }
            Command::Experiment => {
                positive("z_max", self.z_max_mm)?;
                if self.n_periods == 0 {
                    return Err(Error::config("n_periods must be >= 1"));
                }
                match (self.kappa0, self.d0) {
                    (Some(_), None) | (None, Some(_)) => {
                        return Err(Error::config("kappa0 and d0 must be given together"))
                    }
                    _ => {}
                }
            }
            Command::Sweep if self.observable.is_none() => {
                return Err(Error::config("sweep needs --observable"));
            }
            _ => {}
        }
        if self.command != Command::Sweep {
            self.points.value("M")?;
            self.spacing.value("n0")?;
        }
        if !matches!(self.command, Command::Spectrum | Command::Evolve | Command::Sweep) && self.detuning != 0.0 {
            return Err(Error::config("designs place the atom at the band centre; omega_a must be 0"));
        }
        if self.t_max.is_nan() || self.t_max < 0.0 {
            return Err(Error::config("t_max must be >= 0"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let r: IntRange = "8:80:8".parse().unwrap();
        assert_eq!(r.values(), (1..=10).map(|k| 8 * k).collect::<Vec<_>>());
        assert_eq!("4".parse::<IntRange>().unwrap().values(), vec![4]);
        assert_eq!("2:4".parse::<IntRange>().unwrap().values(), vec![2, 3, 4]);
        assert!("8:4".parse::<IntRange>().is_err());
        assert!("1:5:0".parse::<IntRange>().is_err());
        assert!("a".parse::<IntRange>().is_err());
        assert_eq!(r.to_string(), "8:80:8");
        assert!(r.value("n0").is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = RunConfig {
            command: Command::Sweep,
            spacing: "8:80:8".parse().unwrap(),
            observable: Some(Observable::BocProb),
            ..RunConfig::default()
        };
        let text = serde_json::to_string(&c).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
        let partial: RunConfig = serde_json::from_str(r#"{"command": "evolve", "spacing": 28, "t_max": 400}"#).unwrap();
        assert_eq!(partial.spacing, IntRange::single(28));
        assert_eq!(partial.samples, 2000);
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn validation() {
        let ok = RunConfig::default();
        ok.validate().unwrap();
        let bad = |f: fn(&mut RunConfig)| {
            let mut c = RunConfig::default();
            f(&mut c);
            assert!(matches!(c.validate(), Err(Error::Config(_))));
        };
        bad(|c| c.hopping = 0.0);
        bad(|c| c.imperfection_ratio = Some(1.0));
        bad(|c| c.spacing = "4:8".parse().unwrap());
        bad(|c| c.detuning = 0.5);
        bad(|c| {
            c.command = Command::Sweep;
        });
        bad(|c| {
            c.command = Command::Experiment;
            c.kappa0 = Some(1.0);
        });
        bad(|c| {
            c.command = Command::Evolve;
            c.samples = 1;
        });
    }
}
