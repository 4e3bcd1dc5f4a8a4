use std::path::PathBuf;

use clap::Parser;

use super::config::{Command, InitialState, IntRange, Observable, OutputFormat, RunConfig};
use crate::error::Result;

/// Giant atom on a tight-binding lattice: designs, spectra, dynamics and
/// experiment plans for oscillating bound states in the continuum.
#[derive(Debug, Clone, Parser)]
#[command(name = "giantbic", version)]
pub struct Cli {
    /// What to compute; may instead come from --config.
    pub command: Option<Command>,

    /// JSON file with RunConfig fields; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Number of coupling points, or a range start:stop[:step] for sweeps.
    #[arg(long = "M", value_name = "M")]
    pub points: Option<IntRange>,

    /// Coupling-point spacing in sites, or a range for sweeps.
    #[arg(long = "n0", value_name = "N0")]
    pub spacing: Option<IntRange>,

    /// Lattice hopping.
    #[arg(long = "J", value_name = "J")]
    pub hopping: Option<f64>,

    /// Atom detuning from the band centre.
    #[arg(long = "omega-a", allow_negative_numbers = true)]
    pub detuning: Option<f64>,

    /// Coupling strength overriding the design (required when no design exists, e.g. M = 2).
    #[arg(long)]
    pub rho0: Option<f64>,

    /// Lattice size; sized from --tmax when omitted.
    #[arg(long = "N", value_name = "N")]
    pub sites: Option<usize>,

    #[arg(long = "tmax")]
    pub t_max: Option<f64>,

    #[arg(long)]
    pub samples: Option<usize>,

    #[arg(long = "initial")]
    pub initial_state: Option<InitialState>,

    /// rho1/rho0 = J'/J.
    #[arg(long = "imperfection")]
    pub imperfection_ratio: Option<f64>,

    /// Comma-separated lattice sites to record.
    #[arg(long = "record-sites", value_delimiter = ',')]
    pub record_sites: Option<Vec<usize>>,

    /// Waveguide array length in mm.
    #[arg(long = "zmax")]
    pub z_max_mm: Option<f64>,

    /// Oscillation periods that must fit in the array.
    #[arg(long = "periods")]
    pub n_periods: Option<u32>,

    /// Coupling at zero separation, 1/mm.
    #[arg(long)]
    pub kappa0: Option<f64>,

    /// Coupling decay length, mm.
    #[arg(long)]
    pub d0: Option<f64>,

    #[arg(long)]
    pub observable: Option<Observable>,

    /// Output directory.
    #[arg(long = "out")]
    pub out_dir: Option<PathBuf>,

    #[arg(long)]
    pub format: Option<OutputFormat>,

    /// Worker threads for parallel stages.
    #[arg(long)]
    pub threads: Option<usize>,

    /// Accepted for compatibility; every computation is deterministic.
    #[arg(long)]
    pub seedless: bool,
}

impl Cli {
    /// Merge the optional config file with the flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_json_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field.clone() {
                    c.$field = v;
                }
            )*};
        }
        set!(command, points, spacing, hopping, detuning, t_max, samples, initial_state);
        set!(record_sites, z_max_mm, n_periods, out_dir, format);
        if self.rho0.is_some() {
            c.rho0 = self.rho0;
        }
        if self.sites.is_some() {
            c.sites = self.sites;
        }
        if self.imperfection_ratio.is_some() {
            c.imperfection_ratio = self.imperfection_ratio;
        }
        if self.kappa0.is_some() {
            c.kappa0 = self.kappa0;
        }
        if self.d0.is_some() {
            c.d0 = self.d0;
        }
        if self.observable.is_some() {
            c.observable = self.observable;
        }
        if self.threads.is_some() {
            c.threads = self.threads;
        }
        c.seedless |= self.seedless;
        Ok(c)
    }
}
