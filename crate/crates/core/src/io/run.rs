use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Command, InitialState, Observable, RunConfig};
use super::export::{pstate_table, spectrum_table, timeseries_table, write_report, write_table, Cell, Table};
use crate::bic_subspace::build_p_state;
use crate::dynamics::{evolve_observables, initial_atom_excited, uniform_times, TimeSeries};
use crate::error::{Error, Result};
use crate::experiment::{
    waveguide_parameters, with_imperfections, CouplingCalibration, DimensionlessPlan, WaveguidePlan,
};
use crate::lattice::{
    auto_sites, classify_states, solve, BoundStateRecord, ClassifyThresholds, LatticeConfig, StateKind,
    UniformGiantAtomLayout,
};
use crate::spectral::{
    continuous_waveguide_comparison, design_oscillating_bic, emitter_probability_bic_asymptotic,
    non_markovianity_asymptotic, predict_boc, BicDesign, BocPrediction, ContinuousComparison,
};

/// Largest coupling region recorded site by site by default.
const FULL_REGION_LIMIT: usize = 64;

/// Files written by a run plus a one-line human summary.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DesignReport {
    pub design: BicDesign,
    pub emitter_probability_asymptotic: f64,
    pub nm_ratio_asymptotic: f64,
    pub boc: BocPrediction,
    pub continuous: ContinuousComparison,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlanReport {
    pub design: BicDesign,
    pub plan: WaveguidePlan,
    pub dimensionless: DimensionlessPlan,
}

/// Validate, then execute the configured command.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    match config.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::config(format!("cannot start {k} worker threads: {e}")))?
            .install(|| dispatch(config)),
        None => dispatch(config),
    }
}

fn dispatch(config: &RunConfig) -> Result<RunOutput> {
    match config.command {
        Command::Design => run_design(config),
        Command::Spectrum => run_spectrum(config),
        Command::Evolve => run_evolve(config),
        Command::Bicstate => run_bicstate(config),
        Command::Experiment => run_experiment(config),
        Command::Sweep => run_sweep(config),
    }
}

fn single_point(config: &RunConfig) -> Result<(usize, usize)> {
    Ok((config.points.value("M")?, config.spacing.value("n0")?))
}

fn design_for(config: &RunConfig, m: usize, n0: usize) -> Result<BicDesign> {
    design_oscillating_bic(m, n0, config.hopping)
}

pub fn design_report(design: &BicDesign) -> Result<DesignReport> {
    Ok(DesignReport {
        design: *design,
        emitter_probability_asymptotic: emitter_probability_bic_asymptotic(design.points, design.spacing),
        nm_ratio_asymptotic: non_markovianity_asymptotic(design.points, design.spacing),
        boc: predict_boc(design)?,
        continuous: continuous_waveguide_comparison(design),
    })
}

/// Lattice for a run: explicit rho0 if given, otherwise the designed one;
/// the coupling block is centred in N sites (given, or sized from t_max).
pub fn lattice_for(config: &RunConfig, m: usize, n0: usize) -> Result<(Option<BicDesign>, LatticeConfig)> {
    let design = match config.rho0 {
        Some(_) => design_for(config, m, n0).ok(),
        None => Some(
            design_for(config, m, n0)
                .map_err(|e| e.context(format!("no designed rho0 for M = {m}, n0 = {n0}; pass --rho0")))?,
        ),
    };
    let rho0 = config.rho0.or(design.map(|d| d.rho0)).unwrap_or_default();
    let layout = UniformGiantAtomLayout::new(m, n0, rho0, 1);
    let sites = config
        .sites
        .unwrap_or_else(|| auto_sites(layout.span(), config.hopping, config.t_max));
    let ideal = LatticeConfig::uniform(sites, config.hopping, config.detuning, &layout.centered_in(sites))?;
    Ok((design, ideal))
}

fn imperfect(config: &RunConfig, ideal: &LatticeConfig) -> Result<LatticeConfig> {
    match config.imperfection_ratio {
        Some(r) if r > 0.0 => with_imperfections(ideal, r),
        _ => Ok(ideal.clone()),
    }
}

fn run_design(config: &RunConfig) -> Result<RunOutput> {
    let (m, n0) = single_point(config)?;
    let report = design_report(&design_for(config, m, n0)?)?;
    let path = write_report(&config.out_dir, "design", &report, config)?;
    let d = &report.design;
    Ok(RunOutput {
        files: vec![path],
        summary: format!(
            "M = {m}, n0 = {n0}: rho0/J = {:.6}, omega_bic/J = {:.6}, period = {:.6}/J, phi_bic_sq = {:.6}, nm_ratio = {:.6}, BOC at +-{:.6} with probability {:.6}",
            d.rho0 / d.hopping,
            d.omega_bic / d.hopping,
            d.period * d.hopping,
            d.phi_bic_sq,
            d.nm_ratio,
            report.boc.energies[1],
            report.boc.emitter_probability[1]
        ),
    })
}

fn classified(lattice: &LatticeConfig) -> Result<Vec<BoundStateRecord>> {
    let (_, spectrum) = solve(lattice)?;
    Ok(classify_states(&spectrum, lattice, ClassifyThresholds::default()))
}

fn run_spectrum(config: &RunConfig) -> Result<RunOutput> {
    let (m, n0) = single_point(config)?;
    let (_, ideal) = lattice_for(config, m, n0)?;
    let lattice = imperfect(config, &ideal)?;
    let records = classified(&lattice)?;
    let path = write_table(&config.out_dir, "spectrum", &spectrum_table(&records), config)?;
    let count = |k| records.iter().filter(|r| r.kind == k).count();
    Ok(RunOutput {
        files: vec![path],
        summary: format!(
            "{} eigenstates on N = {}: {} BIC, {} BOC",
            records.len(),
            lattice.sites,
            count(StateKind::Bic),
            count(StateKind::Boc)
        ),
    })
}

fn default_record_sites(lattice: &LatticeConfig) -> Vec<usize> {
    match lattice.coupling_span() {
        Some((first, last)) if last - first < FULL_REGION_LIMIT => (first..=last).collect(),
        _ => {
            let mut s: Vec<usize> = lattice.couplings.iter().map(|c| c.site).collect();
            s.sort_unstable();
            s
        }
    }
}

/// Atom, leakage and site probabilities for an evolve configuration.
pub fn evolve_series(config: &RunConfig) -> Result<TimeSeries> {
    let (m, n0) = single_point(config)?;
    let (design, ideal) = lattice_for(config, m, n0)?;
    let lattice = imperfect(config, &ideal)?;
    let psi0 = match config.initial_state {
        InitialState::Atom => initial_atom_excited(&lattice),
        InitialState::PState => {
            let design = design.ok_or_else(|| {
                Error::config(format!("the p state needs a BIC design, which M = {m}, n0 = {n0} lacks"))
            })?;
            build_p_state(&design, &ideal)?.state
        }
    };
    let sites = if config.record_sites.is_empty() {
        default_record_sites(&lattice)
    } else {
        config.record_sites.clone()
    };
    let (_, spectrum) = solve(&lattice)?;
    let times = uniform_times(config.t_max, config.samples);
    evolve_observables(&spectrum, &psi0, &times, &lattice, &sites)
}

fn run_evolve(config: &RunConfig) -> Result<RunOutput> {
    let ts = evolve_series(config)?;
    let path = write_table(&config.out_dir, "timeseries", &timeseries_table(&ts), config)?;
    let last = ts.len() - 1;
    Ok(RunOutput {
        files: vec![path],
        summary: format!(
            "{} samples to t = {}: final atom probability {:.6}, leakage {:.3e}",
            ts.len(),
            ts.times[last],
            ts.prob_atom[last],
            ts.leakage.as_ref().map_or(0.0, |l| l[last])
        ),
    })
}

fn run_bicstate(config: &RunConfig) -> Result<RunOutput> {
    let (m, n0) = single_point(config)?;
    let (design, ideal) = lattice_for(config, m, n0)?;
    let design = design.ok_or_else(|| Error::config(format!("no BIC design for M = {m}, n0 = {n0}")))?;
    let p = build_p_state(&design, &ideal)?;
    let path = write_table(&config.out_dir, "pstate", &pstate_table(&p.table), config)?;
    Ok(RunOutput {
        files: vec![path],
        summary: format!("|p> occupies {} sites", p.table.len()),
    })
}

pub fn plan_report(config: &RunConfig) -> Result<PlanReport> {
    let (m, n0) = single_point(config)?;
    let design = design_for(config, m, n0)?;
    let mut plan = waveguide_parameters(&design, config.z_max_mm, config.n_periods)?;
    if let Some(r) = config.imperfection_ratio {
        plan.set_imperfection_ratio(r)?;
    }
    if let (Some(k), Some(d)) = (config.kappa0, config.d0) {
        plan.calibrate(&CouplingCalibration::new(k, d)?)?;
    }
    Ok(PlanReport {
        design,
        dimensionless: plan.to_dimensionless(),
        plan,
    })
}

fn run_experiment(config: &RunConfig) -> Result<RunOutput> {
    let report = plan_report(config)?;
    let path = write_report(&config.out_dir, "plan", &report, config)?;
    let p = &report.plan;
    Ok(RunOutput {
        files: vec![path],
        summary: format!(
            "J = {:.6} /mm, rho0 = {:.6} /mm, rho1 = J' ratio {} over z_max = {} mm ({} periods)",
            p.j_physical, p.rho0_physical, p.imperfection_ratio, p.z_max_mm, p.n_periods
        ),
    })
}

fn upper_state(records: &[BoundStateRecord], kind: StateKind) -> Result<f64> {
    records
        .iter()
        .filter(|r| r.kind == kind)
        .max_by(|a, b| a.energy.total_cmp(&b.energy))
        .map(|r| r.emitter_probability)
        .ok_or_else(|| Error::numerical(format!("no {} found in the spectrum", kind.as_str())))
}

/// One observable at one (M, n0) point, as a standalone run would compute it.
pub fn observable_value(config: &RunConfig, observable: Observable, m: usize, n0: usize) -> Result<f64> {
    let design = || design_for(config, m, n0);
    Ok(match observable {
        Observable::OmegaBic => design()?.omega_bic,
        Observable::Rho0 => design()?.rho0,
        Observable::BicProb => design()?.phi_bic_sq,
        Observable::BicProbAsymptotic => emitter_probability_bic_asymptotic(m, n0),
        Observable::NmRatio => design()?.nm_ratio,
        Observable::NmRatioAsymptotic => non_markovianity_asymptotic(m, n0),
        Observable::BocEnergy => predict_boc(&design()?)?.energies[1],
        Observable::BocProb => predict_boc(&design()?)?.emitter_probability[1],
        Observable::BocProbAsymptotic => predict_boc(&design()?)?.emitter_probability_asymptotic,
        Observable::BocProbNumeric | Observable::BicProbNumeric => {
            let (_, ideal) = lattice_for(config, m, n0)?;
            let records = classified(&imperfect(config, &ideal)?)?;
            let kind = if observable == Observable::BocProbNumeric {
                StateKind::Boc
            } else {
                StateKind::Bic
            };
            upper_state(&records, kind)?
        }
    })
}

/// Sweep rows in (M, n0) order, computed in parallel.
pub fn sweep_table(config: &RunConfig) -> Result<Table> {
    let observable = config
        .observable
        .ok_or_else(|| Error::config("sweep needs --observable"))?;
    let points: Vec<(usize, usize)> = config
        .points
        .values()
        .into_iter()
        .flat_map(|m| config.spacing.values().into_iter().map(move |n0| (m, n0)))
        .collect();
    let values: Vec<f64> = points
        .par_iter()
        .map(|&(m, n0)| {
            observable_value(config, observable, m, n0).map_err(|e| e.context(format!("M = {m}, n0 = {n0}")))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(["M", "n0", "observable", "value"].map(String::from).to_vec());
    for ((m, n0), v) in points.into_iter().zip(values) {
        table.push(vec![
            Cell::Int(m as i64),
            Cell::Int(n0 as i64),
            Cell::Text(observable.as_str().into()),
            Cell::Float(v),
        ]);
    }
    Ok(table)
}

fn run_sweep(config: &RunConfig) -> Result<RunOutput> {
    let table = sweep_table(config)?;
    let path = write_table(&config.out_dir, "sweep", &table, config)?;
    Ok(RunOutput {
        files: vec![path],
        summary: format!("{} sweep points", table.rows.len()),
    })
}
