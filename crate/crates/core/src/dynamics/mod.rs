//! Exact single-excitation time evolution by spectral decomposition.

mod analysis;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeConfig, Spectrum, ATOM};

pub use analysis::{
    compare_with_prediction, compare_with_residue, default_transient, extract_oscillation,
    extract_oscillation_for, sinusoid_fit_residual, two_pole_fit_residual, Oscillation,
};

const NORM_TOL: f64 = 1e-10;

/// Complex amplitude on the atom plus one per lattice site (site `n` at `sites[n - 1]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleExcitationState {
    pub atom: Complex64,
    pub sites: Vec<Complex64>,
}

impl SingleExcitationState {
    /// Checked constructor; the state must be normalized to within 1e-10.
    pub fn new(atom: Complex64, sites: Vec<Complex64>) -> Result<Self> {
        let state = SingleExcitationState { atom, sites };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::config(format!(
                "state norm^2 is {norm}, expected 1 within {NORM_TOL:e}"
            )));
        }
        Ok(state)
    }

    /// Rescale an arbitrary nonzero vector to unit norm.
    pub fn normalized(atom: Complex64, sites: Vec<Complex64>) -> Result<Self> {
        let mut state = SingleExcitationState { atom, sites };
        let norm = state.norm_sqr().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::numerical(format!("cannot normalize a state of norm {norm}")));
        }
        state.scale(Complex64::new(1.0 / norm, 0.0));
        Ok(state)
    }

    /// Build from a basis vector `[atom, site 1, ..., site N]`.
    pub fn from_vector(v: &[Complex64]) -> Result<Self> {
        let (atom, sites) = v
            .split_first()
            .ok_or_else(|| Error::config("state vector is empty"))?;
        SingleExcitationState::new(*atom, sites.to_vec())
    }

    pub fn atom_excited(sites: usize) -> Self {
        SingleExcitationState {
            atom: Complex64::new(1.0, 0.0),
            sites: vec![Complex64::new(0.0, 0.0); sites],
        }
    }

    pub fn dim(&self) -> usize {
        self.sites.len() + 1
    }

    /// Amplitude at basis index `i` (0 is the atom).
    pub fn get(&self, i: usize) -> Complex64 {
        if i == ATOM {
            self.atom
        } else {
            self.sites[i - 1]
        }
    }

    /// Amplitude on 1-based lattice site `n`.
    pub fn site(&self, n: usize) -> Complex64 {
        self.sites[n - 1]
    }

    pub fn as_vector(&self) -> Vec<Complex64> {
        std::iter::once(self.atom).chain(self.sites.iter().copied()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.atom.norm_sqr() + self.sites.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }

    /// <self | other>
    pub fn inner(&self, other: &SingleExcitationState) -> Complex64 {
        self.atom.conj() * other.atom
            + self
                .sites
                .iter()
                .zip(&other.sites)
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>()
    }

    pub fn scale(&mut self, factor: Complex64) {
        self.atom *= factor;
        for a in &mut self.sites {
            *a *= factor;
        }
    }

    /// Probability on sites inside the inclusive range `[first, last]`.
    pub fn probability_in(&self, first: usize, last: usize) -> f64 {
        self.sites[first - 1..last].iter().map(|a| a.norm_sqr()).sum()
    }
}

/// The excitation starts in the atom, the chain in vacuum.
pub fn initial_atom_excited(config: &LatticeConfig) -> SingleExcitationState {
    SingleExcitationState::atom_excited(config.sites)
}

/// Observables sampled on a time grid. `prob_sites[t][k]` refers to `site_indices[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub prob_atom: Vec<f64>,
    pub leakage: Option<Vec<f64>>,
    pub site_indices: Vec<usize>,
    pub prob_sites: Option<Vec<Vec<f64>>>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::analysis("time samples must be strictly increasing"));
        }
        if self.prob_atom.len() != self.times.len() {
            return Err(Error::analysis("prob_atom length differs from the time grid"));
        }
        let in_range = |p: &f64| (-1e-12..=1.0 + 1e-9).contains(p);
        let mut all_series = self
            .prob_atom
            .iter()
            .chain(self.leakage.iter().flatten())
            .chain(self.prob_sites.iter().flatten().flatten());
        if let Some(p) = all_series.find(|p| !in_range(p)) {
            return Err(Error::analysis(format!("probability {p} outside [0, 1]")));
        }
        Ok(())
    }
}

/// `n` uniform samples over `[0, t_max]`, both ends included.
pub fn uniform_times(t_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect(),
    }
}

/// An initial state expanded in the eigenbasis: psi(t) = sum_E e^{-iEt} <E|psi0> |E>.
pub struct Propagator<'a> {
    spectrum: &'a Spectrum,
    coefficients: Vec<Complex64>,
}

impl<'a> Propagator<'a> {
    pub fn new(spectrum: &'a Spectrum, psi0: &SingleExcitationState) -> Result<Self> {
        if psi0.dim() != spectrum.dim() {
            return Err(Error::config(format!(
                "state dimension {} does not match spectrum dimension {}",
                psi0.dim(),
                spectrum.dim()
            )));
        }
        let v0 = psi0.as_vector();
        let coefficients = (0..spectrum.len())
            .map(|e| {
                spectrum
                    .vector(e)
                    .iter()
                    .zip(&v0)
                    .map(|(&v, &a)| a * v)
                    .sum()
            })
            .collect();
        Ok(Propagator { spectrum, coefficients })
    }

    /// <E|psi0> for every eigenstate, aligned with the eigenvalues.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    fn phased(&self, t: f64) -> Vec<Complex64> {
        self.spectrum
            .eigenvalues()
            .iter()
            .zip(&self.coefficients)
            .map(|(&e, &c)| c * Complex64::from_polar(1.0, -e * t))
            .collect()
    }

    pub fn state_at(&self, t: f64) -> SingleExcitationState {
        let phased = self.phased(t);
        let mut v = vec![Complex64::new(0.0, 0.0); self.spectrum.dim()];
        for (e, p) in phased.iter().enumerate() {
            for (out, &x) in v.iter_mut().zip(self.spectrum.vector(e)) {
                *out += p * x;
            }
        }
        let atom = v[0];
        v.remove(0);
        SingleExcitationState { atom, sites: v }
    }

    /// Amplitudes of the selected basis rows at time `t`.
    pub fn rows_at(&self, rows: &RowSelection, t: f64) -> Vec<Complex64> {
        let phased = self.phased(t);
        rows.data
            .chunks_exact(self.spectrum.len())
            .map(|row| row.iter().zip(&phased).map(|(&v, &p)| p * v).sum())
            .collect()
    }
}

/// Eigenvector components of a few basis rows, stored contiguously.
pub struct RowSelection {
    pub rows: Vec<usize>,
    data: Vec<f64>,
}

impl RowSelection {
    pub fn new(spectrum: &Spectrum, rows: Vec<usize>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|&&r| r >= spectrum.dim()) {
            return Err(Error::config(format!(
                "basis row {r} outside 0..{}",
                spectrum.dim()
            )));
        }
        let mut data = Vec::with_capacity(rows.len() * spectrum.len());
        for &r in &rows {
            data.extend((0..spectrum.len()).map(|e| spectrum.component(r, e)));
        }
        Ok(RowSelection { rows, data })
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::config("time samples must be finite"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::config("time samples must be sorted"));
    }
    Ok(())
}

/// Full states at every requested time.
pub fn evolve(
    spectrum: &Spectrum,
    psi0: &SingleExcitationState,
    times: &[f64],
) -> Result<Vec<SingleExcitationState>> {
    check_times(times)?;
    let prop = Propagator::new(spectrum, psi0)?;
    Ok(times.par_iter().map(|&t| prop.state_at(t)).collect())
}

/// Atom, per-site and leakage probabilities from full states.
/// Leakage counts sites strictly outside the first and last coupling point.
pub fn observables(
    states: &[SingleExcitationState],
    times: &[f64],
    config: &LatticeConfig,
    site_indices: &[usize],
) -> Result<TimeSeries> {
    if states.len() != times.len() {
        return Err(Error::config("one state per time sample is required"));
    }
    check_sites(config, site_indices)?;
    let span = config.coupling_span();
    let prob_atom = states.iter().map(|s| s.atom.norm_sqr()).collect();
    let leakage = span.map(|(first, last)| {
        states
            .iter()
            .map(|s| s.probability_in(1, config.sites) - s.probability_in(first, last))
            .map(|x| x.max(0.0))
            .collect()
    });
    let prob_sites = (!site_indices.is_empty()).then(|| {
        states
            .iter()
            .map(|s| site_indices.iter().map(|&n| s.site(n).norm_sqr()).collect())
            .collect()
    });
    Ok(TimeSeries {
        times: times.to_vec(),
        prob_atom,
        leakage,
        site_indices: site_indices.to_vec(),
        prob_sites,
    })
}

fn check_sites(config: &LatticeConfig, sites: &[usize]) -> Result<()> {
    if let Some(n) = sites.iter().find(|&&n| n < 1 || n > config.sites) {
        return Err(Error::config(format!("site {n} outside 1..={}", config.sites)));
    }
    Ok(())
}

/// Same observables as [`observables`] without forming full states: only the
/// atom row, the coupling region and the requested sites are propagated.
/// Leakage is 1 minus the atom and in-region probability, clamped at 0.
pub fn evolve_observables(
    spectrum: &Spectrum,
    psi0: &SingleExcitationState,
    times: &[f64],
    config: &LatticeConfig,
    site_indices: &[usize],
) -> Result<TimeSeries> {
    check_times(times)?;
    check_sites(config, site_indices)?;
    if spectrum.dim() != config.dim() {
        return Err(Error::config("spectrum does not belong to this configuration"));
    }
    let prop = Propagator::new(spectrum, psi0)?;
    let span = config.coupling_span();
    let region: Vec<usize> = span.map(|(a, b)| (a..=b).collect()).unwrap_or_default();
    let mut rows = vec![ATOM];
    rows.extend(&region);
    rows.extend(site_indices);
    let selection = RowSelection::new(spectrum, rows)?;
    let total = psi0.norm_sqr();
    let samples: Vec<Vec<Complex64>> = times.par_iter().map(|&t| prop.rows_at(&selection, t)).collect();
    let prob_atom = samples.iter().map(|a| a[0].norm_sqr()).collect();
    let leakage = span.map(|_| {
        samples
            .iter()
            .map(|a| {
                let inside: f64 = a[..=region.len()].iter().map(|x| x.norm_sqr()).sum();
                (total - inside).max(0.0)
            })
            .collect()
    });
    let offset = 1 + region.len();
    let prob_sites = (!site_indices.is_empty()).then(|| {
        samples
            .iter()
            .map(|a| a[offset..].iter().map(|x| x.norm_sqr()).collect())
            .collect()
    });
    Ok(TimeSeries {
        times: times.to_vec(),
        prob_atom,
        leakage,
        site_indices: site_indices.to_vec(),
        prob_sites,
    })
}
