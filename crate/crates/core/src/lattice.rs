//! Finite single-excitation model of a giant atom on an open tight-binding chain.
//!
//! The basis is fixed as `[atom, site 1, ..., site N]`, so basis index `n`
//! (for `n >= 1`) is the 1-based lattice site `n`. All exported site indices
//! use the same 1-based convention.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of the atom in the single-excitation basis.
pub const ATOM: usize = 0;

/// One atom-lattice coupling point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    /// 1-based lattice site.
    pub site: usize,
    pub strength: f64,
}

/// Full physical specification of the atom plus chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    /// Number of lattice sites N.
    pub sites: usize,
    /// Nearest-neighbour hopping J.
    pub hopping: f64,
    /// Atom detuning omega_a.
    pub detuning: f64,
    pub couplings: Vec<Coupling>,
    /// Atom coupling to the neighbours `n_j +- 1` of every coupling point.
    #[serde(default)]
    pub rho1: f64,
    /// Direct hop between `n_j - 1` and `n_j + 1` around every coupling point.
    #[serde(default)]
    pub bypass_hopping: f64,
}

impl LatticeConfig {
    pub fn new(sites: usize, hopping: f64, detuning: f64, couplings: Vec<Coupling>) -> Self {
        LatticeConfig {
            sites,
            hopping,
            detuning,
            couplings,
            rho1: 0.0,
            bypass_hopping: 0.0,
        }
    }

    /// Uniform giant atom on `sites` lattice sites.
    pub fn uniform(
        sites: usize,
        hopping: f64,
        detuning: f64,
        layout: &UniformGiantAtomLayout,
    ) -> Result<Self> {
        let couplings = expand_layout(layout, sites)?;
        let config = LatticeConfig::new(sites, hopping, detuning, couplings);
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites == 0 {
            return Err(Error::config("lattice needs at least one site"));
        }
        if !(self.hopping.is_finite() && self.hopping > 0.0) {
            return Err(Error::config(format!(
                "hopping J must be finite and positive, got {}",
                self.hopping
            )));
        }
        for (name, v) in [
            ("detuning", self.detuning),
            ("rho1", self.rho1),
            ("bypass_hopping", self.bypass_hopping),
        ] {
            if !v.is_finite() {
                return Err(Error::config(format!("{name} must be finite, got {v}")));
            }
        }
        let mut seen = vec![false; self.sites + 1];
        for c in &self.couplings {
            if c.site < 1 || c.site > self.sites {
                return Err(Error::config(format!(
                    "coupling site {} outside 1..={}",
                    c.site, self.sites
                )));
            }
            if seen[c.site] {
                return Err(Error::config(format!("duplicate coupling site {}", c.site)));
            }
            seen[c.site] = true;
            if !c.strength.is_finite() {
                return Err(Error::config(format!(
                    "coupling strength at site {} is not finite",
                    c.site
                )));
            }
        }
        if self.has_imperfections() {
            for c in &self.couplings {
                if c.site < 2 || c.site + 1 > self.sites {
                    return Err(Error::config(format!(
                        "coupling site {} needs both neighbours inside 1..={} when rho1 or J' is set",
                        c.site, self.sites
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn has_imperfections(&self) -> bool {
        self.rho1 != 0.0 || self.bypass_hopping != 0.0
    }

    /// Hilbert-space dimension N + 1.
    pub fn dim(&self) -> usize {
        self.sites + 1
    }

    pub fn is_coupled(&self) -> bool {
        self.couplings.iter().any(|c| c.strength != 0.0) || self.rho1 != 0.0
    }

    /// First and last coupling site, if any.
    pub fn coupling_span(&self) -> Option<(usize, usize)> {
        let first = self.couplings.iter().map(|c| c.site).min()?;
        let last = self.couplings.iter().map(|c| c.site).max()?;
        Some((first, last))
    }

    /// Sites reached by any atom-coupling or bypass term.
    fn interaction_span(&self) -> Option<(usize, usize)> {
        let (first, last) = self.coupling_span()?;
        if self.has_imperfections() {
            Some((first - 1, last + 1))
        } else {
            Some((first, last))
        }
    }
}

/// M equally spaced coupling points of equal strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGiantAtomLayout {
    /// Number of coupling points M.
    pub points: usize,
    /// Spacing n0 in sites.
    pub spacing: usize,
    /// Uniform coupling strength rho0.
    pub strength: f64,
    /// 1-based site of the first coupling point.
    pub offset: usize,
}

impl UniformGiantAtomLayout {
    pub fn new(points: usize, spacing: usize, strength: f64, offset: usize) -> Self {
        UniformGiantAtomLayout {
            points,
            spacing,
            strength,
            offset,
        }
    }

    /// Distance between the first and last coupling point, (M-1) n0.
    pub fn span(&self) -> usize {
        self.points.saturating_sub(1) * self.spacing
    }

    /// Offset that centres the coupling block in a chain of `sites` sites.
    pub fn centered_offset(&self, sites: usize) -> usize {
        sites.saturating_sub(self.span()) / 2 + 1
    }

    pub fn centered_in(mut self, sites: usize) -> Self {
        self.offset = self.centered_offset(sites);
        self
    }
}

/// Chain length that keeps reflections off the open ends away from the
/// coupling block up to `t_max`: span + 2 ceil(2 J t_max) + 40.
pub fn auto_sites(span: usize, hopping: f64, t_max: f64) -> usize {
    span + 2 * (2.0 * hopping * t_max).ceil().max(0.0) as usize + 40
}

/// Expand a uniform layout into explicit `(site, strength)` couplings.
pub fn expand_layout(layout: &UniformGiantAtomLayout, sites: usize) -> Result<Vec<Coupling>> {
    if layout.points == 0 {
        return Err(Error::config("layout needs at least one coupling point (M >= 1)"));
    }
    if layout.spacing == 0 {
        return Err(Error::config("layout spacing n0 must be >= 1"));
    }
    if layout.offset < 1 {
        return Err(Error::config("layout offset must be >= 1"));
    }
    let last = layout.offset + layout.span();
    if last > sites {
        return Err(Error::config(format!(
            "layout does not fit: offset + (M-1)*n0 = {} + {} = {} > N = {}",
            layout.offset,
            layout.span(),
            last,
            sites
        )));
    }
    Ok((0..layout.points)
        .map(|j| Coupling {
            site: layout.offset + j * layout.spacing,
            strength: layout.strength,
        })
        .collect())
}

/// Dense real symmetric single-excitation Hamiltonian, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    fn set_symmetric(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.dim + col] = value;
        self.data[col * self.dim + row] = value;
    }

    /// Row-major matrix entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Nonzero entries `(row, col, value)` in row-major order.
    pub fn nonzeros(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let v = self.get(i, j);
                if v != 0.0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    /// `H x` using the sparse structure.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        for (i, j, v) in self.nonzeros() {
            y[i] += v * x[j];
        }
        y
    }
}

pub fn build_hamiltonian(config: &LatticeConfig) -> Result<HamiltonianMatrix> {
    config.validate()?;
    let dim = config.dim();
    let mut h = HamiltonianMatrix {
        dim,
        data: vec![0.0; dim * dim],
    };
    h.set_symmetric(ATOM, ATOM, config.detuning);
    for n in 1..config.sites {
        h.set_symmetric(n, n + 1, config.hopping);
    }
    for c in &config.couplings {
        h.set_symmetric(ATOM, c.site, c.strength);
    }
    if config.has_imperfections() {
        for c in &config.couplings {
            if config.rho1 != 0.0 {
                h.set_symmetric(ATOM, c.site - 1, config.rho1);
                h.set_symmetric(ATOM, c.site + 1, config.rho1);
            }
            if config.bypass_hopping != 0.0 {
                h.set_symmetric(c.site - 1, c.site + 1, config.bypass_hopping);
            }
        }
    }
    Ok(h)
}

/// Eigen-decomposition with ascending eigenvalues and orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct Spectrum {
    dim: usize,
    eigenvalues: Vec<f64>,
    /// Column-major: eigenvector `i` occupies `vectors[i*dim..(i+1)*dim]`.
    vectors: Vec<f64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn vector(&self, index: usize) -> &[f64] {
        &self.vectors[index * self.dim..(index + 1) * self.dim]
    }

    /// Component `row` of eigenvector `index`.
    pub fn component(&self, row: usize, index: usize) -> f64 {
        self.vectors[index * self.dim + row]
    }

    /// |<1_a|E>|^2 for every eigenstate.
    pub fn emitter_probabilities(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.component(ATOM, i).powi(2))
            .collect()
    }

    /// max_i ||H v_i - E_i v_i||.
    pub fn max_residual(&self, h: &HamiltonianMatrix) -> f64 {
        let nz = h.nonzeros();
        (0..self.len())
            .map(|i| {
                let v = self.vector(i);
                let mut hv = vec![0.0; self.dim];
                for &(r, c, x) in &nz {
                    hv[r] += x * v[c];
                }
                hv.iter()
                    .zip(v)
                    .map(|(a, b)| (a - self.eigenvalues[i] * b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// max_{i,j} |<v_i|v_j> - delta_ij|. O(dim^3).
    pub fn max_orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            for j in 0..=i {
                let dot: f64 = self.vector(i).iter().zip(self.vector(j)).map(|(a, b)| a * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Largest |E|, the spectral norm of H.
    pub fn norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, e| m.max(e.abs()))
    }

    /// Within every cluster of degenerate eigenvalues, rotate the basis so
    /// that each vector has a definite weight on sites outside `[first, last]`.
    /// A BIC that is exactly degenerate with a dark chain mode is otherwise
    /// returned mixed with it.
    pub fn separate_degenerate(&mut self, first: usize, last: usize, tol: f64) {
        let dim = self.dim;
        let outside = |v: &[f64], w: &[f64]| -> f64 {
            (1..first)
                .chain(last + 1..dim)
                .map(|r| v[r] * w[r])
                .sum()
        };
        let mut start = 0;
        while start < self.len() {
            let mut end = start + 1;
            while end < self.len() && self.eigenvalues[end] - self.eigenvalues[end - 1] <= tol {
                end += 1;
            }
            let k = end - start;
            if k > 1 {
                let w = faer::Mat::<f64>::from_fn(k, k, |a, b| {
                    outside(self.vector(start + a), self.vector(start + b))
                });
                if let Ok(evd) = w.self_adjoint_eigen(faer::Side::Lower) {
                    let q = evd.U();
                    let mut rotated = vec![0.0; k * dim];
                    for j in 0..k {
                        for a in 0..k {
                            let c = q[(a, j)];
                            let v = self.vector(start + a);
                            for (out, x) in rotated[j * dim..(j + 1) * dim].iter_mut().zip(v) {
                                *out += c * x;
                            }
                        }
                    }
                    self.vectors[start * dim..end * dim].copy_from_slice(&rotated);
                }
            }
            start = end;
        }
    }
}

pub fn diagonalize(h: &HamiltonianMatrix) -> Result<Spectrum> {
    if !h.is_symmetric() {
        return Err(Error::config("Hamiltonian is not symmetric"));
    }
    let dim = h.dim();
    let mat = faer::Mat::<f64>::from_fn(dim, dim, |i, j| h.get(i, j));
    let evd = mat.self_adjoint_eigen(faer::Side::Lower).map_err(|e| {
        Error::numerical(format!(
            "symmetric eigensolver did not converge on a {dim}x{dim} matrix ({} nonzeros): {e:?}",
            h.nonzeros().len()
        ))
    })?;
    let values = evd.S().column_vector();
    let u = evd.U();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut vectors = Vec::with_capacity(dim * dim);
    for &i in &order {
        vectors.extend((0..dim).map(|r| u[(r, i)]));
    }
    let spectrum = Spectrum {
        dim,
        eigenvalues,
        vectors,
    };
    let scale = spectrum.norm().max(f64::MIN_POSITIVE);
    let residual = spectrum.max_residual(h);
    if residual > 1e-10 * scale {
        return Err(Error::numerical(format!(
            "eigenpair residual {residual:.3e} exceeds 1e-10 * ||H|| = {:.3e} (dim {dim})",
            1e-10 * scale
        )));
    }
    Ok(spectrum)
}

/// Build and diagonalize in one step, separating compact states from
/// degenerate chain modes.
pub fn solve(config: &LatticeConfig) -> Result<(HamiltonianMatrix, Spectrum)> {
    let h = build_hamiltonian(config)?;
    let mut spectrum = diagonalize(&h)?;
    if let Some((first, last)) = config.interaction_span() {
        let tol = 1e-12 * spectrum.norm().max(config.hopping);
        spectrum.separate_degenerate(first, last, tol);
    }
    Ok((h, spectrum))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    /// Bound state in the continuum: in band, finite atom weight, compact support.
    Bic,
    /// Bound state outside the continuum, |E| > 2J.
    Boc,
    Continuum,
    /// The bare atom level when the atom is not coupled at all.
    Decoupled,
}

impl StateKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StateKind::Bic => "bic",
            StateKind::Boc => "boc",
            StateKind::Continuum => "continuum",
            StateKind::Decoupled => "decoupled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyThresholds {
    /// Relative margin beyond the band edge for a BOC.
    pub boc: f64,
    /// Minimum emitter probability for a BIC.
    pub bic: f64,
    /// Maximum eigenvector weight outside the coupling region for a BIC.
    pub confinement: f64,
}

impl Default for ClassifyThresholds {
    fn default() -> Self {
        ClassifyThresholds {
            boc: 1e-9,
            bic: 1e-3,
            confinement: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundStateRecord {
    /// Position of the eigenstate in the ascending spectrum.
    pub index: usize,
    pub energy: f64,
    pub emitter_probability: f64,
    pub kind: StateKind,
    /// Eigenvector weight on lattice sites outside the coupling region.
    pub outside_weight: f64,
    /// Decay length in sites of an exponentially localized BOC tail.
    pub localization_length: Option<f64>,
}

/// Label every eigenstate; records come back sorted by energy.
pub fn classify_states(
    spectrum: &Spectrum,
    config: &LatticeConfig,
    thresholds: ClassifyThresholds,
) -> Vec<BoundStateRecord> {
    let band_edge = 2.0 * config.hopping;
    let span = config.interaction_span();
    let probs = spectrum.emitter_probabilities();
    let decoupled_index = if config.is_coupled() {
        None
    } else {
        probs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
    };
    (0..spectrum.len())
        .map(|i| {
            let energy = spectrum.eigenvalues()[i];
            let p = probs[i].clamp(0.0, 1.0);
            let v = spectrum.vector(i);
            let outside_weight = match span {
                Some((first, last)) => v[1..first]
                    .iter()
                    .chain(&v[last + 1..])
                    .map(|x| x * x)
                    .sum(),
                None => v[1..].iter().map(|x| x * x).sum(),
            };
            let kind = if Some(i) == decoupled_index {
                StateKind::Decoupled
            } else if energy.abs() > band_edge * (1.0 + thresholds.boc) {
                StateKind::Boc
            } else if energy.abs() <= band_edge
                && p > thresholds.bic
                && outside_weight < thresholds.confinement
            {
                StateKind::Bic
            } else {
                StateKind::Continuum
            };
            let localization_length = match kind {
                StateKind::Boc => Some(1.0 / (energy.abs() / band_edge).acosh()),
                _ => None,
            };
            BoundStateRecord {
                index: i,
                energy,
                emitter_probability: p,
                kind,
                outside_weight,
                localization_length,
            }
        })
        .collect()
}

pub fn count_kind(records: &[BoundStateRecord], kind: StateKind) -> usize {
    records.iter().filter(|r| r.kind == kind).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn uniform(m: usize, n0: usize, rho0: f64, offset: usize, n: usize) -> LatticeConfig {
        LatticeConfig::uniform(n, 1.0, 0.0, &UniformGiantAtomLayout::new(m, n0, rho0, offset)).unwrap()
    }

    #[test]
    fn expand_single_point() {
        let c = expand_layout(&UniformGiantAtomLayout::new(1, 1, 0.5, 3), 5).unwrap();
        assert_eq!(c, vec![Coupling { site: 3, strength: 0.5 }]);
    }

    #[test]
    fn expand_progression() {
        let c = expand_layout(&UniformGiantAtomLayout::new(3, 4, 1.0, 10), 30).unwrap();
        let sites: Vec<usize> = c.iter().map(|c| c.site).collect();
        assert_eq!(sites, vec![10, 14, 18]);
        assert!(c.iter().all(|c| c.strength == 1.0));
    }

    #[test]
    fn expand_out_of_range() {
        let err = expand_layout(&UniformGiantAtomLayout::new(3, 4, 1.0, 28), 30).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Config(_)));
        assert!(msg.contains("36 > N = 30"), "{msg}");
    }

    #[test]
    fn bare_chain_matrix() {
        let cfg = LatticeConfig::new(3, 1.0, 0.7, vec![]);
        let h = build_hamiltonian(&cfg).unwrap();
        assert_eq!(h.dim(), 4);
        assert_eq!(h.get(ATOM, ATOM), 0.7);
        for j in 1..4 {
            assert_eq!(h.get(ATOM, j), 0.0);
        }
        assert_eq!(h.get(1, 2), 1.0);
        assert_eq!(h.get(2, 3), 1.0);
        assert_eq!(h.get(1, 3), 0.0);
        assert_eq!(h.get(2, 2), 0.0);
    }

    #[test]
    fn atom_row_has_coupling_entries() {
        let h = build_hamiltonian(&uniform(3, 4, 1.0, 10, 30)).unwrap();
        assert!(h.is_symmetric());
        let row: Vec<(usize, f64)> = (1..=30).filter(|&j| h.get(ATOM, j) != 0.0).map(|j| (j, h.get(ATOM, j))).collect();
        assert_eq!(row, vec![(10, 1.0), (14, 1.0), (18, 1.0)]);
    }

    #[test]
    fn imperfection_entries() {
        let mut cfg = uniform(3, 4, 1.0, 10, 30);
        cfg.rho1 = 0.0286;
        cfg.bypass_hopping = 0.0286;
        let h = build_hamiltonian(&cfg).unwrap();
        let atom_small: Vec<usize> = (1..=30).filter(|&j| h.get(ATOM, j) == 0.0286).collect();
        assert_eq!(atom_small, vec![9, 11, 13, 15, 17, 19]);
        let bypass: Vec<(usize, usize)> = h
            .nonzeros()
            .into_iter()
            .filter(|&(i, j, v)| i >= 1 && j > i && v == 0.0286)
            .map(|(i, j, _)| (i, j))
            .collect();
        assert_eq!(bypass, vec![(9, 11), (13, 15), (17, 19)]);
        assert!(h.is_symmetric());
    }

    #[test]
    fn imperfections_need_neighbours() {
        let mut cfg = uniform(2, 4, 1.0, 1, 10);
        cfg.rho1 = 0.01;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = LatticeConfig::new(5, 1.0, 0.0, vec![Coupling { site: 6, strength: 1.0 }]);
        assert!(cfg.validate().is_err());
        cfg.couplings = vec![Coupling { site: 2, strength: 1.0 }, Coupling { site: 2, strength: 0.5 }];
        assert!(cfg.validate().is_err());
        cfg.couplings.clear();
        cfg.hopping = 0.0;
        assert!(cfg.validate().is_err());
        cfg.hopping = 1.0;
        cfg.couplings = vec![Coupling { site: 2, strength: f64::NAN }];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn single_site_decoupled() {
        let cfg = LatticeConfig::new(1, 1.0, 0.0, vec![]);
        let (_, s) = solve(&cfg).unwrap();
        assert_eq!(s.eigenvalues(), &[0.0, 0.0]);
    }

    #[test]
    fn open_chain_closed_form() {
        // Oracle: open chain eigenvalues 2J cos(q pi / (N+1)).
        let n = 50;
        let cfg = LatticeConfig::new(n, 1.0, 10.0, vec![]);
        let (h, s) = solve(&cfg).unwrap();
        let mut expected: Vec<f64> = (1..=n).map(|q| 2.0 * (q as f64 * PI / (n as f64 + 1.0)).cos()).collect();
        expected.push(10.0);
        expected.sort_by(f64::total_cmp);
        for (a, b) in s.eigenvalues().iter().zip(&expected) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        assert!(s.max_residual(&h) <= 1e-10 * s.norm());
        assert!(s.max_orthonormality_error() < 1e-10);
    }

    #[test]
    fn completeness_of_atom_row() {
        let (_, s) = solve(&uniform(3, 4, 1.0, 40, 100)).unwrap();
        let total: f64 = s.emitter_probabilities().iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
        assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn decoupled_atom_not_counted() {
        let cfg = LatticeConfig::new(40, 1.0, 0.3, vec![]);
        let (_, s) = solve(&cfg).unwrap();
        let rec = classify_states(&s, &cfg, ClassifyThresholds::default());
        assert_eq!(count_kind(&rec, StateKind::Bic), 0);
        assert_eq!(count_kind(&rec, StateKind::Boc), 0);
        assert_eq!(count_kind(&rec, StateKind::Decoupled), 1);
        let d = rec.iter().find(|r| r.kind == StateKind::Decoupled).unwrap();
        assert!((d.energy - 0.3).abs() < 1e-12);
    }

    #[test]
    fn m2_generic_has_no_bic() {
        let cfg = uniform(2, 4, 0.37, 150, 300);
        let (_, s) = solve(&cfg).unwrap();
        let rec = classify_states(&s, &cfg, ClassifyThresholds::default());
        assert_eq!(count_kind(&rec, StateKind::Bic), 0);
    }

    #[test]
    fn m3_n0_4_bic_pair() {
        let cfg = uniform(3, 4, 1.0, 100, 200);
        let (_, s) = solve(&cfg).unwrap();
        let rec = classify_states(&s, &cfg, ClassifyThresholds::default());
        let bics: Vec<_> = rec.iter().filter(|r| r.kind == StateKind::Bic).collect();
        assert_eq!(bics.len(), 2);
        assert!((bics[0].energy + 1.0).abs() < 1e-10);
        assert!((bics[1].energy - 1.0).abs() < 1e-10);
        let bocs: Vec<_> = rec.iter().filter(|r| r.kind == StateKind::Boc).collect();
        assert_eq!(bocs.len(), 2);
        assert!(bocs[0].energy < -2.0 && bocs[1].energy > 2.0);
        assert!(bocs.iter().all(|b| b.localization_length.unwrap() > 0.0));
        assert!(rec.windows(2).all(|w| w[0].energy <= w[1].energy));
    }

    #[test]
    fn auto_size_formula() {
        assert_eq!(auto_sites(8, 1.0, 15.0), 8 + 60 + 40);
        let layout = UniformGiantAtomLayout::new(3, 4, 1.0, 0).centered_in(108);
        assert_eq!(layout.offset, 51);
        let left = layout.offset - 1;
        let right = 108 - (layout.offset + layout.span());
        assert!(left == right || left == right + 1);
    }
}
