//! Mapping a design onto a waveguide array, where propagation distance
//! plays the role of time.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeConfig;
use crate::spectral::BicDesign;

/// rho1 / rho0 = J' / J from the proposed array geometry.
pub const DEFAULT_IMPERFECTION_RATIO: f64 = 0.0286;

pub const DEFAULT_PERIODS: u32 = 5;

/// Optional exponential coupling-versus-separation law kappa(d) = kappa0 e^{-d / d0}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingCalibration {
    /// Coupling rate at zero separation (1/mm).
    pub kappa0: f64,
    /// Decay length (mm).
    pub d0: f64,
}

impl CouplingCalibration {
    pub fn new(kappa0: f64, d0: f64) -> Result<Self> {
        if !(kappa0.is_finite() && kappa0 > 0.0 && d0.is_finite() && d0 > 0.0) {
            return Err(Error::config(format!(
                "calibration needs kappa0 > 0 and d0 > 0, got kappa0 = {kappa0}, d0 = {d0}"
            )));
        }
        Ok(CouplingCalibration { kappa0, d0 })
    }

    /// Separation giving coupling rate `kappa`.
    pub fn distance(&self, kappa: f64) -> Result<f64> {
        if !(kappa > 0.0 && kappa < self.kappa0) {
            return Err(Error::config(format!(
                "coupling {kappa} mm^-1 is not reachable with kappa0 = {} mm^-1",
                self.kappa0
            )));
        }
        Ok(self.d0 * (self.kappa0 / kappa).ln())
    }
}

/// Waveguide separations for each coupling of the plan (mm).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Separations {
    pub hopping: f64,
    pub atom: f64,
    /// None when the imperfection ratio is zero.
    pub atom_next_neighbour: Option<f64>,
    pub bypass: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguidePlan {
    /// Lattice hopping in physical units (1/mm).
    pub j_physical: f64,
    pub rho0_physical: f64,
    pub z_max_mm: f64,
    pub n_periods: u32,
    /// Emitter-probability period in units of 1/J.
    pub period: f64,
    /// J z_max, the dimensionless propagation horizon.
    pub horizon: f64,
    pub imperfection_ratio: f64,
    pub rho1_physical: f64,
    pub bypass_physical: f64,
    pub separations: Option<Separations>,
}

/// Dimensionless parameters recovered from a plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessPlan {
    pub rho0_over_j: f64,
    pub period: f64,
    pub horizon: f64,
}

/// Choose the physical hopping so that `n_periods` oscillation periods fit in `z_max_mm`.
pub fn waveguide_parameters(design: &BicDesign, z_max_mm: f64, n_periods: u32) -> Result<WaveguidePlan> {
    if !(z_max_mm.is_finite() && z_max_mm > 0.0) {
        return Err(Error::config(format!("z_max must be > 0 mm, got {z_max_mm}")));
    }
    if n_periods == 0 {
        return Err(Error::config("n_periods must be >= 1"));
    }
    let period = PI * design.hopping / design.omega_bic;
    let horizon = n_periods as f64 * period;
    let j_physical = horizon / z_max_mm;
    let rho0_physical = design.rho0 / design.hopping * j_physical;
    let mut plan = WaveguidePlan {
        j_physical,
        rho0_physical,
        z_max_mm,
        n_periods,
        period,
        horizon,
        imperfection_ratio: 0.0,
        rho1_physical: 0.0,
        bypass_physical: 0.0,
        separations: None,
    };
    plan.set_imperfection_ratio(DEFAULT_IMPERFECTION_RATIO)?;
    Ok(plan)
}

fn check_ratio(ratio: f64) -> Result<()> {
    if !(0.0..1.0).contains(&ratio) {
        return Err(Error::config(format!("imperfection ratio must lie in [0, 1), got {ratio}")));
    }
    Ok(())
}

impl WaveguidePlan {
    pub fn set_imperfection_ratio(&mut self, ratio: f64) -> Result<()> {
        check_ratio(ratio)?;
        self.imperfection_ratio = ratio;
        self.rho1_physical = ratio * self.rho0_physical;
        self.bypass_physical = ratio * self.j_physical;
        self.separations = None;
        Ok(())
    }

    /// Attach waveguide separations from a measured coupling law.
    pub fn calibrate(&mut self, calibration: &CouplingCalibration) -> Result<()> {
        let optional = |kappa: f64| -> Result<Option<f64>> {
            if kappa == 0.0 {
                Ok(None)
            } else {
                calibration.distance(kappa).map(Some)
            }
        };
        self.separations = Some(Separations {
            hopping: calibration.distance(self.j_physical)?,
            atom: calibration.distance(self.rho0_physical)?,
            atom_next_neighbour: optional(self.rho1_physical)?,
            bypass: optional(self.bypass_physical)?,
        });
        Ok(())
    }

    pub fn to_dimensionless(&self) -> DimensionlessPlan {
        DimensionlessPlan {
            rho0_over_j: self.rho0_physical / self.j_physical,
            period: self.horizon / self.n_periods as f64,
            horizon: self.j_physical * self.z_max_mm,
        }
    }
}

/// Add the next-neighbour atom coupling rho1 = ratio * rho0 and the bypass
/// hop J' = ratio * J around every coupling point.
pub fn with_imperfections(config: &LatticeConfig, ratio: f64) -> Result<LatticeConfig> {
    check_ratio(ratio)?;
    let first = config
        .couplings
        .first()
        .ok_or_else(|| Error::config("imperfections need at least one coupling point"))?;
    let rho0 = first.strength;
    if config.couplings.iter().any(|c| c.strength != rho0) {
        return Err(Error::config("imperfections are defined for uniform coupling strengths only"));
    }
    let mut out = config.clone();
    out.rho1 = ratio * rho0;
    out.bypass_hopping = ratio * config.hopping;
    out.validate()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_hamiltonian, UniformGiantAtomLayout};
    use crate::spectral::design_oscillating_bic;

    #[test]
    fn three_point_plan() {
        let d = design_oscillating_bic(3, 4, 1.0).unwrap();
        let plan = waveguide_parameters(&d, 100.0, 5).unwrap();
        assert!((plan.j_physical - 5.0 * PI / 100.0).abs() < 1e-12);
        assert!((plan.j_physical - 0.15).abs() < 0.01);
        assert!((plan.rho0_physical - plan.j_physical).abs() < 1e-12);
        assert!((plan.horizon - 5.0 * PI).abs() < 1e-12);
        assert!((plan.rho1_physical / plan.rho0_physical - 0.0286).abs() < 1e-15);
    }

    #[test]
    fn doubling_length_halves_hopping() {
        let d = design_oscillating_bic(3, 28, 1.0).unwrap();
        let a = waveguide_parameters(&d, 100.0, 5).unwrap();
        let b = waveguide_parameters(&d, 200.0, 5).unwrap();
        assert!((a.j_physical - 2.0 * b.j_physical).abs() < 1e-15);
    }

    #[test]
    fn round_trip() {
        for (m, n0, j) in [(3, 4, 1.0), (5, 12, 0.4), (3, 30, 2.0)] {
            let d = design_oscillating_bic(m, n0, j).unwrap();
            let p = waveguide_parameters(&d, 73.0, 7).unwrap().to_dimensionless();
            assert!((p.rho0_over_j - d.rho0 / d.hopping).abs() < 1e-12);
            assert!((p.period - d.period * d.hopping).abs() < 1e-12);
            assert!((p.horizon - 7.0 * d.period * d.hopping).abs() < 1e-12);
        }
    }

    #[test]
    fn bad_plan_inputs() {
        let d = design_oscillating_bic(3, 4, 1.0).unwrap();
        assert!(waveguide_parameters(&d, 0.0, 5).is_err());
        assert!(waveguide_parameters(&d, 10.0, 0).is_err());
        let mut p = waveguide_parameters(&d, 10.0, 5).unwrap();
        assert!(p.set_imperfection_ratio(1.0).is_err());
        assert!(p.set_imperfection_ratio(-0.1).is_err());
    }

    #[test]
    fn calibration_distances() {
        let d = design_oscillating_bic(3, 4, 1.0).unwrap();
        let mut plan = waveguide_parameters(&d, 100.0, 5).unwrap();
        let cal = CouplingCalibration::new(2.0, 0.01).unwrap();
        plan.calibrate(&cal).unwrap();
        let s = plan.separations.unwrap();
        assert!((cal.kappa0 * (-s.hopping / cal.d0).exp() - plan.j_physical).abs() < 1e-12);
        assert!(s.atom_next_neighbour.unwrap() > s.atom);
        plan.set_imperfection_ratio(0.0).unwrap();
        plan.calibrate(&cal).unwrap();
        assert!(plan.separations.unwrap().bypass.is_none());
        assert!(CouplingCalibration::new(0.1, 0.01).unwrap().distance(0.2).is_err());
    }

    #[test]
    fn imperfections() {
        let layout = UniformGiantAtomLayout::new(3, 4, 1.0, 10);
        let ideal = LatticeConfig::uniform(30, 1.0, 0.0, &layout).unwrap();
        let same = with_imperfections(&ideal, 0.0).unwrap();
        assert_eq!(build_hamiltonian(&same).unwrap(), build_hamiltonian(&ideal).unwrap());
        let imperfect = with_imperfections(&ideal, 0.0286).unwrap();
        assert_eq!(imperfect.rho1, 0.0286);
        assert_eq!(imperfect.bypass_hopping, 0.0286);
        let edge = LatticeConfig::uniform(9, 1.0, 0.0, &UniformGiantAtomLayout::new(3, 4, 1.0, 1)).unwrap();
        assert!(matches!(with_imperfections(&edge, 0.0286), Err(Error::Config(_))));
        assert!(with_imperfections(&ideal, 1.5).is_err());
    }
}
