use num_complex::Complex64;

use super::design::BicDesign;
use super::self_energy::{pole_weight, SelfEnergyBranch};
use crate::error::Result;

/// Long-time atom amplitude from the two BIC poles,
/// psi_a(t) = sum_j e^{-i Omega_j t} / (1 + i Sigma'(-i Omega_j)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResiduePredictor {
    pub energies: [f64; 2],
    pub weights: [Complex64; 2],
}

impl ResiduePredictor {
    pub fn new(design: &BicDesign) -> Result<Self> {
        let layout = design.layout(1);
        let energies = design.energies();
        let mut weights = [Complex64::new(0.0, 0.0); 2];
        for (w, &e) in weights.iter_mut().zip(&energies) {
            *w = pole_weight(e, &layout, design.hopping, SelfEnergyBranch::Upper)?;
        }
        Ok(ResiduePredictor { energies, weights })
    }

    pub fn amplitude(&self, t: f64) -> Complex64 {
        self.energies
            .iter()
            .zip(&self.weights)
            .map(|(&e, &w)| w * Complex64::from_polar(1.0, -e * t))
            .sum()
    }

    pub fn probability(&self, t: f64) -> f64 {
        self.amplitude(t).norm_sqr()
    }
}

/// One-shot evaluation of the BIC-pole amplitude at time `t`.
pub fn residue_prediction(design: &BicDesign, t: f64) -> Result<Complex64> {
    Ok(ResiduePredictor::new(design)?.amplitude(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::design::design_oscillating_bic;
    use std::f64::consts::PI;

    #[test]
    fn initial_value_is_twice_bic_weight() {
        for (m, n0) in [(3, 4), (3, 28), (50, 4)] {
            let d = design_oscillating_bic(m, n0, 1.0).unwrap();
            let a = residue_prediction(&d, 0.0).unwrap();
            assert!((a.re - 2.0 * d.phi_bic_sq).abs() < 1e-10);
            assert!(a.im.abs() < 1e-10);
        }
    }

    #[test]
    fn peak_and_period() {
        let d = design_oscillating_bic(3, 28, 1.0).unwrap();
        let p = ResiduePredictor::new(&d).unwrap();
        let peak = (2.0 * d.phi_bic_sq).powi(2);
        assert!((peak - 0.117_411).abs() < 3e-4);
        for k in 0..5 {
            assert!((p.probability(k as f64 * d.period) - peak).abs() < 1e-10);
            assert!(p.probability((k as f64 + 0.5) * d.period) < 1e-12);
        }
        let big = design_oscillating_bic(50, 4, 1.0).unwrap();
        let peak = ResiduePredictor::new(&big).unwrap().probability(0.0);
        assert!((peak - 4.0 / 9.0).abs() < 0.01);
        assert!((d.osc_frequency - d.omega_bic / PI).abs() < 1e-15);
    }
}
