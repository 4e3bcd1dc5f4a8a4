use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::design::BicDesign;
use super::self_energy::{pole_weight, self_energy_on_branch, SelfEnergyBranch};
use crate::error::{Error, Result};
use crate::lattice::UniformGiantAtomLayout;

/// Bound states outside the band for a designed atom, lower one first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BocPrediction {
    pub energies: [f64; 2],
    pub energies_asymptotic: [f64; 2],
    pub emitter_probability: [f64; 2],
    pub emitter_probability_asymptotic: f64,
}

/// Relative offset from the band edge predicted at large n0:
/// 2 pi^2 tan^2(pi/M) / (M^2 n0^2).
pub fn boc_edge_offset(points: usize, spacing: usize) -> f64 {
    let m = points as f64;
    let n0 = spacing as f64;
    2.0 * PI * PI * (PI / m).tan().powi(2) / (m * m * n0 * n0)
}

/// Large-n0 emitter probability 4 pi^2 tan^2(pi/M) / (M^2 n0^2).
pub fn boc_emitter_probability_asymptotic(points: usize, spacing: usize) -> f64 {
    2.0 * boc_edge_offset(points, spacing)
}

fn pole_mismatch(omega: f64, detuning: f64, layout: &UniformGiantAtomLayout, hopping: f64, branch: SelfEnergyBranch) -> Result<f64> {
    let sigma = self_energy_on_branch(Complex64::new(0.0, -omega), layout, hopping, branch)?;
    Ok(omega - detuning - sigma.re)
}

/// Root of Omega - omega_a - Re Sigma(-i Omega) outside the band on one side.
///
/// The search starts at (2J (1 + 1e-14), 2J (1 + 100 delta)] and widens the
/// outer end geometrically until the sign changes.
pub fn find_boc_energy(
    layout: &UniformGiantAtomLayout,
    detuning: f64,
    hopping: f64,
    above: bool,
    delta_hint: f64,
) -> Result<f64> {
    // Above the band the root is continued from Re s < 0; below from Re s > 0.
    let (branch, sign) = if above {
        (SelfEnergyBranch::Lower, 1.0)
    } else {
        (SelfEnergyBranch::Upper, -1.0)
    };
    let edge = 2.0 * hopping;
    let f = |x: f64| pole_mismatch(sign * x, detuning, layout, hopping, branch).map(|v| sign * v);
    let mut lo = edge * (1.0 + 1e-14);
    let mut hi = edge * (1.0 + 100.0 * delta_hint.max(1e-12));
    let f_lo = f(lo)?;
    let mut f_hi = f(hi)?;
    let cap = edge + 1e6 * hopping;
    while f_lo.signum() == f_hi.signum() {
        if hi >= cap {
            return Err(Error::numerical(format!(
                "no bound state {} the band: scanned ({lo}, {hi}] without a sign change",
                if above { "above" } else { "below" }
            )));
        }
        hi = edge + (hi - edge) * 4.0;
        f_hi = f(hi)?;
    }
    let tol = 1e-12 * hopping;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(sign * mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(sign * 0.5 * (lo + hi))
}

/// Emitter probability 1 / (1 - dSigma/dOmega) of an out-of-band bound state.
pub fn bound_state_weight(energy: f64, layout: &UniformGiantAtomLayout, hopping: f64) -> Result<f64> {
    let branch = if energy > 0.0 {
        SelfEnergyBranch::Lower
    } else {
        SelfEnergyBranch::Upper
    };
    let w = pole_weight(energy, layout, hopping, branch)?;
    if w.im.abs() > 1e-8 {
        return Err(Error::numerical(format!(
            "bound-state residue at Omega = {energy} is not real: {w}"
        )));
    }
    Ok(w.re)
}

/// Exact and large-n0 BOC energies and emitter probabilities of a design.
pub fn predict_boc(design: &BicDesign) -> Result<BocPrediction> {
    let layout = design.layout(1);
    let j = design.hopping;
    let delta = boc_edge_offset(design.points, design.spacing);
    let lower = find_boc_energy(&layout, 0.0, j, false, delta)?;
    let upper = find_boc_energy(&layout, 0.0, j, true, delta)?;
    let edge = 2.0 * j * (1.0 + delta);
    Ok(BocPrediction {
        energies: [lower, upper],
        energies_asymptotic: [-edge, edge],
        emitter_probability: [
            bound_state_weight(lower, &layout, j)?,
            bound_state_weight(upper, &layout, j)?,
        ],
        emitter_probability_asymptotic: boc_emitter_probability_asymptotic(design.points, design.spacing),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::design::design_oscillating_bic;

    #[test]
    fn n0_80() {
        let d = design_oscillating_bic(3, 80, 1.0).unwrap();
        let b = predict_boc(&d).unwrap();
        assert!((b.energies[1] - 2.002_182_518_3).abs() < 1e-9);
        assert!((b.energies[0] + b.energies[1]).abs() < 1e-11);
        assert!((b.energies_asymptotic[1] - 2.0 * (1.0 + 6.0 * PI * PI / 57600.0)).abs() < 1e-14);
        assert!((b.emitter_probability[1] - 0.001_945_8).abs() < 1e-7);
        assert!((b.emitter_probability[0] - b.emitter_probability[1]).abs() < 1e-10);
        assert!((b.emitter_probability_asymptotic - 4.0 * PI * PI / 3.0 / 6400.0).abs() < 1e-15);
    }

    #[test]
    fn n0_4() {
        let d = design_oscillating_bic(3, 4, 1.0).unwrap();
        let b = predict_boc(&d).unwrap();
        assert!((b.energies[1] - 2.424_16).abs() < 1e-5);
        assert!((b.emitter_probability[1] - 0.206_58).abs() < 1e-5);
    }

    #[test]
    fn gap_to_asymptote_shrinks() {
        let gap = |n0| {
            let b = predict_boc(&design_oscillating_bic(3, n0, 1.0).unwrap()).unwrap();
            (b.energies[1] - b.energies_asymptotic[1]).abs()
        };
        let ratio = |n0| {
            let b = predict_boc(&design_oscillating_bic(3, n0, 1.0).unwrap()).unwrap();
            (b.energies[1] - 2.0) / (b.energies_asymptotic[1] - 2.0)
        };
        assert!(gap(80) < gap(40) / 3.0);
        let (r40, r80) = (ratio(40), ratio(80));
        assert!(r40 > 1.0 && r40 < r80 && r80 < 1.1, "{r40} {r80}");
    }

    #[test]
    fn bracket_widens_for_many_points() {
        let d = design_oscillating_bic(50, 4, 1.0).unwrap();
        let b = predict_boc(&d).unwrap();
        assert!(b.energies[1] > 2.0 && b.energies[0] < -2.0);
    }

    #[test]
    fn weights_leave_room_for_continuum() {
        for (m, n0) in [(3, 4), (3, 28), (5, 8), (50, 4)] {
            let d = design_oscillating_bic(m, n0, 1.0).unwrap();
            let b = predict_boc(&d).unwrap();
            let total = 2.0 * d.phi_bic_sq + b.emitter_probability.iter().sum::<f64>();
            assert!(total <= 1.0 + 1e-12, "M={m} n0={n0}: {total}");
        }
    }
}
