use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::self_energy::{pole_weight, SelfEnergyBranch};
use crate::error::{Error, Result};
use crate::lattice::UniformGiantAtomLayout;

/// Which spacing family a design belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignBranch {
    /// n0 = 4l, the optimal family.
    Mod4Zero,
    /// n0 = 4l + 2, available for M = 3 only.
    Mod4Two,
}

impl DesignBranch {
    pub fn as_str(&self) -> &'static str {
        match self {
            DesignBranch::Mod4Zero => "n0_mod4_0",
            DesignBranch::Mod4Two => "n0_mod4_2",
        }
    }
}

/// Analytic parameters of an oscillating-BIC giant atom (atom at band centre).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BicDesign {
    pub points: usize,
    pub spacing: usize,
    pub hopping: f64,
    /// Positive member of the BIC pair +-omega_bic.
    pub omega_bic: f64,
    pub rho0: f64,
    /// Emitter probability of each BIC.
    pub phi_bic_sq: f64,
    /// Traversal time M n0 / (2J).
    pub tau: f64,
    /// Relaxation time J / (M^2 rho0^2).
    pub gamma_inv: f64,
    pub nm_ratio: f64,
    /// omega_bic / pi, the frequency of the emitter-probability oscillation.
    pub osc_frequency: f64,
    /// pi / omega_bic.
    pub period: f64,
    pub branch: DesignBranch,
}

impl BicDesign {
    /// Layout with the designed coupling strength, first point at `offset`.
    pub fn layout(&self, offset: usize) -> UniformGiantAtomLayout {
        UniformGiantAtomLayout::new(self.points, self.spacing, self.rho0, offset)
    }

    /// The two BIC energies, ascending.
    pub fn energies(&self) -> [f64; 2] {
        [-self.omega_bic, self.omega_bic]
    }
}

fn check_hopping(hopping: f64) -> Result<()> {
    if !(hopping.is_finite() && hopping > 0.0) {
        return Err(Error::config(format!("hopping J must be finite and > 0, got {hopping}")));
    }
    Ok(())
}

fn check_optimal(points: usize, spacing: usize) -> Result<()> {
    if points < 3 {
        return Err(Error::config(format!(
            "the n0 = 4l closed forms need M >= 3, got M = {points}"
        )));
    }
    if spacing == 0 || !spacing.is_multiple_of(4) {
        return Err(Error::config(format!(
            "the n0 = 4l closed forms need n0 to be a positive multiple of 4, got n0 = {spacing}"
        )));
    }
    Ok(())
}

/// Design the coupling strength that puts a symmetric BIC pair at
/// +-omega_bic for an atom at the band centre.
pub fn design_oscillating_bic(points: usize, spacing: usize, hopping: f64) -> Result<BicDesign> {
    check_hopping(hopping)?;
    match points {
        0 | 1 => {
            return Err(Error::config(format!(
                "an oscillating BIC needs M >= 3 coupling points, got M = {points}"
            )))
        }
        2 => {
            return Err(Error::config(
                "M = 2 admits at most one BIC, at Omega = omega_a, so no oscillating BIC exists",
            ))
        }
        _ => {}
    }
    if spacing == 0 || spacing % 2 == 1 {
        return Err(Error::config(format!(
            "odd spacing n0 = {spacing} gives no symmetric BIC pair about the band centre"
        )));
    }
    let m = points as f64;
    let n0 = spacing as f64;
    let j = hopping;
    let (branch, omega_bic, rho0_sq) = if spacing.is_multiple_of(4) {
        let omega = 2.0 * j * (2.0 * PI / (m * n0)).sin();
        let rho_sq = j * j * (2.0 / m) * (PI / m).tan() * (4.0 * PI / (m * n0)).sin();
        (DesignBranch::Mod4Zero, omega, rho_sq)
    } else {
        if points != 3 {
            return Err(Error::config(format!(
                "n0 = 4l + 2 designs exist only for M = 3, got M = {points}"
            )));
        }
        let omega = 2.0 * j * (5.0 * PI / (3.0 * n0)).sin();
        let rho_sq = 2.0 * j * j / 3f64.sqrt() * (10.0 * PI / (3.0 * n0)).sin();
        if rho_sq <= 0.0 {
            return Err(Error::config(format!(
                "n0 = {spacing} is too small for the n0 = 4l + 2 branch (rho0^2 = {rho_sq:.3e} <= 0)"
            )));
        }
        (DesignBranch::Mod4Two, omega, rho_sq)
    };
    let rho0 = rho0_sq.sqrt();
    let phi_bic_sq = match branch {
        DesignBranch::Mod4Zero => emitter_probability_bic(points, spacing)?,
        DesignBranch::Mod4Two => {
            let layout = UniformGiantAtomLayout::new(points, spacing, rho0, 1);
            real_weight(omega_bic, &layout, hopping)?
        }
    };
    let tau = m * n0 / (2.0 * j);
    let gamma_inv = j / (m * m * rho0_sq);
    Ok(BicDesign {
        points,
        spacing,
        hopping,
        omega_bic,
        rho0,
        phi_bic_sq,
        tau,
        gamma_inv,
        nm_ratio: tau / gamma_inv,
        osc_frequency: omega_bic / PI,
        period: PI / omega_bic,
        branch,
    })
}

/// Pole weight at an in-band BIC, which must come out real.
fn real_weight(energy: f64, layout: &UniformGiantAtomLayout, hopping: f64) -> Result<f64> {
    let w = pole_weight(energy, layout, hopping, SelfEnergyBranch::Upper)?;
    if w.im.abs() > 1e-8 {
        return Err(Error::numerical(format!(
            "BIC residue at Omega = {energy} is not real: {w}"
        )));
    }
    Ok(w.re)
}

/// Emitter probability of each BIC of the n0 = 4l design, evaluated from
/// its closed form in complex arithmetic.
pub fn emitter_probability_bic(points: usize, spacing: usize) -> Result<f64> {
    check_optimal(points, spacing)?;
    let m = points as f64;
    let n0 = spacing as f64;
    let i = Complex64::new(0.0, 1.0);
    let cis = |x: f64| Complex64::from_polar(1.0, x);
    let x = 2.0 * PI / (m * n0);
    let inner = (i * cis(x)).powu(spacing as u32) - 1.0;
    let csc = 1.0 / (PI / m).sin();
    let num = i
        * cis(-4.0 * PI / m)
        * (cis(2.0 * PI / m) + 1.0)
        * inner.powu(3)
        * (csc * csc * x.cos().powi(2));
    let den = 4.0
        * (2.0 * n0 * (2.0 * x).sin()
            + (2.0 * PI * (n0 - 2.0) / (m * n0)).sin()
            + (2.0 * PI * (n0 + 2.0) / (m * n0)).sin());
    let value = num / den;
    if value.im.abs() > 1e-8 {
        return Err(Error::numerical(format!(
            "BIC emitter probability closed form has imaginary part {:.3e} (M = {points}, n0 = {spacing})",
            value.im
        )));
    }
    Ok(value.re)
}

/// n0 -> infinity limit 1 / (1 + (4 pi / M) csc(2 pi / M)).
pub fn emitter_probability_bic_limit(points: usize) -> f64 {
    let m = points as f64;
    1.0 / (1.0 + 4.0 * PI / m / (2.0 * PI / m).sin())
}

/// Large-n0 expansion: limit plus the A / n0^2 correction.
pub fn emitter_probability_bic_asymptotic(points: usize, spacing: usize) -> f64 {
    let m = points as f64;
    let n0 = spacing as f64;
    let s = (2.0 * PI / m).sin();
    let a = 4.0 * PI * PI * s * (3.0 * m * s - 4.0 * PI) / (3.0 * m * (m * s + 4.0 * PI).powi(2));
    emitter_probability_bic_limit(points) + a / (n0 * n0)
}

/// Large-n0 limit of the M = 3, n0 = 4l + 2 emitter probability, 9 / (9 + 20 sqrt(3) pi).
pub fn emitter_probability_mod4_two_limit() -> f64 {
    9.0 / (9.0 + 20.0 * 3f64.sqrt() * PI)
}

/// Traversal time over relaxation time, M^2 n0 sin(4 pi / (M n0)) tan(pi / M).
pub fn non_markovianity(points: usize, spacing: usize) -> Result<f64> {
    check_optimal(points, spacing)?;
    let m = points as f64;
    let n0 = spacing as f64;
    Ok(m * m * n0 * (4.0 * PI / (m * n0)).sin() * (PI / m).tan())
}

/// Large-n0 expansion 4 M pi tan(pi/M) - 32 pi^3 tan(pi/M) / (3 M n0^2).
pub fn non_markovianity_asymptotic(points: usize, spacing: usize) -> f64 {
    let m = points as f64;
    let n0 = spacing as f64;
    let t = (PI / m).tan();
    4.0 * m * PI * t - 32.0 * PI.powi(3) * t / (3.0 * m) / (n0 * n0)
}

/// Plateau value 4 M pi tan(pi/M).
pub fn non_markovianity_limit(points: usize) -> f64 {
    let m = points as f64;
    4.0 * m * PI * (PI / m).tan()
}

/// BIC count for a two-point atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPointReport {
    pub bic_count: usize,
    pub bic_energy: Option<f64>,
    /// Integer l with omega_a = 2J cos(pi (2l + 1) / n0), if any.
    pub resonance_index: Option<usize>,
}

/// A two-point atom has a BIC (necessarily single, at omega_a) exactly when
/// omega_a sits on a zero of 1 + cos(k n0).
pub fn verify_m2_no_oscillation(spacing: usize, detuning: f64, hopping: f64) -> Result<TwoPointReport> {
    check_hopping(hopping)?;
    if spacing == 0 {
        return Err(Error::config("spacing n0 must be >= 1"));
    }
    let n0 = spacing as f64;
    let hit = (0..spacing).find(|&l| {
        let e = 2.0 * hopping * (PI * (2 * l + 1) as f64 / n0).cos();
        (detuning - e).abs() <= 1e-9 * hopping
    });
    Ok(TwoPointReport {
        bic_count: usize::from(hit.is_some()),
        bic_energy: hit.map(|_| detuning),
        resonance_index: hit,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousComparison {
    pub omega_lattice: f64,
    /// (1/2) M gamma cot(pi / M) with gamma = rho0^2 / J.
    pub omega_continuous: f64,
    pub ratio: f64,
}

/// Compare the lattice BIC energy with the continuous-waveguide result.
/// For n0 = 4l designs the ratio is sec(2 pi / (M n0)).
pub fn continuous_waveguide_comparison(design: &BicDesign) -> ContinuousComparison {
    let m = design.points as f64;
    let gamma = design.rho0 * design.rho0 / design.hopping;
    let omega_continuous = 0.5 * m * gamma / (PI / m).tan();
    ContinuousComparison {
        omega_lattice: design.omega_bic,
        omega_continuous,
        ratio: design.omega_bic / omega_continuous,
    }
}
