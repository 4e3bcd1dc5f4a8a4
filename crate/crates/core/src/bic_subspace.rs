//! Real-space BIC eigenstates and the atom-free superposition |p>.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::SingleExcitationState;
use crate::error::{Error, Result};
use crate::lattice::LatticeConfig;
use crate::quadrature::{self, QuadratureOptions};
use crate::spectral::{BicDesign, SelfEnergyBranch};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Closed form of I_n(s) = int_{-pi}^{pi} dk e^{ikn} / (i s - cos k) on a
/// given branch (J = 1 units). Valid on the imaginary axis as the limit
/// from the chosen side.
pub fn i_n_integral(n: i64, s: Complex64, branch: SelfEnergyBranch) -> Result<Complex64> {
    let w = match branch {
        SelfEnergyBranch::Upper => s,
        SelfEnergyBranch::Lower => -s,
    };
    let root = (w + I).sqrt() * (w - I).sqrt();
    if root.norm() < 1e-13 {
        return Err(Error::domain(format!(
            "I_n is singular at the band edge s = {s} (sqrt(s^2+1) = 0)"
        )));
    }
    let power = n.unsigned_abs() as u32;
    Ok(match branch {
        SelfEnergyBranch::Upper => -2.0 * PI * I / root * (I * s - I * root).powu(power),
        SelfEnergyBranch::Lower => 2.0 * PI * I / root * (I * s + I * root).powu(power),
    })
}

/// Adaptive quadrature of the defining integral; needs Re s != 0.
pub fn i_n_integral_quadrature(n: i64, s: Complex64) -> Result<Complex64> {
    if s.re == 0.0 {
        return Err(Error::domain("quadrature of I_n needs Re s != 0"));
    }
    let is = I * s;
    let r = quadrature::integrate(
        |k| Complex64::from_polar(1.0, k * n as f64) / (is - k.cos()),
        -PI,
        PI,
        QuadratureOptions::default(),
    )?;
    Ok(r.value)
}

/// Which member of the BIC pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BicSign {
    Plus,
    Minus,
}

impl BicSign {
    fn energy(self, design: &BicDesign) -> f64 {
        match self {
            BicSign::Plus => design.omega_bic,
            BicSign::Minus => -design.omega_bic,
        }
    }
}

/// First coupling site, after checking the lattice carries the design's
/// layout with the atom at the band centre. Imperfection terms are ignored.
fn layout_offset(design: &BicDesign, config: &LatticeConfig) -> Result<usize> {
    config.validate()?;
    let mismatch = |what: String| Err(Error::config(format!("lattice does not match the design: {what}")));
    if (config.hopping - design.hopping).abs() > 1e-12 * design.hopping {
        return mismatch(format!("J = {} vs {}", config.hopping, design.hopping));
    }
    if config.detuning.abs() > 1e-12 * design.hopping {
        return mismatch(format!("omega_a = {} must be 0", config.detuning));
    }
    let mut sites: Vec<usize> = config.couplings.iter().map(|c| c.site).collect();
    sites.sort_unstable();
    if sites.len() != design.points {
        return mismatch(format!("{} coupling points vs M = {}", sites.len(), design.points));
    }
    if sites.windows(2).any(|w| w[1] - w[0] != design.spacing) {
        return mismatch(format!("coupling sites {sites:?} are not spaced by n0 = {}", design.spacing));
    }
    if config
        .couplings
        .iter()
        .any(|c| (c.strength - design.rho0).abs() > 1e-12 * design.rho0)
    {
        return mismatch(format!("coupling strengths differ from rho0 = {}", design.rho0));
    }
    Ok(sites[0])
}

/// Normalized real-space BIC eigenstate with a real positive atom amplitude.
///
/// Site amplitudes are (rho0 phi_a / (4 pi J)) sum_l I_{n - n_l}(-i Omega / 2J + 0+).
pub fn bic_eigenstate_real_space(
    design: &BicDesign,
    sign: BicSign,
    config: &LatticeConfig,
) -> Result<SingleExcitationState> {
    let offset = layout_offset(design, config)?;
    let j = design.hopping;
    let energy = sign.energy(design);
    let s = Complex64::new(0.0, -energy / (2.0 * j));
    let last = offset + (design.points - 1) * design.spacing;
    let prefactor = design.rho0 / (4.0 * PI * j);
    let zero = Complex64::new(0.0, 0.0);
    let mut sites = vec![zero; config.sites];
    // Outside the coupling region the amplitudes cancel exactly.
    for n in offset..=last {
        let mut sum = zero;
        for l in 0..design.points {
            let d = n as i64 - (offset + l * design.spacing) as i64;
            sum += i_n_integral(d, s, SelfEnergyBranch::Upper)?;
        }
        sites[n - 1] = sum * prefactor;
    }
    let leak = outside_amplitude(design, energy)?;
    if leak > 1e-8 {
        return Err(Error::numerical(format!(
            "BIC amplitude does not vanish outside the coupling region (|phi| = {leak:.3e})"
        )));
    }
    let state = SingleExcitationState::normalized(Complex64::new(1.0, 0.0), sites)?;
    if design.points == 3 {
        check_three_point_form(design, sign, &state, offset)?;
    }
    Ok(state)
}

/// Largest unnormalized amplitude over a few sites just outside the region.
fn outside_amplitude(design: &BicDesign, energy: f64) -> Result<f64> {
    let s = Complex64::new(0.0, -energy / (2.0 * design.hopping));
    let span = ((design.points - 1) * design.spacing) as i64;
    let prefactor = design.rho0 / (4.0 * PI * design.hopping);
    let mut worst: f64 = 0.0;
    for d in (1..=3).flat_map(|k| [-k, span + k]) {
        let mut sum = Complex64::new(0.0, 0.0);
        for l in 0..design.points {
            sum += i_n_integral(d - (l * design.spacing) as i64, s, SelfEnergyBranch::Upper)?;
        }
        worst = worst.max((sum * prefactor).norm());
    }
    Ok(worst)
}

/// Piecewise three-point amplitudes relative to the first coupling point,
/// for n = 0..=2 n0 with unit atom amplitude. At n = n0 both pieces apply
/// and the first is used.
pub fn three_point_amplitudes(design: &BicDesign) -> Vec<Complex64> {
    let n0 = design.spacing as f64;
    let x = 2.0 * PI / (3.0 * n0);
    (0..=2 * design.spacing)
        .map(|n| {
            let nf = n as f64;
            let c = -I.powu(n as u32 + 1) * design.rho0 / (2.0 * design.hopping * x.cos());
            let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
            let piece = if n <= design.spacing {
                Complex64::from_polar(1.0, x * nf) * parity - Complex64::from_polar(1.0, -x * nf)
            } else {
                let y = 2.0 * PI / 3.0 * (nf / n0 - 2.0);
                Complex64::from_polar(1.0, y) * (-parity) + Complex64::from_polar(1.0, -y)
            };
            c * piece
        })
        .collect()
}

/// Compare magnitudes with the piecewise three-point form. Phases are left
/// out since the n-dependent prefactor makes them ambiguous where the pieces meet.
fn check_three_point_form(
    design: &BicDesign,
    sign: BicSign,
    state: &SingleExcitationState,
    offset: usize,
) -> Result<()> {
    if sign == BicSign::Minus {
        // The minus state mirrors the plus state; its check is the relation test.
        return Ok(());
    }
    let scale = state.atom.re;
    for (n, expected) in three_point_amplitudes(design).iter().enumerate() {
        let got = state.site(offset + n).norm();
        let want = expected.norm() * scale;
        if (got - want).abs() > 1e-6 {
            return Err(Error::numerical(format!(
                "BIC amplitude at relative site {n} is {got}, three-point closed form gives {want}"
            )));
        }
    }
    Ok(())
}

/// The BIC pair on a finite lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BicPairStates {
    pub plus: SingleExcitationState,
    pub minus: SingleExcitationState,
    pub energies: [f64; 2],
    /// Common real atom amplitude after normalization.
    pub phi_a: f64,
    /// First coupling site.
    pub offset: usize,
}

impl BicPairStates {
    pub fn new(design: &BicDesign, config: &LatticeConfig) -> Result<Self> {
        let plus = bic_eigenstate_real_space(design, BicSign::Plus, config)?;
        let minus = bic_eigenstate_real_space(design, BicSign::Minus, config)?;
        Ok(BicPairStates {
            phi_a: plus.atom.re,
            plus,
            minus,
            energies: [design.omega_bic, -design.omega_bic],
            offset: layout_offset(design, config)?,
        })
    }

    /// Atom amplitude at time t of psi0 projected onto the pair:
    /// sum_j <1_a|j> <j|psi0> e^{-i E_j t}.
    pub fn atom_amplitude_predictor(&self, psi0: &SingleExcitationState) -> impl Fn(f64) -> Complex64 {
        let terms: Vec<(f64, Complex64)> = [(&self.plus, self.energies[0]), (&self.minus, self.energies[1])]
            .into_iter()
            .map(|(state, e)| (e, state.atom * state.inner(psi0)))
            .collect();
        move |t| {
            terms
                .iter()
                .map(|&(e, w)| w * Complex64::from_polar(1.0, -e * t))
                .sum()
        }
    }
}

/// One row of the |p> preparation table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PStateEntry {
    /// 1-based lattice site.
    pub site: usize,
    pub re: f64,
    pub im: f64,
    pub amplitude: f64,
    /// Phase in [0, 2 pi).
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PState {
    pub state: SingleExcitationState,
    pub table: Vec<PStateEntry>,
}

/// Amplitude floor for listing a site in the preparation table.
pub const P_STATE_FLOOR: f64 = 1e-10;

/// |p> = (|+> - |->) / sqrt 2, renormalized on the finite lattice.
pub fn build_p_state(design: &BicDesign, config: &LatticeConfig) -> Result<PState> {
    let pair = BicPairStates::new(design, config)?;
    p_state_from_pair(&pair)
}

pub fn p_state_from_pair(pair: &BicPairStates) -> Result<PState> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let atom = (pair.plus.atom - pair.minus.atom) * r;
    let sites: Vec<Complex64> = pair
        .plus
        .sites
        .iter()
        .zip(&pair.minus.sites)
        .map(|(a, b)| (a - b) * r)
        .collect();
    let mut state = SingleExcitationState::normalized(atom, sites)?;
    // The atom amplitude cancels exactly by construction up to rounding.
    if state.atom.norm() < 1e-10 {
        state.atom = Complex64::new(0.0, 0.0);
    } else {
        return Err(Error::numerical(format!(
            "|p> has atom amplitude {} (expected 0)",
            state.atom.norm()
        )));
    }
    let table = state
        .sites
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > P_STATE_FLOOR)
        .map(|(i, a)| PStateEntry {
            site: i + 1,
            re: a.re,
            im: a.im,
            amplitude: a.norm(),
            phase: a.arg().rem_euclid(2.0 * PI),
        })
        .collect();
    Ok(PState { state, table })
}
