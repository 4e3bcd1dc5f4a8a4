use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::UniformGiantAtomLayout;
use crate::quadrature::{self, QuadratureOptions};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Side of the imaginary axis a Laplace variable is continued from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelfEnergyBranch {
    /// Re s > 0, including the limit s = -i Omega + 0+.
    Upper,
    /// Re s < 0, including the limit s = -i Omega - 0+.
    Lower,
}

impl SelfEnergyBranch {
    /// Branch selected by the sign of Re s; `None` on the imaginary axis.
    pub fn of(s: Complex64) -> Option<Self> {
        if s.re > 0.0 {
            Some(SelfEnergyBranch::Upper)
        } else if s.re < 0.0 {
            Some(SelfEnergyBranch::Lower)
        } else {
            None
        }
    }

    /// +1 for the upper branch, -1 for the lower one.
    pub fn sign(self) -> f64 {
        match self {
            SelfEnergyBranch::Upper => 1.0,
            SelfEnergyBranch::Lower => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelfEnergyMode {
    ClosedForm,
    Quadrature,
}

/// |G(k)|^2 = (rho0^2 / 2 pi) (M + 2 sum_r (M - r) cos(k n0 r)).
pub fn g_abs_sq(k: f64, layout: &UniformGiantAtomLayout) -> f64 {
    let m = layout.points;
    let phase = k * layout.spacing as f64;
    let sum: f64 = (1..m)
        .map(|r| (m - r) as f64 * (phase * r as f64).cos())
        .sum();
    layout.strength.powi(2) / (2.0 * PI) * (m as f64 + 2.0 * sum)
}

/// A momentum in (-pi, pi] where the atom decouples from the chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroCouplingMomentum {
    pub k: f64,
    /// Band energy 2J cos k at this momentum, for J = 1.
    pub energy_per_j: f64,
    /// True for the k = (2 pi / n0)(m +- 1/M) family.
    pub nearest_family: bool,
}

/// All zeros of |G(k)|^2 in (-pi, pi], ascending.
///
/// |G|^2 is proportional to sin^2(M k n0 / 2) / sin^2(k n0 / 2), which
/// vanishes at k n0 = 2 pi p / M for every p that is not a multiple of M.
pub fn zero_coupling_momenta(layout: &UniformGiantAtomLayout) -> Result<Vec<ZeroCouplingMomentum>> {
    let m = layout.points as i64;
    if m < 2 {
        return Err(Error::domain(
            "coupling never vanishes for a single coupling point (|G|^2 is constant)",
        ));
    }
    if layout.spacing == 0 {
        return Err(Error::config("spacing n0 must be >= 1"));
    }
    let denom = m * layout.spacing as i64;
    let half = denom as f64 / 2.0;
    let scale = layout.strength.powi(2) * (m * m) as f64 / (2.0 * PI);
    let mut out = Vec::new();
    let q_min = (-half).floor() as i64;
    for q in q_min..=half.floor() as i64 {
        if (q as f64) <= -half || q.rem_euclid(m) == 0 {
            continue;
        }
        let k = 2.0 * PI * q as f64 / denom as f64;
        let residual = g_abs_sq(k, layout);
        if residual.abs() > 1e-12 * scale.max(1.0) {
            return Err(Error::numerical(format!(
                "|G(k)|^2 = {residual:.3e} at candidate zero k = {k}"
            )));
        }
        let p = q.rem_euclid(m);
        out.push(ZeroCouplingMomentum {
            k,
            energy_per_j: 2.0 * k.cos(),
            nearest_family: p == 1 || p == m - 1,
        });
    }
    Ok(out)
}

/// sqrt(s^2 + 4J^2) continued analytically from the half plane of `branch`.
fn root(s: Complex64, hopping: f64, branch: SelfEnergyBranch) -> Complex64 {
    let w = match branch {
        SelfEnergyBranch::Upper => s,
        SelfEnergyBranch::Lower => -s,
    };
    let two_j = Complex64::new(0.0, 2.0 * hopping);
    (w + two_j).sqrt() * (w - two_j).sqrt()
}

struct ClosedFormParts {
    /// -i (upper) or +i (lower).
    prefactor: Complex64,
    root: Complex64,
    /// M + 2 sum_r (M - r) alpha^(r n0)
    poly: Complex64,
    /// 2 sum_r (M - r) r n0 alpha^(r n0)
    poly_log_derivative: Complex64,
}

fn closed_form_parts(
    s: Complex64,
    layout: &UniformGiantAtomLayout,
    hopping: f64,
    branch: SelfEnergyBranch,
) -> Result<ClosedFormParts> {
    let r = root(s, hopping, branch);
    if r.norm() < 1e-13 * hopping {
        return Err(Error::domain(format!(
            "self-energy is singular at the band edge s = {s} (sqrt(s^2+4J^2) = 0)"
        )));
    }
    let sign = branch.sign();
    let alpha = (I * s - I * r * sign) / (2.0 * hopping);
    let base = alpha.powu(layout.spacing as u32);
    let m = layout.points;
    let mut poly = Complex64::new(m as f64, 0.0);
    let mut dpoly = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    for q in 1..m {
        power *= base;
        let weight = 2.0 * (m - q) as f64;
        poly += power * weight;
        dpoly += power * (weight * (q * layout.spacing) as f64);
    }
    Ok(ClosedFormParts {
        prefactor: -I * sign,
        root: r,
        poly,
        poly_log_derivative: dpoly,
    })
}

/// Closed-form self-energy on an explicit branch. Valid on the imaginary
/// axis (|Im s| != 2J), where it gives the limit from the chosen side.
pub fn self_energy_on_branch(
    s: Complex64,
    layout: &UniformGiantAtomLayout,
    hopping: f64,
    branch: SelfEnergyBranch,
) -> Result<Complex64> {
    let p = closed_form_parts(s, layout, hopping, branch)?;
    Ok(p.prefactor * layout.strength.powi(2) / p.root * p.poly)
}

/// Self-energy Sigma(s) = int dk |G(k)|^2 / (i s - 2J cos k).
///
/// The closed form follows the branch of sign(Re s) and takes the upper
/// branch on the imaginary axis. Quadrature refuses Re s = 0.
pub fn self_energy(
    s: Complex64,
    layout: &UniformGiantAtomLayout,
    hopping: f64,
    mode: SelfEnergyMode,
) -> Result<Complex64> {
    match mode {
        SelfEnergyMode::ClosedForm => {
            let branch = SelfEnergyBranch::of(s).unwrap_or(SelfEnergyBranch::Upper);
            self_energy_on_branch(s, layout, hopping, branch)
        }
        SelfEnergyMode::Quadrature => self_energy_quadrature(s, layout, hopping),
    }
}

fn self_energy_quadrature(
    s: Complex64,
    layout: &UniformGiantAtomLayout,
    hopping: f64,
) -> Result<Complex64> {
    if s.re == 0.0 {
        return Err(Error::domain(
            "quadrature of the self-energy needs Re s != 0; use the closed form with an explicit branch for s = -i Omega +- 0+",
        ));
    }
    let is = I * s;
    let r = quadrature::integrate(
        |k| g_abs_sq(k, layout) / (is - 2.0 * hopping * k.cos()),
        -PI,
        PI,
        QuadratureOptions::default(),
    )?;
    Ok(r.value)
}

/// dSigma/ds from differentiating the closed form on a fixed branch.
pub fn self_energy_derivative(
    s: Complex64,
    layout: &UniformGiantAtomLayout,
    hopping: f64,
    branch: SelfEnergyBranch,
) -> Result<Complex64> {
    let p = closed_form_parts(s, layout, hopping, branch)?;
    // d alpha / ds = -+ alpha / r and d(1/r)/ds = -s / r^3.
    let r2 = p.root * p.root;
    let dpoly = p.poly_log_derivative * (-branch.sign()) / p.root;
    Ok(p.prefactor * layout.strength.powi(2) * (dpoly / p.root - p.poly * s / (r2 * p.root)))
}

/// Residue weight 1 / (1 + i Sigma'(-i Omega)) of a pole on the imaginary axis.
pub fn pole_weight(
    energy: f64,
    layout: &UniformGiantAtomLayout,
    hopping: f64,
    branch: SelfEnergyBranch,
) -> Result<Complex64> {
    let d = self_energy_derivative(Complex64::new(0.0, -energy), layout, hopping, branch)?;
    Ok(Complex64::new(1.0, 0.0) / (Complex64::new(1.0, 0.0) + I * d))
}
