use std::f64::consts::PI;

use faer::prelude::SolveLstsq;
use faer::Mat;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::TimeSeries;
use crate::error::{Error, Result};
use crate::spectral::{BicDesign, ResiduePredictor};

/// Oscillation of the atom probability over a post-transient window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Oscillation {
    /// max - min over the window.
    pub amplitude: f64,
    /// Dominant frequency in cycles per unit time; `None` for a flat series.
    pub frequency: Option<f64>,
    pub mean: f64,
    pub window_start: f64,
    pub window_end: f64,
}

const MIN_PERIODS: f64 = 3.0;
const FLAT: f64 = 1e-12;

/// max(3 / Gamma, two traversals of the coupling region at speed 2J).
pub fn default_transient(design: &BicDesign) -> f64 {
    let traversal = 2.0 * (design.points - 1) as f64 * design.spacing as f64 / (2.0 * design.hopping);
    (3.0 * design.gamma_inv).max(traversal)
}

fn window(ts: &TimeSeries, t_transient: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (t, p): (Vec<f64>, Vec<f64>) = ts
        .times
        .iter()
        .zip(&ts.prob_atom)
        .filter(|(t, _)| **t >= t_transient)
        .map(|(&t, &p)| (t, p))
        .unzip();
    if t.len() < 8 {
        let t_max = ts.times.last().copied().unwrap_or(0.0);
        return Err(Error::analysis(format!(
            "window [{t_transient}, {t_max}] holds {} samples; at least 8 are needed",
            t.len()
        )));
    }
    Ok((t, p))
}

fn uniform_step(t: &[f64]) -> Result<f64> {
    let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    if t.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-6 * dt) {
        return Err(Error::analysis("frequency extraction needs uniformly spaced samples"));
    }
    Ok(dt)
}

/// Residual sum of squares reduction from fitting a + b cos(wt) + c sin(wt).
fn sinusoid_power(t: &[f64], y: &[f64], omega: f64) -> f64 {
    let fit = least_squares(t, y, &[omega]);
    let total: f64 = y.iter().map(|v| v * v).sum();
    total - fit.residual_sq
}

struct Fit {
    residual_sq: f64,
    max_residual: f64,
}

/// Least-squares fit to a constant plus a cosine and sine per angular frequency.
fn least_squares(t: &[f64], y: &[f64], omegas: &[f64]) -> Fit {
    let cols = 1 + 2 * omegas.len();
    let basis = |i: usize, j: usize| -> f64 {
        if j == 0 {
            1.0
        } else {
            let w = omegas[(j - 1) / 2];
            if j % 2 == 1 {
                (w * t[i]).cos()
            } else {
                (w * t[i]).sin()
            }
        }
    };
    let a = Mat::<f64>::from_fn(t.len(), cols, basis);
    let b = Mat::<f64>::from_fn(t.len(), 1, |i, _| y[i]);
    let x = a.qr().solve_lstsq(&b);
    let coefficients: Vec<f64> = (0..cols).map(|j| x[(j, 0)]).collect();
    let mut residual_sq = 0.0;
    let mut max_residual: f64 = 0.0;
    for (i, yi) in y.iter().enumerate() {
        let model: f64 = coefficients.iter().enumerate().map(|(j, c)| c * basis(i, j)).sum();
        let r = yi - model;
        residual_sq += r * r;
        max_residual = max_residual.max(r.abs());
    }
    Fit {
        residual_sq,
        max_residual,
    }
}

/// Peak of the zero-padded spectrum, refined by golden-section search on
/// the least-squares sinusoid power within one padded bin.
fn dominant_frequency(t: &[f64], y: &[f64], dt: f64) -> f64 {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let padded = (y.len() * 16).next_power_of_two();
    let mut buf: Vec<Complex64> = y.iter().map(|v| Complex64::new(v - mean, 0.0)).collect();
    buf.resize(padded, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(padded).process(&mut buf);
    let bin_width = 1.0 / (padded as f64 * dt);
    // Skip the bins dominated by the removed mean.
    let first = (padded / y.len()).max(1);
    let peak = (first..padded / 2)
        .max_by(|&a, &b| buf[a].norm().total_cmp(&buf[b].norm()))
        .unwrap_or(first);
    let power = |f: f64| sinusoid_power(t, y, 2.0 * PI * f);
    let (mut lo, mut hi) = (
        (peak as f64 - 1.0).max(0.5) * bin_width,
        (peak as f64 + 1.0) * bin_width,
    );
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut p1, mut p2) = (power(x1), power(x2));
    for _ in 0..80 {
        if hi - lo < 1e-12 * hi {
            break;
        }
        if p1 > p2 {
            hi = x2;
            x2 = x1;
            p2 = p1;
            x1 = hi - g * (hi - lo);
            p1 = power(x1);
        } else {
            lo = x1;
            x1 = x2;
            p1 = p2;
            x2 = lo + g * (hi - lo);
            p2 = power(x2);
        }
    }
    0.5 * (lo + hi)
}

fn summarize(ts: &TimeSeries, t_transient: f64, expected: Option<f64>) -> Result<Oscillation> {
    let (t, y) = window(ts, t_transient)?;
    let start = t[0];
    let end = t[t.len() - 1];
    let length = end - start;
    if let Some(f) = expected {
        if length * f < MIN_PERIODS {
            return Err(Error::analysis(format!(
                "window [{start}, {end}] holds {:.2} periods of frequency {f}; need t_max >= {}",
                length * f,
                start + MIN_PERIODS / f
            )));
        }
    }
    let max = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = y.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let amplitude = max - min;
    if amplitude <= FLAT {
        return Ok(Oscillation {
            amplitude,
            frequency: None,
            mean,
            window_start: start,
            window_end: end,
        });
    }
    let dt = uniform_step(&t)?;
    let frequency = dominant_frequency(&t, &y, dt);
    if length * frequency < MIN_PERIODS {
        return Err(Error::analysis(format!(
            "window [{start}, {end}] holds {:.2} periods of the dominant frequency {frequency}; need t_max >= {}",
            length * frequency,
            start + MIN_PERIODS / frequency
        )));
    }
    Ok(Oscillation {
        amplitude,
        frequency: Some(frequency),
        mean,
        window_start: start,
        window_end: end,
    })
}

/// Amplitude, dominant frequency and mean of the atom probability after `t_transient`.
pub fn extract_oscillation(ts: &TimeSeries, t_transient: f64) -> Result<Oscillation> {
    summarize(ts, t_transient, None)
}

/// As [`extract_oscillation`], but the window must hold three periods of
/// `expected_frequency` even when the series turns out flat.
pub fn extract_oscillation_for(ts: &TimeSeries, t_transient: f64, expected_frequency: f64) -> Result<Oscillation> {
    summarize(ts, t_transient, Some(expected_frequency))
}

/// Largest |prob_atom(t) - predicted(t)| over the window.
pub fn compare_with_prediction<F: Fn(f64) -> f64>(ts: &TimeSeries, t_transient: f64, predicted: F) -> Result<f64> {
    let (t, y) = window(ts, t_transient)?;
    Ok(t.iter()
        .zip(&y)
        .map(|(&t, &p)| (p - predicted(t)).abs())
        .fold(0.0, f64::max))
}

/// Deviation of an atom-excited run from the two-BIC residue amplitude.
pub fn compare_with_residue(ts: &TimeSeries, design: &BicDesign, t_transient: f64) -> Result<f64> {
    let predictor = ResiduePredictor::new(design)?;
    compare_with_prediction(ts, t_transient, |t| predictor.probability(t))
}

/// Largest residual of the best fit of prob_atom to a constant plus one
/// sinusoid per angular frequency.
pub fn sinusoid_fit_residual(ts: &TimeSeries, t_transient: f64, omegas: &[f64]) -> Result<f64> {
    let (t, y) = window(ts, t_transient)?;
    Ok(least_squares(&t, &y, omegas).max_residual)
}

/// Fit residual for the form produced by two stationary poles at `energies`:
/// |a e^{-i E1 t} + b e^{-i E2 t}|^2 = c0 + c1 cos((E2 - E1) t) + c2 sin((E2 - E1) t).
pub fn two_pole_fit_residual(ts: &TimeSeries, t_transient: f64, energies: [f64; 2]) -> Result<f64> {
    sinusoid_fit_residual(ts, t_transient, &[energies[1] - energies[0]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::uniform_times;

    fn series(f: impl Fn(f64) -> f64, t_max: f64, n: usize) -> TimeSeries {
        let times = uniform_times(t_max, n);
        TimeSeries {
            prob_atom: times.iter().map(|&t| f(t)).collect(),
            times,
            leakage: None,
            site_indices: vec![],
            prob_sites: None,
        }
    }

    #[test]
    fn pure_cosine_squared() {
        // period pi, frequency 1/pi, amplitude 1/3
        let ts = series(|t| (1.0 / 3.0) * t.sin().powi(2), 15.0, 2000);
        let osc = extract_oscillation(&ts, 0.0).unwrap();
        assert!((osc.amplitude - 1.0 / 3.0).abs() < 1e-4);
        let f = osc.frequency.unwrap();
        assert!((f - 1.0 / PI).abs() < 1e-6 / PI, "{f}");
        assert!((osc.mean - 1.0 / 6.0).abs() < 1e-2);
    }

    #[test]
    fn frequency_with_offset_and_noise_free_beat() {
        let ts = series(|t| 0.2 + 0.1 * (0.37 * t + 0.4).cos() + 0.01 * (2.1 * t).cos(), 200.0, 4000);
        let f = extract_oscillation(&ts, 20.0).unwrap().frequency.unwrap();
        assert!((f - 0.37 / (2.0 * PI)).abs() < 1e-3 * f);
    }

    #[test]
    fn flat_series() {
        let ts = series(|_| 0.25, 10.0, 100);
        let osc = extract_oscillation(&ts, 0.0).unwrap();
        assert_eq!(osc.amplitude, 0.0);
        assert!(osc.frequency.is_none());
        assert!((osc.mean - 0.25).abs() < 1e-15);
    }

    #[test]
    fn short_window_is_rejected() {
        let ts = series(|t| (0.1 * t).cos(), 10.0, 200);
        match extract_oscillation(&ts, 0.0) {
            Err(Error::Analysis(msg)) => assert!(msg.contains("t_max")),
            other => panic!("{other:?}"),
        }
        let flat = series(|_| 0.0, 10.0, 200);
        assert!(extract_oscillation_for(&flat, 0.0, 0.1).is_err());
        assert!(extract_oscillation(&series(|t| t, 1.0, 5), 0.0).is_err());
    }

    #[test]
    fn fit_residuals() {
        let ts = series(|t| 0.3 - 0.2 * (2.0 * t).cos() + 0.05 * (2.0 * t).sin(), 15.0, 500);
        assert!(two_pole_fit_residual(&ts, 0.0, [-1.0, 1.0]).unwrap() < 1e-12);
        assert!(sinusoid_fit_residual(&ts, 0.0, &[1.5]).unwrap() > 1e-3);
        let d = compare_with_prediction(&ts, 0.0, |t| 0.3 - 0.2 * (2.0 * t).cos()).unwrap();
        assert!((d - 0.05).abs() < 1e-3);
    }
}
