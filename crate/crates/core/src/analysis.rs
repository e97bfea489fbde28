//! Post-processing of trajectories: norm conservation, period extraction,
//! growth-rate fitting, and linear stability of a background state.

use crate::error::{Error, Result};
use crate::model::{jacobian, OdeSystem};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// |‖x(t)‖₂ − ‖x(0)‖₂| for each sample of a trajectory of state vectors.
pub fn l2_deviation(trajectory: &[Vec<f64>]) -> Vec<f64> {
    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if trajectory.is_empty() {
        return Vec::new();
    }
    let n0 = norm(&trajectory[0]);
    trajectory.iter().map(|x| (norm(x) - n0).abs()).collect()
}

/// Oscillation period from a scalar signal: locate every sign change, place
/// each crossing by linear interpolation, and return twice the mean spacing
/// between consecutive crossings. Needs at least three crossings.
pub fn extract_period(times: &[f64], signal: &[f64]) -> Result<f64> {
    if times.len() != signal.len() {
        return Err(Error::LengthMismatch { expected: times.len(), got: signal.len() });
    }
    let mut crossings = Vec::new();
    for i in 1..signal.len() {
        let (a, b) = (signal[i - 1], signal[i]);
        if a == 0.0 {
            crossings.push(times[i - 1]);
        } else if a * b < 0.0 {
            let frac = a / (a - b);
            crossings.push(times[i - 1] + frac * (times[i] - times[i - 1]));
        }
    }
    if *signal.last().unwrap() == 0.0 {
        crossings.push(*times.last().unwrap());
    }
    if crossings.len() < 3 {
        return Err(Error::Measurement(format!(
            "need at least 3 zero crossings to estimate a period, found {}",
            crossings.len()
        )));
    }
    let span = crossings.last().unwrap() - crossings[0];
    Ok(2.0 * span / (crossings.len() - 1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    pub rate: f64,
    /// Intercept of the fitted line in log-amplitude.
    pub log_amplitude0: f64,
    /// RMS residual of the linear fit of log|signal|.
    pub residual: f64,
}

/// Least-squares slope of ln(signal) over samples with t ∈ [t_lo, t_hi].
/// Signal values must be strictly positive on the window.
pub fn growth_rate_fit(times: &[f64], signal: &[f64], t_lo: f64, t_hi: f64) -> Result<GrowthFit> {
    if times.len() != signal.len() {
        return Err(Error::LengthMismatch { expected: times.len(), got: signal.len() });
    }
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    for (&t, &s) in times.iter().zip(signal) {
        if t >= t_lo && t <= t_hi {
            if s <= 0.0 {
                return Err(Error::Measurement(format!(
                    "non-positive amplitude {s} at t = {t} inside the fit window"
                )));
            }
            ts.push(t);
            ys.push(s.ln());
        }
    }
    if ts.len() < 2 {
        return Err(Error::Measurement(format!(
            "fit window [{t_lo}, {t_hi}] contains {} samples, need at least 2",
            ts.len()
        )));
    }
    let n = ts.len() as f64;
    let tm = ts.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = ts.iter().map(|t| (t - tm).powi(2)).sum();
    let sxy: f64 = ts.iter().zip(&ys).map(|(t, y)| (t - tm) * (y - ym)).sum();
    if sxx == 0.0 {
        return Err(Error::Measurement("degenerate fit window: all samples at one time".into()));
    }
    let rate = sxy / sxx;
    let intercept = ym - rate * tm;
    let ss: f64 = ts
        .iter()
        .zip(&ys)
        .map(|(t, y)| (y - (intercept + rate * t)).powi(2))
        .sum();
    Ok(GrowthFit { rate, log_amplitude0: intercept, residual: (ss / n).sqrt() })
}

#[derive(Debug, Clone)]
pub struct LinearStability {
    pub eigenvalues: Vec<Complex64>,
    /// max Re λ over the spectrum of the Jacobian at the background.
    pub growth_rate: f64,
    /// |Im λ| of the dominant (max-Re) eigenvalue; ties in Re resolve to the
    /// largest frequency.
    pub dominant_frequency: f64,
    /// max |Im λ| over the whole spectrum.
    pub max_frequency: f64,
}

impl LinearStability {
    /// Characteristic time of the dominant mode: 2π/ω when it oscillates,
    /// 1/γ when it grows monotonically.
    pub fn characteristic_time(&self) -> Option<f64> {
        if self.dominant_frequency > 1e-12 {
            Some(2.0 * std::f64::consts::PI / self.dominant_frequency)
        } else if self.growth_rate > 1e-12 {
            Some(1.0 / self.growth_rate)
        } else {
            None
        }
    }
}

/// Spectrum of the analytic Jacobian of the flow, linearized at `background`.
pub fn linear_stability(sys: &OdeSystem, background: &[f64]) -> Result<LinearStability> {
    let n = sys.n_vars;
    let j = jacobian(sys, background)?;
    let a = DMatrix::from_row_slice(n, n, &j);
    let eigenvalues: Vec<Complex64> = a
        .complex_eigenvalues()
        .iter()
        .map(|z| Complex64::new(z.re, z.im))
        .collect();
    let growth_rate = eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let tie = 1e-9 * growth_rate.abs().max(1.0);
    let dominant_frequency = eigenvalues
        .iter()
        .filter(|z| z.re >= growth_rate - tie)
        .map(|z| z.im.abs())
        .fold(0.0, f64::max);
    let max_frequency = eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    Ok(LinearStability { eigenvalues, growth_rate, dominant_frequency, max_frequency })
}
