//! One-ring spatial correlation for a half-wavelength uniform linear array.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::se_model::CorrelationProfile;

/// Simpson panels per radian of angular support.
const PANELS_PER_RADIAN: f64 = 2400.0;

/// First column of the Toeplitz covariance: `r(d) = E[exp(j pi d cos phi)]`
/// for `phi` uniform on `[theta - spread, theta + spread]`, scaled by `beta`.
///
/// Angles are in radians. A zero spread gives the rank-one covariance of a
/// single plane wave.
pub fn one_ring_column(beta: f64, angle: f64, spread: f64, antennas: usize) -> Result<Vec<Complex64>> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    if !(spread >= 0.0 && spread.is_finite() && angle.is_finite()) || antennas == 0 {
        return Err(Error::Domain(format!("bad one-ring parameters: angle {angle}, spread {spread}, M {antennas}")));
    }
    if spread == 0.0 {
        return Ok((0..antennas)
            .map(|d| beta * Complex64::cis(std::f64::consts::PI * d as f64 * angle.cos()))
            .collect());
    }
    // Even panel count for Simpson's rule.
    let panels = 2 * ((PANELS_PER_RADIAN * spread).ceil() as usize).max(64);
    let h = 2.0 * spread / panels as f64;
    let cosines: Vec<(f64, f64)> = (0..=panels)
        .map(|i| {
            let w = if i == 0 || i == panels {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            (w, (angle - spread + i as f64 * h).cos())
        })
        .collect();
    let norm = beta * h / 3.0 / (2.0 * spread);
    Ok((0..antennas)
        .map(|d| {
            let phase = std::f64::consts::PI * d as f64;
            let s: Complex64 = cosines.iter().map(|&(w, c)| w * Complex64::cis(phase * c)).sum();
            s * norm
        })
        .collect())
}

/// `tr(R_j R_k)` for two Hermitian Toeplitz covariances given by their
/// first columns.
pub fn toeplitz_cross_trace(a: &[Complex64], b: &[Complex64]) -> f64 {
    let m = a.len();
    // Lag d appears M - |d| times; negative lags are conjugates.
    let mut t = m as f64 * (a[0] * b[0].conj()).re;
    for d in 1..m {
        t += 2.0 * (m - d) as f64 * (a[d] * b[d].conj()).re;
    }
    t
}

/// Cross traces for users with the given fading, angles and common spread
/// (radians).
pub fn one_ring_cross_traces(beta: &[f64], angles: &[f64], spread: f64, antennas: usize) -> Result<CorrelationProfile> {
    if beta.len() != angles.len() {
        return Err(Error::Shape(format!("{} fading values but {} angles", beta.len(), angles.len())));
    }
    let columns =
        beta.iter().zip(angles).map(|(&b, &a)| one_ring_column(b, a, spread, antennas)).collect::<Result<Vec<_>>>()?;
    let k = beta.len();
    let mut traces = vec![0.0; k * k];
    for j in 0..k {
        for i in j..k {
            let t = toeplitz_cross_trace(&columns[j], &columns[i]).max(0.0);
            traces[j * k + i] = t;
            traces[i * k + j] = t;
        }
    }
    CorrelationProfile::new(k, traces)
}
