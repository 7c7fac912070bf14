//! Large-scale fading estimation from processed pilot observations.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// One circularly symmetric complex Gaussian sample with unit variance.
fn cn<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Moment estimate of `beta` from `N` processed pilot vectors
/// `y = sqrt(tau_p p) g + w`, `g ~ CN(0, beta I_M)`, `w ~ CN(0, I_M)`.
///
/// The raw estimate is unbiased but can be negative at low SNR; callers
/// that need a usable fading value clamp it (see [`clamp_estimate`]).
pub fn estimate_beta<R: Rng + ?Sized>(
    true_beta: f64,
    pilot_power: f64,
    tau_p: usize,
    antennas: usize,
    observations: usize,
    rng: &mut R,
) -> Result<f64> {
    if !(true_beta > 0.0 && pilot_power > 0.0) || tau_p == 0 || antennas == 0 || observations == 0 {
        return Err(Error::Domain(format!(
            "estimate_beta needs positive inputs (beta {true_beta}, p {pilot_power}, tau_p {tau_p}, M {antennas}, N {observations})"
        )));
    }
    let amplitude = (tau_p as f64 * pilot_power * true_beta).sqrt();
    let mut energy = 0.0;
    for _ in 0..antennas * observations {
        let y = amplitude * cn(rng) + cn(rng);
        energy += y.norm_sqr();
    }
    let mn = (antennas * observations) as f64;
    Ok((energy - mn) / (mn * tau_p as f64 * pilot_power))
}

/// Keeps an estimate positive: anything below one standard deviation of the
/// noise-only statistic is replaced by that floor.
pub fn clamp_estimate(estimate: f64, pilot_power: f64, tau_p: usize, antennas: usize, observations: usize) -> f64 {
    let mn = (antennas * observations) as f64;
    let floor = 1.0 / (mn.sqrt() * tau_p as f64 * pilot_power);
    estimate.max(floor)
}
