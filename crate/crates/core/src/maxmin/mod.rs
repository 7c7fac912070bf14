//! Weighted max-min SE power control.
//!
//! At the optimum every user receives the same weighted signal power
//! `x = w_k p_d^k gamma_k`. For a given `x` each user's payload power follows
//! from a quadratic (smaller root), and the common `x` minimizes a strictly
//! convex function of `y = 1/x`. The zero-forcing problem has the same
//! optimal powers as the MRC problem; only the reported SINR differs.

mod correlated;

pub use correlated::{solve_maxmin_correlated, solve_maxmin_correlated_data_only, GpOptions};

use crate::error::{Error, Result};
use crate::se_model::{self, Detector, PowerAllocation, SystemDims, UserProfile};
use crate::search;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative tolerance of every bisection.
    pub bisection_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { bisection_tol: 1e-10, max_iter: 200 }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.bisection_tol > 0.0) || self.max_iter == 0 {
            return Err(Error::Domain(format!("invalid solver options {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxMinSolution {
    pub alloc: PowerAllocation,
    /// Common weighted received signal power `w_k p_d^k gamma_k`.
    pub common_sp: f64,
    /// Common value of `w_k SINR_k` for the requested detector.
    pub common_weighted_sinr: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// One user's budget seen through the signal-power parametrization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserTerms {
    pub beta: f64,
    pub energy: f64,
    pub weight: f64,
}

impl UserTerms {
    pub fn new(beta: f64, energy: f64, weight: f64) -> Result<Self> {
        for (name, v) in [("beta", beta), ("energy", energy), ("weight", weight)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { beta, energy, weight })
    }

    pub fn of(profile: &UserProfile, k: usize) -> Self {
        Self { beta: profile.beta[k], energy: profile.energy[k], weight: profile.weight[k] }
    }
}

/// Roots of the discriminant of the payload-power quadratic, in the
/// unweighted signal power `z = x / w`. Signal powers up to `lo` are
/// attainable.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SpRoots {
    pub lo: f64,
    pub hi: f64,
}

pub(crate) fn sp_roots(snr: f64, data_symbols: f64) -> SpRoots {
    // (sqrt(1+u) - 1)^2 without cancellation for small u.
    let s = (1.0 + snr).sqrt();
    let d = snr / (s + 1.0);
    SpRoots { lo: d * d / data_symbols, hi: (s + 1.0) * (s + 1.0) / data_symbols }
}

/// Smaller root of the payload-power quadratic for unweighted signal power `z`.
/// `None` when `z` is beyond the attainable range.
pub(crate) fn payload_for_sp(z: f64, beta: f64, energy: f64, data_symbols: f64) -> Option<f64> {
    let u = energy * beta;
    let roots = sp_roots(u, data_symbols);
    if !(z >= 0.0) || z > roots.lo {
        return None;
    }
    let disc = data_symbols * data_symbols * (roots.lo - z).max(0.0) * (roots.hi - z);
    let denom = beta * (u + data_symbols * z + disc.sqrt());
    Some(2.0 * (u + 1.0) * z / denom)
}

/// Payload power giving user `user` the weighted signal power `x`, with the
/// rest of the budget on pilots and pilot length `K`.
pub fn pd_from_sp(x: f64, user: &UserTerms, dims: &SystemDims) -> Result<f64> {
    let user = UserTerms::new(user.beta, user.energy, user.weight)?;
    if dims.users >= dims.coherence {
        return Err(Error::Degenerate("K = T leaves no payload symbols".into()));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("signal power must be nonnegative, got {x}")));
    }
    payload_for_sp(x / user.weight, user.beta, user.energy, dims.data_symbols() as f64).ok_or_else(|| {
        Error::Infeasible(format!(
            "signal power {x:e} exceeds the attainable {:e}",
            max_attainable_sp(&user, dims).unwrap_or(f64::NAN)
        ))
    })
}

/// Largest weighted signal power the user can reach with pilot length `K`.
pub fn max_attainable_sp(user: &UserTerms, dims: &SystemDims) -> Result<f64> {
    let user = UserTerms::new(user.beta, user.energy, user.weight)?;
    if dims.users >= dims.coherence {
        return Err(Error::Degenerate("K = T leaves no payload symbols".into()));
    }
    Ok(user.weight * sp_roots(user.energy * user.beta, dims.data_symbols() as f64).lo)
}

/// Per-user constants of the single-variable objective in `y = 1/x`.
struct SpObjective {
    // (z_lo, z_hi, 1/w) per user
    users: Vec<(f64, f64, f64)>,
    slope: f64,
}

impl SpObjective {
    fn new(profile: &UserProfile, data_symbols: f64) -> Self {
        let users = (0..profile.len())
            .map(|k| {
                let r = sp_roots(profile.energy[k] * profile.beta[k], data_symbols);
                (r.lo, r.hi, 1.0 / profile.weight[k])
            })
            .collect();
        let slope =
            1.0 + profile.energy.iter().zip(&profile.beta).map(|(e, b)| e * b).sum::<f64>() / (2.0 * data_symbols);
        Self { users, slope }
    }

    /// Smallest `y` at which every user can reach `x = 1/y`.
    fn y_min(&self) -> f64 {
        self.users.iter().map(|(lo, _, inv_w)| inv_w / lo).fold(0.0, f64::max)
    }

    /// Objective up to an additive constant; proportional to the inverse of
    /// the common weighted SINR.
    fn value(&self, y: f64) -> f64 {
        let root_sum: f64 =
            self.users.iter().map(|&(lo, hi, inv_w)| ((lo * y - inv_w).max(0.0) * (hi * y - inv_w)).sqrt()).sum();
        self.slope * y - root_sum / 2.0
    }

    fn derivative(&self, y: f64) -> f64 {
        let mut d = self.slope;
        for &(lo, hi, inv_w) in &self.users {
            let a1 = (lo * y - inv_w).max(0.0);
            let a2 = hi * y - inv_w;
            if a1 == 0.0 {
                return f64::NEG_INFINITY;
            }
            d -= (lo * a2 + hi * a1) / (4.0 * (a1 * a2).sqrt());
        }
        d
    }
}

/// Unique optimal common weighted signal power for pilot length `K`.
pub fn solve_common_sp(profile: &UserProfile, dims: &SystemDims, opts: &SolverOptions) -> Result<f64> {
    check_instance(profile, dims)?;
    opts.validate()?;
    common_sp(profile, dims.data_symbols() as f64, opts).map(|(x, _, _)| x)
}

/// Returns `(x*, iterations, relative bracket width)`.
fn common_sp(profile: &UserProfile, data_symbols: f64, opts: &SolverOptions) -> Result<(f64, usize, f64)> {
    let obj = SpObjective::new(profile, data_symbols);
    let y_lo = obj.y_min() * (1.0 + 1e-12);
    if obj.derivative(y_lo) >= 0.0 {
        return Ok((1.0 / y_lo, 0, 0.0));
    }
    let mut y_hi = 2.0 * y_lo;
    let mut expansions = 0;
    while obj.derivative(y_hi) <= 0.0 {
        y_hi *= 2.0;
        expansions += 1;
        if expansions > opts.max_iter {
            return Err(Error::Convergence { iterations: expansions, residual: obj.derivative(y_hi) });
        }
    }
    let r = search::bisect(|y| obj.derivative(y), y_lo, y_hi, opts.bisection_tol, 0.0, opts.max_iter)?;
    Ok((1.0 / r.x, r.iterations + expansions, r.width / r.x))
}

/// Value of the single-variable objective at `y = 1/x`; exposed for
/// convexity probes.
pub fn common_sp_objective(profile: &UserProfile, dims: &SystemDims, y: f64) -> Result<f64> {
    check_instance(profile, dims)?;
    let obj = SpObjective::new(profile, dims.data_symbols() as f64);
    if y < obj.y_min() {
        return Err(Error::Infeasible(format!("y = {y:e} below the attainable bound {:e}", obj.y_min())));
    }
    Ok(obj.value(y))
}

/// Smallest admissible `y` (inverse of the smallest per-user attainable SP).
pub fn common_sp_lower_bound(profile: &UserProfile, dims: &SystemDims) -> Result<f64> {
    check_instance(profile, dims)?;
    Ok(SpObjective::new(profile, dims.data_symbols() as f64).y_min())
}

fn check_instance(profile: &UserProfile, dims: &SystemDims) -> Result<()> {
    dims.validate()?;
    profile.check_dims(dims)?;
    if dims.users >= dims.coherence {
        return Err(Error::Degenerate("K = T leaves no payload symbols".into()));
    }
    Ok(())
}

/// Jointly optimal pilot and payload powers maximizing `min_k w_k SINR_k`.
pub fn solve_maxmin(
    profile: &UserProfile,
    dims: &SystemDims,
    detector: Detector,
    opts: &SolverOptions,
) -> Result<MaxMinSolution> {
    solve_maxmin_with_pilot_length(profile, dims, dims.users, detector, opts)
}

/// Same as [`solve_maxmin`] but with an arbitrary pilot length `K <= tau_p < T`.
pub fn solve_maxmin_with_pilot_length(
    profile: &UserProfile,
    dims: &SystemDims,
    tau_p: usize,
    detector: Detector,
    opts: &SolverOptions,
) -> Result<MaxMinSolution> {
    dims.validate()?;
    profile.check_dims(dims)?;
    opts.validate()?;
    if detector == Detector::Zf {
        dims.require_zf()?;
    }
    if tau_p < dims.users || tau_p > dims.coherence {
        return Err(Error::Domain(format!("pilot length {tau_p} outside {}..={}", dims.users, dims.coherence)));
    }
    if tau_p == dims.coherence {
        return Err(Error::Degenerate("pilot length equal to T leaves no payload symbols".into()));
    }
    let data_symbols = (dims.coherence - tau_p) as f64;
    let (x, iterations, residual) = common_sp(profile, data_symbols, opts)?;

    let mut pilot_power = Vec::with_capacity(dims.users);
    let mut data_power = Vec::with_capacity(dims.users);
    for k in 0..dims.users {
        let z = x / profile.weight[k];
        // x sits inside every user's attainable range up to the bracket slack.
        let z = z.min(sp_roots(profile.energy[k] * profile.beta[k], data_symbols).lo);
        let pd = payload_for_sp(z, profile.beta[k], profile.energy[k], data_symbols)
            .ok_or_else(|| Error::Infeasible(format!("user {k} cannot reach the common signal power")))?;
        data_power.push(pd);
        pilot_power.push(((profile.energy[k] - data_symbols * pd) / tau_p as f64).max(0.0));
    }
    let alloc = PowerAllocation { tau_p, pilot_power, data_power };
    let report = se_model::se_report(dims, &alloc, profile, detector, None)?;
    Ok(MaxMinSolution {
        common_weighted_sinr: report.min_weighted_sinr(&profile.weight),
        alloc,
        common_sp: x,
        iterations,
        residual,
    })
}

/// Max-min over payload powers only, with pilot powers held fixed.
///
/// With fixed estimation quality the weighted SINR grows with the common
/// signal power, so the largest common value every user can reach at its
/// peak payload power is optimal.
pub fn solve_maxmin_data_only(
    profile: &UserProfile,
    dims: &SystemDims,
    pilot_power: &[f64],
    detector: Detector,
) -> Result<MaxMinSolution> {
    dims.validate()?;
    profile.check_dims(dims)?;
    if detector == Detector::Zf {
        dims.require_zf()?;
    }
    if dims.users >= dims.coherence {
        return Err(Error::Degenerate("K = T leaves no payload symbols".into()));
    }
    let gamma = se_model::gamma(dims.users, pilot_power, &profile.beta)?;
    let k = dims.users as f64;
    let data_symbols = dims.data_symbols() as f64;
    let peak: Vec<f64> =
        (0..dims.users).map(|i| ((profile.energy[i] - k * pilot_power[i]) / data_symbols).max(0.0)).collect();
    let x = (0..dims.users).map(|i| profile.weight[i] * gamma[i] * peak[i]).fold(f64::INFINITY, f64::min);
    let data_power: Vec<f64> = (0..dims.users)
        .map(|i| if x > 0.0 { (x / (profile.weight[i] * gamma[i])).min(peak[i]) } else { 0.0 })
        .collect();
    let alloc = PowerAllocation { tau_p: dims.users, pilot_power: pilot_power.to_vec(), data_power };
    let report = se_model::se_report(dims, &alloc, profile, detector, None)?;
    Ok(MaxMinSolution {
        common_weighted_sinr: report.min_weighted_sinr(&profile.weight),
        alloc,
        common_sp: x,
        iterations: 0,
        residual: 0.0,
    })
}
