//! Virtual water-filling for weighted sum SE over payload powers.
//!
//! With `x_k = b_k p_k / (1 + sum_j b_j p_j)` and `s = 1 - sum_j x_j` the
//! problem becomes `max sum_k w_k log2(1 + a_k x_k)` subject to
//! `0 <= x_k <= b_k P_k s` and `sum_k x_k = 1 - s`, which is convex. For a
//! fixed `s` the solution is a capped water-filling; `s` itself is found by
//! bisection on the derivative of the optimal value.

use crate::error::{Error, Result};
use crate::maxmin::SolverOptions;
use crate::se_model::{self, Detector, SystemDims, UserProfile};
use crate::search;

/// Data-power sum-SE instance in water-filling form.
#[derive(Debug, Clone, PartialEq)]
pub struct VwfProblem {
    /// Virtual channel gain `a_k`, so that `SINR_k = a_k x_k`.
    pub gain: Vec<f64>,
    /// Interference coefficient `b_k` (`beta_k` for MRC, `beta_k - gamma_k` for ZF).
    pub interference: Vec<f64>,
    /// Peak payload power `P_k`.
    pub peak: Vec<f64>,
    pub weight: Vec<f64>,
}

/// Primal and dual variables of the water-filling problem.
#[derive(Debug, Clone, PartialEq)]
pub struct VwfState {
    pub s: f64,
    pub x: Vec<f64>,
    pub nu: f64,
    pub lambda_mult: Vec<f64>,
    pub mu_mult: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VwfSolution {
    pub data_power: Vec<f64>,
    /// `sum_k w_k log2(1 + a_k x_k)` (no pilot prelog).
    pub objective: f64,
    pub state: VwfState,
    pub full_power: bool,
    pub iterations: usize,
}

impl VwfProblem {
    pub fn new(gain: Vec<f64>, interference: Vec<f64>, peak: Vec<f64>, weight: Vec<f64>) -> Result<Self> {
        let k = gain.len();
        if k == 0 || interference.len() != k || peak.len() != k || weight.len() != k {
            return Err(Error::Shape("water-filling vectors must be nonempty and equally long".into()));
        }
        for (name, v) in [("gain", &gain), ("peak", &peak), ("weight", &weight)] {
            if let Some(bad) = v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
                return Err(Error::Domain(format!("{name} entries must be nonnegative, got {bad}")));
            }
        }
        if let Some(bad) = interference.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::Domain(format!("interference coefficients must be positive, got {bad}")));
        }
        Ok(Self { gain, interference, peak, weight })
    }

    /// Builds the instance for fixed pilot powers with pilot length `K`; peak
    /// payload powers take whatever the budgets leave.
    pub fn from_pilots(
        profile: &UserProfile,
        dims: &SystemDims,
        pilot_power: &[f64],
        detector: Detector,
        weights: &[f64],
    ) -> Result<Self> {
        dims.validate()?;
        profile.check_dims(dims)?;
        if dims.users >= dims.coherence {
            return Err(Error::Degenerate("K = T leaves no payload symbols".into()));
        }
        if weights.len() != dims.users {
            return Err(Error::Shape(format!("{} weights for {} users", weights.len(), dims.users)));
        }
        let gamma = se_model::gamma(dims.users, pilot_power, &profile.beta)?;
        let array_gain = dims.array_gain(detector)?;
        let tau = dims.users as f64;
        let data_symbols = dims.data_symbols() as f64;
        let interference: Vec<f64> = (0..dims.users)
            .map(|k| match detector {
                Detector::Mrc => profile.beta[k],
                Detector::Zf => se_model::estimation_error(tau * pilot_power[k], profile.beta[k]),
            })
            .collect();
        let gain = (0..dims.users).map(|k| array_gain * gamma[k] / interference[k]).collect();
        let peak =
            (0..dims.users).map(|k| ((profile.energy[k] - tau * pilot_power[k]) / data_symbols).max(0.0)).collect();
        Self::new(gain, interference, peak, weights.to_vec())
    }

    fn len(&self) -> usize {
        self.gain.len()
    }

    fn cap(&self, k: usize, s: f64) -> f64 {
        self.interference[k] * self.peak[k] * s
    }

    /// Lower end of the admissible `s` range: everyone at peak power.
    pub fn s_min(&self) -> f64 {
        1.0 / (1.0 + (0..self.len()).map(|k| self.interference[k] * self.peak[k]).sum::<f64>())
    }

    /// Capped water level allocation for a given multiplier.
    fn fill(&self, nu: f64, s: f64) -> Vec<f64> {
        (0..self.len()).map(|k| self.level(k, nu).min(self.cap(k, s))).collect()
    }

    fn level(&self, k: usize, nu: f64) -> f64 {
        if self.gain[k] == 0.0 || self.weight[k] == 0.0 {
            return 0.0;
        }
        (self.weight[k] / nu - 1.0 / self.gain[k]).max(0.0)
    }

    /// `w_k / (1/a_k + x_k)`, the marginal utility of virtual power.
    fn marginal(&self, k: usize, x: f64) -> f64 {
        if self.gain[k] == 0.0 {
            return 0.0;
        }
        self.weight[k] / (1.0 / self.gain[k] + x)
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        (0..self.len()).map(|k| self.weight[k] * (1.0 + self.gain[k] * x[k]).log2()).sum()
    }

    /// KKT multipliers of the caps and of nonnegativity at `(x, nu)`.
    pub fn multipliers(&self, x: &[f64], nu: f64) -> (Vec<f64>, Vec<f64>) {
        let lambda = (0..self.len()).map(|k| (self.marginal(k, x[k]) - nu).max(0.0)).collect();
        let mu = (0..self.len()).map(|k| (nu - self.weight[k] * self.gain[k]).max(0.0)).collect();
        (lambda, mu)
    }

    /// Derivative of the optimal value with respect to `s` (up to the
    /// positive factor `1/ln 2`).
    pub fn s_derivative(&self, x: &[f64], nu: f64) -> f64 {
        let (lambda, _) = self.multipliers(x, nu);
        (0..self.len()).map(|k| self.interference[k] * self.peak[k] * lambda[k]).sum::<f64>() - nu
    }
}

/// True when every user transmitting at peak power is optimal.
pub fn vwf_full_power_check(problem: &VwfProblem) -> bool {
    let k = problem.len();
    let total = 1.0 + (0..k).map(|j| problem.interference[j] * problem.peak[j]).sum::<f64>();
    let at_peak: Vec<f64> = (0..k).map(|j| problem.interference[j] * problem.peak[j] / total).collect();
    let lhs: f64 = (0..k).map(|j| problem.interference[j] * problem.peak[j] * problem.marginal(j, at_peak[j])).sum();
    let rhs = (0..k).map(|j| total * problem.marginal(j, at_peak[j])).fold(f64::INFINITY, f64::min);
    lhs <= rhs
}

/// Water-filling for fixed `s`: returns `(x, nu)` with `sum x = 1 - s`.
pub fn vwf_inner(problem: &VwfProblem, s: f64) -> Result<(Vec<f64>, f64)> {
    let k = problem.len();
    let budget = 1.0 - s;
    let nu_top = (0..k).map(|j| problem.weight[j] * problem.gain[j]).fold(0.0, f64::max);
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Domain(format!("s = {s} outside (0, 1]")));
    }
    if budget <= 0.0 {
        return Ok((vec![0.0; k], nu_top));
    }
    let caps: f64 = (0..k).map(|j| problem.cap(j, s)).sum();
    let usable: f64 =
        (0..k).filter(|&j| problem.gain[j] > 0.0 && problem.weight[j] > 0.0).map(|j| problem.cap(j, s)).sum();
    if usable < budget * (1.0 - 1e-12) {
        return Err(Error::Infeasible(format!("caps sum to {caps:e} (usable {usable:e}) but 1 - s = {budget:e}")));
    }
    if usable <= budget * (1.0 + 1e-12) {
        let x: Vec<f64> = (0..k)
            .map(|j| if problem.gain[j] > 0.0 && problem.weight[j] > 0.0 { problem.cap(j, s) } else { 0.0 })
            .collect();
        let nu = (0..k).filter(|&j| x[j] > 0.0).map(|j| problem.marginal(j, x[j])).fold(f64::INFINITY, f64::min);
        return Ok((x, nu));
    }

    // Total fill is nonincreasing in nu; bisect in log(nu).
    let fill_sum = |nu: f64| problem.fill(nu, s).iter().sum::<f64>();
    let mut hi = nu_top;
    let mut lo = nu_top;
    while fill_sum(lo) < budget {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::Convergence { iterations: 0, residual: budget - fill_sum(lo) });
        }
    }
    let r = search::bisect(|l| fill_sum(l.exp()) - budget, lo.ln(), hi.ln(), 0.0, 1e-15, 400)?;
    hi = r.x.exp();

    // Exact water level for the active set found by bisection.
    let mut free_w = 0.0;
    let mut free_inv = 0.0;
    let mut fixed = 0.0;
    for j in 0..k {
        let lvl = problem.level(j, hi);
        let cap = problem.cap(j, s);
        if lvl <= 0.0 {
            continue;
        }
        if lvl >= cap {
            fixed += cap;
        } else {
            free_w += problem.weight[j];
            free_inv += 1.0 / problem.gain[j];
        }
    }
    let mut nu = hi;
    if free_w > 0.0 {
        let cand = free_w / (budget - fixed + free_inv);
        if cand > 0.0 && (fill_sum(cand) - budget).abs() <= (fill_sum(hi) - budget).abs() {
            nu = cand;
        }
    }
    let mut x = problem.fill(nu, s);
    // Spread any round-off over the uncapped users.
    let total: f64 = x.iter().sum();
    let err = budget - total;
    let free: Vec<usize> = (0..k).filter(|&j| x[j] > 0.0 && x[j] < problem.cap(j, s)).collect();
    if !free.is_empty() {
        let share = err / free.len() as f64;
        for j in free {
            x[j] = (x[j] + share).clamp(0.0, problem.cap(j, s));
        }
    }
    Ok((x, nu))
}

/// Virtual water-filling: optimal payload powers for fixed pilots.
pub fn vwf_solve(problem: &VwfProblem, opts: &SolverOptions) -> Result<VwfSolution> {
    opts.validate()?;
    let k = problem.len();
    let s_lo = problem.s_min();
    if vwf_full_power_check(problem) {
        let x: Vec<f64> = (0..k).map(|j| problem.cap(j, s_lo)).collect();
        let nu = (0..k).map(|j| problem.marginal(j, x[j])).fold(f64::INFINITY, f64::min);
        return Ok(finish(problem, s_lo, x, nu, true, 0));
    }

    // f(s_lo) > 0 and f(1) <= 0; keep the sign change bracketed.
    let f = |s: f64| -> Result<f64> {
        let (x, nu) = vwf_inner(problem, s)?;
        Ok(problem.s_derivative(&x, nu))
    };
    let (mut lo, mut hi) = (s_lo, 1.0);
    let mut iterations = 0;
    while hi - lo > opts.bisection_tol * lo {
        iterations += 1;
        if iterations > opts.max_iter {
            return Err(Error::Convergence { iterations, residual: (hi - lo) / lo });
        }
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut s = 0.5 * (lo + hi);
    let value = |s: f64| vwf_inner(problem, s).map(|(x, _)| problem.objective(&x)).unwrap_or(f64::NEG_INFINITY);
    let best = value(s);

    // Guard against a non-monotone f: scan the range and refine if a scan
    // point beats the bisection result.
    let scan = 48;
    let mut best_scan = (s, best);
    for i in 1..scan {
        let cand = s_lo * (1.0 / s_lo).powf(i as f64 / scan as f64);
        let v = value(cand);
        if v > best_scan.1 {
            best_scan = (cand, v);
        }
    }
    if best_scan.1 > best + 1e-9 * best.abs().max(1e-300) {
        let step = (1.0 / s_lo).powf(1.0 / scan as f64);
        let a = (best_scan.0 / step).max(s_lo).ln();
        let b = (best_scan.0 * step).min(1.0).ln();
        let (r, _) = search::golden_max(|l| value(l.exp()), a, b, opts.bisection_tol, 10 * opts.max_iter)?;
        iterations += r.iterations;
        s = r.x.exp();
    }
    let (x, nu) = vwf_inner(problem, s)?;
    Ok(finish(problem, s, x, nu, false, iterations))
}

fn finish(problem: &VwfProblem, s: f64, x: Vec<f64>, nu: f64, full_power: bool, iterations: usize) -> VwfSolution {
    let data_power = (0..problem.len())
        .map(|k| if full_power { problem.peak[k] } else { (x[k] / (s * problem.interference[k])).min(problem.peak[k]) })
        .collect();
    let (lambda_mult, mu_mult) = problem.multipliers(&x, nu);
    VwfSolution {
        data_power,
        objective: problem.objective(&x),
        state: VwfState { s, x, nu, lambda_mult, mu_mult },
        full_power,
        iterations,
    }
}
