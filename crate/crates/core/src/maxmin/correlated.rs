//! Max-min SINR under spatially correlated fading.
//!
//! The epigraph problem is a geometric program. In logarithmic variables
//! every constraint becomes `log(sum_i exp(a_i . z + b_i)) <= 0`, which is
//! convex, and the objective `log(lambda)` is linear. A log-barrier
//! interior-point method solves it; the final barrier weight bounds the
//! duality gap, so `lambda * exp(residual)` is a certified upper bound.

use nalgebra::{DMatrix, DVector};

use super::{MaxMinSolution, SolverOptions};
use crate::error::{Error, Result};
use crate::se_model::{self, CorrelationProfile, PowerAllocation, SystemDims, UserProfile};

/// Barrier-method settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpOptions {
    /// Target duality gap in `log(lambda)`.
    pub gap_tol: f64,
    /// Barrier weight growth per outer step.
    pub growth: f64,
    /// Newton steps allowed per centering.
    pub max_newton: usize,
}

impl Default for GpOptions {
    fn default() -> Self {
        Self { gap_tol: 1e-9, growth: 20.0, max_newton: 200 }
    }
}

impl From<&SolverOptions> for GpOptions {
    fn from(o: &SolverOptions) -> Self {
        Self { gap_tol: o.bisection_tol.max(1e-12), max_newton: o.max_iter, ..Self::default() }
    }
}

/// `log sum_i exp(a_i . z + b_i)` with sparse exponent rows.
#[derive(Debug, Clone, Default)]
struct LogSumExp {
    terms: Vec<(Vec<(usize, f64)>, f64)>,
}

impl LogSumExp {
    fn push(&mut self, exps: &[(usize, f64)], log_coef: f64) {
        // Merge repeated variables so each row is a clean sparse vector.
        let mut row: Vec<(usize, f64)> = Vec::with_capacity(exps.len());
        for &(i, a) in exps {
            match row.iter_mut().find(|(j, _)| *j == i) {
                Some(e) => e.1 += a,
                None => row.push((i, a)),
            }
        }
        row.retain(|(_, a)| *a != 0.0);
        self.terms.push((row, log_coef));
    }

    fn exponents(&self, z: &DVector<f64>) -> Vec<f64> {
        self.terms.iter().map(|(row, b)| b + row.iter().map(|&(i, a)| a * z[i]).sum::<f64>()).collect()
    }

    fn value(&self, z: &DVector<f64>) -> f64 {
        let e = self.exponents(z);
        let m = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        m + e.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
    }

    /// Value, gradient and Hessian.
    fn second_order(&self, z: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
        let n = z.len();
        let e = self.exponents(z);
        let m = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = e.iter().map(|x| (x - m).exp()).collect();
        let total: f64 = w.iter().sum();
        let mut grad = DVector::zeros(n);
        let mut hess = DMatrix::zeros(n, n);
        for ((row, _), wi) in self.terms.iter().zip(&w) {
            let p = wi / total;
            for &(i, a) in row {
                grad[i] += p * a;
                for &(j, b) in row {
                    hess[(i, j)] += p * a * b;
                }
            }
        }
        hess -= &grad * grad.transpose();
        (m + total.ln(), grad, hess)
    }
}

struct Program {
    constraints: Vec<LogSumExp>,
    /// Index of `log(lambda)`.
    objective: usize,
    dim: usize,
}

impl Program {
    fn feasible(&self, z: &DVector<f64>) -> bool {
        self.constraints.iter().all(|c| c.value(z) < 0.0)
    }

    fn barrier(&self, z: &DVector<f64>, t: f64) -> f64 {
        let mut v = -t * z[self.objective];
        for c in &self.constraints {
            let f = c.value(z);
            if !(f < 0.0) {
                return f64::INFINITY;
            }
            v -= (-f).ln();
        }
        v
    }

    fn newton_system(&self, z: &DVector<f64>, t: f64) -> (DVector<f64>, DMatrix<f64>) {
        let mut grad = DVector::zeros(self.dim);
        grad[self.objective] = -t;
        let mut hess = DMatrix::zeros(self.dim, self.dim);
        for c in &self.constraints {
            let (f, g, h) = c.second_order(z);
            let s = -f;
            grad += &g / s;
            hess += h / s + (&g * g.transpose()) / (s * s);
        }
        (grad, hess)
    }

    /// Barrier method from a strictly feasible start. Returns the final point
    /// and the duality-gap bound.
    fn solve(&self, mut z: DVector<f64>, opts: &GpOptions) -> Result<(DVector<f64>, f64, usize)> {
        debug_assert!(self.feasible(&z));
        let m = self.constraints.len() as f64;
        let mut t = 1.0;
        let mut steps = 0;
        loop {
            let mut centered = false;
            for _ in 0..opts.max_newton {
                steps += 1;
                let (grad, hess) = self.newton_system(&z, t);
                let dz = solve_spd(hess, &grad)?;
                let decrement = grad.dot(&dz);
                let phi = self.barrier(&z, t);
                // The barrier grows with t; ask for no more than rounding allows.
                if decrement / 2.0 <= 1e-11 + 1e-13 * phi.abs() {
                    centered = true;
                    break;
                }
                let mut step = 1.0;
                loop {
                    let cand = &z - step * &dz;
                    let v = self.barrier(&cand, t);
                    if v.is_finite() && v < phi && v <= phi - 0.25 * step * decrement {
                        z = cand;
                        break;
                    }
                    step *= 0.5;
                    if step < 1e-14 {
                        // No progress possible at this precision; treat as centered.
                        centered = true;
                        break;
                    }
                }
                if centered {
                    break;
                }
            }
            if !centered {
                return Err(Error::Convergence { iterations: steps, residual: m / t });
            }
            if m / t <= opts.gap_tol {
                return Ok((z, m / t, steps));
            }
            t = (t * opts.growth).min(m / opts.gap_tol);
        }
    }
}

fn solve_spd(h: DMatrix<f64>, g: &DVector<f64>) -> Result<DVector<f64>> {
    let n = h.nrows();
    let scale = (0..n).map(|i| h[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut ridge = 0.0;
    for _ in 0..8 {
        let mut hr = h.clone();
        for i in 0..n {
            hr[(i, i)] += ridge;
        }
        if let Some(ch) = hr.cholesky() {
            return Ok(ch.solve(g));
        }
        ridge = if ridge == 0.0 { 1e-14 * scale } else { ridge * 100.0 };
    }
    Err(Error::Convergence { iterations: 0, residual: f64::NAN })
}

/// Known pieces of a user's SINR constraint: either a free variable index or
/// a fixed log value.
#[derive(Clone, Copy)]
enum Slot {
    Var(usize),
    Fixed(f64),
}

fn add_term(lse: &mut LogSumExp, lambda: usize, slots: &[(Slot, f64)], mut log_coef: f64) {
    let mut exps = vec![(lambda, 1.0)];
    for &(s, a) in slots {
        match s {
            Slot::Var(i) => exps.push((i, a)),
            Slot::Fixed(v) => log_coef += a * v,
        }
    }
    lse.push(&exps, log_coef);
}

fn check(profile: &UserProfile, dims: &SystemDims, corr: &CorrelationProfile) -> Result<()> {
    dims.validate()?;
    profile.check_dims(dims)?;
    if corr.users() != dims.users {
        return Err(Error::Shape(format!("correlation profile has {} users, dims say {}", corr.users(), dims.users)));
    }
    if dims.users >= dims.coherence {
        return Err(Error::Degenerate("K = T leaves no payload symbols".into()));
    }
    Ok(())
}

/// Builds the SINR constraints
/// `lambda (1 + tau b p_p + sum_j b_j p_d^j + tau p_p sum_j c_jk p_d^j / M) <= w M tau b^2 p_p p_d`.
fn sinr_constraints(
    profile: &UserProfile,
    dims: &SystemDims,
    corr: &CorrelationProfile,
    pilot: &[Slot],
    data: &[Slot],
    lambda: usize,
) -> Vec<LogSumExp> {
    let k_users = dims.users;
    let tau = k_users as f64;
    let m = dims.antennas as f64;
    (0..k_users)
        .map(|k| {
            let b = profile.beta[k];
            let c0 = -(profile.weight[k] * m * tau * b * b).ln();
            let (pp, pd) = (pilot[k], data[k]);
            let mut lse = LogSumExp::default();
            add_term(&mut lse, lambda, &[(pp, -1.0), (pd, -1.0)], c0);
            add_term(&mut lse, lambda, &[(pd, -1.0)], c0 + (tau * b).ln());
            for j in 0..k_users {
                add_term(&mut lse, lambda, &[(pp, -1.0), (pd, -1.0), (data[j], 1.0)], c0 + profile.beta[j].ln());
                let c = corr.get(j, k);
                if c > 0.0 {
                    add_term(&mut lse, lambda, &[(pd, -1.0), (data[j], 1.0)], c0 + (tau * c / m).ln());
                }
            }
            lse
        })
        .collect()
}

/// Starting `log(lambda)` that makes every SINR constraint hold with margin.
fn initial_lambda(constraints: &[LogSumExp], z: &DVector<f64>, lambda: usize) -> f64 {
    let mut probe = z.clone();
    probe[lambda] = 0.0;
    let worst = constraints.iter().map(|c| c.value(&probe)).fold(f64::NEG_INFINITY, f64::max);
    -worst - 1.0
}

fn finish(
    profile: &UserProfile,
    dims: &SystemDims,
    corr: &CorrelationProfile,
    alloc: PowerAllocation,
    lambda: f64,
    gap: f64,
    steps: usize,
) -> Result<MaxMinSolution> {
    let sinr = se_model::sinr_mrc_correlated(dims, &alloc, profile, corr)?;
    let common = sinr.iter().zip(&profile.weight).map(|(s, w)| s * w).fold(f64::INFINITY, f64::min);
    let gamma = se_model::gamma(alloc.tau_p, &alloc.pilot_power, &profile.beta)?;
    let common_sp =
        (0..dims.users).map(|k| profile.weight[k] * alloc.data_power[k] * gamma[k]).fold(f64::INFINITY, f64::min);
    if !(lambda > 0.0) || !common.is_finite() {
        return Err(Error::Degenerate("max-min value collapsed to zero".into()));
    }
    Ok(MaxMinSolution { alloc, common_sp, common_weighted_sinr: common.max(lambda), iterations: steps, residual: gap })
}

/// Jointly optimal pilot and payload powers maximizing `min_k w_k SINR_k`
/// under correlated fading with MRC.
///
/// `residual` is the duality gap in `log(lambda)`: no allocation reaches a
/// common weighted SINR above `common_weighted_sinr * exp(residual)`.
pub fn solve_maxmin_correlated(
    profile: &UserProfile,
    dims: &SystemDims,
    corr: &CorrelationProfile,
    opts: &SolverOptions,
) -> Result<MaxMinSolution> {
    check(profile, dims, corr)?;
    opts.validate()?;
    let k_users = dims.users;
    let tau = k_users as f64;
    let data_symbols = dims.data_symbols() as f64;
    let lambda = 2 * k_users;
    let pilot: Vec<Slot> = (0..k_users).map(Slot::Var).collect();
    let data: Vec<Slot> = (0..k_users).map(|k| Slot::Var(k_users + k)).collect();

    let mut constraints = sinr_constraints(profile, dims, corr, &pilot, &data, lambda);
    for k in 0..k_users {
        let e = profile.energy[k];
        let mut lse = LogSumExp::default();
        lse.push(&[(k, 1.0)], (tau / e).ln());
        lse.push(&[(k_users + k, 1.0)], (data_symbols / e).ln());
        constraints.push(lse);
    }

    let mut z = DVector::zeros(2 * k_users + 1);
    for k in 0..k_users {
        let e = profile.energy[k];
        z[k] = (0.45 * e / tau).ln();
        z[k_users + k] = (0.45 * e / data_symbols).ln();
    }
    z[lambda] = initial_lambda(&constraints[..k_users], &z, lambda);

    let program = Program { constraints, objective: lambda, dim: 2 * k_users + 1 };
    let (z, gap, steps) = program.solve(z, &GpOptions::from(opts))?;

    let data_power: Vec<f64> = (0..k_users).map(|k| z[k_users + k].exp()).collect();
    // Spending the slack on pilots only raises the user's own SINR.
    let pilot_power: Vec<f64> =
        (0..k_users).map(|k| ((profile.energy[k] - data_symbols * data_power[k]) / tau).max(z[k].exp())).collect();
    let alloc = PowerAllocation { tau_p: k_users, pilot_power, data_power };
    finish(profile, dims, corr, alloc, z[lambda].exp(), gap, steps)
}

/// Correlated-fading max-min over payload powers only, pilots fixed.
pub fn solve_maxmin_correlated_data_only(
    profile: &UserProfile,
    dims: &SystemDims,
    corr: &CorrelationProfile,
    pilot_power: &[f64],
    opts: &SolverOptions,
) -> Result<MaxMinSolution> {
    check(profile, dims, corr)?;
    opts.validate()?;
    let k_users = dims.users;
    if pilot_power.len() != k_users {
        return Err(Error::Shape(format!("{} pilot powers for {k_users} users", pilot_power.len())));
    }
    if let Some(p) = pilot_power.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(Error::Domain(format!("fixed pilot powers must be positive, got {p}")));
    }
    let tau = k_users as f64;
    let data_symbols = dims.data_symbols() as f64;
    let peak: Vec<f64> = (0..k_users).map(|k| (profile.energy[k] - tau * pilot_power[k]) / data_symbols).collect();
    if let Some(k) = peak.iter().position(|p| !(*p > 0.0)) {
        return Err(Error::Infeasible(format!("user {k} has no energy left for payload")));
    }
    let lambda = k_users;
    let pilot: Vec<Slot> = pilot_power.iter().map(|p| Slot::Fixed(p.ln())).collect();
    let data: Vec<Slot> = (0..k_users).map(Slot::Var).collect();
    let mut constraints = sinr_constraints(profile, dims, corr, &pilot, &data, lambda);
    for (k, p) in peak.iter().enumerate() {
        let mut lse = LogSumExp::default();
        lse.push(&[(k, 1.0)], -p.ln());
        constraints.push(lse);
    }
    let mut z = DVector::zeros(k_users + 1);
    for k in 0..k_users {
        z[k] = (0.9 * peak[k]).ln();
    }
    z[lambda] = initial_lambda(&constraints[..k_users], &z, lambda);
    let program = Program { constraints, objective: lambda, dim: k_users + 1 };
    let (z, gap, steps) = program.solve(z, &GpOptions::from(opts))?;
    let alloc = PowerAllocation {
        tau_p: k_users,
        pilot_power: pilot_power.to_vec(),
        data_power: (0..k_users).map(|k| z[k].exp().min(peak[k])).collect(),
    };
    finish(profile, dims, corr, alloc, z[lambda].exp(), gap, steps)
}
