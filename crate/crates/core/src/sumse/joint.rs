//! Joint pilot and payload weighted sum SE via the perspective reformulation.
//!
//! Writing `y_k = p_d^k gamma_k s` and `s = 1 / (1 + sum_j beta_j p_d^j)`, the
//! problem becomes `max sum_k w_k log2(1 + G y_k)` subject to
//! `sum_j beta_j q(y_j, s) [- sum_j y_j] <= 1 - s`, where `q(y, s) = s r(y/s)`
//! is the perspective of the convex payload-power function `r`. For fixed `s`
//! a dual bisection on the constraint multiplier solves the inner problem;
//! the optimal value is concave in `s` and is maximized by golden-section
//! search.

use crate::error::{Error, Result};
use crate::maxmin::{payload_for_sp, sp_roots, SolverOptions};
use crate::se_model::{self, Detector, PowerAllocation, SystemDims, UserProfile};
use crate::search;

#[derive(Debug, Clone, PartialEq)]
pub struct JointSumSolution {
    pub alloc: PowerAllocation,
    pub y: Vec<f64>,
    pub s: f64,
    /// Weighted sum SE in bit/s/Hz, pilot prelog included.
    pub objective: f64,
    pub nu: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointInner {
    pub y: Vec<f64>,
    pub nu: f64,
    /// `sum_k w_k log2(1 + G y_k)`.
    pub value: f64,
}

#[derive(Debug, Clone, Copy)]
struct User {
    beta: f64,
    energy: f64,
    weight: f64,
    /// Attainable unweighted signal power.
    z_max: f64,
    z_hi: f64,
}

struct Instance {
    users: Vec<User>,
    data_symbols: f64,
    array_gain: f64,
    zf: bool,
}

impl Instance {
    fn new(profile: &UserProfile, dims: &SystemDims, detector: Detector, weights: &[f64]) -> Result<Self> {
        dims.validate()?;
        profile.check_dims(dims)?;
        if dims.users >= dims.coherence {
            return Err(Error::Degenerate("K = T leaves no payload symbols".into()));
        }
        if weights.len() != dims.users {
            return Err(Error::Shape(format!("{} weights for {} users", weights.len(), dims.users)));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::Domain(format!("weights must be nonnegative, got {w}")));
        }
        let array_gain = dims.array_gain(detector)?;
        let data_symbols = dims.data_symbols() as f64;
        let users = (0..dims.users)
            .map(|k| {
                let roots = sp_roots(profile.energy[k] * profile.beta[k], data_symbols);
                User {
                    beta: profile.beta[k],
                    energy: profile.energy[k],
                    weight: weights[k],
                    z_max: roots.lo,
                    z_hi: roots.hi,
                }
            })
            .collect();
        Ok(Self { users, data_symbols, array_gain, zf: detector == Detector::Zf })
    }

    fn s_min(&self) -> f64 {
        1.0 / (1.0 + self.users.iter().map(|u| u.beta * u.energy / self.data_symbols).sum::<f64>())
    }

    fn q(&self, u: &User, y: f64, s: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        s * payload_for_sp((y / s).min(u.z_max), u.beta, u.energy, self.data_symbols).unwrap_or(f64::INFINITY)
    }

    /// `r'(z)`; infinite at the attainable limit.
    fn r_slope(&self, u: &User, z: f64) -> f64 {
        let l = self.data_symbols;
        let root = l * ((u.z_max - z).max(0.0) * (u.z_hi - z)).sqrt();
        if root == 0.0 {
            return f64::INFINITY;
        }
        (1.0 + (u.energy * u.beta + 2.0 - l * z) / root) / (2.0 * u.beta)
    }

    /// Constraint contribution `beta q(y, s) - [zf] y`.
    fn load(&self, u: &User, y: f64, s: f64) -> f64 {
        u.beta * self.q(u, y, s) - if self.zf { y } else { 0.0 }
    }

    /// Stationary `y` of one user for multiplier `nu`.
    fn best_response(&self, u: &User, nu: f64, s: f64, opts: &SolverOptions) -> Result<f64> {
        if u.weight == 0.0 {
            return Ok(0.0);
        }
        let g = self.array_gain;
        let zf = if self.zf { 1.0 } else { 0.0 };
        let h = |y: f64| {
            u.weight * g / (std::f64::consts::LN_2 * (1.0 + g * y)) - nu * (u.beta * self.r_slope(u, y / s) - zf)
        };
        if h(0.0) <= 0.0 {
            return Ok(0.0);
        }
        let top = s * u.z_max;
        if nu == 0.0 {
            return Ok(top);
        }
        let r = search::bisect(h, 0.0, top, opts.bisection_tol * 1e-3, 0.0, 4 * opts.max_iter)?;
        Ok(r.x)
    }

    fn responses(&self, nu: f64, s: f64, opts: &SolverOptions) -> Result<Vec<f64>> {
        self.users.iter().map(|u| self.best_response(u, nu, s, opts)).collect()
    }

    fn total_load(&self, y: &[f64], s: f64) -> f64 {
        self.users.iter().zip(y).map(|(u, &y)| self.load(u, y, s)).sum()
    }

    fn value(&self, y: &[f64]) -> f64 {
        self.users.iter().zip(y).map(|(u, y)| u.weight * (1.0 + self.array_gain * y).log2()).sum()
    }

    fn inner(&self, s: f64, opts: &SolverOptions) -> Result<JointInner> {
        let budget = 1.0 - s;
        if budget <= 0.0 {
            let y = vec![0.0; self.users.len()];
            return Ok(JointInner { value: 0.0, y, nu: f64::INFINITY });
        }
        // Slack constraint even at the attainable limits.
        let top: Vec<f64> = self.users.iter().map(|u| if u.weight > 0.0 { s * u.z_max } else { 0.0 }).collect();
        if self.total_load(&top, s) <= budget {
            return Ok(JointInner { value: self.value(&top), y: top, nu: 0.0 });
        }
        // Above nu_hi every user stays silent.
        let zf = if self.zf { 1.0 } else { 0.0 };
        let nu_hi = self
            .users
            .iter()
            .map(|u| u.weight * self.array_gain / (std::f64::consts::LN_2 * (u.beta * self.r_slope(u, 0.0) - zf)))
            .fold(0.0, f64::max);
        let mut nu_lo = nu_hi;
        let mut guard = 0;
        while self.total_load(&self.responses(nu_lo, s, opts)?, s) < budget {
            nu_lo *= 0.5;
            guard += 1;
            if guard > 4 * opts.max_iter {
                return Err(Error::Convergence { iterations: guard, residual: nu_lo });
            }
        }
        let mut excess = |l: f64| -> f64 {
            match self.responses(l.exp(), s, opts) {
                Ok(y) => self.total_load(&y, s) - budget,
                Err(_) => f64::NAN,
            }
        };
        let r = search::bisect(&mut excess, nu_lo.ln(), nu_hi.ln(), 0.0, 1e-13, 4 * opts.max_iter)?;
        let nu = r.x.exp();
        let mut y = self.responses(nu, s, opts)?;
        // Stay on the feasible side of the constraint.
        let load = self.total_load(&y, s);
        if load > budget {
            let scale = self.shrink_to_budget(&y, s, budget);
            for v in &mut y {
                *v *= scale;
            }
        }
        Ok(JointInner { value: self.value(&y), y, nu })
    }

    /// Largest factor in (0, 1] keeping the scaled point feasible.
    fn shrink_to_budget(&self, y: &[f64], s: f64, budget: f64) -> f64 {
        let load = |c: f64| {
            let scaled: Vec<f64> = y.iter().map(|v| v * c).collect();
            self.total_load(&scaled, s) - budget
        };
        search::bisect(load, 0.0, 1.0, 1e-15, 0.0, 200).map(|r| r.x * (1.0 - 1e-15)).unwrap_or(0.0)
    }
}

/// Perspective `q(y, s) = s r(y / s)` of the payload power needed for
/// unweighted signal power `y / s` with pilot length `K`.
pub fn q_perspective(y: f64, s: f64, beta: f64, energy: f64, dims: &SystemDims) -> Result<f64> {
    if !(beta > 0.0 && energy > 0.0) {
        return Err(Error::Domain(format!("beta and energy must be positive, got {beta}, {energy}")));
    }
    if !(y >= 0.0 && s >= 0.0) {
        return Err(Error::Domain(format!("y and s must be nonnegative, got {y}, {s}")));
    }
    if dims.users >= dims.coherence {
        return Err(Error::Degenerate("K = T leaves no payload symbols".into()));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let data_symbols = dims.data_symbols() as f64;
    if s == 0.0 {
        return Err(Error::Domain("y > 0 needs s > 0".into()));
    }
    payload_for_sp(y / s, beta, energy, data_symbols)
        .map(|r| s * r)
        .ok_or_else(|| Error::Domain(format!("y / s = {:e} exceeds the attainable signal power", y / s)))
}

/// Analytic `dq/dy`.
pub fn q_perspective_dy(y: f64, s: f64, beta: f64, energy: f64, dims: &SystemDims) -> Result<f64> {
    q_perspective(y, s, beta, energy, dims)?;
    let data_symbols = dims.data_symbols() as f64;
    let roots = sp_roots(energy * beta, data_symbols);
    let z = if y == 0.0 { 0.0 } else { y / s };
    let root = data_symbols * ((roots.lo - z).max(0.0) * (roots.hi - z)).sqrt();
    Ok((1.0 + (energy * beta + 2.0 - data_symbols * z) / root) / (2.0 * beta))
}

/// Inner problem at fixed `s`.
pub fn joint_inner(
    s: f64,
    profile: &UserProfile,
    dims: &SystemDims,
    weights: &[f64],
    detector: Detector,
    opts: &SolverOptions,
) -> Result<JointInner> {
    let inst = Instance::new(profile, dims, detector, weights)?;
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Domain(format!("s = {s} outside (0, 1]")));
    }
    inst.inner(s, opts)
}

/// Admissible range of `s` for the joint problem.
pub fn joint_s_range(profile: &UserProfile, dims: &SystemDims) -> Result<(f64, f64)> {
    let inst = Instance::new(profile, dims, Detector::Mrc, &profile.weight)?;
    Ok((inst.s_min(), 1.0))
}

/// Jointly optimal pilot and payload powers for weighted sum SE.
pub fn joint_solve(
    profile: &UserProfile,
    dims: &SystemDims,
    detector: Detector,
    weights: &[f64],
    opts: &SolverOptions,
) -> Result<JointSumSolution> {
    opts.validate()?;
    let inst = Instance::new(profile, dims, detector, weights)?;
    let s_lo = inst.s_min();
    let value = |l: f64| inst.inner(l.exp(), opts).map(|r| r.value).unwrap_or(f64::NEG_INFINITY);
    // Unimodal in s, hence in log s.
    let (r, _) = search::golden_max(value, s_lo.ln(), 0.0, opts.bisection_tol, 10 * opts.max_iter)?;
    let s = r.x.exp();
    let inner = inst.inner(s, opts)?;

    let tau = dims.users as f64;
    let mut data_power = Vec::with_capacity(dims.users);
    let mut pilot_power = Vec::with_capacity(dims.users);
    for (u, &y) in inst.users.iter().zip(&inner.y) {
        let pd = (inst.q(u, y, s) / s).min(u.energy / inst.data_symbols);
        data_power.push(pd);
        pilot_power.push(((u.energy - inst.data_symbols * pd) / tau).max(0.0));
    }
    let alloc = PowerAllocation { tau_p: dims.users, pilot_power, data_power };
    let report = se_model::se_report(dims, &alloc, profile, detector, None)?;
    let objective = report.se.iter().zip(weights).map(|(se, w)| se * w).sum();
    Ok(JointSumSolution { alloc, y: inner.y, s, objective, nu: inner.nu, iterations: r.iterations })
}
