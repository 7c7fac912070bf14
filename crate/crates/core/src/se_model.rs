//! Closed-form uplink SE bounds and the quantities they depend on.
//!
//! All powers and fading coefficients are normalized by the receiver noise
//! variance, so there is no separate noise parameter anywhere in the crate.

use crate::error::{Error, Result};

/// Antenna count `M`, served users `K` and coherence length `T` in symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemDims {
    pub antennas: usize,
    pub users: usize,
    pub coherence: usize,
}

impl SystemDims {
    pub fn new(antennas: usize, users: usize, coherence: usize) -> Result<Self> {
        let dims = Self { antennas, users, coherence };
        dims.validate()?;
        Ok(dims)
    }

    pub fn validate(&self) -> Result<()> {
        if self.antennas == 0 || self.users == 0 || self.coherence == 0 {
            return Err(Error::Domain(format!("dimensions must be positive: {self:?}")));
        }
        if self.users > self.coherence {
            return Err(Error::Infeasible(format!(
                "K = {} users need at least K pilot symbols but T = {}",
                self.users, self.coherence
            )));
        }
        Ok(())
    }

    /// Symbols left for payload when the pilot length equals `K`.
    pub fn data_symbols(&self) -> usize {
        self.coherence - self.users
    }

    /// Array gain of the detector: `M` for MRC and `M - K` for ZF.
    pub fn array_gain(&self, detector: Detector) -> Result<f64> {
        match detector {
            Detector::Mrc => Ok(self.antennas as f64),
            Detector::Zf => {
                self.require_zf()?;
                Ok((self.antennas - self.users) as f64)
            }
        }
    }

    pub fn require_zf(&self) -> Result<()> {
        if self.antennas <= self.users {
            return Err(Error::DetectorInfeasible { antennas: self.antennas, users: self.users });
        }
        Ok(())
    }
}

/// Linear detector used at the base station.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detector {
    Mrc,
    Zf,
}

impl Detector {
    pub fn name(self) -> &'static str {
        match self {
            Detector::Mrc => "mrc",
            Detector::Zf => "zf",
        }
    }
}

impl std::str::FromStr for Detector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mrc" => Ok(Detector::Mrc),
            "zf" => Ok(Detector::Zf),
            other => Err(Error::Domain(format!("unknown detector '{other}'"))),
        }
    }
}

/// Per-user large-scale fading, priority weight and energy budget.
#[derive(Debug, Clone, PartialEq)]
pub struct UserProfile {
    pub beta: Vec<f64>,
    pub weight: Vec<f64>,
    /// Energy per coherence interval (noise-normalized power times symbols).
    pub energy: Vec<f64>,
}

impl UserProfile {
    pub fn new(beta: Vec<f64>, weight: Vec<f64>, energy: Vec<f64>) -> Result<Self> {
        let profile = Self { beta, weight, energy };
        profile.validate()?;
        Ok(profile)
    }

    /// Equal unit weights.
    pub fn unweighted(beta: Vec<f64>, energy: Vec<f64>) -> Result<Self> {
        let weight = vec![1.0; beta.len()];
        Self::new(beta, weight, energy)
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.beta.len();
        if k == 0 {
            return Err(Error::Shape("profile has no users".into()));
        }
        if self.weight.len() != k || self.energy.len() != k {
            return Err(Error::Shape(format!(
                "profile lengths differ: beta {}, weight {}, energy {}",
                k,
                self.weight.len(),
                self.energy.len()
            )));
        }
        for (name, v) in [("beta", &self.beta), ("weight", &self.weight), ("energy", &self.energy)] {
            if let Some(bad) = v.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                return Err(Error::Domain(format!("{name} entries must be positive, got {bad}")));
            }
        }
        Ok(())
    }

    pub(crate) fn check_dims(&self, dims: &SystemDims) -> Result<()> {
        self.validate()?;
        if self.len() != dims.users {
            return Err(Error::Shape(format!("profile has {} users, dims say {}", self.len(), dims.users)));
        }
        Ok(())
    }
}

/// `tr(R_j R_k)` for every pair of users, row-major `K x K`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationProfile {
    users: usize,
    cross_trace: Vec<f64>,
}

impl CorrelationProfile {
    pub fn new(users: usize, cross_trace: Vec<f64>) -> Result<Self> {
        if cross_trace.len() != users * users {
            return Err(Error::Shape(format!(
                "cross-trace matrix needs {} entries, got {}",
                users * users,
                cross_trace.len()
            )));
        }
        for j in 0..users {
            for k in 0..users {
                let a = cross_trace[j * users + k];
                let b = cross_trace[k * users + j];
                if !(a.is_finite() && a >= 0.0) {
                    return Err(Error::Domain(format!("cross trace ({j},{k}) = {a} is not a nonnegative number")));
                }
                if (a - b).abs() > 1e-9 * a.abs().max(b.abs()) {
                    return Err(Error::Domain(format!("cross-trace matrix is not symmetric at ({j},{k})")));
                }
            }
        }
        Ok(Self { users, cross_trace })
    }

    /// Uncorrelated channels, `R_k = beta_k I`, so `tr(R_j R_k) = M beta_j beta_k`.
    pub fn iid(beta: &[f64], antennas: usize) -> Self {
        let k = beta.len();
        let m = antennas as f64;
        let cross_trace = (0..k * k).map(|i| m * beta[i / k] * beta[i % k]).collect();
        Self { users: k, cross_trace }
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.cross_trace[j * self.users + k]
    }
}

/// Pilot length and per-user pilot and payload powers.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    pub tau_p: usize,
    pub pilot_power: Vec<f64>,
    pub data_power: Vec<f64>,
}

impl PowerAllocation {
    /// Every user spends `E_k / T` on every symbol.
    pub fn equal(dims: &SystemDims, profile: &UserProfile) -> Self {
        let t = dims.coherence as f64;
        let p: Vec<f64> = profile.energy.iter().map(|e| e / t).collect();
        Self { tau_p: dims.users, pilot_power: p.clone(), data_power: p }
    }

    /// Energy spent by user `k` over one coherence interval.
    pub fn energy_used(&self, coherence: usize, k: usize) -> f64 {
        self.tau_p as f64 * self.pilot_power[k] + (coherence - self.tau_p) as f64 * self.data_power[k]
    }

    pub(crate) fn check(&self, dims: &SystemDims) -> Result<()> {
        let k = dims.users;
        if self.pilot_power.len() != k || self.data_power.len() != k {
            return Err(Error::Shape(format!(
                "allocation lengths {} / {} do not match K = {k}",
                self.pilot_power.len(),
                self.data_power.len()
            )));
        }
        if self.tau_p == 0 || self.tau_p > dims.coherence {
            return Err(Error::Domain(format!("pilot length {} outside 1..={}", self.tau_p, dims.coherence)));
        }
        if let Some(p) = self.pilot_power.iter().chain(&self.data_power).find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::Domain(format!("powers must be nonnegative, got {p}")));
        }
        Ok(())
    }

    /// Largest relative violation of the per-user energy budget (negative when slack).
    pub fn energy_excess(&self, dims: &SystemDims, profile: &UserProfile) -> f64 {
        (0..dims.users)
            .map(|k| (self.energy_used(dims.coherence, k) - profile.energy[k]) / profile.energy[k])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest relative deviation from spending the budget exactly.
    pub fn energy_gap(&self, dims: &SystemDims, profile: &UserProfile) -> f64 {
        (0..dims.users)
            .map(|k| ((self.energy_used(dims.coherence, k) - profile.energy[k]) / profile.energy[k]).abs())
            .fold(0.0, f64::max)
    }
}

/// Per-user SINR and SE together with the two aggregates the solvers optimize.
#[derive(Debug, Clone, PartialEq)]
pub struct SeReport {
    pub gamma: Vec<f64>,
    pub sinr: Vec<f64>,
    /// Bit/s/Hz, including the pilot prelog `1 - tau_p / T`.
    pub se: Vec<f64>,
    pub min_se: f64,
    pub weighted_sum_se: f64,
    pub prelog: f64,
}

impl SeReport {
    pub fn sum_se(&self) -> f64 {
        self.se.iter().sum()
    }

    /// `min_k w_k SINR_k`, the quantity the max-min solvers equalize.
    pub fn min_weighted_sinr(&self, weights: &[f64]) -> f64 {
        self.sinr.iter().zip(weights).map(|(s, w)| s * w).fold(f64::INFINITY, f64::min)
    }

    /// `min_k (1 - tau_p/T) log2(1 + w_k SINR_k)`.
    pub fn min_weighted_se(&self, weights: &[f64]) -> f64 {
        self.prelog * (1.0 + self.min_weighted_sinr(weights)).log2()
    }
}

/// Per-antenna variance of the MMSE channel estimate,
/// `gamma = tau_p p_p beta^2 / (1 + tau_p p_p beta)`.
pub fn gamma_single(tau_p: usize, pilot_power: f64, beta: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    if !(pilot_power >= 0.0) {
        return Err(Error::Domain(format!("pilot power must be nonnegative, got {pilot_power}")));
    }
    if tau_p == 0 {
        return Err(Error::Domain("pilot length must be at least one symbol".into()));
    }
    Ok(gamma_from_pilot_energy(tau_p as f64 * pilot_power, beta))
}

/// `gamma` as a function of the pilot energy `tau_p p_p`; no validation.
#[inline]
pub(crate) fn gamma_from_pilot_energy(pilot_energy: f64, beta: f64) -> f64 {
    let snr = pilot_energy * beta;
    if snr.is_infinite() {
        return beta;
    }
    snr * beta / (1.0 + snr)
}

/// Estimation error variance `beta - gamma`, computed without cancellation.
#[inline]
pub(crate) fn estimation_error(pilot_energy: f64, beta: f64) -> f64 {
    (beta / (1.0 + pilot_energy * beta)).max(1e-15 * beta)
}

pub fn gamma(tau_p: usize, pilot_power: &[f64], beta: &[f64]) -> Result<Vec<f64>> {
    if pilot_power.len() != beta.len() {
        return Err(Error::Shape(format!("{} pilot powers for {} users", pilot_power.len(), beta.len())));
    }
    pilot_power.iter().zip(beta).map(|(&p, &b)| gamma_single(tau_p, p, b)).collect()
}

fn prepare(dims: &SystemDims, alloc: &PowerAllocation, profile: &UserProfile) -> Result<Vec<f64>> {
    dims.validate()?;
    profile.check_dims(dims)?;
    alloc.check(dims)?;
    gamma(alloc.tau_p, &alloc.pilot_power, &profile.beta)
}

/// MRC SINR bound. The denominator is shared by all users.
pub fn sinr_mrc(dims: &SystemDims, alloc: &PowerAllocation, profile: &UserProfile) -> Result<Vec<f64>> {
    let g = prepare(dims, alloc, profile)?;
    let m = dims.antennas as f64;
    let denom = 1.0 + profile.beta.iter().zip(&alloc.data_power).map(|(b, p)| b * p).sum::<f64>();
    Ok(g.iter().zip(&alloc.data_power).map(|(g, p)| m * p * g / denom).collect())
}

/// ZF SINR bound; needs `M > K`.
pub fn sinr_zf(dims: &SystemDims, alloc: &PowerAllocation, profile: &UserProfile) -> Result<Vec<f64>> {
    dims.require_zf()?;
    let g = prepare(dims, alloc, profile)?;
    let gain = (dims.antennas - dims.users) as f64;
    let tau = alloc.tau_p as f64;
    let denom = 1.0
        + (0..dims.users)
            .map(|j| alloc.data_power[j] * estimation_error(tau * alloc.pilot_power[j], profile.beta[j]))
            .sum::<f64>();
    Ok(g.iter().zip(&alloc.data_power).map(|(g, p)| gain * p * g / denom).collect())
}

/// MRC SINR bound under spatially correlated fading with element-wise MMSE
/// estimation.
pub fn sinr_mrc_correlated(
    dims: &SystemDims,
    alloc: &PowerAllocation,
    profile: &UserProfile,
    corr: &CorrelationProfile,
) -> Result<Vec<f64>> {
    let g = prepare(dims, alloc, profile)?;
    if corr.users() != dims.users {
        return Err(Error::Shape(format!("correlation profile has {} users, dims say {}", corr.users(), dims.users)));
    }
    let m = dims.antennas as f64;
    let tau = alloc.tau_p as f64;
    let received: f64 = profile.beta.iter().zip(&alloc.data_power).map(|(b, p)| b * p).sum();
    Ok((0..dims.users)
        .map(|k| {
            let bk = profile.beta[k];
            let coherent: f64 =
                (0..dims.users).map(|j| corr.get(j, k) * alloc.data_power[j]).sum::<f64>() * g[k] / (m * bk * bk);
            let noncoherent = received / (1.0 + tau * alloc.pilot_power[k] * bk);
            m * alloc.data_power[k] * g[k] / (1.0 + coherent + noncoherent)
        })
        .collect())
}

/// Evaluates every user's SE bound for the given detector. Correlated fading
/// is only modelled for MRC.
pub fn se_report(
    dims: &SystemDims,
    alloc: &PowerAllocation,
    profile: &UserProfile,
    detector: Detector,
    corr: Option<&CorrelationProfile>,
) -> Result<SeReport> {
    let sinr = match (detector, corr) {
        (Detector::Mrc, None) => sinr_mrc(dims, alloc, profile)?,
        (Detector::Zf, None) => sinr_zf(dims, alloc, profile)?,
        (Detector::Mrc, Some(c)) => sinr_mrc_correlated(dims, alloc, profile, c)?,
        (Detector::Zf, Some(_)) => {
            return Err(Error::Domain("correlated fading is only modelled for MRC".into()));
        }
    };
    let gamma = gamma(alloc.tau_p, &alloc.pilot_power, &profile.beta)?;
    Ok(report_from_sinr(dims, alloc.tau_p, gamma, sinr, &profile.weight))
}

pub(crate) fn report_from_sinr(
    dims: &SystemDims,
    tau_p: usize,
    gamma: Vec<f64>,
    sinr: Vec<f64>,
    weights: &[f64],
) -> SeReport {
    let prelog = 1.0 - tau_p as f64 / dims.coherence as f64;
    let se: Vec<f64> = sinr.iter().map(|s| prelog * (1.0 + s).log2()).collect();
    let min_se = se.iter().copied().fold(f64::INFINITY, f64::min);
    let weighted_sum_se = se.iter().zip(weights).map(|(s, w)| s * w).sum();
    SeReport { gamma, sinr, se, min_se, weighted_sum_se, prelog }
}

/// The pilot length maximizing any increasing utility of the users' SE: `K`.
pub fn optimal_pilot_length(dims: &SystemDims) -> Result<usize> {
    if dims.users == 0 {
        return Err(Error::Domain("no users".into()));
    }
    if dims.users > dims.coherence {
        return Err(Error::Infeasible(format!("K = {} exceeds T = {}", dims.users, dims.coherence)));
    }
    Ok(dims.users)
}

/// Low-SNR allocation: half the budget on pilots, half on payload,
/// maximizing `M K p_p p_d beta^2` along the budget line.
pub fn low_snr_allocation(dims: &SystemDims, profile: &UserProfile) -> Result<PowerAllocation> {
    dims.validate()?;
    profile.check_dims(dims)?;
    if dims.users >= dims.coherence {
        return Err(Error::Degenerate("K = T leaves no payload symbols".into()));
    }
    let k = dims.users as f64;
    let data = dims.data_symbols() as f64;
    Ok(PowerAllocation {
        tau_p: dims.users,
        pilot_power: profile.energy.iter().map(|e| e / (2.0 * k)).collect(),
        data_power: profile.energy.iter().map(|e| e / (2.0 * data)).collect(),
    })
}
