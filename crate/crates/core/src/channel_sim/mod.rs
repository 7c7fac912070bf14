//! Seeded single-cell drops and Monte Carlo sweeps over power-control schemes.
//!
//! Every drop owns its own ChaCha stream (`seed`, stream = drop index), so
//! results do not depend on execution order or thread count.

mod estimate;
mod one_ring;

pub use estimate::{clamp_estimate, estimate_beta};
pub use one_ring::{one_ring_column, one_ring_cross_traces, toeplitz_cross_trace};

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::maxmin::{self, SolverOptions};
use crate::se_model::{self, CorrelationProfile, Detector, PowerAllocation, SeReport, SystemDims, UserProfile};
use crate::sumse;

/// Cell geometry, propagation and budget parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct CellConfig {
    /// Meters.
    pub radius: f64,
    /// Meters.
    pub min_distance: f64,
    pub pathloss_exponent: f64,
    pub shadow_std_db: f64,
    /// Users placed per drop before the weakest is removed.
    pub users_dropped: usize,
    pub drop_worst: bool,
    /// Median cell-edge SNR under equal power, dB.
    pub edge_snr_db: f64,
    pub antennas: usize,
    pub coherence: usize,
}

impl Default for CellConfig {
    fn default() -> Self {
        Self {
            radius: 1000.0,
            min_distance: 100.0,
            pathloss_exponent: 3.76,
            shadow_std_db: 8.0,
            users_dropped: 10,
            drop_worst: true,
            edge_snr_db: -5.0,
            antennas: 100,
            coherence: 200,
        }
    }
}

impl CellConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_distance > 0.0 && self.min_distance < self.radius && self.radius.is_finite()) {
            return Err(Error::Domain(format!(
                "need 0 < min_distance < radius, got {} and {}",
                self.min_distance, self.radius
            )));
        }
        if !(self.pathloss_exponent > 0.0 && self.pathloss_exponent.is_finite()) {
            return Err(Error::Domain(format!("path-loss exponent must be positive, got {}", self.pathloss_exponent)));
        }
        if !(self.shadow_std_db >= 0.0 && self.shadow_std_db.is_finite()) {
            return Err(Error::Domain(format!("shadowing std must be nonnegative, got {}", self.shadow_std_db)));
        }
        if !self.edge_snr_db.is_finite() {
            return Err(Error::Domain("edge SNR must be finite".into()));
        }
        if self.users_dropped == 0 || (self.drop_worst && self.users_dropped < 2) {
            return Err(Error::Domain(format!(
                "{} dropped users leave nobody to serve (drop_worst = {})",
                self.users_dropped, self.drop_worst
            )));
        }
        self.dims().map(|_| ())
    }

    /// Number of served users.
    pub fn served_users(&self) -> usize {
        self.users_dropped - usize::from(self.drop_worst)
    }

    pub fn dims(&self) -> Result<SystemDims> {
        SystemDims::new(self.antennas, self.served_users(), self.coherence)
    }

    /// `E = 10^(snr/10) R^exponent T`: equal power then gives `snr` at the
    /// cell edge without shadowing.
    pub fn energy_budget(&self) -> f64 {
        10f64.powf(self.edge_snr_db / 10.0) * self.radius.powf(self.pathloss_exponent) * self.coherence as f64
    }
}

/// Spatial correlation model of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum CorrelationModel {
    #[default]
    Iid,
    /// One-ring with the given angular spread in degrees; angles of arrival
    /// are uniform on [0, 180] degrees.
    OneRing { spread_deg: f64 },
}

impl CorrelationModel {
    pub fn one_ring() -> Self {
        Self::OneRing { spread_deg: 10.0 }
    }
}

/// One drop: the served users and their angles of arrival (radians).
#[derive(Debug, Clone, PartialEq)]
pub struct UserDrop {
    pub profile: UserProfile,
    pub angles: Vec<f64>,
    /// Fading of the removed user, if any.
    pub removed_beta: Option<f64>,
}

impl UserDrop {
    pub fn correlation(&self, model: CorrelationModel, antennas: usize) -> Result<Option<CorrelationProfile>> {
        match model {
            CorrelationModel::Iid => Ok(None),
            CorrelationModel::OneRing { spread_deg } => {
                if !(spread_deg > 0.0 && spread_deg <= 180.0) {
                    return Err(Error::Domain(format!("angular spread must lie in (0, 180], got {spread_deg}")));
                }
                one_ring_cross_traces(&self.profile.beta, &self.angles, spread_deg.to_radians(), antennas).map(Some)
            }
        }
    }
}

/// RNG of drop `index` under `seed`.
pub fn drop_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Places users, draws shadowing and angles, and removes the weakest user
/// if configured. Equal weights; every user gets the configured budget.
pub fn draw_drop_with<R: Rng + ?Sized>(config: &CellConfig, rng: &mut R) -> Result<UserDrop> {
    config.validate()?;
    let (r0, r1) = (config.min_distance * config.min_distance, config.radius * config.radius);
    let mut users: Vec<(f64, f64)> = (0..config.users_dropped)
        .map(|_| {
            // Uniform in area over the annulus.
            let r = (r0 + (r1 - r0) * rng.random::<f64>()).sqrt();
            let n: f64 = rng.sample(StandardNormal);
            let z = 10f64.powf(config.shadow_std_db * n / 10.0);
            let angle = std::f64::consts::PI * rng.random::<f64>();
            (z / r.powf(config.pathloss_exponent), angle)
        })
        .collect();
    let removed_beta = if config.drop_worst {
        let worst = (0..users.len()).min_by(|&a, &b| users[a].0.total_cmp(&users[b].0)).unwrap_or(0);
        Some(users.remove(worst).0)
    } else {
        None
    };
    let k = users.len();
    let profile = UserProfile::unweighted(users.iter().map(|u| u.0).collect(), vec![config.energy_budget(); k])?;
    Ok(UserDrop { profile, angles: users.iter().map(|u| u.1).collect(), removed_beta })
}

/// Drop `index` of the sweep seeded with `seed`.
pub fn draw_drop(config: &CellConfig, seed: u64, index: u64) -> Result<UserDrop> {
    draw_drop_with(config, &mut drop_rng(seed, index))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    MaxMin,
    Sum,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Self::MaxMin => "maxmin",
            Self::Sum => "sum",
        }
    }
}

impl FromStr for Objective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "maxmin" | "max-min" => Ok(Self::MaxMin),
            "sum" => Ok(Self::Sum),
            other => Err(Error::Domain(format!("unknown objective `{other}` (expected maxmin or sum)"))),
        }
    }
}

/// Power-control schemes compared in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// `p_p = p_d = E / T`.
    Equal,
    /// Pilots fixed at `E / T`, payload optimized for the sweep objective.
    DataOnly,
    /// Pilots and payload optimized for the sweep objective.
    Joint,
    /// Joint max-min solution (under correlation: the i.i.d. solution).
    MaxMinRef,
    /// Joint sum-SE solution.
    SumRef,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [Scheme::Equal, Scheme::DataOnly, Scheme::Joint, Scheme::MaxMinRef, Scheme::SumRef];

    pub fn name(self) -> &'static str {
        match self {
            Self::Equal => "equal",
            Self::DataOnly => "data_only",
            Self::Joint => "joint",
            Self::MaxMinRef => "maxmin_ref",
            Self::SumRef => "sum_ref",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        Scheme::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| Error::Domain(format!("unknown scheme `{s}`")))
    }
}

/// Everything a Monte Carlo sweep needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub cell: CellConfig,
    pub correlation: CorrelationModel,
    pub objective: Objective,
    pub detector: Detector,
    pub schemes: Vec<Scheme>,
    pub drops: usize,
    pub seed: u64,
    /// Per-user weights applied to every drop; `None` weighs users equally.
    pub weights: Option<Vec<f64>>,
    pub opts: SolverOptions,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            cell: CellConfig::default(),
            correlation: CorrelationModel::Iid,
            objective: Objective::MaxMin,
            detector: Detector::Mrc,
            schemes: vec![Scheme::Equal, Scheme::DataOnly, Scheme::Joint],
            drops: 1000,
            seed: 42,
            weights: None,
            opts: SolverOptions::default(),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.cell.validate()?;
        self.opts.validate()?;
        if self.detector == Detector::Zf {
            self.cell.dims()?.require_zf()?;
        }
        if self.cell.served_users() >= self.cell.coherence {
            return Err(Error::Degenerate("K >= T leaves no payload symbols".into()));
        }
        if let Some(w) = &self.weights {
            if w.len() != self.cell.served_users() {
                return Err(Error::Shape(format!("{} weights for {} served users", w.len(), self.cell.served_users())));
            }
            if let Some(bad) = w.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                return Err(Error::Domain(format!("weights must be positive, got {bad}")));
            }
        }
        if let CorrelationModel::OneRing { .. } = self.correlation {
            if self.detector == Detector::Zf {
                return Err(Error::Domain("correlated fading is only modelled for MRC".into()));
            }
            if self.objective == Objective::Sum {
                return Err(Error::Domain("correlated fading sweeps support the maxmin objective only".into()));
            }
        }
        Ok(())
    }
}

/// Outcome of one scheme on one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeResult {
    pub scheme: Scheme,
    pub outcome: Result<(PowerAllocation, SeReport)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DropResult {
    pub drop: usize,
    /// RNG stream the drop was drawn from.
    pub stream: u64,
    pub beta: Vec<f64>,
    pub schemes: Vec<SchemeResult>,
}

impl DropResult {
    pub fn report(&self, scheme: Scheme) -> Option<&SeReport> {
        self.schemes.iter().find(|s| s.scheme == scheme).and_then(|s| s.outcome.as_ref().ok().map(|(_, r)| r))
    }
}

/// Allocation of one scheme on one drop, before evaluation.
pub fn scheme_allocation(
    scheme: Scheme,
    objective: Objective,
    detector: Detector,
    dims: &SystemDims,
    profile: &UserProfile,
    corr: Option<&CorrelationProfile>,
    opts: &SolverOptions,
) -> Result<PowerAllocation> {
    let fixed_pilots: Vec<f64> = profile.energy.iter().map(|e| e / dims.coherence as f64).collect();
    let alloc = match (scheme, objective, corr) {
        (Scheme::Equal, _, _) => PowerAllocation::equal(dims, profile),
        (Scheme::DataOnly, Objective::MaxMin, None) => {
            maxmin::solve_maxmin_data_only(profile, dims, &fixed_pilots, detector)?.alloc
        }
        (Scheme::DataOnly, Objective::MaxMin, Some(c)) => {
            maxmin::solve_maxmin_correlated_data_only(profile, dims, c, &fixed_pilots, opts)?.alloc
        }
        (Scheme::DataOnly, Objective::Sum, _) => {
            sumse::solve_sum_data_only(profile, dims, &fixed_pilots, detector, &profile.weight, opts)?.0
        }
        (Scheme::Joint, Objective::MaxMin, Some(c)) => maxmin::solve_maxmin_correlated(profile, dims, c, opts)?.alloc,
        (Scheme::Joint, Objective::MaxMin, None) | (Scheme::MaxMinRef, _, _) => {
            maxmin::solve_maxmin(profile, dims, detector, opts)?.alloc
        }
        (Scheme::Joint, Objective::Sum, _) | (Scheme::SumRef, _, _) => {
            sumse::joint_solve(profile, dims, detector, &profile.weight, opts)?.alloc
        }
    };
    Ok(alloc)
}

/// Runs every scheme on one drop.
pub fn run_drop(config: &SweepConfig, index: usize) -> DropResult {
    let stream = index as u64;
    let drop = match draw_drop(&config.cell, config.seed, stream) {
        Ok(mut d) => {
            if let Some(w) = &config.weights {
                d.profile.weight.clone_from(w);
            }
            d
        }
        Err(e) => {
            let schemes =
                config.schemes.iter().map(|&scheme| SchemeResult { scheme, outcome: Err(e.clone()) }).collect();
            return DropResult { drop: index, stream, beta: Vec::new(), schemes };
        }
    };
    let dims = config.cell.dims();
    let corr = dims.as_ref().map_err(Clone::clone).and_then(|d| drop.correlation(config.correlation, d.antennas));
    let schemes = config
        .schemes
        .iter()
        .map(|&scheme| {
            let outcome = dims.as_ref().map_err(Clone::clone).and_then(|dims| {
                let corr = corr.as_ref().map_err(Clone::clone)?.as_ref();
                let alloc = scheme_allocation(
                    scheme,
                    config.objective,
                    config.detector,
                    dims,
                    &drop.profile,
                    corr,
                    &config.opts,
                )?;
                let report = se_model::se_report(dims, &alloc, &drop.profile, config.detector, corr)?;
                Ok((alloc, report))
            });
            SchemeResult { scheme, outcome }
        })
        .collect();
    DropResult { drop: index, stream, beta: drop.profile.beta.clone(), schemes }
}

/// Runs the sweep; per-drop solver failures are recorded, not raised.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<DropResult>> {
    config.validate()?;
    Ok(map_drops(config.drops, |i| run_drop(config, i)))
}

#[cfg(feature = "parallel")]
fn map_drops<T: Send, F: Fn(usize) -> T + Sync + Send>(drops: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..drops).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_drops<T, F: Fn(usize) -> T>(drops: usize, f: F) -> Vec<T> {
    (0..drops).map(f).collect()
}

/// Settings of the fading-estimation experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationConfig {
    pub cell: CellConfig,
    pub detector: Detector,
    pub snr_db: Vec<f64>,
    /// Processed pilot observations per user.
    pub observations: usize,
    pub drops: usize,
    pub seed: u64,
    pub opts: SolverOptions,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        Self {
            cell: CellConfig::default(),
            detector: Detector::Mrc,
            snr_db: (-10..=10).step_by(5).map(f64::from).collect(),
            observations: 10,
            drops: 200,
            seed: 42,
            opts: SolverOptions::default(),
        }
    }
}

/// Max-min SE on one drop with known and with estimated fading.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationRecord {
    pub snr_db: f64,
    pub drop: usize,
    pub genie_min_se: Result<f64>,
    pub estimated_min_se: Result<f64>,
}

/// For every SNR point and drop: solve joint max-min on the true fading and
/// on the estimated fading, evaluating both allocations on the true fading.
///
/// Drops share geometry across SNR points; the estimation noise of SNR
/// point `i` uses stream `drop + (i + 1) << 32`.
pub fn run_estimation(config: &EstimationConfig) -> Result<Vec<EstimationRecord>> {
    config.cell.validate()?;
    config.opts.validate()?;
    if config.observations == 0 {
        return Err(Error::Domain("need at least one pilot observation".into()));
    }
    let dims = config.cell.dims()?;
    if config.detector == Detector::Zf {
        dims.require_zf()?;
    }
    let records = map_drops(config.drops, |d| {
        config
            .snr_db
            .iter()
            .enumerate()
            .map(|(i, &snr)| estimation_record(config, &dims, i, snr, d))
            .collect::<Vec<_>>()
    });
    // Order by SNR point, then drop.
    let mut out = Vec::with_capacity(records.len() * config.snr_db.len());
    for i in 0..config.snr_db.len() {
        out.extend(records.iter().map(|r| r[i].clone()));
    }
    Ok(out)
}

fn estimation_record(
    config: &EstimationConfig,
    dims: &SystemDims,
    point: usize,
    snr: f64,
    d: usize,
) -> EstimationRecord {
    let cell = CellConfig { edge_snr_db: snr, ..config.cell.clone() };
    let solve = |fading: &UserProfile, truth: &UserProfile| -> Result<f64> {
        let sol = maxmin::solve_maxmin(fading, dims, config.detector, &config.opts)?;
        Ok(se_model::se_report(dims, &sol.alloc, truth, config.detector, None)?.min_se)
    };
    let drop = draw_drop(&cell, config.seed, d as u64);
    let (genie, estimated) = match drop {
        Err(e) => (Err(e.clone()), Err(e)),
        Ok(drop) => {
            let truth = &drop.profile;
            let mut rng = drop_rng(config.seed, d as u64 + ((point as u64 + 1) << 32));
            let p = truth.energy[0] / dims.coherence as f64;
            let estimates: Result<Vec<f64>> = truth
                .beta
                .iter()
                .map(|&b| {
                    estimate_beta(b, p, dims.users, dims.antennas, config.observations, &mut rng)
                        .map(|e| clamp_estimate(e, p, dims.users, dims.antennas, config.observations))
                })
                .collect();
            let estimated = estimates
                .and_then(|b| UserProfile::new(b, truth.weight.clone(), truth.energy.clone()))
                .and_then(|est| solve(&est, truth));
            (solve(truth, truth), estimated)
        }
    };
    EstimationRecord { snr_db: snr, drop: d, genie_min_se: genie, estimated_min_se: estimated }
}

/// Linear-interpolation quantile of the finite values; `None` when empty.
pub fn quantile(values: &[f64], q: f64) -> Option<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() || !(0.0..=1.0).contains(&q) {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    Some(if i + 1 < v.len() { v[i] + frac * (v[i + 1] - v[i]) } else { v[i] })
}

/// Min SE and sum SE of `scheme` over the drops where it succeeded.
pub fn scheme_samples(results: &[DropResult], scheme: Scheme) -> (Vec<f64>, Vec<f64>) {
    results.iter().filter_map(|r| r.report(scheme)).map(|r| (r.min_se, r.sum_se())).unzip()
}
