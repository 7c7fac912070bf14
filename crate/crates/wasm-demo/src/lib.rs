//! Browser demo: three interactive views over the power-control library.
//!
//! Every export takes plain numbers or strings and returns a JSON string;
//! failures come back as `{"error": "..."}` so the page never has to catch.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use mmimo_power::channel_sim::{draw_drop, run_sweep, scheme_samples, CellConfig, Objective, SweepConfig};
use mmimo_power::maxmin::solve_maxmin_data_only;
use mmimo_power::se_model::{se_report, PowerAllocation, SystemDims, UserProfile};
use mmimo_power::{solve_maxmin, Detector, SolverOptions};

fn to_json<T: Serialize>(result: Result<T, String>) -> String {
    #[derive(Serialize)]
    struct Failure {
        error: String,
    }
    match result {
        Ok(v) => serde_json::to_string(&v),
        Err(error) => serde_json::to_string(&Failure { error }),
    }
    .unwrap_or_else(|e| format!("{{\"error\":\"serialization failed: {e}\"}}"))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

#[derive(Debug, Serialize)]
pub struct UserRow {
    pub distance_m: f64,
    pub beta: f64,
    /// Share of the energy budget spent on pilots.
    pub pilot_share: f64,
    pub pilot_power: f64,
    pub data_power: f64,
    pub se: f64,
}

#[derive(Debug, Serialize)]
pub struct SchemeView {
    pub scheme: &'static str,
    pub users: Vec<UserRow>,
    pub min_se: f64,
    pub sum_se: f64,
}

#[derive(Debug, Serialize)]
pub struct Explorer {
    pub energy: f64,
    pub schemes: Vec<SchemeView>,
}

fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| format!("not a number: `{s}`")))
        .collect()
}

/// Max-min allocations for users at the given distances (meters, no
/// shadowing) in the default cell at `edge_snr_db`.
pub fn maxmin_explorer(distances: &str, edge_snr_db: f64, detector: &str) -> Result<Explorer, String> {
    let detector: Detector = detector.parse().map_err(err)?;
    let dist = parse_list(distances)?;
    if dist.is_empty() {
        return Err("enter at least one distance".into());
    }
    let cell = CellConfig { edge_snr_db, ..CellConfig::default() };
    if let Some(d) = dist.iter().find(|d| !(**d >= 1.0 && d.is_finite())) {
        return Err(format!("distances must be at least 1 m, got {d}"));
    }
    let beta: Vec<f64> = dist.iter().map(|d| d.powf(-cell.pathloss_exponent)).collect();
    let energy = cell.energy_budget();
    let k = beta.len();
    let dims = SystemDims::new(cell.antennas, k, cell.coherence).map_err(err)?;
    let profile = UserProfile::unweighted(beta, vec![energy; k]).map_err(err)?;
    let opts = SolverOptions::default();
    let fixed = vec![energy / cell.coherence as f64; k];
    let allocs = [
        ("equal", PowerAllocation::equal(&dims, &profile)),
        ("data_only", solve_maxmin_data_only(&profile, &dims, &fixed, detector).map_err(err)?.alloc),
        ("joint", solve_maxmin(&profile, &dims, detector, &opts).map_err(err)?.alloc),
    ];
    let mut schemes = Vec::new();
    for (scheme, alloc) in allocs {
        let rep = se_report(&dims, &alloc, &profile, detector, None).map_err(err)?;
        let users = (0..k)
            .map(|i| UserRow {
                distance_m: dist[i],
                beta: profile.beta[i],
                pilot_share: alloc.tau_p as f64 * alloc.pilot_power[i] / energy,
                pilot_power: alloc.pilot_power[i],
                data_power: alloc.data_power[i],
                se: rep.se[i],
            })
            .collect();
        schemes.push(SchemeView { scheme, users, min_se: rep.min_se, sum_se: rep.sum_se() });
    }
    Ok(Explorer { energy, schemes })
}

#[derive(Debug, Serialize)]
pub struct Cdf {
    pub scheme: &'static str,
    /// Sorted samples; the empirical CDF steps by `1 / len` at each.
    pub values: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct SweepView {
    pub metric: &'static str,
    pub drops: usize,
    pub curves: Vec<Cdf>,
}

/// Empirical CDFs of min SE (max-min objective) or sum SE (sum objective)
/// over random drops, for equal power, data-only and joint control.
pub fn sweep_cdf(
    drops: usize,
    edge_snr_db: f64,
    objective: &str,
    detector: &str,
    seed: u64,
) -> Result<SweepView, String> {
    let objective: Objective = objective.parse().map_err(err)?;
    let detector: Detector = detector.parse().map_err(err)?;
    if drops == 0 || drops > 5000 {
        return Err("drops must lie in 1..=5000".into());
    }
    let config = SweepConfig {
        cell: CellConfig { edge_snr_db, ..CellConfig::default() },
        objective,
        detector,
        drops,
        seed,
        ..SweepConfig::default()
    };
    let results = run_sweep(&config).map_err(err)?;
    let metric = match objective {
        Objective::MaxMin => "min_se",
        Objective::Sum => "sum_se",
    };
    let curves = config
        .schemes
        .iter()
        .map(|&s| {
            let (min_se, sum_se) = scheme_samples(&results, s);
            let mut values = if objective == Objective::MaxMin { min_se } else { sum_se };
            values.sort_by(f64::total_cmp);
            Cdf { scheme: s.name(), values }
        })
        .collect();
    Ok(SweepView { metric, drops, curves })
}

#[derive(Debug, Serialize)]
pub struct SplitPoint {
    pub edge_snr_db: f64,
    /// Pilot share of the weakest user's budget under joint control.
    pub pilot_share: f64,
    pub joint_min_se: f64,
    pub data_only_min_se: f64,
}

#[derive(Debug, Serialize)]
pub struct SplitView {
    pub points: Vec<SplitPoint>,
    /// Pilot share the joint solution approaches as the SNR vanishes.
    pub low_snr_share: f64,
}

/// How the weakest user of one seeded drop splits its energy between
/// pilot and payload as the edge SNR varies over `[lo_db, hi_db]`.
pub fn low_snr_split(seed: u64, drop: u64, lo_db: f64, hi_db: f64, points: usize) -> Result<SplitView, String> {
    if lo_db.is_nan() || hi_db.is_nan() || lo_db >= hi_db || !(2..=200).contains(&points) {
        return Err("need lo < hi and 2..=200 points".into());
    }
    let mut out = Vec::with_capacity(points);
    for i in 0..points {
        let snr = lo_db + (hi_db - lo_db) * i as f64 / (points - 1) as f64;
        let cell = CellConfig { edge_snr_db: snr, ..CellConfig::default() };
        let profile = draw_drop(&cell, seed, drop).map_err(err)?.profile;
        let dims = cell.dims().map_err(err)?;
        let weakest = (0..profile.len()).min_by(|&a, &b| profile.beta[a].total_cmp(&profile.beta[b])).unwrap_or(0);
        let joint = solve_maxmin(&profile, &dims, Detector::Mrc, &SolverOptions::default()).map_err(err)?.alloc;
        let fixed: Vec<f64> = profile.energy.iter().map(|e| e / dims.coherence as f64).collect();
        let data_only = solve_maxmin_data_only(&profile, &dims, &fixed, Detector::Mrc).map_err(err)?.alloc;
        let min_se = |a: &PowerAllocation| se_report(&dims, a, &profile, Detector::Mrc, None).map(|r| r.min_se);
        out.push(SplitPoint {
            edge_snr_db: snr,
            pilot_share: joint.tau_p as f64 * joint.pilot_power[weakest] / profile.energy[weakest],
            joint_min_se: min_se(&joint).map_err(err)?,
            data_only_min_se: min_se(&data_only).map_err(err)?,
        });
    }
    Ok(SplitView { points: out, low_snr_share: 0.5 })
}

#[wasm_bindgen(js_name = maxminExplorer)]
pub fn maxmin_explorer_json(distances: &str, edge_snr_db: f64, detector: &str) -> String {
    to_json(maxmin_explorer(distances, edge_snr_db, detector))
}

#[wasm_bindgen(js_name = sweepCdf)]
pub fn sweep_cdf_json(drops: u32, edge_snr_db: f64, objective: &str, detector: &str, seed: u32) -> String {
    to_json(sweep_cdf(drops as usize, edge_snr_db, objective, detector, u64::from(seed)))
}

#[wasm_bindgen(js_name = lowSnrSplit)]
pub fn low_snr_split_json(seed: u32, drop: u32, lo_db: f64, hi_db: f64, points: u32) -> String {
    to_json(low_snr_split(u64::from(seed), u64::from(drop), lo_db, hi_db, points as usize))
}
