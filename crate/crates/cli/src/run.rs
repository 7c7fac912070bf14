//! Executes a parsed configuration and renders its artifacts in memory.

use std::fmt::Write as _;

use mmimo_power::channel_sim::{
    self, draw_drop, one_ring_cross_traces, quantile, run_estimation, run_sweep, scheme_allocation, DropResult,
    EstimationRecord, Scheme,
};
use mmimo_power::se_model::{self, CorrelationProfile, PowerAllocation, SeReport, SystemDims, UserProfile};
use mmimo_power::Error;

use crate::config::{Command, RunConfig, Weights};
use crate::CliError;

/// Bumped whenever a column is added, removed or reordered.
pub const CSV_VERSION: u32 = 1;

pub const SOLVE_COLUMNS: &[&str] =
    &["user", "beta", "weight", "energy", "pilot_power", "data_power", "gamma", "sinr", "se"];
/// Followed by `se_1` .. `se_K`.
pub const SWEEP_COLUMNS: &[&str] = &["drop", "scheme", "status", "min_se", "sum_se"];
pub const SUMMARY_COLUMNS: &[&str] = &["scheme", "metric", "ok_drops", "q05", "q50", "q95"];
pub const ESTIMATE_COLUMNS: &[&str] =
    &["snr_db", "drop", "genie_status", "genie_min_se", "estimated_status", "estimated_min_se"];

/// Rendered outputs of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    /// Main CSV, including its version comment line.
    pub csv: String,
    /// Sweep quantile summary CSV.
    pub summary_csv: Option<String>,
    /// Human-readable report.
    pub report: String,
}

/// Rounds to 9 significant digits and prints the shortest text that
/// round-trips the rounded value; exponent notation outside `[1e-4, 1e9)`.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.8e}").parse().unwrap_or(x);
    let mag = rounded.abs();
    if rounded == 0.0 || (1e-4..1e9).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// Short machine-readable tag of a solver error.
pub fn status(err: &Error) -> &'static str {
    match err {
        Error::Domain(_) => "domain",
        Error::Shape(_) => "shape",
        Error::DetectorInfeasible { .. } => "detector_infeasible",
        Error::Infeasible(_) => "infeasible",
        Error::Convergence { .. } => "no_convergence",
        Error::Degenerate(_) => "degenerate",
    }
}

struct Csv {
    writer: csv::Writer<Vec<u8>>,
}

impl Csv {
    fn new(kind: &str, header: &[String]) -> Self {
        let mut buf = Vec::new();
        buf.extend_from_slice(format!("# mmimo-power {kind} csv v{CSV_VERSION}\n").as_bytes());
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(buf);
        writer.write_record(header).expect("in-memory write");
        Self { writer }
    }

    fn row(&mut self, fields: &[String]) {
        self.writer.write_record(fields).expect("in-memory write");
    }

    fn finish(self) -> String {
        let bytes = self.writer.into_inner().expect("in-memory flush");
        String::from_utf8(bytes).expect("csv output is UTF-8")
    }
}

fn header(columns: &[&str]) -> Vec<String> {
    columns.iter().map(|c| c.to_string()).collect()
}

pub fn run(config: &RunConfig) -> Result<Artifacts, CliError> {
    match config.command {
        Command::Solve => run_solve(config),
        Command::Sweep => run_sweep_command(config),
        Command::Estimate => run_estimate(config),
    }
}

/// A single instance as `solve` sees it.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub dims: SystemDims,
    pub profile: UserProfile,
    pub correlation: Option<CorrelationProfile>,
}

/// Builds the `solve` instance: hand-set fading, or a seeded drop.
pub fn solve_instance(config: &RunConfig) -> Result<Instance, Error> {
    let (beta, angles) = match &config.solve.beta {
        Some(beta) => {
            let angles = config.solve.angles_deg.as_ref().map(|a| a.iter().map(|d| d.to_radians()).collect());
            (beta.clone(), angles)
        }
        None => {
            let drop = draw_drop(&config.cell, config.seed, config.solve.drop)?;
            (drop.profile.beta, Some(drop.angles))
        }
    };
    let k = beta.len();
    let dims = SystemDims::new(config.cell.antennas, k, config.cell.coherence)?;
    let weight = match &config.weights {
        Weights::Equal => vec![1.0; k],
        Weights::PerUser(w) => w.clone(),
    };
    let energy = match config.solve.energy.as_deref() {
        None => vec![config.cell.energy_budget(); k],
        Some([e]) => vec![*e; k],
        Some(e) => e.to_vec(),
    };
    let correlation = match (config.correlation(), angles) {
        (channel_sim::CorrelationModel::OneRing { spread_deg }, Some(angles)) => {
            Some(one_ring_cross_traces(&beta, &angles, spread_deg.to_radians(), dims.antennas)?)
        }
        _ => None,
    };
    let profile = UserProfile::new(beta, weight, energy)?;
    Ok(Instance { dims, profile, correlation })
}

fn run_solve(config: &RunConfig) -> Result<Artifacts, CliError> {
    let inst = solve_instance(config)?;
    let scheme = config.solve.scheme;
    let alloc = scheme_allocation(
        scheme,
        config.objective,
        config.detector,
        &inst.dims,
        &inst.profile,
        inst.correlation.as_ref(),
        &config.opts,
    )?;
    let report = se_model::se_report(&inst.dims, &alloc, &inst.profile, config.detector, inst.correlation.as_ref())?;
    Ok(Artifacts {
        csv: solve_csv(&inst.profile, &alloc, &report),
        summary_csv: None,
        report: solve_report(config, &inst, &alloc, &report),
    })
}

fn solve_csv(profile: &UserProfile, alloc: &PowerAllocation, report: &SeReport) -> String {
    let mut csv = Csv::new("solve", &header(SOLVE_COLUMNS));
    for k in 0..profile.len() {
        csv.row(&[
            (k + 1).to_string(),
            fmt_num(profile.beta[k]),
            fmt_num(profile.weight[k]),
            fmt_num(profile.energy[k]),
            fmt_num(alloc.pilot_power[k]),
            fmt_num(alloc.data_power[k]),
            fmt_num(report.gamma[k]),
            fmt_num(report.sinr[k]),
            fmt_num(report.se[k]),
        ]);
    }
    csv.finish()
}

fn settings_line(config: &RunConfig, users: usize) -> String {
    format!(
        "M = {}, K = {}, T = {}, detector {}, objective {}, {} fading",
        config.cell.antennas,
        users,
        config.cell.coherence,
        config.detector.name(),
        config.objective.name(),
        if config.one_ring { format!("one-ring {} deg", config.spread_deg) } else { "i.i.d.".to_string() },
    )
}

fn solve_report(config: &RunConfig, inst: &Instance, alloc: &PowerAllocation, report: &SeReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "solve, scheme {}: {}", config.solve.scheme, settings_line(config, inst.profile.len()));
    let _ = writeln!(out, "{:>4} {:>12} {:>12} {:>12} {:>12} {:>8}", "user", "beta", "pilot", "data", "SINR", "SE");
    for k in 0..inst.profile.len() {
        let _ = writeln!(
            out,
            "{:>4} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>8.4}",
            k + 1,
            inst.profile.beta[k],
            alloc.pilot_power[k],
            alloc.data_power[k],
            report.sinr[k],
            report.se[k],
        );
    }
    let _ = writeln!(out, "min SE {:.4} bit/s/Hz, sum SE {:.4} bit/s/Hz", report.min_se, report.sum_se());
    out
}

fn run_sweep_command(config: &RunConfig) -> Result<Artifacts, CliError> {
    let sweep = config.sweep_config();
    let results = run_sweep(&sweep)?;
    let k = config.users();
    Ok(Artifacts {
        csv: sweep_csv(&results, k),
        summary_csv: Some(summary_csv(&results, &sweep.schemes)),
        report: sweep_report(config, &results),
    })
}

fn sweep_csv(results: &[DropResult], users: usize) -> String {
    let mut cols = header(SWEEP_COLUMNS);
    cols.extend((1..=users).map(|k| format!("se_{k}")));
    let mut csv = Csv::new("sweep", &cols);
    for r in results {
        for s in &r.schemes {
            let mut row = vec![r.drop.to_string(), s.scheme.to_string()];
            match &s.outcome {
                Ok((_, rep)) => {
                    row.push("ok".into());
                    row.push(fmt_num(rep.min_se));
                    row.push(fmt_num(rep.sum_se()));
                    row.extend(rep.se.iter().map(|&x| fmt_num(x)));
                }
                Err(e) => {
                    row.push(status(e).into());
                    row.extend(std::iter::repeat_n(String::new(), 2 + users));
                }
            }
            csv.row(&row);
        }
    }
    csv.finish()
}

/// Quantiles of one metric of one scheme over the drops where it succeeded.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub scheme: Scheme,
    pub metric: &'static str,
    pub ok_drops: usize,
    pub q05: Option<f64>,
    pub q50: Option<f64>,
    pub q95: Option<f64>,
}

pub fn summarize(results: &[DropResult], schemes: &[Scheme]) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for &scheme in schemes {
        let (min_se, sum_se) = channel_sim::scheme_samples(results, scheme);
        for (metric, v) in [("min_se", min_se), ("sum_se", sum_se)] {
            rows.push(SummaryRow {
                scheme,
                metric,
                ok_drops: v.len(),
                q05: quantile(&v, 0.05),
                q50: quantile(&v, 0.5),
                q95: quantile(&v, 0.95),
            });
        }
    }
    rows
}

fn opt_num(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn summary_csv(results: &[DropResult], schemes: &[Scheme]) -> String {
    let mut csv = Csv::new("sweep-summary", &header(SUMMARY_COLUMNS));
    for r in summarize(results, schemes) {
        csv.row(&[
            r.scheme.to_string(),
            r.metric.to_string(),
            r.ok_drops.to_string(),
            opt_num(r.q05),
            opt_num(r.q50),
            opt_num(r.q95),
        ]);
    }
    csv.finish()
}

fn sweep_report(config: &RunConfig, results: &[DropResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "sweep, {} drops, seed {}, edge SNR {} dB: {}",
        config.drops,
        config.seed,
        config.cell.edge_snr_db,
        settings_line(config, config.users())
    );
    let _ = writeln!(out, "{:<12} {:<7} {:>6} {:>9} {:>9} {:>9}", "scheme", "metric", "ok", "q05", "q50", "q95");
    let show = |x: Option<f64>| x.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into());
    for r in summarize(results, &config.schemes) {
        let _ = writeln!(
            out,
            "{:<12} {:<7} {:>6} {:>9} {:>9} {:>9}",
            r.scheme.name(),
            r.metric,
            r.ok_drops,
            show(r.q05),
            show(r.q50),
            show(r.q95)
        );
    }
    let failed = results.iter().flat_map(|r| &r.schemes).filter(|s| s.outcome.is_err()).count();
    if failed > 0 {
        let _ = writeln!(out, "{failed} scheme solves failed; see the status column");
    }
    out
}

fn run_estimate(config: &RunConfig) -> Result<Artifacts, CliError> {
    let est = config.estimation_config();
    let records = run_estimation(&est)?;
    let mut csv = Csv::new("estimate", &header(ESTIMATE_COLUMNS));
    let cell = |r: &Result<f64, Error>| match r {
        Ok(v) => ("ok".to_string(), fmt_num(*v)),
        Err(e) => (status(e).to_string(), String::new()),
    };
    for r in &records {
        let (gs, gv) = cell(&r.genie_min_se);
        let (es, ev) = cell(&r.estimated_min_se);
        csv.row(&[fmt_num(r.snr_db), r.drop.to_string(), gs, gv, es, ev]);
    }
    Ok(Artifacts { csv: csv.finish(), summary_csv: None, report: estimate_report(config, &records) })
}

fn estimate_report(config: &RunConfig, records: &[EstimationRecord]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "estimate, {} drops, seed {}, N = {}: {}",
        config.drops,
        config.seed,
        config.observations,
        settings_line(config, config.users())
    );
    let _ = writeln!(out, "{:>8} {:>6} {:>10} {:>10} {:>9}", "SNR dB", "ok", "genie", "estimated", "gap");
    for &snr in &config.estimate_snr_db {
        let pairs: Vec<(f64, f64)> = records
            .iter()
            .filter(|r| r.snr_db == snr)
            .filter_map(|r| Some((*r.genie_min_se.as_ref().ok()?, *r.estimated_min_se.as_ref().ok()?)))
            .collect();
        if pairs.is_empty() {
            let _ = writeln!(out, "{snr:>8} {:>6} {:>10} {:>10} {:>9}", 0, "-", "-", "-");
            continue;
        }
        let n = pairs.len() as f64;
        let g = pairs.iter().map(|p| p.0).sum::<f64>() / n;
        let e = pairs.iter().map(|p| p.1).sum::<f64>() / n;
        let _ = writeln!(out, "{snr:>8} {:>6} {g:>10.4} {e:>10.4} {:>8.2}%", pairs.len(), 100.0 * (g - e) / g);
    }
    out
}
