//! Runs the default -5 dB MRC scenario and prints min-SE and sum-SE quantiles.
//!
//! cargo run --release --example scenario_sweep -- [drops] [edge_snr_db]

use std::time::Instant;

use mmimo_power::channel_sim::{quantile, run_sweep, scheme_samples, CellConfig, Objective, Scheme, SweepConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let drops = args.next().map(|a| a.parse()).transpose()?.unwrap_or(200);
    let snr = args.next().map(|a| a.parse()).transpose()?.unwrap_or(-5.0);
    for objective in [Objective::MaxMin, Objective::Sum] {
        let config = SweepConfig {
            cell: CellConfig { edge_snr_db: snr, ..CellConfig::default() },
            objective,
            drops,
            ..SweepConfig::default()
        };
        let start = Instant::now();
        let results = run_sweep(&config)?;
        println!("{} objective, {drops} drops, {:.1?}", objective.name(), start.elapsed());
        for scheme in [Scheme::Equal, Scheme::DataOnly, Scheme::Joint] {
            let (min_se, sum_se) = scheme_samples(&results, scheme);
            let q = |v: &[f64], p| quantile(v, p).unwrap_or(f64::NAN);
            println!(
                "  {:<10} ok {:>5}  min SE q05 {:.3} q50 {:.3}  sum SE q05 {:.3} q50 {:.3}",
                scheme.name(),
                min_se.len(),
                q(&min_se, 0.05),
                q(&min_se, 0.5),
                q(&sum_se, 0.05),
                q(&sum_se, 0.5)
            );
        }
    }
    Ok(())
}
