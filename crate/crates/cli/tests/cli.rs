use std::process::Command as Process;

use mmimo_cli::config::{Command, ConfigError, Origin, Weights};
use mmimo_cli::run::{fmt_num, solve_instance};
use mmimo_cli::{parse_args, parse_config, parse_config_with, run, Entry, RunConfig};
use mmimo_power::channel_sim::{quantile, CellConfig};
use mmimo_power::se_model::{se_report, SystemDims, UserProfile};
use mmimo_power::{solve_maxmin, Detector, SolverOptions};

fn over(key: &str, value: &str) -> Entry {
    Entry { key: key.into(), value: value.into(), origin: Origin::CommandLine }
}

fn bin() -> Process {
    Process::new(env!("CARGO_BIN_EXE_mmimo-power"))
}

#[test]
fn empty_config_gives_scenario_defaults() {
    let c = parse_config("").unwrap();
    assert_eq!(c, RunConfig::default());
    assert_eq!(c.cell, CellConfig::default());
    assert_eq!((c.cell.antennas, c.cell.users_dropped, c.cell.coherence), (100, 10, 200));
    assert_eq!((c.cell.radius, c.cell.pathloss_exponent, c.cell.shadow_std_db), (1000.0, 3.76, 8.0));
    assert_eq!(c.command, Command::Solve);
    assert_eq!(c.weights, Weights::Equal);
    // Comments and blank lines are ignored.
    assert_eq!(parse_config("# nothing here\n\n   # indented\n").unwrap(), c);
}

#[test]
fn file_values_and_dotted_keys() {
    let text = "command = sweep\ncell.radius = 500 # meters\ncell.min_distance = 50\nschemes = joint, equal\n\
                weights = 1,2,1,1,1,1,1,1,1\noutput = \"out.csv\"\n";
    let c = parse_config(text).unwrap();
    assert_eq!(c.command, Command::Sweep);
    assert_eq!(c.cell.radius, 500.0);
    assert_eq!(c.schemes.len(), 2);
    assert_eq!(c.output.as_deref(), Some(std::path::Path::new("out.csv")));
    assert!(matches!(c.weights, Weights::PerUser(ref w) if w[1] == 2.0));
}

#[test]
fn unknown_key_is_named() {
    let err = parse_config("seed = 1\ncell.radiuss = 3\n").unwrap_err();
    assert_eq!(err.key(), Some("cell.radiuss"));
    assert!(err.to_string().contains("cell.radiuss") && err.to_string().contains("line 2"), "{err}");
    let err = parse_config_with("", &[over("bogus", "1")]).unwrap_err();
    assert!(err.to_string().contains("bogus") && err.to_string().contains("command line"), "{err}");
}

#[test]
fn syntax_errors_carry_line_numbers() {
    let err = parse_config("seed = 1\n\nthis line has no equals\n").unwrap_err();
    assert!(matches!(err, ConfigError::Syntax { line: 3, .. }), "{err:?}");
    let err = parse_config("Seed = 1\n").unwrap_err();
    assert!(matches!(err, ConfigError::Syntax { line: 1, .. }), "{err:?}");
    let err = parse_config("seed = 1\nseed = 2\n").unwrap_err();
    assert!(matches!(err, ConfigError::Duplicate { line: 2, first: 1, .. }), "{err:?}");
    let err = parse_config("drops = many\n").unwrap_err();
    assert_eq!(err.key(), Some("drops"));
}

#[test]
fn zero_forcing_needs_more_antennas_than_users() {
    let err = parse_config("detector = zf\ncell.antennas = 9\n").unwrap_err();
    assert_eq!(err.key(), Some("detector"), "{err}");
    let err = parse_config("detector = zf\ncell.antennas = 2\nsolve.beta = 1e-3, 2e-3\n").unwrap_err();
    assert_eq!(err.key(), Some("detector"), "{err}");
    assert!(parse_config("detector = zf\ncell.antennas = 10\n").is_ok());
}

#[test]
fn other_cross_key_checks() {
    let key = |text: &str| parse_config(text).unwrap_err().key().map(str::to_string);
    assert_eq!(key("weights = 1, 2\n").as_deref(), Some("weights"));
    assert_eq!(key("command = sweep\ndrops = 0\n").as_deref(), Some("drops"));
    assert_eq!(key("correlation = one_ring\ndetector = zf\n").as_deref(), Some("correlation"));
    assert_eq!(key("correlation = one_ring\nobjective = sum\n").as_deref(), Some("objective"));
    assert_eq!(key("correlation = one_ring\nsolve.beta = 1, 2\n").as_deref(), Some("solve.angles_deg"));
    assert_eq!(key("solve.beta = 1, 2\nsolve.energy = 1, 2, 3\n").as_deref(), Some("solve.energy"));
    assert_eq!(key("cell.coherence = 9\n").as_deref(), Some("cell.coherence"));
    assert_eq!(key("correlation.spread_deg = 0\n").as_deref(), Some("correlation.spread_deg"));
}

#[test]
fn command_line_wins_over_file() {
    let c = parse_config_with("seed = 1\ndrops = 10\n", &[over("seed", "7")]).unwrap();
    assert_eq!((c.seed, c.drops), (7, 10));
    let inv = parse_args(["sweep", "run.cfg", "--drops=3"].map(String::from)).unwrap();
    assert_eq!(inv.config_path.as_deref(), Some("run.cfg"));
    let c = parse_config_with("command = estimate\ndrops = 10\n", &inv.overrides).unwrap();
    assert_eq!((c.command, c.drops), (Command::Sweep, 3));
    assert!(parse_args(["--drops"].map(String::from)).is_err());
    assert!(parse_args(["a.cfg", "b.cfg"].map(String::from)).is_err());
}

#[test]
fn solve_matches_library_api() {
    let text = "solve.beta = 1e-12, 3e-13\nsolve.energy = 2e13, 5e13\nweights = 1, 1.5\n";
    let config = parse_config(text).unwrap();
    let out = run(&config).unwrap();

    let dims = SystemDims::new(100, 2, 200).unwrap();
    let profile = UserProfile::new(vec![1e-12, 3e-13], vec![1.0, 1.5], vec![2e13, 5e13]).unwrap();
    assert_eq!(solve_instance(&config).unwrap().profile, profile);
    let sol = solve_maxmin(&profile, &dims, Detector::Mrc, &SolverOptions::default()).unwrap();
    let rep = se_report(&dims, &sol.alloc, &profile, Detector::Mrc, None).unwrap();

    let lines: Vec<&str> = out.csv.lines().collect();
    assert_eq!(lines[0], "# mmimo-power solve csv v1");
    assert_eq!(lines[1], "user,beta,weight,energy,pilot_power,data_power,gamma,sinr,se");
    assert_eq!(lines.len(), 4);
    for k in 0..2 {
        let expected = [
            (k + 1).to_string(),
            fmt_num(profile.beta[k]),
            fmt_num(profile.weight[k]),
            fmt_num(profile.energy[k]),
            fmt_num(sol.alloc.pilot_power[k]),
            fmt_num(sol.alloc.data_power[k]),
            fmt_num(rep.gamma[k]),
            fmt_num(rep.sinr[k]),
            fmt_num(rep.se[k]),
        ]
        .join(",");
        assert_eq!(lines[2 + k], expected);
    }
}

#[test]
fn sweep_is_deterministic() {
    let text = "command = sweep\ndrops = 40\nschemes = equal, data_only, joint, sum_ref\n";
    let a = run(&parse_config(text).unwrap()).unwrap();
    let b = run(&parse_config(text).unwrap()).unwrap();
    assert_eq!(a, b);
    let lines: Vec<&str> = a.csv.lines().collect();
    assert_eq!(lines[0], "# mmimo-power sweep csv v1");
    assert_eq!(lines[1], "drop,scheme,status,min_se,sum_se,se_1,se_2,se_3,se_4,se_5,se_6,se_7,se_8,se_9");
    assert_eq!(lines.len(), 2 + 40 * 4);
    assert!(!a.csv.contains('\r'));
    let summary = a.summary_csv.unwrap();
    assert!(summary.starts_with("# mmimo-power sweep-summary csv v1\nscheme,metric,ok_drops,q05,q50,q95\n"));
    assert_eq!(summary.lines().count(), 2 + 4 * 2);
    // A different seed changes the drops.
    let c = run(&parse_config_with(text, &[over("seed", "43")]).unwrap()).unwrap();
    assert_ne!(a.csv, c.csv);
}

#[test]
fn binary_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "command = sweep\ndrops = 25\n").unwrap();
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        let status = bin().arg(&cfg).arg(format!("--output={}", out.display())).output().unwrap().status;
        assert!(status.success());
        outputs.push(std::fs::read(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    // Standard output carries the same CSV when no file is given.
    let piped = bin().arg(&cfg).output().unwrap();
    assert_eq!(piped.stdout, outputs[0]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code();
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["--nonsense=1"]), Some(1));
    assert_eq!(code(&["--detector=zf", "--cell.antennas=5"]), Some(1));
    assert_eq!(code(&[dir.path().join("missing.cfg").to_str().unwrap()]), Some(3));
    let unwritable = format!("--output={}", dir.path().join("no/such/dir.csv").display());
    assert_eq!(code(&["--solve.beta=1e-3", &unwritable]), Some(3));
    // One bisection step cannot converge.
    assert_eq!(code(&["--solve.beta=1e-12,3e-13", "--solve.energy=2e13", "--solver.max_iter=1"]), Some(2));
}

#[test]
fn estimate_writes_one_row_per_point_and_drop() {
    let config = parse_config("command = estimate\ndrops = 6\nestimate.snr_db = -10, 0\n").unwrap();
    let out = run(&config).unwrap();
    let lines: Vec<&str> = out.csv.lines().collect();
    assert_eq!(lines[0], "# mmimo-power estimate csv v1");
    assert_eq!(lines[1], "snr_db,drop,genie_status,genie_min_se,estimated_status,estimated_min_se");
    assert_eq!(lines.len(), 2 + 12);
    assert!(lines[2].starts_with("-10,0,ok,"));
    assert!(lines[8].starts_with("0,0,ok,"));
}

#[test]
fn joint_maxmin_sweep_reaches_one_bit_for_95_percent_of_drops() {
    let config = parse_config("command = sweep\nschemes = joint\n").unwrap();
    assert_eq!((config.drops, config.seed, config.cell.edge_snr_db), (1000, 42, -5.0));
    let out = run(&config).unwrap();
    let min_se: Vec<f64> = out.csv.lines().skip(2).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(min_se.len(), 1000);
    let q05 = quantile(&min_se, 0.05).unwrap();
    assert!((q05 - 1.0).abs() <= 0.2, "0.95-likely min SE {q05}");
}

#[test]
fn number_format() {
    assert_eq!(fmt_num(0.1), "0.1");
    assert_eq!(fmt_num(2.0 / 3.0), "0.666666667");
    assert_eq!(fmt_num(1234.567891234), "1234.56789");
    assert_eq!(fmt_num(1.0 / 3.0 * 1e-12), "3.33333333e-13");
    assert_eq!(fmt_num(2e13), "2e13");
    assert_eq!(fmt_num(0.0), "0");
}
