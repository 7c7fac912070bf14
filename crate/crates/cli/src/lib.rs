//! Command-line front end: config parsing, single solves, Monte Carlo
//! sweeps and the fading-estimation experiment, with CSV output.
//!
//! Outputs are a pure function of the config text and overrides.

// `!(x > 0.0)` is the idiom here for rejecting NaN along with bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod run;

pub use config::{parse_config, parse_config_with, Command, ConfigError, Entry, RunConfig};
pub use run::{run, Artifacts};

/// Any failure of a CLI invocation, mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("solver error: {0}")]
    Solver(#[from] mmimo_power::Error),
    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Solver(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

/// Command-line arguments after the program name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Invocation {
    pub config_path: Option<String>,
    pub overrides: Vec<Entry>,
    pub help: bool,
}

/// `[COMMAND] [CONFIG] [--key=value ...]`; a leading command name is
/// shorthand for `--command=NAME`.
pub fn parse_args<I: IntoIterator<Item = String>>(args: I) -> Result<Invocation, CliError> {
    let mut inv = Invocation::default();
    let mut command = None;
    for (i, arg) in args.into_iter().enumerate() {
        if arg == "-h" || arg == "--help" {
            inv.help = true;
        } else if arg.starts_with("--") {
            let entry = config::parse_override(&arg)
                .ok_or_else(|| CliError::Usage(format!("expected --key=value, found `{arg}`")))?;
            inv.overrides.push(entry);
        } else if i == 0 && Command::parse(&arg).is_some() {
            command = Some(arg);
        } else if inv.config_path.is_none() {
            inv.config_path = Some(arg);
        } else {
            return Err(CliError::Usage(format!("unexpected argument `{arg}`")));
        }
    }
    if let Some(name) = command {
        inv.overrides.insert(0, Entry { key: "command".into(), value: name, origin: config::Origin::CommandLine });
    }
    Ok(inv)
}

pub fn help_text() -> String {
    let mut s = String::from(
        "usage: mmimo-power [solve|sweep|estimate] [CONFIG] [--key=value ...]\n\n\
         CONFIG holds `key = value` lines; `--key=value` overrides win over the file.\n\nkeys:\n",
    );
    for (key, doc) in config::KEYS {
        s.push_str(&format!("  {key:<24} {doc}\n"));
    }
    s.push_str("\nexit codes: 0 ok, 1 usage or config error, 2 solver failure, 3 I/O error\n");
    s
}
