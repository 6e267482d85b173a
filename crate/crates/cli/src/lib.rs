//! Command-line driver: configuration files, run orchestration, Riemann
//! inspection, refinement studies, and CSV/JSON emission.
//!
//! Subcommands:
//! - `run`: execute a configured run, write snapshot CSVs, diagnostics JSON,
//!   and a manifest
//! - `riemann`: solve one (wall) Riemann problem, print the wave structure,
//!   optionally dump a sampled profile CSV
//! - `converge`: run a list of mesh widths and report pairwise differences,
//!   residuals, and bound constants
//! - `diagnose`: run and emit diagnostics only
//!
//! Exit codes: 0 success, 2 configuration error, 3 CFL abort, 4 invariant
//! monitor abort, 1 everything else.

// Negated comparisons reject NaN alongside the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;

pub mod commands;
pub mod config;
pub mod output;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(sphgrav_core::Error),
    Io(std::io::Error),
    /// A study or check ran to completion but did not pass.
    Failed(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
            CliError::Failed(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<sphgrav_core::Error> for CliError {
    fn from(e: sphgrav_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use sphgrav_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                E::CflViolation { .. } => 3,
                E::MonitorViolation { .. } => 4,
                E::InvalidConfig(_)
                | E::InvalidMeshWidth { .. }
                | E::InvalidXi { .. }
                | E::NonpositiveDensity { .. }
                | E::NonfiniteInput => 2,
                _ => 1,
            },
            CliError::Io(_) => 1,
            CliError::Failed(_) => 1,
        }
    }
}

const USAGE: &str = "\
usage: sphgrav <command> [options]

commands:
  run       --config FILE [--out-dir DIR] [--snapshot-times T1,T2,...]
  riemann   --left RHO,U --right RHO,U [--profile FILE]
            [--xi-min A] [--xi-max B] [--points N] [--out-dir DIR]
  riemann   --wall --right RHO,U [profile options]
  converge  --config FILE --levels L1,L2,... [--out-dir DIR]
  diagnose  --config FILE [--out-dir DIR]

Config keys may be overridden through SPHGRAV_* environment variables
(e.g. SPHGRAV_L overrides `l`, SPHGRAV_INITIAL_KIND overrides
`initial.kind`).";

/// Parse the argument list and dispatch; returns the process exit code.
pub fn run_cli(args: &[String]) -> i32 {
    let result = dispatch(args);
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("sphgrav: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(args: &[String]) -> Result<(), CliError> {
    let Some(command) = args.first() else {
        eprintln!("{USAGE}");
        return Err(CliError::Config("missing command".into()));
    };
    let rest = &args[1..];
    match command.as_str() {
        "run" => commands::cmd_run(rest),
        "riemann" => commands::cmd_riemann(rest),
        "converge" => commands::cmd_converge(rest),
        "diagnose" => commands::cmd_diagnose(rest),
        "help" | "--help" | "-h" => {
            println!("{USAGE}");
            Ok(())
        }
        other => {
            eprintln!("{USAGE}");
            Err(CliError::Config(format!("unknown command `{other}`")))
        }
    }
}

/// Minimal flag parser: `--name value` pairs plus boolean flags.
pub(crate) struct Flags {
    pairs: Vec<(String, Option<String>)>,
}

impl Flags {
    pub fn parse(args: &[String], boolean: &[&str]) -> Result<Self, CliError> {
        let mut pairs = Vec::new();
        let mut it = args.iter().peekable();
        while let Some(arg) = it.next() {
            let Some(name) = arg.strip_prefix("--") else {
                return Err(CliError::Config(format!("unexpected argument `{arg}`")));
            };
            if boolean.contains(&name) {
                pairs.push((name.to_string(), None));
            } else {
                let value = it
                    .next()
                    .ok_or_else(|| CliError::Config(format!("--{name} needs a value")))?;
                pairs.push((name.to_string(), Some(value.clone())));
            }
        }
        Ok(Self { pairs })
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.pairs
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .and_then(|(_, v)| v.as_deref())
    }

    pub fn has(&self, name: &str) -> bool {
        self.pairs.iter().any(|(n, _)| n == name)
    }

    pub fn require(&self, name: &str) -> Result<&str, CliError> {
        self.get(name)
            .ok_or_else(|| CliError::Config(format!("missing required flag --{name}")))
    }
}
