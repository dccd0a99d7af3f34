//! `spacetime`: batch runner for the spacetime-core experiments.

mod catalog;
mod cli;
mod commands;
mod config;
mod error;
mod parse;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{ArgMatches, CommandFactory, FromArgMatches};

use crate::cli::{Cli, Group};
use crate::commands::Ctx;
use crate::config::ExperimentConfig;
use crate::error::{invalid, CliError, CliResult, EXIT_INVARIANT, EXIT_OK};

fn main() {
    std::process::exit(run(std::env::args_os().collect()));
}

fn run(argv: Vec<OsString>) -> i32 {
    match execute(argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Parse failures (including `--help`) are reported by clap with its own
/// exit status: 2 for usage errors, 0 for help and version.
fn parse(argv: &[OsString]) -> Result<(Cli, ArgMatches), i32> {
    let matches = Cli::command().try_get_matches_from(argv).map_err(|e| {
        let _ = e.print();
        e.exit_code()
    })?;
    let cli = Cli::from_arg_matches(&matches).map_err(|e| {
        let _ = e.print();
        e.exit_code()
    })?;
    Ok((cli, matches))
}

/// Canonical `group leaf` path of parsed matches.
fn experiment_path(m: &ArgMatches) -> Option<(String, String)> {
    let (group, gm) = m.subcommand()?;
    let (leaf, _) = gm.subcommand()?;
    Some((group.to_string(), leaf.to_string()))
}

fn execute(argv: Vec<OsString>) -> CliResult<i32> {
    let (mut cli, mut matches) = match parse(&argv) {
        Ok(parsed) => parsed,
        Err(code) => return Ok(code),
    };
    let config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let tokens = config.experiment_tokens();
    if !tokens.is_empty() {
        let mut with_experiment = argv.clone();
        with_experiment.extend(tokens.iter().map(OsString::from));
        if cli.command.is_none() {
            (cli, matches) = match parse(&with_experiment) {
                Ok(parsed) => parsed,
                Err(code) => return Ok(code),
            };
        } else {
            let mut named = vec![argv[0].clone()];
            named.extend(tokens.iter().map(OsString::from));
            let wanted = parse(&named).ok().and_then(|(_, m)| experiment_path(&m));
            if wanted.is_some() && wanted != experiment_path(&matches) {
                return Err(invalid(format!(
                    "config names experiment '{}' but the command line runs a different one",
                    tokens.join(" ")
                )));
            }
        }
    }

    let format = cli.format.or(config.format);
    let out = cli.out.clone().or(config.output.clone());
    let ctx = Ctx {
        seed: cli.seed.or(config.seed),
        tol: cli.tol.or(config.tol),
    };

    let group = match &cli.command {
        None | Some(Group::List) => {
            write_output(out.as_deref(), catalog::render(format)?.as_bytes())?;
            return Ok(EXIT_OK);
        }
        Some(group) => group,
    };
    let leaf = matches
        .subcommand()
        .and_then(|(_, gm)| gm.subcommand())
        .map(|(_, lm)| lm)
        .ok_or_else(|| invalid("missing experiment name"))?;
    let report = commands::dispatch(group, leaf, &config.parameters, &ctx)?;
    let bytes = report.render(format.unwrap_or(report.default_format))?;
    write_output(out.as_deref(), &bytes)?;

    let failed = report.failed_checks();
    for check in &failed {
        eprintln!("invariant violated: {}: {}", check.name, check.detail);
    }
    Ok(if failed.is_empty() {
        EXIT_OK
    } else {
        EXIT_INVARIANT
    })
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Output(e.to_string()))
        }
    }
}
