//! Experiment catalog derived from the command grammar.

use clap::{Command, CommandFactory};
use serde::Serialize;

use crate::cli::Cli;
use crate::error::{CliError, CliResult};
use crate::report::Format;

/// Experiments that draw random numbers and refuse to run without a seed.
pub const STOCHASTIC: [&str; 6] = [
    "otoc direct",
    "otoc pdm",
    "otoc finalstate",
    "tc floquet",
    "tc spectrum",
    "cj roundtrip",
];

/// Global flags, excluded from per-experiment schemas.
const GLOBAL: [&str; 7] = ["format", "out", "seed", "tol", "config", "help", "version"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterSpec {
    pub name: String,
    pub default: Option<String>,
    pub help: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub about: String,
    pub requires_seed: bool,
    pub parameters: Vec<ParameterSpec>,
}

pub fn experiments() -> Vec<ExperimentSpec> {
    let root = Cli::command();
    let mut out = Vec::new();
    for group in root.get_subcommands().filter(|g| g.has_subcommands()) {
        for leaf in group.get_subcommands() {
            let name = format!("{} {}", group.get_name(), leaf.get_name());
            out.push(ExperimentSpec {
                requires_seed: STOCHASTIC.contains(&name.as_str()),
                about: leaf.get_about().map(|s| s.to_string()).unwrap_or_default(),
                parameters: parameters(leaf),
                name,
            });
        }
    }
    out
}

fn parameters(cmd: &Command) -> Vec<ParameterSpec> {
    cmd.get_arguments()
        .filter(|a| !GLOBAL.contains(&a.get_id().as_str()))
        .map(|a| {
            let defaults: Vec<String> = a
                .get_default_values()
                .iter()
                .map(|v| v.to_string_lossy().into_owned())
                .collect();
            ParameterSpec {
                name: a.get_long().unwrap_or(a.get_id().as_str()).to_string(),
                default: (!defaults.is_empty()).then(|| defaults.join(",")),
                help: a.get_help().map(|s| s.to_string()).unwrap_or_default(),
            }
        })
        .collect()
}

/// Catalog as text (no format), JSON or CSV (one row per parameter).
pub fn render(format: Option<Format>) -> CliResult<String> {
    let list = experiments();
    match format {
        Some(Format::Json) => {
            let body = serde_json::json!({ "experiments": list });
            serde_json::to_string_pretty(&body)
                .map(|s| s + "\n")
                .map_err(|e| CliError::Output(e.to_string()))
        }
        Some(Format::Csv) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let err = |e: csv::Error| CliError::Output(e.to_string());
            w.write_record([
                "experiment",
                "requires_seed",
                "parameter",
                "default",
                "help",
            ])
            .map_err(err)?;
            for e in &list {
                for p in &e.parameters {
                    let seed = e.requires_seed.to_string();
                    let default = p.default.clone().unwrap_or_default();
                    w.write_record([
                        e.name.as_str(),
                        seed.as_str(),
                        p.name.as_str(),
                        default.as_str(),
                        p.help.as_str(),
                    ])
                    .map_err(err)?;
                }
            }
            let bytes = w
                .into_inner()
                .map_err(|e| CliError::Output(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
        }
        None => {
            let mut s =
                String::from("Experiments (run `spacetime <group> <name> --help` for details):\n");
            for e in &list {
                let seed = if e.requires_seed {
                    "  [requires --seed]"
                } else {
                    ""
                };
                s += &format!("\n  {:<22} {}{seed}\n", e.name, e.about);
                for p in &e.parameters {
                    let default = p
                        .default
                        .as_deref()
                        .map(|d| format!(" [default: {d}]"))
                        .unwrap_or_default();
                    s += &format!("      --{:<16} {}{default}\n", p.name, p.help);
                }
            }
            Ok(s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_group_is_listed() {
        let names: Vec<String> = experiments().into_iter().map(|e| e.name).collect();
        for group in [
            "pdm",
            "gaussian",
            "cv-wigner",
            "process",
            "histories",
            "otoc",
            "tc",
            "cj",
        ] {
            assert!(
                names.iter().any(|n| n.starts_with(&format!("{group} "))),
                "{group}"
            );
        }
        for s in STOCHASTIC {
            assert!(names.iter().any(|n| n == s), "{s}");
        }
    }

    #[test]
    fn schema_has_defaults() {
        let decay = experiments()
            .into_iter()
            .find(|e| e.name == "tc decay")
            .unwrap();
        let p = decay.parameters.iter().find(|p| p.name == "p").unwrap();
        assert_eq!(p.default.as_deref(), Some("0.1"));
        assert!(decay.parameters.iter().all(|p| p.name != "seed"));
    }
}
