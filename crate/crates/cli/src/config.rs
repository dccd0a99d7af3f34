//! JSON experiment configs and flag-over-file merging.

use std::path::{Path, PathBuf};

use clap::parser::ValueSource;
use clap::ArgMatches;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{invalid, CliError, CliResult};
use crate::report::Format;

/// A single experiment run described as a JSON document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Command path such as `"tc decay"`.
    pub experiment: Option<String>,
    #[serde(default)]
    pub parameters: Map<String, Value>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| CliError::Config {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Experiment name split into subcommand tokens.
    pub fn experiment_tokens(&self) -> Vec<String> {
        self.experiment
            .as_deref()
            .map(|e| e.split_whitespace().map(str::to_string).collect())
            .unwrap_or_default()
    }
}

/// Overlays config-file parameters on `args` wherever the flag was not
/// given on the command line. File keys may use `-` or `_`.
pub fn merge<T>(args: &T, matches: &ArgMatches, file: &Map<String, Value>) -> CliResult<T>
where
    T: Serialize + DeserializeOwned,
{
    let Value::Object(mut values) =
        serde_json::to_value(args).map_err(|e| invalid(e.to_string()))?
    else {
        return Err(invalid("arguments must form an object"));
    };
    for (key, value) in file {
        let key = key.replace('-', "_");
        if !values.contains_key(&key) {
            let known: Vec<&String> = values.keys().collect();
            return Err(invalid(format!(
                "unknown parameter '{key}' (expected one of {known:?})"
            )));
        }
        if matches.value_source(&key) != Some(ValueSource::CommandLine) {
            values.insert(key, value.clone());
        }
    }
    serde_json::from_value(Value::Object(values))
        .map_err(|e| invalid(format!("bad parameter value: {e}")))
}

/// Parameters as a JSON object, for the self-describing output.
pub fn to_map<T: Serialize>(args: &T) -> Map<String, Value> {
    match serde_json::to_value(args) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::Cli;
    use clap::{CommandFactory, FromArgMatches};
    use serde_json::json;

    fn leaf(argv: &[&str]) -> (crate::cli::DecayArgs, ArgMatches) {
        let matches = Cli::command().try_get_matches_from(argv).unwrap();
        let cli = Cli::from_arg_matches(&matches).unwrap();
        let (_, group) = matches.subcommand().unwrap();
        let (_, m) = group.subcommand().unwrap();
        match cli.command {
            Some(crate::cli::Group::Tc(crate::cli::TcCmd::Decay(a))) => (a, m.clone()),
            _ => unreachable!(),
        }
    }

    #[test]
    fn flags_override_file() {
        let (args, m) = leaf(&["spacetime", "tc", "decay", "--p", "0.3"]);
        let file = json!({"p": 0.2, "n": 7, "obs": "Z"})
            .as_object()
            .unwrap()
            .clone();
        let merged = merge(&args, &m, &file).unwrap();
        assert_eq!(merged.p, 0.3);
        assert_eq!(merged.n, 7);
        assert_eq!(merged.obs, "Z");
    }

    #[test]
    fn unknown_and_mistyped_keys_fail() {
        let (args, m) = leaf(&["spacetime", "tc", "decay"]);
        let file = json!({"q": 1}).as_object().unwrap().clone();
        assert!(merge(&args, &m, &file).is_err());
        let file = json!({"n": "many"}).as_object().unwrap().clone();
        assert!(merge(&args, &m, &file).is_err());
    }

    #[test]
    fn config_document() {
        let cfg: ExperimentConfig = serde_json::from_value(
            json!({"experiment": "tc decay", "parameters": {"p": 0.1}, "format": "csv", "seed": 4}),
        )
        .unwrap();
        assert_eq!(cfg.experiment_tokens(), ["tc", "decay"]);
        assert_eq!(cfg.format, Some(Format::Csv));
        assert!(serde_json::from_value::<ExperimentConfig>(json!({"experimnt": "x"})).is_err());
    }
}
