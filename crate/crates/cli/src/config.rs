//! Merging `--config` files with command-line flags.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::failure::{CliResult, Failure};

pub const SEED_ENV: &str = "SEMIVALUE_SEED";

pub fn load_file(path: &Path) -> CliResult<Map<String, Value>> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(Failure::usage(format!("{}: config must be a JSON object", path.display()))),
        Err(e) => Err(Failure::usage(format!("{}: {e}", path.display()))),
    }
}

/// Fills every flag left unset on the command line from `file`. Keys that
/// name no flag of this subcommand are rejected.
pub fn merge<T: Serialize + DeserializeOwned>(cli: T, file: Option<&Map<String, Value>>) -> CliResult<T> {
    let Some(file) = file else { return Ok(cli) };
    let Value::Object(mut merged) = serde_json::to_value(&cli).map_err(|e| Failure::usage(e.to_string()))? else {
        unreachable!("argument structs serialize to objects")
    };
    for (key, value) in file {
        let slot = merged
            .get_mut(key)
            .ok_or_else(|| Failure::usage(format!("config key '{key}' is not a flag of this subcommand")))?;
        if slot.is_null() || *slot == Value::Bool(false) {
            *slot = value.clone();
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| Failure::usage(format!("config: {e}")))
}

/// Flag, then config file (already merged), then `$SEMIVALUE_SEED`, then 0.
pub fn resolve_seed(seed: Option<u64>) -> CliResult<u64> {
    if let Some(s) = seed {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("{SEED_ENV} must be an unsigned integer, got '{v}'"))),
        Err(_) => Ok(0),
    }
}
