//! Output plumbing shared by all subcommands.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::failure::{CliResult, Failure};

pub const TOOL: &str = "semivalue";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance embedded in every artifact: enough to rerun it.
pub struct Provenance {
    pub command: &'static str,
    pub seed: Option<u64>,
    pub config: Value,
}

impl Provenance {
    pub fn new(command: &'static str, seed: Option<u64>, config: &impl Serialize) -> CliResult<Self> {
        let config = serde_json::to_value(config).map_err(|e| Failure::usage(e.to_string()))?;
        Ok(Self { command, seed, config })
    }

    pub fn json(&self) -> Value {
        json!({
            "tool": TOOL,
            "version": VERSION,
            "command": self.command,
            "seed": self.seed,
            "config": self.config,
        })
    }

    /// Lines for a CSV `#` preamble.
    pub fn csv_lines(&self) -> Vec<String> {
        let mut lines = vec![format!("tool: {TOOL} {VERSION}"), format!("command: {}", self.command)];
        if let Some(seed) = self.seed {
            lines.push(format!("seed: {seed}"));
        }
        lines.push(format!("config: {}", self.config));
        lines
    }
}

pub fn emit(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

pub fn emit_json(out: Option<&Path>, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    text.push('\n');
    emit(out, text.as_bytes())
}
