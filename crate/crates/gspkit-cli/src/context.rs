//! Per-run state: the output directory, the metadata record every run
//! leaves beside its outputs, and the summary printed on success.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::CliError;

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'a str,
    inputs: &'a BTreeMap<String, String>,
    parameters: &'a BTreeMap<String, serde_json::Value>,
    seed: u64,
    library_version: &'static str,
    wall_time_seconds: f64,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    results: &'a BTreeMap<String, f64>,
}

pub struct RunContext {
    command: String,
    out_dir: PathBuf,
    seed: u64,
    quiet: bool,
    started: Instant,
    inputs: BTreeMap<String, String>,
    parameters: BTreeMap<String, serde_json::Value>,
    results: BTreeMap<String, f64>,
    notes: Vec<String>,
}

impl RunContext {
    pub fn new(command: &str, out_dir: &Path, seed: u64, quiet: bool) -> Result<Self, CliError> {
        fs::create_dir_all(out_dir).map_err(|e| {
            CliError::usage(format!(
                "cannot create output directory {}: {e}",
                out_dir.display()
            ))
        })?;
        Ok(RunContext {
            command: command.to_string(),
            out_dir: out_dir.to_path_buf(),
            seed,
            quiet,
            started: Instant::now(),
            inputs: BTreeMap::new(),
            parameters: BTreeMap::new(),
            results: BTreeMap::new(),
            notes: Vec::new(),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    /// Records an input file in the metadata.
    pub fn input(&mut self, key: &str, path: &Path) {
        self.inputs.insert(key.to_string(), path.display().to_string());
    }

    /// Records a parameter value in the metadata.
    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.parameters.insert(key.to_string(), v);
    }

    /// Records a scalar result (errors, scores) in the metadata.
    pub fn result(&mut self, key: &str, value: f64) {
        self.results.insert(key.to_string(), value);
    }

    /// Writes raw text under the output directory and records it in the
    /// summary.
    pub fn write_text(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.path(name);
        fs::write(&path, contents).map_err(|e| {
            CliError::Lib(gspkit::Error::Io { path: path.display().to_string(), source: e })
        })?;
        self.wrote(name);
        Ok(())
    }

    /// Records that a file was written through some other channel.
    pub fn wrote(&mut self, name: &str) {
        self.notes.push(format!("wrote {}", self.path(name).display()));
    }

    /// Writes `metadata.json` and prints the summary. Consumes the
    /// context so nothing lands after the metadata record.
    pub fn finish(self) -> Result<(), CliError> {
        let metadata = Metadata {
            command: &self.command,
            inputs: &self.inputs,
            parameters: &self.parameters,
            seed: self.seed,
            library_version: env!("CARGO_PKG_VERSION"),
            wall_time_seconds: self.started.elapsed().as_secs_f64(),
            results: &self.results,
        };
        let path = self.path("metadata.json");
        let mut text = serde_json::to_string_pretty(&metadata)
            .map_err(|e| CliError::usage(format!("cannot encode metadata: {e}")))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| {
            CliError::Lib(gspkit::Error::Io { path: path.display().to_string(), source: e })
        })?;
        if !self.quiet {
            for line in &self.notes {
                println!("{line}");
            }
            for (key, value) in &self.results {
                println!("{key} = {value:.6e}");
            }
            println!("wrote {}", path.display());
        }
        Ok(())
    }
}
