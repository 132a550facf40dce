//! Flat `key=value` record of one command invocation.
//!
//! ```text
//! command=bench-synthetic
//! seed=7
//! argv.0=bench-synthetic
//! argv.1=--seed
//! argv.2=7
//! output.0=out/bench.csv
//! metric.crank_min=10
//! time.total_s=1.25
//! ```
//!
//! Metrics hold the shortest round-trip text of each value, so two runs
//! agree bit-exactly iff their metric strings are equal. Timings are kept
//! apart and never compared.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};
use crate::io::{read_bytes, write_bytes};

pub const FILE_NAME: &str = "manifest.txt";

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub seed: u64,
    /// Arguments after the program name.
    pub argv: Vec<String>,
    pub outputs: Vec<PathBuf>,
    pub metrics: BTreeMap<String, String>,
    pub timings: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, argv: &[String]) -> Self {
        RunManifest {
            command: command.to_string(),
            seed,
            argv: argv.to_vec(),
            ..Default::default()
        }
    }

    pub fn metric(&mut self, key: &str, value: impl ToString) {
        self.metrics.insert(key.to_string(), value.to_string());
    }

    /// Shortest round-trip exponent form.
    pub fn metric_f64(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), format!("{value:e}"));
    }

    pub fn timing(&mut self, key: &str, secs: f64) {
        self.timings.insert(key.to_string(), secs);
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    pub fn to_text(&self) -> CliResult<String> {
        let mut s = String::new();
        let mut put = |k: &str, v: &str| -> CliResult<()> {
            if v.contains('\n') || k.contains('=') {
                return Err(CliError::Input(format!("manifest entry {k:?} cannot be stored")));
            }
            let _ = writeln!(s, "{k}={v}");
            Ok(())
        };
        put("command", &self.command)?;
        put("seed", &self.seed.to_string())?;
        for (i, a) in self.argv.iter().enumerate() {
            put(&format!("argv.{i}"), a)?;
        }
        for (i, p) in self.outputs.iter().enumerate() {
            put(&format!("output.{i}"), &p.display().to_string())?;
        }
        for (k, v) in &self.metrics {
            put(&format!("metric.{k}"), v)?;
        }
        for (k, v) in &self.timings {
            put(&format!("time.{k}"), &v.to_string())?;
        }
        Ok(s)
    }

    pub fn parse(text: &str, origin: &str) -> CliResult<Self> {
        let mut m = RunManifest::default();
        let mut argv = BTreeMap::new();
        let mut outputs = BTreeMap::new();
        let mut have_command = false;
        for (i, line) in text.lines().enumerate() {
            let ln = i + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::format(origin, ln, "expected key=value"))?;
            let index = |rest: &str| -> CliResult<usize> {
                rest.parse()
                    .map_err(|_| CliError::format(origin, ln, format!("bad index in {k:?}")))
            };
            if k == "command" {
                m.command = v.to_string();
                have_command = true;
            } else if k == "seed" {
                m.seed = v
                    .parse()
                    .map_err(|_| CliError::format(origin, ln, "seed is not an integer"))?;
            } else if let Some(rest) = k.strip_prefix("argv.") {
                argv.insert(index(rest)?, v.to_string());
            } else if let Some(rest) = k.strip_prefix("output.") {
                outputs.insert(index(rest)?, PathBuf::from(v));
            } else if let Some(rest) = k.strip_prefix("metric.") {
                m.metrics.insert(rest.to_string(), v.to_string());
            } else if let Some(rest) = k.strip_prefix("time.") {
                let t = v
                    .parse()
                    .map_err(|_| CliError::format(origin, ln, "timing is not a number"))?;
                m.timings.insert(rest.to_string(), t);
            } else {
                return Err(CliError::format(origin, ln, format!("unknown key {k:?}")));
            }
        }
        if !have_command {
            return Err(CliError::format(origin, 0, "manifest has no command"));
        }
        if argv.keys().copied().ne(0..argv.len()) {
            return Err(CliError::format(origin, 0, "argv entries are not contiguous"));
        }
        m.argv = argv.into_values().collect();
        m.outputs = outputs.into_values().collect();
        Ok(m)
    }

    pub fn write(&self, dir: &Path) -> CliResult<PathBuf> {
        let path = dir.join(FILE_NAME);
        write_bytes(&path, self.to_text()?.as_bytes())?;
        Ok(path)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let bytes = read_bytes(path)?;
        let text = String::from_utf8(bytes)
            .map_err(|_| CliError::format(&path.display().to_string(), 1, "not UTF-8 text"))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Metric keys whose values differ, including keys present on one
    /// side only.
    pub fn metric_mismatches(&self, other: &RunManifest) -> Vec<String> {
        let mut keys: Vec<&String> = self.metrics.keys().chain(other.metrics.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .filter(|k| self.metrics.get(*k) != other.metrics.get(*k))
            .cloned()
            .collect()
    }
}
