// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! Experiment runner: config loading, seeding, CSV and manifest output.

pub mod config;
mod experiments;
pub mod suite;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub use suite::{criteria, repro_suite, CriterionOutcome, CriterionSpec, Tolerances};

/// Names accepted by [`run`].
pub const EXPERIMENTS: [&str; 13] = [
    "grape",
    "twirl",
    "certify",
    "rb",
    "qec",
    "distill",
    "dqc1",
    "contextuality",
    "weak",
    "ising",
    "xxz",
    "transfer",
    "spectrum",
];

/// Experiments whose CSV is a pure function of config and seed with no sampling.
pub const EXACT_EXPERIMENTS: [&str; 10] =
    ["grape", "qec", "distill", "dqc1", "contextuality", "weak", "ising", "xxz", "transfer", "spectrum"];

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("unknown experiment '{0}'")]
    UnknownExperiment(String),
    #[error("bad config: {0}")]
    BadConfig(String),
    #[error("GRAPE did not converge: fidelity {fidelity:.6} after {iterations} iterations ({status})")]
    NotConverged { fidelity: f64, iterations: usize, status: String },
    #[error(transparent)]
    Failed(#[from] crate::Error),
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Failed(e.into())
    }
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::UnknownExperiment(_) => 2,
            HarnessError::BadConfig(_) => 3,
            HarnessError::NotConverged { .. } => 4,
            HarnessError::Failed(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::UnknownExperiment(_) => "unknown_experiment",
            HarnessError::BadConfig(_) => "bad_config",
            HarnessError::NotConverged { .. } => "not_converged",
            HarnessError::Failed(_) => "failed",
        }
    }

    /// Machine-readable form printed by the CLI.
    pub fn to_json(&self) -> Value {
        let mut v = json!({ "error": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() });
        if let HarnessError::UnknownExperiment(_) = self {
            v["valid"] = json!(EXPERIMENTS);
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub experiment: String,
    pub config: Option<PathBuf>,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Finite-readout override for sampled experiments.
    pub shots: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub experiment: String,
    pub seed: u64,
    pub config: Option<PathBuf>,
    pub shots: Option<u64>,
    /// SHA-256 of every input file, keyed by name.
    pub fixtures: BTreeMap<String, String>,
    pub outputs: Vec<PathBuf>,
    pub wall_time_s: f64,
    pub version: String,
    pub summary: Value,
}

/// CSV table with a fixed header; floats are written losslessly.
#[derive(Debug, Clone, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }
}

/// Result of one experiment before it is written out.
pub(crate) struct Output {
    pub table: Table,
    pub summary: Value,
    /// Extra files, `(name, contents)`.
    pub extra: Vec<(String, String)>,
    pub fixtures: BTreeMap<String, String>,
    /// Error to report after the files are written.
    pub deferred: Option<HarnessError>,
}

impl Output {
    pub fn new(table: Table, summary: Value) -> Self {
        Output { table, summary, extra: Vec::new(), fixtures: BTreeMap::new(), deferred: None }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub(crate) fn parse_config<T: serde::de::DeserializeOwned + Default>(
    text: Option<&str>,
) -> Result<T, HarnessError> {
    match text {
        None => Ok(T::default()),
        Some(t) => serde_json::from_str(t).map_err(|e| HarnessError::BadConfig(e.to_string())),
    }
}

/// Runs one experiment and writes `<name>.csv` and `<name>.manifest.json`
/// (plus any extra files) into `out_dir`.
pub fn run(opts: &RunOptions) -> Result<RunManifest, HarnessError> {
    let name = opts.experiment.as_str();
    if !EXPERIMENTS.contains(&name) {
        return Err(HarnessError::UnknownExperiment(name.to_string()));
    }
    let text = match &opts.config {
        Some(p) => Some(fs::read_to_string(p).map_err(|e| HarnessError::BadConfig(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let base = opts.config.as_deref().and_then(Path::parent).map(Path::to_path_buf).unwrap_or_default();
    let start = Instant::now();
    let out = experiments::dispatch(name, text.as_deref(), &base, opts.seed, opts.shots)?;
    fs::create_dir_all(&opts.out_dir)?;
    let mut outputs = Vec::new();
    let csv = opts.out_dir.join(format!("{name}.csv"));
    fs::write(&csv, out.table.to_csv())?;
    outputs.push(csv);
    for (file, body) in &out.extra {
        let p = opts.out_dir.join(file);
        fs::write(&p, body)?;
        outputs.push(p);
    }
    let mut fixtures = out.fixtures;
    if let Some(t) = &text {
        fixtures.insert("config".into(), sha256_hex(t.as_bytes()));
    }
    let manifest = RunManifest {
        experiment: name.to_string(),
        seed: opts.seed,
        config: opts.config.clone(),
        shots: opts.shots,
        fixtures,
        outputs: outputs.clone(),
        wall_time_s: start.elapsed().as_secs_f64(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        summary: out.summary,
    };
    let mpath = opts.out_dir.join(format!("{name}.manifest.json"));
    fs::write(&mpath, serde_json::to_string_pretty(&manifest).map_err(crate::Error::from)?)?;
    match out.deferred {
        Some(e) => Err(e),
        None => Ok(manifest),
    }
}
