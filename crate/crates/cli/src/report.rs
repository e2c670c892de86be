//! Reports, artifacts and run manifests.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use cbf_core::matrix::Mat;
use cbf_core::scalar::Scalar;
use cbf_core::series::TruncatedSeries;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{Config, Mode};
use crate::error::CliResult;

/// One named pass/fail check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

/// The deterministic result of one command.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub mode: Mode,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub data: Value,
    /// Lines printed to stdout.
    #[serde(skip)]
    pub lines: Vec<String>,
    /// Extra artifacts as `(file name, bytes)`.
    #[serde(skip)]
    pub files: Vec<(String, Vec<u8>)>,
    /// Seeds the run drew from.
    #[serde(skip)]
    pub seeds: Vec<u64>,
    /// Wall-clock data, kept out of the digest.
    #[serde(skip)]
    pub timing: Option<Value>,
}

impl Report {
    pub fn new(command: &str, mode: Mode) -> Self {
        Report {
            command: command.into(),
            mode,
            passed: true,
            checks: Vec::new(),
            data: Value::Null,
            lines: Vec::new(),
            files: Vec::new(),
            seeds: Vec::new(),
            timing: None,
        }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool) {
        self.passed &= passed;
        self.checks.push(Check { name: name.into(), passed });
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    /// `report.json` bytes.
    pub fn json_bytes(&self) -> CliResult<Vec<u8>> {
        let mut v = serde_json::to_vec_pretty(self)?;
        v.push(b'\n');
        Ok(v)
    }

    /// SHA-256 over `report.json` and every artifact, in order.
    pub fn digest(&self) -> CliResult<String> {
        let mut h = Sha256::new();
        h.update(self.json_bytes()?);
        for (name, bytes) in &self.files {
            h.update(name.as_bytes());
            h.update(bytes);
        }
        Ok(hex(&h.finalize()))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Truncation settings recorded in a manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub max_len: usize,
    pub max_n: usize,
    pub degree: u32,
}

/// Everything needed to replay a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub config: Config,
    pub config_hash: String,
    pub seeds: Vec<u64>,
    pub truncation: Truncation,
    pub scalar_mode: Mode,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub result_digest: String,
}

/// Seconds since the epoch.
pub fn now_unix() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// SHA-256 of the canonical JSON of a config.
pub fn config_hash(cfg: &Config) -> CliResult<String> {
    Ok(hex(&Sha256::digest(serde_json::to_vec(cfg)?)))
}

impl RunManifest {
    pub fn new(command: &[String], cfg: &Config, report: &Report, started: u64) -> CliResult<Self> {
        Ok(RunManifest {
            command: command.to_vec(),
            config: cfg.clone(),
            config_hash: config_hash(cfg)?,
            seeds: report.seeds.clone(),
            truncation: Truncation { max_len: cfg.max_len, max_n: cfg.max_n, degree: cfg.degree },
            scalar_mode: cfg.mode,
            started_unix: started,
            finished_unix: now_unix(),
            result_digest: report.digest()?,
        })
    }
}

/// Writes `report.json`, the artifacts and `manifest.json` into `dir`.
pub fn write_all(dir: &Path, report: &Report, manifest: &RunManifest) -> CliResult<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), report.json_bytes()?)?;
    for (name, bytes) in &report.files {
        std::fs::write(dir.join(name), bytes)?;
    }
    if let Some(t) = &report.timing {
        std::fs::write(dir.join("timing.json"), serde_json::to_vec_pretty(t)?)?;
    }
    std::fs::write(dir.join("manifest.json"), serde_json::to_vec_pretty(manifest)?)?;
    Ok(())
}

/// Exact entries as strings, floats as numbers.
pub fn mat_json<S: Scalar>(m: &Mat<S>) -> Value {
    let n = m.dim();
    let rows: Vec<Value> = (0..n)
        .map(|i| {
            Value::Array(
                (0..n)
                    .map(|j| {
                        let x = m.get(i, j);
                        if S::is_exact() {
                            Value::String(x.to_string())
                        } else {
                            json!(x.to_f64())
                        }
                    })
                    .collect(),
            )
        })
        .collect();
    Value::Array(rows)
}

/// `[{degree: [d_b, d_c, d_d], matrix}, …]` in degree order.
pub fn series_json<S: Scalar>(s: &TruncatedSeries<S>) -> Value {
    Value::Array(s.terms().map(|(d, m)| json!({ "degree": d, "matrix": mat_json(m) })).collect())
}
