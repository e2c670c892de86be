//! Run configuration: defaults, then a JSON file, then flags.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Scalar arithmetic.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Arbitrary-precision rationals.
    #[default]
    Exact,
    /// `f64` with a tolerance.
    Float,
}

/// Fully resolved settings of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct Config {
    pub chi: Option<String>,
    pub omega: Option<Vec<usize>>,
    pub blocks: Option<Vec<Vec<usize>>>,
    pub n: usize,
    pub seed: u64,
    pub seeds: u64,
    pub degree: u32,
    pub dim_b: usize,
    pub dim_d: usize,
    pub reduced: usize,
    pub factors: usize,
    pub max_len: usize,
    pub mode: Mode,
    pub tol: f64,
    pub max_n: usize,
    pub lambda: String,
    pub ladder: Option<Vec<u64>>,
    pub instances: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            chi: None,
            omega: None,
            blocks: None,
            n: 4,
            seed: 0,
            seeds: 25,
            degree: 4,
            dim_b: 2,
            dim_d: 4,
            reduced: 2,
            factors: 2,
            max_len: 5,
            mode: Mode::Exact,
            tol: 1e-9,
            max_n: cbf_core::bnc::DEFAULT_MAX_N,
            lambda: "1/2".into(),
            ladder: None,
            instances: 50,
        }
    }
}

/// Flags shared by every command.
#[derive(Args, Clone, Debug, Default)]
pub struct Flags {
    /// JSON config file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Face word such as `llrr`.
    #[arg(long, global = true)]
    pub chi: Option<String>,
    /// Family labels, `0,1,1,0` or `0110`.
    #[arg(long, global = true)]
    pub omega: Option<String>,
    /// One-based blocks as JSON, e.g. `[[1,3],[2]]`.
    #[arg(long, global = true)]
    pub blocks: Option<String>,
    /// Word length or largest order.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Base random seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of seeds for sweeps.
    #[arg(long, global = true)]
    pub seeds: Option<u64>,
    /// Series truncation degree.
    #[arg(long, global = true)]
    pub degree: Option<u32>,
    /// Size of the B matrix algebra
    #[arg(long = "dimB", global = true)]
    pub dim_b: Option<usize>,
    /// Size of the D matrix algebra, a multiple of dimB
    #[arg(long = "dimD", global = true)]
    pub dim_d: Option<usize>,
    /// Reduced rank of each factor.
    #[arg(long, global = true)]
    pub reduced: Option<usize>,
    /// Number of free factors (families).
    #[arg(long, global = true)]
    pub factors: Option<usize>,
    /// Truncation length of the free product.
    #[arg(long = "max-len", global = true)]
    pub max_len: Option<usize>,
    #[arg(long, value_enum, global = true)]
    pub mode: Option<Mode>,
    /// Float tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Lattice size cap.
    #[arg(long = "max-n", env = "CBF_MAX_N", global = true)]
    pub max_n: Option<usize>,
    /// Poisson rate, `p/q` or decimal.
    #[arg(long, global = true)]
    pub lambda: Option<String>,
    /// Comma-separated values of N.
    #[arg(long, global = true, value_delimiter = ',')]
    pub ladder: Option<Vec<u64>>,
    /// Instances for transform sweeps.
    #[arg(long, global = true)]
    pub instances: Option<u64>,
    /// Output directory for reports and the manifest.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// Parses `0,1,1` or `011`.
pub fn parse_omega(s: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::Usage(format!("cannot read ω from {s:?}"));
    if s.contains(',') {
        s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
    } else {
        s.chars().map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad)).collect()
    }
}

impl Flags {
    /// Defaults, overridden by the config file, overridden by flags.
    pub fn resolve(&self) -> CliResult<Config> {
        let mut c = match &self.config {
            Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
            None => Config::default(),
        };
        if let Some(v) = &self.chi {
            c.chi = Some(v.clone());
        }
        if let Some(v) = &self.omega {
            c.omega = Some(parse_omega(v)?);
        }
        if let Some(v) = &self.blocks {
            c.blocks = Some(serde_json::from_str(v)?);
        }
        macro_rules! take {
            ($($f:ident),*) => {$(if let Some(v) = &self.$f { c.$f = v.clone(); })*};
        }
        take!(n, seed, seeds, degree, dim_b, dim_d, reduced, factors, max_len, mode, tol, max_n, lambda, instances);
        if let Some(v) = &self.ladder {
            c.ladder = Some(v.clone());
        }
        Ok(c)
    }
}
