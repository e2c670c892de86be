//! Argument parsing and the run loop shared by the binary and the tests.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::commands::{execute, Leaf};
use crate::config::Flags;
use crate::error::{CliError, CliResult};
use crate::report::{now_unix, write_all, Report, RunManifest};

#[derive(Parser, Debug)]
#[command(name = "cbf", version, about = "Batch verifier for operator-valued conditionally bi-free identities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Group,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Debug)]
pub enum Group {
    /// Bi-non-crossing partition lattices.
    Bnc {
        #[command(subcommand)]
        cmd: BncCmd,
    },
    /// Truncated free-product representations.
    Rep {
        #[command(subcommand)]
        cmd: RepCmd,
    },
    /// Cumulant evaluation and vanishing tests.
    Cumulants {
        #[command(subcommand)]
        cmd: CumulantsCmd,
    },
    /// Combinatorial moment formulas against the oracle.
    Moments {
        #[command(subcommand)]
        cmd: MomentsCmd,
    },
    /// Transform identities on truncated series.
    Rtransform {
        #[command(subcommand)]
        cmd: RtransformCmd,
    },
    /// Limit theorems on ladders of N.
    Limits {
        #[command(subcommand)]
        cmd: LimitsCmd,
    },
    /// The acceptance suite.
    Suite {
        #[command(subcommand)]
        cmd: SuiteCmd,
    },
    /// Re-runs a manifest and compares result digests.
    Replay { manifest: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum BncCmd {
    /// Lists BNC(χ) in canonical order.
    Enumerate,
    /// Möbius values from the bottom and zeta∗μ = δ.
    Mobius,
    /// χ-interval decomposition and block kinds of --blocks.
    Intervals,
}

#[derive(Subcommand, Debug)]
pub enum RepCmd {
    /// Builds a random truncated free product.
    Build,
    /// E and F of one word on the oracle.
    Moments,
}

#[derive(Subcommand, Debug)]
pub enum CumulantsCmd {
    /// κ and K of one word.
    Eval,
    /// Mixed cumulants vanish across free families.
    MixedTest,
    /// Product, pair and swap/tail identities.
    ProductTest,
}

#[derive(Subcommand, Debug)]
pub enum MomentsCmd {
    #[command(name = "universal-E")]
    /// Combinatorial E against the oracle.
    UniversalE,
    #[command(name = "universal-F")]
    /// Combinatorial F against the oracle.
    UniversalF,
}

#[derive(Subcommand, Debug)]
pub enum RtransformCmd {
    /// One-sided transforms.
    Lemma,
    /// The two-sided partial transform.
    Theorem,
}

#[derive(Subcommand, Debug)]
pub enum LimitsCmd {
    /// Gaussian limit of normalized sums.
    Clt,
    /// Compound Poisson limit.
    Poisson,
    /// Moment and cumulant limits agree.
    General,
}

#[derive(Subcommand, Debug)]
pub enum SuiteCmd {
    /// Runs the ten acceptance criteria.
    Acceptance,
}

impl Group {
    fn leaf(&self) -> Option<Leaf> {
        Some(match self {
            Group::Bnc { cmd } => match cmd {
                BncCmd::Enumerate => Leaf::BncEnumerate,
                BncCmd::Mobius => Leaf::BncMobius,
                BncCmd::Intervals => Leaf::BncIntervals,
            },
            Group::Rep { cmd } => match cmd {
                RepCmd::Build => Leaf::RepBuild,
                RepCmd::Moments => Leaf::RepMoments,
            },
            Group::Cumulants { cmd } => match cmd {
                CumulantsCmd::Eval => Leaf::CumulantsEval,
                CumulantsCmd::MixedTest => Leaf::CumulantsMixedTest,
                CumulantsCmd::ProductTest => Leaf::CumulantsProductTest,
            },
            Group::Moments { cmd } => match cmd {
                MomentsCmd::UniversalE => Leaf::MomentsUniversalE,
                MomentsCmd::UniversalF => Leaf::MomentsUniversalF,
            },
            Group::Rtransform { cmd } => match cmd {
                RtransformCmd::Lemma => Leaf::RtransformLemma,
                RtransformCmd::Theorem => Leaf::RtransformTheorem,
            },
            Group::Limits { cmd } => match cmd {
                LimitsCmd::Clt => Leaf::LimitsClt,
                LimitsCmd::Poisson => Leaf::LimitsPoisson,
                LimitsCmd::General => Leaf::LimitsGeneral,
            },
            Group::Suite { cmd: SuiteCmd::Acceptance } => Leaf::SuiteAcceptance,
            Group::Replay { .. } => return None,
        })
    }
}

/// Runs a parsed invocation, printing to `out`. Returns the exit code:
/// 0 when every check passed, 1 otherwise.
pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<i32> {
    let started = now_unix();
    match &cli.command {
        Group::Replay { manifest } => {
            let m: RunManifest = serde_json::from_str(&std::fs::read_to_string(manifest)?)?;
            let leaf = Leaf::from_path(&m.command)?;
            let report = execute(leaf, &m.config)?;
            emit(out, &report)?;
            let digest = report.digest()?;
            let same = digest == m.result_digest;
            writeln!(out, "replay digest match: {same}")?;
            if let Some(dir) = &cli.flags.out {
                let fresh = RunManifest::new(&m.command, &m.config, &report, started)?;
                write_all(dir, &report, &fresh)?;
            }
            Ok(if same { 0 } else { 1 })
        }
        g => {
            let leaf = g.leaf().ok_or_else(|| CliError::Usage("no command".into()))?;
            let cfg = cli.flags.resolve()?;
            let report = execute(leaf, &cfg)?;
            emit(out, &report)?;
            if let Some(dir) = &cli.flags.out {
                let manifest = RunManifest::new(&leaf.path(), &cfg, &report, started)?;
                write_all(dir, &report, &manifest)?;
            }
            Ok(if report.passed { 0 } else { 1 })
        }
    }
}

fn emit(out: &mut dyn Write, report: &Report) -> CliResult<()> {
    for l in &report.lines {
        writeln!(out, "{l}")?;
    }
    writeln!(out, "passed: {}", report.passed)?;
    Ok(())
}

/// The failure record printed on stderr.
pub fn failure_json(e: &CliError) -> String {
    json!({ "error": e.to_string(), "kind": e.kind() }).to_string()
}
