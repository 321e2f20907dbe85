//! `uord`: command-line checker for uniform preorders, their completions and
//! partial combinatory algebras. Every command prints a JSON (or text)
//! report; the exit code is 0 when every law passes, 1 when one fails and 2
//! on usage or input errors.

mod commands;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::commands::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "uord", version, about = "Checks uniform preorders, their completions and PCAs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// TOML file with defaults for the options below; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Record wall-clock time in `runtime_ms`.
    #[arg(long, global = true)]
    timing: bool,
    /// Re-validate every emitted witness and counterexample.
    #[arg(long, global = true)]
    recheck: bool,
    /// Largest index set of the audited universe.
    #[arg(long, global = true)]
    max_index: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Reduction steps per evaluation.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Samples for checks over infinite carriers.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Add the identity to a basis that lacks a reflexive relation.
    #[arg(long, global = true)]
    auto_reflexive: bool,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Load a structure file and report its generators.
    Validate { file: PathBuf },
    /// Print the saturated generator antichain.
    Saturate { file: PathBuf },
    /// Decide φ ≤ ψ in the fiber of fam; predicates are JSON name arrays.
    Leq {
        file: PathBuf,
        #[arg(long)]
        phi: String,
        #[arg(long)]
        psi: String,
    },
    /// Decide whether a map is monotone.
    Monotone {
        file: PathBuf,
        /// Target structure; defaults to the source.
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long)]
        map: String,
    },
    /// Decide whether g is right adjoint to f: A → B.
    Adjunction {
        file: PathBuf,
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// Check the file's (meet, top), or search one.
    Cartesian {
        file: PathBuf,
        #[arg(long)]
        search: bool,
    },
    /// Build the down-set completion and check its unit.
    Dcomplete { file: PathBuf },
    /// Search a relational completeness witness.
    Relcomp { file: PathBuf },
    /// Decide whether every generator is single-valued.
    Dco { file: PathBuf },
    /// Bounded discreteness of a predicate of fam.
    Discrete {
        file: PathBuf,
        /// Defaults to the identity predicate.
        #[arg(long)]
        delta: Option<String>,
        #[arg(long, default_value_t = 4)]
        span: usize,
    },
    /// Bounded ∃-primality of a subset-valued predicate of fam(D).
    Prime {
        file: PathBuf,
        /// JSON array of arrays of names.
        #[arg(long)]
        pi: String,
    },
    /// Bounded law audit of fam or fam(D).
    Audit {
        file: PathBuf,
        #[arg(long, conflicts_with = "rtr_char")]
        tripos: bool,
        #[arg(long)]
        rtr_char: bool,
        /// Audit fam(D(U)) instead of fam(U).
        #[arg(long)]
        dcomplete: bool,
    },
    /// Search a left adjoint of the singleton map.
    Dalgebra { file: PathBuf },
    /// Evaluate a closed term.
    PcaEval {
        file: PathBuf,
        #[arg(long)]
        term: String,
    },
    /// Compile a polynomial by bracket abstraction and check the result.
    PcaCompile {
        file: PathBuf,
        #[arg(long)]
        term: String,
        /// Comma-separated variables, outermost first.
        #[arg(long)]
        vars: String,
    },
    /// Check the k and s laws and the filter axioms.
    PcaCheck { file: PathBuf },
    /// Convert between relative PCAs and DCOs.
    Bridge {
        file: PathBuf,
        #[arg(long, conflicts_with = "to_dco", required_unless_present = "to_dco")]
        to_rpca: bool,
        #[arg(long)]
        to_dco: bool,
        /// Fiber inequality to realize (with --to-dco).
        #[arg(long, requires = "psi")]
        phi: Option<String>,
        #[arg(long, requires = "phi")]
        psi: Option<String>,
        /// Polynomial whose partial evaluation is tested (with --to-rpca).
        #[arg(long, requires = "vars")]
        polynomial: Option<String>,
        #[arg(long)]
        vars: Option<String>,
    },
    /// Cross-validate relational completeness against the tripos audit.
    Corpus {
        #[arg(long, default_value_t = 3)]
        semilattices_upto: usize,
        #[arg(long, default_value_t = 100)]
        random: usize,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Validate { .. } => "validate",
            Cmd::Saturate { .. } => "saturate",
            Cmd::Leq { .. } => "leq",
            Cmd::Monotone { .. } => "monotone",
            Cmd::Adjunction { .. } => "adjunction",
            Cmd::Cartesian { .. } => "cartesian",
            Cmd::Dcomplete { .. } => "dcomplete",
            Cmd::Relcomp { .. } => "relcomp",
            Cmd::Dco { .. } => "dco",
            Cmd::Discrete { .. } => "discrete",
            Cmd::Prime { .. } => "prime",
            Cmd::Audit { .. } => "audit",
            Cmd::Dalgebra { .. } => "dalgebra",
            Cmd::PcaEval { .. } => "pca-eval",
            Cmd::PcaCompile { .. } => "pca-compile",
            Cmd::PcaCheck { .. } => "pca-check",
            Cmd::Bridge { .. } => "bridge",
            Cmd::Corpus { .. } => "corpus",
        }
    }
}

/// Defaults read from `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    max_index: Option<usize>,
    seed: Option<u64>,
    budget: Option<u64>,
    samples: Option<usize>,
    enumeration_cap: Option<u64>,
    auto_reflexive: Option<bool>,
}

/// The effective configuration, embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct Config {
    pub max_index: usize,
    pub seed: u64,
    pub budget: u64,
    pub samples: usize,
    pub enumeration_cap: u64,
    pub auto_reflexive: bool,
}

fn effective_config(cli: &Cli) -> Result<Config, String> {
    let file = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            toml::from_str::<ConfigFile>(&text).map_err(|e| format!("config {}: {e}", p.display()))?
        }
        None => ConfigFile::default(),
    };
    Ok(Config {
        max_index: cli.max_index.or(file.max_index).unwrap_or(3),
        seed: cli.seed.or(file.seed).unwrap_or(0),
        budget: cli.budget.or(file.budget).unwrap_or(10_000),
        samples: cli.samples.or(file.samples).unwrap_or(100),
        enumeration_cap: file.enumeration_cap.unwrap_or(65_536),
        auto_reflexive: cli.auto_reflexive || file.auto_reflexive.unwrap_or(false),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match effective_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let start = Instant::now();
    let ctx = Ctx {
        cfg,
        recheck: cli.recheck,
    };
    let mut report = match commands::run(&cli.cmd, cli.cmd.name(), &ctx) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.timing {
        report.runtime_ms = Some(start.elapsed().as_millis() as u64);
    }
    match cli.format {
        Format::Json => print!("{}", report.to_json()),
        Format::Text => print!("{}", report.to_text()),
    }
    ExitCode::from(report.exit_code())
}
