//! `darboux`: command-line driver for the Darboux transformation library.
//!
//! Exit status: 0 when every residual is within tolerance, 1 when a residual
//! exceeds it, 2 when the run could not be carried out. In both failure cases
//! a one-line JSON object with a `reason` is printed on stderr.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use darboux_core::io::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "darboux", version, about = "Discrete Darboux transformations of Jacobi operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build L and h1 from an operator and a seed; writes transformed.json, darboux*.json and report.json.
    Transform(TransformArgs),
    /// Check the intertwining and factorization identities; writes verify.json.
    Verify(TransformArgs),
    /// Check the block superalgebra; writes susy.json.
    SusyCheck(TransformArgs),
    /// Partner of the free particle in the oscillator basis; writes the coefficient and missing-state sequences.
    ModelFreeParticle(Common),
    /// Power-law and stretched-exponential fits of the missing states; writes asymptotics.json.
    Asymptotics(AsymptoticsArgs),
    /// Dump the sequences stored in a JSON file as `n,re,im` CSV.
    Export(ExportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Run configuration (JSON); flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    const_a: Option<f64>,
    /// Number of sites.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    tol_verify: Option<f64>,
    #[arg(long)]
    tol_seed: Option<f64>,
    /// Random probes added to the unit-vector probes.
    #[arg(long)]
    probes: Option<usize>,
    #[arg(long)]
    rng_seed: Option<u64>,
    /// Encoding of sequence outputs; reports are always JSON.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

impl Common {
    pub fn run_config(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.lambda {
            cfg.lambda = v;
        }
        if let Some(v) = self.const_a {
            cfg.const_a = v;
        }
        if let Some(v) = self.n {
            cfg.n_sites = v;
        }
        if let Some(v) = self.tol_verify {
            cfg.tolerances.verify = v;
        }
        if let Some(v) = self.tol_seed {
            cfg.tolerances.seed_residual = v;
        }
        if let Some(v) = self.probes {
            cfg.probe_count = v;
        }
        if let Some(v) = self.rng_seed {
            cfg.rng_seed = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug, Clone)]
pub struct TransformArgs {
    #[command(flatten)]
    common: Common,
    /// Operator file (JSON). Without it, the Laplacian on `--n` sites is used.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Seed sequence as `n,re,im` CSV. Without it the seed is generated at `--lambda`
    /// (recurrence for step-1 operators, Hermite seed for step-2 operators).
    #[arg(long)]
    seed: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct AsymptoticsArgs {
    #[command(flatten)]
    common: Common,
    /// First index of the fit window (default N/5).
    #[arg(long)]
    fit_min: Option<usize>,
    /// Last index of the fit window (default N-1).
    #[arg(long)]
    fit_max: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct ExportArgs {
    /// Operator, Darboux operator or sequence file (JSON).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
}

pub enum Outcome {
    Passed,
    Failed { worst: f64, tolerance: f64 },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Transform(a) => commands::transform(a),
        Command::Verify(a) => commands::verify(a),
        Command::SusyCheck(a) => commands::susy_check(a),
        Command::ModelFreeParticle(c) => commands::model_free_particle(c),
        Command::Asymptotics(a) => commands::asymptotics(a),
        Command::Export(a) => commands::export(a),
    };
    match result {
        Ok(Outcome::Passed) => ExitCode::SUCCESS,
        Ok(Outcome::Failed { worst, tolerance }) => {
            let msg = serde_json::json!({
                "status": "failed",
                "reason": "residual exceeds tolerance",
                "worst_residual": worst,
                "tolerance": tolerance,
            });
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            let msg = serde_json::json!({ "status": "error", "reason": format!("{e:#}") });
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
