//! `shiftinv` — decide invertibility of `aI - bW`, export spectra of
//! weighted shifts and corroborate verdicts on a grid.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 bad configuration or
//! arguments, 3 verdict undecidable.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use shiftinv_core::analysis::{decide, Verdict};
use shiftinv_core::config::{parse_field, to_canonical_json, Config, ConfigError};
use shiftinv_core::oracle::{invertibility_evidence, EvidenceRecord};
use shiftinv_core::spectrum::{radius_bound, radius_lebesgue, shift_spectrum};

const EXIT_CONFIG: u8 = 2;
const EXIT_UNDECIDABLE: u8 = 3;

#[derive(Parser)]
#[command(name = "shiftinv", version, about = "Invertibility of binomial functional operators aI - bW")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide one- and two-sided invertibility; prints the report as JSON.
    Analyze {
        #[command(flatten)]
        io: Io,
    },
    /// Spectrum of the weighted shift `dW` as CSV.
    Spectrum {
        #[command(flatten)]
        io: Io,
        /// Weight `d(t)`.
        #[arg(long, default_value = "1")]
        weight: String,
        /// Samples per arc for the curve part.
        #[arg(long, default_value_t = 512)]
        samples: usize,
    },
    /// Periodic structure of the shift (m, Λ, Y, arcs with τ₋/τ₊).
    Decompose {
        #[command(flatten)]
        io: Io,
    },
    /// Closed-form spectral radius of `gW` on L^p and the bound on X.
    Radius {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value = "1")]
        weight: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// Grid evidence for the verdict, with an agreement flag.
    Verify {
        #[command(flatten)]
        io: Io,
    },
}

#[derive(Args)]
struct Io {
    /// JSON configuration file.
    #[arg(short, long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

impl Io {
    fn load(&self) -> Result<Config> {
        let text = fs::read_to_string(&self.config)
            .map_err(|e| ConfigError::Invalid { field: "config", message: format!("{}: {e}", self.config.display()) })?;
        Ok(Config::from_json(&text)?)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.output {
            Some(path) => write_file(path, text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[derive(Serialize)]
struct RadiusOutput {
    weight: String,
    m: usize,
    p: f64,
    /// `r(gW)` on `L^p`.
    radius_lebesgue: f64,
    /// Upper bound for `r(gW)` on the configured space.
    radius_bound: f64,
    alpha: f64,
    beta: f64,
}

#[derive(Serialize)]
struct VerifyOutput {
    verdict: Verdict,
    evidence: EvidenceRecord,
    agreement: bool,
}

/// Runs one command; `Ok(true)` means the verdict was undecidable.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Analyze { io } => {
            let cfg = io.load()?;
            let report = decide(&cfg.operator()?)?;
            io.emit(&to_canonical_json(&report)?)?;
            Ok(report.verdict == Verdict::Undecidable)
        }
        Command::Spectrum { io, weight, samples } => {
            let cfg = io.load()?;
            let d = parse_field("--weight", &weight)?;
            let shift = cfg.shift()?;
            let structure = cfg.structure(&shift)?;
            let ss = shift_spectrum(&d, &shift, &structure, &cfg.space()?, samples)?;
            for w in &ss.warnings {
                eprintln!("warning: {w}");
            }
            io.emit(&ss.to_csv())?;
            Ok(false)
        }
        Command::Decompose { io } => {
            let cfg = io.load()?;
            let shift = cfg.shift()?;
            let structure = cfg.structure(&shift)?;
            io.emit(&to_canonical_json(&structure)?)?;
            Ok(structure.is_uncertain())
        }
        Command::Radius { io, weight, p } => {
            let cfg = io.load()?;
            let g = parse_field("--weight", &weight)?;
            let shift = cfg.shift()?;
            let structure = cfg.structure(&shift)?;
            let space = cfg.space()?;
            let out = RadiusOutput {
                radius_lebesgue: radius_lebesgue(&g, &shift, &structure, p)?,
                radius_bound: radius_bound(&g, &shift, &structure, &space)?,
                weight,
                m: structure.m,
                p,
                alpha: space.alpha,
                beta: space.beta,
            };
            io.emit(&to_canonical_json(&out)?)?;
            Ok(false)
        }
        Command::Verify { io } => {
            let cfg = io.load()?;
            let op = cfg.operator()?;
            let verdict = decide(&op)?.verdict;
            let evidence = invertibility_evidence(&op, &cfg.oracle.grids, cfg.oracle.p, cfg.oracle.seed)?;
            let out = VerifyOutput {
                verdict,
                agreement: evidence.consistent_with(verdict),
                evidence,
            };
            io.emit(&to_canonical_json(&out)?)?;
            Ok(verdict == Verdict::Undecidable)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(EXIT_UNDECIDABLE),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
