mod input;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ghz_bqt::bqt::{enumerate_branches_with, CorrectionTable};
use ghz_bqt::ghz::{entanglement_swap, GhzIndex};
use ghz_bqt::parties::{run_session, trial_seed, Cooperation};
use ghz_bqt::verify::{run_all_with, VerifyConfig, DEFAULT_SEED};
use rayon::prelude::*;
use serde::Serialize;

use input::{parse_seed, InputArgs};
use report::{LeafReport, SessionConfig, SessionReport, SwapTable, VerifyReport};

/// Directory reports are written to when `--out` is not given.
const OUT_DIR_ENV: &str = "BQT_OUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "bqt",
    version,
    about = "Bidirectional teleportation of EPR states over two GHZ states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(clap::Args, Debug)]
struct OutputArgs {
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory used when --out is absent
    #[arg(long, env = OUT_DIR_ENV, hide_env_values = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate all 64 measurement branches with corrections and fidelities
    Enumerate {
        #[command(flatten)]
        inputs: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run seeded two-party sessions
    Run {
        #[command(flatten)]
        inputs: InputArgs,
        #[arg(long, value_parser = parse_seed, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value = "full")]
        cooperation: Cooperation,
        /// Embed each session's transcript in the report
        #[arg(long)]
        transcripts: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Entanglement swap between |Psi_i> and |Psi_j>
    Swap {
        #[arg(default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..8))]
        i: u8,
        #[arg(default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..8))]
        j: u8,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the full verification suite
    Verify {
        #[arg(long, value_parser = parse_seed, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Check this correction table instead of the bundled one
        #[arg(long)]
        table: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the bundled correction table
    Corrections {
        /// Re-derive the table by search instead of loading the bundled copy
        #[arg(long)]
        derive: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit<R: Serialize>(
    report: &R,
    text: impl FnOnce() -> String,
    output: &OutputArgs,
    name: &str,
) -> Result<()> {
    let body = match output.format {
        Format::Json => serde_json::to_string_pretty(report)? + "\n",
        Format::Text => text(),
    };
    let ext = match output.format {
        Format::Json => "json",
        Format::Text => "txt",
    };
    let path = match (&output.out, &output.out_dir) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => Some(dir.join(format!("{name}.{ext}"))),
        (None, None) => None,
    };
    match path {
        Some(p) => write_file(&p, &body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

/// Runs a command and reports whether every check passed.
fn execute(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Enumerate { inputs, output } => {
            let (alpha, beta) = inputs.resolve()?;
            let table = CorrectionTable::builtin();
            let leaves = enumerate_branches_with(&alpha, &beta, table)?;
            let r = LeafReport::new(&alpha, &beta, &leaves, table);
            emit(&r, || r.text(), &output, "enumerate")?;
            Ok(r.passed)
        }
        Command::Run {
            inputs,
            seed,
            trials,
            cooperation,
            transcripts,
            output,
        } => {
            let (alpha, beta) = inputs.resolve()?;
            let sessions = (0..trials)
                .into_par_iter()
                .map(|i| {
                    let s = trial_seed(seed, i);
                    run_session(alpha, beta, s, cooperation).map(|r| (s, r))
                })
                .collect::<ghz_bqt::Result<Vec<_>>>()?;
            let config = SessionConfig {
                alpha: report::amplitudes(&alpha),
                beta: report::amplitudes(&beta),
                seed,
                trials: trials as usize,
                cooperation,
            };
            let r = SessionReport::new(config, sessions, transcripts);
            emit(&r, || r.text(), &output, "run")?;
            Ok(r.passed)
        }
        Command::Swap { i, j, output } => {
            let (gi, gj) = (GhzIndex::new(i.into())?, GhzIndex::new(j.into())?);
            let r = SwapTable::new(i.into(), j.into(), &entanglement_swap(gi, gj)?);
            emit(&r, || r.text(), &output, "swap")?;
            Ok(r.passed)
        }
        Command::Verify {
            seed,
            table,
            output,
        } => {
            let (loaded, source) = match &table {
                Some(p) => {
                    let json = std::fs::read_to_string(p)
                        .with_context(|| format!("reading {}", p.display()))?;
                    let t = CorrectionTable::from_json(&json)
                        .with_context(|| format!("parsing {}", p.display()))?;
                    (t, p.display().to_string())
                }
                None => (CorrectionTable::builtin().clone(), "builtin".to_owned()),
            };
            let cfg = VerifyConfig {
                seed,
                ..VerifyConfig::default()
            };
            let r = VerifyReport::new(run_all_with(&cfg, &loaded), source);
            emit(&r, || r.text(), &output, "verify")?;
            Ok(r.passed)
        }
        Command::Corrections { derive, out } => {
            let json = if derive {
                CorrectionTable::derive().to_json()
            } else {
                CorrectionTable::builtin().to_json()
            };
            match out {
                Some(p) => write_file(&p, &json)?,
                None => print!("{json}"),
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
