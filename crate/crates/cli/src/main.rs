//! `cohsynth`: run the coherence synthesis simulator from the command line.

mod config;
mod experiments;
mod figures;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coherence_synth::validation::run_all;

use config::{EpsSetting, FileConfig, Protocol, SweepConfig, DEFAULT_SAMPLES, DEFAULT_SEED};
use figures::Figure;
use table::{Format, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] coherence_synth::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Run(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cohsynth",
    version,
    about = "Coherence synthesis by pairwise measurements"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One (N, p) point.
    Single(RunArgs),
    /// Every combination of the N and p lists.
    Sweep(RunArgs),
    /// Regenerate the data behind one of the standard plots.
    Figure {
        #[arg(value_enum)]
        which: Figure,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the acceptance checks; exit status 0 only if all pass.
    Validate,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Number of TLS, comma-separated.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    n: Option<Vec<usize>>,
    /// Excitation probability, comma-separated.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    p: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    protocol: Option<Protocol>,
    /// Dephasing factor before the protocol: one value or one per TLS.
    #[arg(long)]
    pre_eps: Option<EpsSetting>,
    /// Dephasing factor after the protocol: one value or one per TLS.
    #[arg(long)]
    post_eps: Option<EpsSetting>,
    /// Repeat-until-success repetition counts, comma-separated.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    rus: Option<Vec<u32>>,
    /// Seed for randomised runs.
    #[arg(long)]
    seed: Option<u64>,
    /// Draw per-TLS p from a window of this width around each p.
    #[arg(long)]
    p_spread: Option<f64>,
    /// Draws per cell when --p-spread is set.
    #[arg(long)]
    samples: Option<usize>,
    /// TOML file with the same keys; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

impl RunArgs {
    fn resolve(self, jobs: Option<usize>) -> Result<SweepConfig, CliError> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let missing = |what: &str| CliError::Usage(format!("--{what} is required"));
        Ok(SweepConfig {
            n_values: self.n.or(file.n).ok_or_else(|| missing("n"))?,
            p_values: self.p.or(file.p).ok_or_else(|| missing("p"))?,
            protocol: self
                .protocol
                .or(file.protocol)
                .unwrap_or(Protocol::Pairwise),
            pre_eps: self.pre_eps.or(file.pre_eps),
            post_eps: self.post_eps.or(file.post_eps),
            rus: self.rus.or(file.rus),
            format: self.output.format.or(file.format).unwrap_or(Format::Csv),
            out: self.output.out.or(file.out),
            seed: self.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            jobs: jobs.or(file.jobs),
            p_spread: self.p_spread.or(file.p_spread),
            samples: self.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES),
        })
    }
}

fn emit(table: &Table, format: Format, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(&mut w, format)?;
            w.flush()?;
        }
        None => {
            let mut w = io::stdout().lock();
            table.write(&mut w, format)?;
        }
    }
    Ok(())
}

fn init_pool(jobs: Option<usize>) -> Result<(), CliError> {
    if let Some(j) = jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Single(args) => {
            let cfg = args.resolve(cli.jobs)?;
            if cfg.n_values.len() != 1 || cfg.p_values.len() != 1 {
                return Err(CliError::Usage(
                    "single takes one N and one p; use sweep for lists".into(),
                ));
            }
            run_grid(cfg)
        }
        Command::Sweep(args) => run_grid(args.resolve(cli.jobs)?),
        Command::Figure { which, output } => {
            init_pool(cli.jobs)?;
            let table = figures::figure(which)?;
            emit(
                &table,
                output.format.unwrap_or(Format::Csv),
                output.out.as_ref(),
            )?;
            Ok(true)
        }
        Command::Validate => {
            init_pool(cli.jobs)?;
            let reports = run_all();
            for r in &reports {
                println!("{r}");
            }
            Ok(reports.iter().all(|r| r.passed))
        }
    }
}

fn run_grid(cfg: SweepConfig) -> Result<bool, CliError> {
    cfg.validate(false)?;
    init_pool(cfg.jobs)?;
    let table = experiments::run(&cfg)?;
    emit(&table, cfg.format, cfg.out.as_ref())?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("cohsynth: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
