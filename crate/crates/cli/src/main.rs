//! `chatdom`: dominance analytics for group chat transcripts.
//!
//! Subcommands mirror the pipeline order: `stats` and `extract` describe the
//! corpus, `kappa` and `reconcile` handle the human-coded labels, `fit`
//! trains the logistic models, `score` applies a saved model, and `report`
//! summarizes dominance from consensus labels.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use chatdom_core::dominance::SdMode;
use chatdom_core::Error;
use commands::CommandError;
use config::{CommonArgs, FileConfig, RunConfig};

const EXIT_HELP: &str = "Exit codes:
  0  success
  1  i/o failure
  2  transcript or annotation parse error
  3  configuration error
  4  modeling error (single-class response, rank deficiency, column mismatch)
  5  annotation mismatch (unknown keys, unresolved disagreements, bad resolutions)";

#[derive(Parser)]
#[command(
    name = "chatdom",
    version,
    about = "Dominance analytics for group chat transcripts",
    after_help = EXIT_HELP
)]
struct Cli {
    /// JSON run configuration; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SdModeArg {
    Population,
    Sample,
}

impl From<SdModeArg> for SdMode {
    fn from(value: SdModeArg) -> Self {
        match value {
            SdModeArg::Population => SdMode::Population,
            SdModeArg::Sample => SdMode::Sample,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Per-group and corpus-wide descriptive statistics
    Stats {
        #[command(flatten)]
        args: CommonArgs,
    },
    /// Per-comment feature matrix and per-participant aggregates
    Extract {
        #[command(flatten)]
        args: CommonArgs,
    },
    /// Inter-coder reliability: percent agreement and Cohen's kappa
    Kappa {
        #[command(flatten)]
        args: CommonArgs,
    },
    /// Apply consensus resolutions to coder disagreements
    Reconcile {
        #[command(flatten)]
        args: CommonArgs,
        /// CSV of consensus values: group_id,seq,resolved
        #[arg(long)]
        resolutions: Option<PathBuf>,
    },
    /// Fit the logistic models and emit a comparison report
    Fit {
        #[command(flatten)]
        args: CommonArgs,
        /// Convergence tolerance on the score max-norm
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Coefficient bound for the separation diagnostic
        #[arg(long)]
        beta_bound: Option<f64>,
        /// Optional L2 penalty for exploratory fits near separation
        #[arg(long)]
        ridge: Option<f64>,
        /// Use coder A's label where disagreements were never reconciled
        #[arg(long)]
        fallback_coder_a: bool,
    },
    /// Score comments with a fitted model, then report dominance
    Score {
        #[command(flatten)]
        args: CommonArgs,
        /// Fitted model JSON (as written by `fit`)
        #[arg(long)]
        model: Option<PathBuf>,
        /// Decision threshold on the predicted probability, in (0,1)
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        sd_mode: Option<SdModeArg>,
    },
    /// Dominance report from consensus labels
    Report {
        #[command(flatten)]
        args: CommonArgs,
        #[arg(long)]
        sd_mode: Option<SdModeArg>,
        /// Use coder A's label where disagreements were never reconciled
        #[arg(long)]
        fallback_coder_a: bool,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 1,
        Error::Parse { .. } | Error::EmptyTranscript => 2,
        Error::Config(_) | Error::Invalid(_) => 3,
        Error::SingleClassResponse(_)
        | Error::RankDeficient { .. }
        | Error::ColumnMismatch { .. }
        | Error::Design(_) => 4,
        Error::UnknownKeys(_) | Error::Unresolved(_) | Error::ResolutionMismatch { .. } => 5,
    }
}

fn run(cli: Cli) -> Result<(), CommandError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };

    let (cfg, command): (RunConfig, _) = match &cli.command {
        Command::Stats { args } => (config::resolve(file, args)?, &cli.command),
        Command::Extract { args } => (config::resolve(file, args)?, &cli.command),
        Command::Kappa { args } => (config::resolve(file, args)?, &cli.command),
        Command::Reconcile { args, resolutions } => {
            let mut cfg = config::resolve(file, args)?;
            if resolutions.is_some() {
                cfg.resolutions = resolutions.clone();
            }
            (cfg, &cli.command)
        }
        Command::Fit {
            args,
            tol,
            max_iter,
            beta_bound,
            ridge,
            fallback_coder_a,
        } => {
            let mut cfg = config::resolve(file, args)?;
            if let Some(v) = tol {
                cfg.fit.tol = *v;
            }
            if let Some(v) = max_iter {
                cfg.fit.max_iter = *v;
            }
            if let Some(v) = beta_bound {
                cfg.fit.beta_bound = *v;
            }
            if let Some(v) = ridge {
                cfg.fit.ridge = *v;
            }
            if *fallback_coder_a {
                cfg.fallback_coder_a = true;
            }
            (cfg, &cli.command)
        }
        Command::Score {
            args,
            model,
            threshold,
            sd_mode,
        } => {
            let mut cfg = config::resolve(file, args)?;
            if model.is_some() {
                cfg.model = model.clone();
            }
            if let Some(v) = threshold {
                cfg.decision_threshold = *v;
            }
            if let Some(v) = sd_mode {
                cfg.sd_mode = (*v).into();
            }
            (cfg, &cli.command)
        }
        Command::Report {
            args,
            sd_mode,
            fallback_coder_a,
        } => {
            let mut cfg = config::resolve(file, args)?;
            if let Some(v) = sd_mode {
                cfg.sd_mode = (*v).into();
            }
            if *fallback_coder_a {
                cfg.fallback_coder_a = true;
            }
            (cfg, &cli.command)
        }
    };

    let outputs = match command {
        Command::Stats { .. } => commands::cmd_stats(&cfg)?,
        Command::Extract { .. } => commands::cmd_extract(&cfg)?,
        Command::Kappa { .. } => commands::cmd_kappa(&cfg)?,
        Command::Reconcile { .. } => commands::cmd_reconcile(&cfg)?,
        Command::Fit { .. } => commands::cmd_fit(&cfg)?,
        Command::Score { .. } => commands::cmd_score(&cfg)?,
        Command::Report { .. } => commands::cmd_report(&cfg)?,
    };

    for notice in &outputs.notices {
        eprintln!("note: {notice}");
    }
    for path in outputs.write_all()? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e.source))
        }
    }
}
