//! Run configuration: JSON config file, environment, and command-line flags,
//! merged in that order (flags win; `CHATDOM_OUT_DIR` only overrides the
//! output directory).

use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::Deserialize;

use chatdom_core::dominance::SdMode;
use chatdom_core::glm::FitOptions;
use chatdom_core::{Error, Result};

/// Output representations a command may emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Fully resolved configuration for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub transcripts: Vec<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    /// Pretrained model for `score`; never combined with fitting.
    pub model: Option<PathBuf>,
    pub resolutions: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub formats: BTreeSet<Format>,
    pub decision_threshold: f64,
    pub fit: FitOptions,
    /// Use coder A's label where disagreements were never reconciled.
    pub fallback_coder_a: bool,
    pub sd_mode: SdMode,
}

/// The JSON config file; every field optional, flags override.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub transcripts: Option<Vec<PathBuf>>,
    pub annotations: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub resolutions: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub formats: Option<Vec<Format>>,
    pub decision_threshold: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub beta_bound: Option<f64>,
    pub ridge: Option<f64>,
    pub fallback_coder_a: Option<bool>,
    pub sd_mode: Option<SdMode>,
}

impl FileConfig {
    pub fn load(path: &PathBuf) -> Result<Self> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&raw)
            .map_err(|e| Error::Config(format!("config {}: {e}", path.display())))
    }
}

/// Flag values shared by every subcommand.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct CommonArgs {
    /// Transcript CSV path; repeat for multiple groups.
    #[arg(long = "transcript")]
    pub transcripts: Vec<PathBuf>,
    /// Annotation CSV (manual codes plus coder labels).
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    /// Lexicon JSON; defaults are built in.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Output directory (also via CHATDOM_OUT_DIR).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Output representations to write.
    #[arg(long, value_delimiter = ',')]
    pub formats: Vec<Format>,
}

pub fn resolve(file: FileConfig, args: &CommonArgs) -> Result<RunConfig> {
    let env_out_dir = std::env::var_os("CHATDOM_OUT_DIR").map(PathBuf::from);
    let out_dir = args
        .out_dir
        .clone()
        .or(env_out_dir)
        .or(file.out_dir)
        .unwrap_or_else(|| PathBuf::from("."));

    let transcripts = if args.transcripts.is_empty() {
        file.transcripts.unwrap_or_default()
    } else {
        args.transcripts.clone()
    };

    let formats: BTreeSet<Format> = if args.formats.is_empty() {
        file.formats
            .unwrap_or_else(|| vec![Format::Csv, Format::Json])
            .into_iter()
            .collect()
    } else {
        args.formats.iter().copied().collect()
    };

    let defaults = FitOptions::default();
    Ok(RunConfig {
        transcripts,
        annotations: args.annotations.clone().or(file.annotations),
        lexicon: args.lexicon.clone().or(file.lexicon),
        model: file.model,
        resolutions: file.resolutions,
        out_dir,
        formats,
        decision_threshold: file.decision_threshold.unwrap_or(0.5),
        fit: FitOptions {
            tol: file.tol.unwrap_or(defaults.tol),
            max_iter: file.max_iter.unwrap_or(defaults.max_iter),
            beta_bound: file.beta_bound.unwrap_or(defaults.beta_bound),
            ridge: file.ridge.unwrap_or(defaults.ridge),
        },
        fallback_coder_a: file.fallback_coder_a.unwrap_or(false),
        sd_mode: file.sd_mode.unwrap_or_default(),
    })
}

impl RunConfig {
    pub fn require_transcripts(&self) -> Result<()> {
        if self.transcripts.is_empty() {
            return Err(Error::Config(
                "no transcripts given; pass --transcript or set 'transcripts' in the config".into(),
            ));
        }
        Ok(())
    }

    pub fn require_annotations(&self) -> Result<&PathBuf> {
        self.annotations
            .as_ref()
            .ok_or_else(|| Error::Config("this command needs --annotations".into()))
    }
}
