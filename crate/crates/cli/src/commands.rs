//! Subcommand implementations.
//!
//! Every command computes its artifacts fully in memory and returns them as
//! planned files; nothing touches the output directory until the whole
//! command has succeeded, so a failed run never leaves partial outputs.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use chatdom_core::annotations::MANUAL_COLUMNS;
use chatdom_core::annotations::{
    load_annotations, reconcile, reliability_report, write_annotations, AnnotationSet,
};
use chatdom_core::chart::share_chart;
use chatdom_core::corpus::{
    corpus_stats, parse_transcript, CommentKey, Transcript, TranscriptFormat,
};
use chatdom_core::dominance::{
    dominance_shares, evaluate_scoring, score_comments, DominanceReport, EdScore, ScoringMetrics,
};
use chatdom_core::features::{
    extract_features, write_feature_matrix, CommentFeatures, LexiconConfig, FEATURE_COLUMNS,
};
use chatdom_core::glm::{compare_models, fit, significance_stars, DesignMatrix, LogitModel};
use chatdom_core::numfmt::{round6, sig6};
use chatdom_core::{Error, Result};

use crate::config::{Format, RunConfig};

/// A core error plus which pipeline stage raised it.
#[derive(Debug)]
pub struct CommandError {
    pub context: Option<String>,
    pub source: Error,
}

impl fmt::Display for CommandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.context {
            Some(ctx) => write!(f, "{ctx}: {}", self.source),
            None => write!(f, "{}", self.source),
        }
    }
}

impl From<Error> for CommandError {
    fn from(source: Error) -> Self {
        CommandError {
            context: None,
            source,
        }
    }
}

pub type CmdResult<T> = std::result::Result<T, CommandError>;

trait Context<T> {
    fn context(self, label: &str) -> CmdResult<T>;
}

impl<T> Context<T> for Result<T> {
    fn context(self, label: &str) -> CmdResult<T> {
        self.map_err(|source| CommandError {
            context: Some(label.to_string()),
            source,
        })
    }
}

/// Planned artifacts of a successful command.
#[derive(Debug, Default)]
pub struct Outputs {
    pub files: Vec<(PathBuf, Vec<u8>)>,
    pub notices: Vec<String>,
}

impl Outputs {
    fn add(&mut self, cfg: &RunConfig, name: &str, bytes: Vec<u8>) {
        self.files.push((cfg.out_dir.join(name), bytes));
    }

    fn notice(&mut self, message: impl Into<String>) {
        self.notices.push(message.into());
    }

    /// Writes every planned file; called only after the command succeeded.
    pub fn write_all(&self) -> CmdResult<Vec<PathBuf>> {
        let mut written = Vec::new();
        for (path, bytes) in &self.files {
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)
                    .map_err(|e| Error::Io(annotate_io(e, parent)))
                    .context("creating output directory")?;
            }
            std::fs::write(path, bytes)
                .map_err(|e| Error::Io(annotate_io(e, path)))
                .context("writing output")?;
            written.push(path.clone());
        }
        Ok(written)
    }
}

fn annotate_io(e: std::io::Error, path: &Path) -> std::io::Error {
    std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(annotate_io(e, path)))
}

fn load_transcripts(cfg: &RunConfig) -> CmdResult<(Vec<Transcript>, Vec<String>)> {
    cfg.require_transcripts()?;
    let mut transcripts = Vec::new();
    let mut notices = Vec::new();
    for path in &cfg.transcripts {
        let raw = read_file(path).context("reading transcript")?;
        let (t, warnings) = parse_transcript(raw.as_bytes(), TranscriptFormat::Csv)
            .context(&format!("parsing {}", path.display()))?;
        for w in warnings {
            notices.push(format!("{}: {w}", path.display()));
        }
        transcripts.push(t);
    }
    Ok((transcripts, notices))
}

fn load_lexicon(cfg: &RunConfig) -> CmdResult<LexiconConfig> {
    match &cfg.lexicon {
        Some(path) => {
            let raw = read_file(path).context("reading lexicon")?;
            LexiconConfig::from_json(&raw).context(&format!("lexicon {}", path.display()))
        }
        None => Ok(LexiconConfig::default()),
    }
}

fn load_annotation_set(
    cfg: &RunConfig,
    transcripts: &[Transcript],
    outputs: &mut Outputs,
) -> CmdResult<AnnotationSet> {
    let path = cfg.require_annotations()?;
    let raw = read_file(path).context("reading annotations")?;
    let set = load_annotations(raw.as_bytes(), transcripts)
        .context(&format!("annotations {}", path.display()))?;
    for w in &set.warnings {
        outputs.notice(format!("{}: {w}", path.display()));
    }
    Ok(set)
}

fn extract_all(
    transcripts: &[Transcript],
    lexicon: &LexiconConfig,
) -> Result<Vec<Vec<CommentFeatures>>> {
    transcripts
        .iter()
        .map(|t| {
            t.comments
                .iter()
                .map(|c| extract_features(c, lexicon))
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

pub fn cmd_stats(cfg: &RunConfig) -> CmdResult<Outputs> {
    let mut outputs = Outputs::default();
    let (transcripts, notices) = load_transcripts(cfg)?;
    outputs.notices = notices;
    let stats = corpus_stats(&transcripts).context("computing corpus statistics")?;
    if stats.sd_degenerate {
        outputs.notice("single group: standard deviations are degenerate (reported as 0)");
    }

    if cfg.formats.contains(&Format::Json) {
        #[derive(Serialize)]
        struct SummaryJson {
            total: u64,
            mean: f64,
            sd: f64,
            min: u64,
            max: u64,
        }
        #[derive(Serialize)]
        struct StatsJson<'a> {
            groups: &'a [chatdom_core::corpus::GroupTotals],
            comments: SummaryJson,
            chars: SummaryJson,
            words: SummaryJson,
            sd_degenerate: bool,
        }
        let summarize = |s: &chatdom_core::corpus::SummaryStats| SummaryJson {
            total: s.total,
            mean: round6(s.mean),
            sd: round6(s.sd),
            min: s.min,
            max: s.max,
        };
        let doc = StatsJson {
            groups: &stats.groups,
            comments: summarize(&stats.comments),
            chars: summarize(&stats.chars),
            words: summarize(&stats.words),
            sd_degenerate: stats.sd_degenerate,
        };
        let json = serde_json::to_string_pretty(&doc).expect("stats serialize");
        outputs.add(cfg, "stats.json", json.into_bytes());
    }

    if cfg.formats.contains(&Format::Csv) {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        let w = |e: csv::Error| Error::Config(e.to_string());
        wtr.write_record(["record", "group_id", "comments", "chars", "words"])
            .map_err(w)?;
        for g in &stats.groups {
            wtr.write_record([
                "group",
                g.group_id.as_str(),
                &g.comment_count.to_string(),
                &g.char_length_total.to_string(),
                &g.word_count_total.to_string(),
            ])
            .map_err(w)?;
        }
        type Render = fn(&chatdom_core::corpus::SummaryStats) -> String;
        let rows: [(&str, Render); 5] = [
            ("total", |s| s.total.to_string()),
            ("mean", |s| sig6(s.mean)),
            ("sd", |s| sig6(s.sd)),
            ("min", |s| s.min.to_string()),
            ("max", |s| s.max.to_string()),
        ];
        for (name, render) in rows {
            wtr.write_record([
                name,
                "",
                &render(&stats.comments),
                &render(&stats.chars),
                &render(&stats.words),
            ])
            .map_err(w)?;
        }
        let bytes = wtr.into_inner().map_err(|e| Error::Config(e.to_string()))?;
        outputs.add(cfg, "stats.csv", bytes);
    }

    Ok(outputs)
}

// ---------------------------------------------------------------------------
// extract
// ---------------------------------------------------------------------------

pub fn cmd_extract(cfg: &RunConfig) -> CmdResult<Outputs> {
    let mut outputs = Outputs::default();
    let (transcripts, notices) = load_transcripts(cfg)?;
    outputs.notices = notices;
    let lexicon = load_lexicon(cfg)?;
    let features = extract_all(&transcripts, &lexicon).context("extracting features")?;

    let mut matrix = Vec::new();
    write_feature_matrix(&mut matrix, &transcripts, &features).context("writing feature matrix")?;
    outputs.add(cfg, "features.csv", matrix);

    let mut wtr = csv::Writer::from_writer(Vec::new());
    let w = |e: csv::Error| Error::Config(e.to_string());
    let mut header = vec!["group_id", "participant_id", "comment_count"];
    header.extend(FEATURE_COLUMNS);
    wtr.write_record(&header).map_err(w)?;
    for (t, rows) in transcripts.iter().zip(&features) {
        let aggs = chatdom_core::features::aggregate_participants(t, rows)
            .context("aggregating participants")?;
        for a in aggs {
            wtr.write_record([
                t.group_id.as_str(),
                a.participant_id.as_str(),
                &a.comment_count.to_string(),
                &a.comment_length_chars.to_string(),
                &a.word_count.to_string(),
                &sig6(a.average_word_length),
                &a.choice_reference.to_string(),
                &a.all_caps_words.to_string(),
                &a.time_reference.to_string(),
                &a.exclamation_points.to_string(),
                &a.question_marks.to_string(),
                &a.self_references.to_string(),
            ])
            .map_err(w)?;
        }
    }
    let bytes = wtr.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    outputs.add(cfg, "aggregates.csv", bytes);

    if cfg.formats.contains(&Format::Json) {
        let json = serde_json::to_string_pretty(&transcripts).expect("transcripts serialize");
        outputs.add(cfg, "transcripts.json", json.into_bytes());
    }
    Ok(outputs)
}

// ---------------------------------------------------------------------------
// kappa
// ---------------------------------------------------------------------------

pub fn cmd_kappa(cfg: &RunConfig) -> CmdResult<Outputs> {
    let mut outputs = Outputs::default();
    let (transcripts, notices) = load_transcripts(cfg)?;
    outputs.notices = notices;
    let set = load_annotation_set(cfg, &transcripts, &mut outputs)?;
    if !set.coder_columns_present.0 || !set.coder_columns_present.1 {
        return Err(Error::Config(
            "reliability needs both coder columns ed_a and ed_b in the annotation file".into(),
        )
        .into());
    }
    let report = reliability_report(&set.ed_labels()).context("computing reliability")?;

    #[derive(Serialize)]
    struct ReliabilityJson {
        n_items: usize,
        percent_agreement: f64,
        cohens_kappa: Option<f64>,
        kappa_undefined: bool,
        confusion: [[usize; 2]; 2],
    }
    let mut doc = BTreeMap::new();
    doc.insert(
        "ed",
        ReliabilityJson {
            n_items: report.n_items,
            percent_agreement: round6(report.percent_agreement),
            cohens_kappa: report.cohens_kappa.map(round6),
            kappa_undefined: report.cohens_kappa.is_none(),
            confusion: report.confusion,
        },
    );
    let json = serde_json::to_string_pretty(&doc).expect("reliability serialize");
    outputs.add(cfg, "reliability.json", json.into_bytes());
    Ok(outputs)
}

// ---------------------------------------------------------------------------
// reconcile
// ---------------------------------------------------------------------------

fn load_resolutions(path: &Path) -> Result<BTreeMap<CommentKey, u8>> {
    let raw = read_file(path)?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(raw.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let expected = ["group_id", "seq", "resolved"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "resolutions need header '{}', found '{}'",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut resolutions = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let seq: usize = record
            .get(1)
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|_| Error::Parse {
                line,
                message: "seq must be a non-negative integer".into(),
            })?;
        let value: u8 = match record.get(2).unwrap_or("").trim() {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("resolved must be 0 or 1, found '{other}'"),
                })
            }
        };
        resolutions.insert(
            CommentKey {
                group_id: record.get(0).unwrap_or("").to_string(),
                seq,
            },
            value,
        );
    }
    Ok(resolutions)
}

pub fn cmd_reconcile(cfg: &RunConfig) -> CmdResult<Outputs> {
    let mut outputs = Outputs::default();
    let (transcripts, notices) = load_transcripts(cfg)?;
    outputs.notices = notices;
    let mut set = load_annotation_set(cfg, &transcripts, &mut outputs)?;
    let resolutions_path = cfg.resolutions.as_ref().ok_or_else(|| {
        Error::Config("reconcile needs --resolutions (CSV: group_id,seq,resolved)".into())
    })?;
    let resolutions = load_resolutions(resolutions_path).context("reading resolutions")?;

    let resolved = reconcile(&set.ed_labels(), &resolutions).context("reconciling")?;
    for (key, value) in &resolved {
        let entry = set.entries.get_mut(key).expect("entry exists");
        entry.ed.resolved = Some(*value);
    }
    outputs.notice(format!(
        "applied {} resolutions; all labels now carry a consensus value",
        resolutions.len()
    ));

    let mut bytes = Vec::new();
    write_annotations(&mut bytes, &set).context("writing annotations")?;
    outputs.add(cfg, "annotations_reconciled.csv", bytes);
    Ok(outputs)
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CoefficientRow {
    parameter: String,
    estimate: f64,
    std_error: f64,
    wald_chisq: f64,
    stars: String,
}

#[derive(Serialize)]
struct ModelReport {
    name: String,
    coefficients: Vec<CoefficientRow>,
    residual_deviance: f64,
    aic: f64,
    n_params: usize,
    n_obs: usize,
    converged: bool,
    iterations: usize,
    separation: Option<String>,
}

fn model_report(name: &str, model: &LogitModel) -> ModelReport {
    ModelReport {
        name: name.to_string(),
        coefficients: model
            .coefficients
            .iter()
            .map(|c| CoefficientRow {
                parameter: c.name.clone(),
                estimate: round6(c.estimate),
                std_error: round6(c.std_error),
                wald_chisq: round6(c.wald_chisq),
                stars: significance_stars(c.wald_chisq).to_string(),
            })
            .collect(),
        residual_deviance: round6(model.residual_deviance),
        aic: round6(model.aic),
        n_params: model.n_params,
        n_obs: model.n_obs,
        converged: model.converged,
        iterations: model.iterations,
        separation: model.separation.clone(),
    }
}

/// Predictor rows for the automatic-feature design, in corpus order.
fn automatic_columns(features: &[Vec<CommentFeatures>]) -> Vec<(String, Vec<f64>)> {
    let mut columns: Vec<(String, Vec<f64>)> = FEATURE_COLUMNS
        .iter()
        .map(|name| (name.to_string(), Vec::new()))
        .collect();
    for rows in features {
        for f in rows {
            for (column, value) in columns.iter_mut().zip(f.values()) {
                column.1.push(value);
            }
        }
    }
    columns
}

fn manual_columns_data(transcripts: &[Transcript], set: &AnnotationSet) -> Vec<(String, Vec<f64>)> {
    let mut columns: Vec<(String, Vec<f64>)> = MANUAL_COLUMNS
        .iter()
        .map(|name| (name.to_string(), Vec::new()))
        .collect();
    for t in transcripts {
        for c in &t.comments {
            let entry = &set.entries[&c.key()];
            for (column, value) in columns.iter_mut().zip(entry.codes.values()) {
                column.1.push(value);
            }
        }
    }
    columns
}

pub fn cmd_fit(cfg: &RunConfig) -> CmdResult<Outputs> {
    let mut outputs = Outputs::default();
    if cfg.model.is_some() {
        return Err(Error::Config(
            "'fit' trains new models; 'model' belongs to the score command".into(),
        )
        .into());
    }
    let (transcripts, notices) = load_transcripts(cfg)?;
    outputs.notices = notices;
    let lexicon = load_lexicon(cfg)?;
    let features = extract_all(&transcripts, &lexicon).context("extracting features")?;
    let set = load_annotation_set(cfg, &transcripts, &mut outputs)?;

    let resolved = set
        .resolved_vector(cfg.fallback_coder_a)
        .context("resolving dominance labels (run 'reconcile' first)")?;
    let response_by_key: BTreeMap<&CommentKey, u8> =
        resolved.iter().map(|(k, v)| (k, *v)).collect();
    let response: Vec<u8> = transcripts
        .iter()
        .flat_map(|t| t.comments.iter().map(|c| response_by_key[&c.key()]))
        .collect();

    let mut fitted: Vec<(String, LogitModel)> = Vec::new();

    let automatic = DesignMatrix::new(automatic_columns(&features), response.clone())
        .context("building the automatic design")?;
    let model = fit(&automatic, &cfg.fit).context("fitting model 'automatic'")?;
    if let Some(diag) = &model.separation {
        outputs.notice(format!("model 'automatic': {diag}"));
    }
    fitted.push(("automatic".to_string(), model));

    if set.manual_columns_present {
        let manual = DesignMatrix::new(manual_columns_data(&transcripts, &set), response.clone())
            .context("building the manual design")?;
        let model = fit(&manual, &cfg.fit).context("fitting model 'manual'")?;
        if let Some(diag) = &model.separation {
            outputs.notice(format!("model 'manual': {diag}"));
        }
        fitted.push(("manual".to_string(), model));

        let mut combined_columns = automatic_columns(&features);
        combined_columns.extend(manual_columns_data(&transcripts, &set));
        let combined = DesignMatrix::new(combined_columns, response)
            .context("building the combined design")?;
        let model = fit(&combined, &cfg.fit).context("fitting model 'combined'")?;
        if let Some(diag) = &model.separation {
            outputs.notice(format!("model 'combined': {diag}"));
        }
        fitted.push(("combined".to_string(), model));
    } else {
        outputs.notice(
            "annotation file has no manually coded columns; fitted the automatic model only",
        );
    }

    for (name, model) in &fitted {
        outputs.add(
            cfg,
            &format!("model_{name}.json"),
            model.to_json().into_bytes(),
        );
    }

    let reports: Vec<ModelReport> = fitted
        .iter()
        .map(|(name, m)| model_report(name, m))
        .collect();
    let ranking = if fitted.len() >= 2 {
        let named: Vec<(String, &LogitModel)> =
            fitted.iter().map(|(n, m)| (n.clone(), m)).collect();
        Some(compare_models(&named).context("comparing models")?)
    } else {
        None
    };

    if cfg.formats.contains(&Format::Json) {
        #[derive(Serialize)]
        struct FitJson<'a> {
            models: &'a [ModelReport],
            comparison: &'a Option<Vec<chatdom_core::glm::ModelRank>>,
        }
        let rounded = ranking.as_ref().map(|ranks| {
            ranks
                .iter()
                .map(|r| chatdom_core::glm::ModelRank {
                    aic: round6(r.aic),
                    residual_deviance: round6(r.residual_deviance),
                    delta_aic: round6(r.delta_aic),
                    ..r.clone()
                })
                .collect::<Vec<_>>()
        });
        let json = serde_json::to_string_pretty(&FitJson {
            models: &reports,
            comparison: &rounded,
        })
        .expect("fit report serialize");
        outputs.add(cfg, "fit_report.json", json.into_bytes());
    }

    if cfg.formats.contains(&Format::Csv) {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        let w = |e: csv::Error| Error::Config(e.to_string());
        wtr.write_record([
            "model",
            "parameter",
            "estimate",
            "std_error",
            "wald_chisq",
            "stars",
        ])
        .map_err(w)?;
        for r in &reports {
            for c in &r.coefficients {
                wtr.write_record([
                    r.name.as_str(),
                    c.parameter.as_str(),
                    &sig6(c.estimate),
                    &sig6(c.std_error),
                    &sig6(c.wald_chisq),
                    c.stars.as_str(),
                ])
                .map_err(w)?;
            }
        }
        let bytes = wtr.into_inner().map_err(|e| Error::Config(e.to_string()))?;
        outputs.add(cfg, "fit_report.csv", bytes);

        if let Some(ranks) = &ranking {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            wtr.write_record([
                "model",
                "n_params",
                "residual_deviance",
                "aic",
                "delta_aic",
                "converged",
            ])
            .map_err(w)?;
            for r in ranks {
                wtr.write_record([
                    r.name.as_str(),
                    &r.n_params.to_string(),
                    &sig6(r.residual_deviance),
                    &sig6(r.aic),
                    &sig6(r.delta_aic),
                    if r.converged { "1" } else { "0" },
                ])
                .map_err(w)?;
            }
            let bytes = wtr.into_inner().map_err(|e| Error::Config(e.to_string()))?;
            outputs.add(cfg, "comparison.csv", bytes);
        }
    }

    Ok(outputs)
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

fn dominance_outputs(
    cfg: &RunConfig,
    outputs: &mut Outputs,
    report: &DominanceReport,
    title: &str,
) -> Result<()> {
    for warning in &report.warnings {
        outputs.notices.push(warning.clone());
    }
    if cfg.formats.contains(&Format::Csv) {
        let mut bytes = Vec::new();
        report.to_csv(&mut bytes)?;
        outputs.add(cfg, "dominance.csv", bytes);
    }
    if cfg.formats.contains(&Format::Json) {
        outputs.add(cfg, "dominance.json", report.to_json().into_bytes());
    }
    if cfg.formats.contains(&Format::Svg) {
        outputs.add(
            cfg,
            "dominance.svg",
            share_chart(report, title).into_bytes(),
        );
    }
    Ok(())
}

pub fn cmd_score(cfg: &RunConfig) -> CmdResult<Outputs> {
    let mut outputs = Outputs::default();
    let model_path = cfg.model.clone().ok_or_else(|| {
        Error::Config("score needs --model pointing at a fitted model JSON".into())
    })?;
    let (transcripts, notices) = load_transcripts(cfg)?;
    outputs.notices = notices;
    let lexicon = load_lexicon(cfg)?;
    let raw = read_file(&model_path).context("reading model")?;
    let model = LogitModel::from_json(&raw).context(&format!("model {}", model_path.display()))?;
    if !model.converged {
        outputs.notice("model was saved not-converged; scores are exploratory");
    }

    let features = extract_all(&transcripts, &lexicon).context("extracting features")?;
    let mut rows: Vec<(CommentKey, BTreeMap<String, f64>)> = Vec::new();
    for (t, fs) in transcripts.iter().zip(&features) {
        for (c, f) in t.comments.iter().zip(fs) {
            rows.push((c.key(), f.row()));
        }
    }
    let scores =
        score_comments(&model, &rows, cfg.decision_threshold).context("scoring comments")?;

    let labels: Vec<(CommentKey, u8)> = scores
        .iter()
        .map(|s| (s.key.clone(), s.predicted_ed))
        .collect();
    let report =
        dominance_shares(&labels, &transcripts, cfg.sd_mode).context("computing dominance")?;

    // with consensus labels on hand, also grade the model against them
    if cfg.annotations.is_some() {
        let set = load_annotation_set(cfg, &transcripts, &mut outputs)?;
        let reference = set
            .resolved_vector(cfg.fallback_coder_a)
            .context("resolving reference labels")?;
        let metrics = evaluate_scoring(&scores, &reference).context("evaluating predictions")?;
        let rounded = ScoringMetrics {
            accuracy: round6(metrics.accuracy),
            precision: metrics.precision.map(round6),
            recall: metrics.recall.map(round6),
            ..metrics
        };
        let json = serde_json::to_string_pretty(&rounded).expect("metrics serialize");
        outputs.add(cfg, "evaluation.json", json.into_bytes());
    }

    let participant_of: BTreeMap<CommentKey, &str> = transcripts
        .iter()
        .flat_map(|t| {
            t.comments
                .iter()
                .map(|c| (c.key(), c.participant_id.as_str()))
        })
        .collect();

    if cfg.formats.contains(&Format::Csv) {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        let w = |e: csv::Error| Error::Config(e.to_string());
        wtr.write_record([
            "group_id",
            "participant_id",
            "seq",
            "probability",
            "predicted_ed",
        ])
        .map_err(w)?;
        for s in &scores {
            wtr.write_record([
                s.key.group_id.as_str(),
                participant_of[&s.key],
                &s.key.seq.to_string(),
                &sig6(s.probability),
                &s.predicted_ed.to_string(),
            ])
            .map_err(w)?;
        }
        let bytes = wtr.into_inner().map_err(|e| Error::Config(e.to_string()))?;
        outputs.add(cfg, "scores.csv", bytes);
    }
    if cfg.formats.contains(&Format::Json) {
        let rounded: Vec<EdScore> = scores
            .iter()
            .map(|s| EdScore {
                key: s.key.clone(),
                probability: round6(s.probability),
                predicted_ed: s.predicted_ed,
            })
            .collect();
        let json = serde_json::to_string_pretty(&rounded).expect("scores serialize");
        outputs.add(cfg, "scores.json", json.into_bytes());
    }

    dominance_outputs(cfg, &mut outputs, &report, "Predicted dominance shares")
        .context("writing dominance outputs")?;
    Ok(outputs)
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

pub fn cmd_report(cfg: &RunConfig) -> CmdResult<Outputs> {
    let mut outputs = Outputs::default();
    let (transcripts, notices) = load_transcripts(cfg)?;
    outputs.notices = notices;
    let set = load_annotation_set(cfg, &transcripts, &mut outputs)?;
    let resolved = set
        .resolved_vector(cfg.fallback_coder_a)
        .context("resolving dominance labels (run 'reconcile' first)")?;
    let report =
        dominance_shares(&resolved, &transcripts, cfg.sd_mode).context("computing dominance")?;
    let dominant = report.dominant_participants().len();
    outputs.notice(format!(
        "{dominant} of {} participants exceed the dominance threshold",
        report.participants.len()
    ));
    dominance_outputs(
        cfg,
        &mut outputs,
        &report,
        "Dominance shares (consensus labels)",
    )
    .context("writing dominance outputs")?;
    Ok(outputs)
}
