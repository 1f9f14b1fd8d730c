//! Dominance scoring and group-level dominance flags.
//!
//! A participant's dominance share is their count of dominance-labeled
//! comments divided by their group's total; with g members per group the
//! shares in a group sum to 1 and average 1/g. A member is flagged dominant
//! when their share strictly exceeds the corpus mean share plus one standard
//! deviation.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::{CommentKey, Transcript};
use crate::error::Error;
use crate::glm::{predict_prob, LogitModel};
use crate::numfmt::{round6, sig6};
use crate::Result;

/// A scored comment: model probability plus the thresholded 0/1 call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdScore {
    pub key: CommentKey,
    pub probability: f64,
    /// 1 only when `probability` strictly exceeds the decision threshold.
    pub predicted_ed: u8,
}

/// Scores predictor rows with a fitted model. `decision_threshold` must lie
/// in (0,1]; a probability exactly at the threshold is scored 0, so the
/// degenerate threshold 1.0 predicts nothing.
pub fn score_comments(
    model: &LogitModel,
    rows: &[(CommentKey, BTreeMap<String, f64>)],
    decision_threshold: f64,
) -> Result<Vec<EdScore>> {
    if !(decision_threshold > 0.0 && decision_threshold <= 1.0) {
        return Err(Error::Invalid(format!(
            "decision threshold {decision_threshold} must lie in (0, 1]"
        )));
    }
    rows.iter()
        .map(|(key, row)| {
            let probability = predict_prob(model, row)?;
            Ok(EdScore {
                key: key.clone(),
                probability,
                predicted_ed: u8::from(probability > decision_threshold),
            })
        })
        .collect()
}

/// Which standard deviation the dominance threshold uses. Population SD is
/// the default: an all-equal group then yields SD 0 and threshold = mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SdMode {
    #[default]
    Population,
    Sample,
}

/// One participant's dominance standing within their group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantShare {
    pub group_id: String,
    pub participant_id: String,
    pub ed_count: usize,
    pub group_ed_total: usize,
    /// `ed_count / group_ed_total`, or 0 when the group has no dominance
    /// comments at all.
    pub share: f64,
    pub dominant: bool,
}

/// Corpus-wide dominance report: every participant's share, the pooled
/// mean/SD over shares, and the mean + 1 SD threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub participants: Vec<ParticipantShare>,
    pub corpus_mean_share: f64,
    pub corpus_sd_share: f64,
    /// `corpus_mean_share + corpus_sd_share`.
    pub threshold: f64,
    pub sd_mode: SdMode,
    pub warnings: Vec<String>,
}

impl DominanceReport {
    pub fn dominant_participants(&self) -> Vec<&ParticipantShare> {
        self.participants.iter().filter(|p| p.dominant).collect()
    }

    /// JSON form with floats rounded to six significant digits.
    pub fn to_json(&self) -> String {
        let mut rounded = self.clone();
        for p in &mut rounded.participants {
            p.share = round6(p.share);
        }
        rounded.corpus_mean_share = round6(rounded.corpus_mean_share);
        rounded.corpus_sd_share = round6(rounded.corpus_sd_share);
        rounded.threshold = round6(rounded.threshold);
        serde_json::to_string_pretty(&rounded).expect("report serializes")
    }

    /// CSV form: one row per participant plus the corpus threshold columns.
    pub fn to_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record([
            "group_id",
            "participant_id",
            "ed_count",
            "group_ed_total",
            "share",
            "corpus_mean_share",
            "corpus_sd_share",
            "threshold",
            "dominant",
        ])
        .map_err(crate::corpus::csv_error)?;
        for p in &self.participants {
            wtr.write_record([
                p.group_id.as_str(),
                p.participant_id.as_str(),
                &p.ed_count.to_string(),
                &p.group_ed_total.to_string(),
                &sig6(p.share),
                &sig6(self.corpus_mean_share),
                &sig6(self.corpus_sd_share),
                &sig6(self.threshold),
                if p.dominant { "1" } else { "0" },
            ])
            .map_err(crate::corpus::csv_error)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Computes per-participant shares of their group's dominance comments and
/// flags members above the corpus mean + 1 SD threshold.
///
/// `ed_labels` must align with the corpus: one 0/1 value per comment key.
/// Groups with no dominance comments contribute all-zero shares and a
/// warning; they stay in the pooled mean/SD.
pub fn dominance_shares(
    ed_labels: &[(CommentKey, u8)],
    transcripts: &[Transcript],
    sd_mode: SdMode,
) -> Result<DominanceReport> {
    if transcripts.is_empty() {
        return Err(Error::Invalid(
            "dominance shares need at least one transcript".into(),
        ));
    }
    let mut labels: BTreeMap<&CommentKey, u8> = BTreeMap::new();
    for (key, value) in ed_labels {
        if *value > 1 {
            return Err(Error::Invalid(format!("label for {key} must be 0 or 1")));
        }
        labels.insert(key, *value);
    }
    let corpus_keys: BTreeSet<CommentKey> = transcripts
        .iter()
        .flat_map(|t| t.comments.iter().map(|c| c.key()))
        .collect();
    if labels.len() != corpus_keys.len() || !corpus_keys.iter().all(|k| labels.contains_key(k)) {
        return Err(Error::Invalid(format!(
            "{} labels do not align with {} comments",
            labels.len(),
            corpus_keys.len()
        )));
    }

    let mut participants: Vec<ParticipantShare> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    // Summing each group's shares as one integer division keeps the group
    // total exactly 1.0, so a corpus of uniform g-member groups averages
    // exactly 1/g.
    let mut share_sum = 0.0f64;

    for t in transcripts {
        if t.participants.is_empty() {
            return Err(Error::Invalid(format!(
                "group '{}' has no members",
                t.group_id
            )));
        }
        let mut counts: BTreeMap<&str, usize> =
            t.participants.iter().map(|p| (p.as_str(), 0)).collect();
        let mut total = 0usize;
        for c in &t.comments {
            if labels[&c.key()] == 1 {
                *counts.get_mut(c.participant_id.as_str()).expect("member") += 1;
                total += 1;
            }
        }
        if total == 0 {
            warnings.push(format!(
                "group '{}' has no dominance comments; all member shares are 0",
                t.group_id
            ));
        } else {
            share_sum += counts.values().sum::<usize>() as f64 / total as f64;
        }
        for (pid, ed_count) in counts {
            let share = if total == 0 {
                0.0
            } else {
                ed_count as f64 / total as f64
            };
            participants.push(ParticipantShare {
                group_id: t.group_id.clone(),
                participant_id: pid.to_string(),
                ed_count,
                group_ed_total: total,
                share,
                dominant: false,
            });
        }
    }
    participants.sort_by(|a, b| {
        (a.group_id.as_str(), a.participant_id.as_str())
            .cmp(&(b.group_id.as_str(), b.participant_id.as_str()))
    });

    let n = participants.len() as f64;
    let corpus_mean_share = share_sum / n;
    let ss: f64 = participants
        .iter()
        .map(|p| (p.share - corpus_mean_share).powi(2))
        .sum();
    let corpus_sd_share = match sd_mode {
        SdMode::Population => (ss / n).sqrt(),
        SdMode::Sample => {
            if participants.len() < 2 {
                0.0
            } else {
                (ss / (n - 1.0)).sqrt()
            }
        }
    };
    let threshold = corpus_mean_share + corpus_sd_share;
    for p in &mut participants {
        p.dominant = p.share > threshold;
    }

    Ok(DominanceReport {
        participants,
        corpus_mean_share,
        corpus_sd_share,
        threshold,
        sd_mode,
        warnings,
    })
}

/// Confusion counts and derived metrics for predicted labels against a
/// reference vector. Zero-denominator metrics come back as `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoringMetrics {
    pub true_positive: usize,
    pub false_positive: usize,
    pub true_negative: usize,
    pub false_negative: usize,
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
}

/// Compares predicted scores to reference labels; the two key sets must
/// align exactly.
pub fn evaluate_scoring(
    predicted: &[EdScore],
    reference: &[(CommentKey, u8)],
) -> Result<ScoringMetrics> {
    if predicted.is_empty() {
        return Err(Error::Invalid("no predictions to evaluate".into()));
    }
    let reference_map: BTreeMap<&CommentKey, u8> = reference.iter().map(|(k, v)| (k, *v)).collect();
    if reference_map.len() != predicted.len()
        || !predicted.iter().all(|s| reference_map.contains_key(&s.key))
    {
        return Err(Error::Invalid(format!(
            "{} predictions do not align with {} reference labels",
            predicted.len(),
            reference_map.len()
        )));
    }
    let mut tp = 0;
    let mut fp = 0;
    let mut tn = 0;
    let mut fn_ = 0;
    for s in predicted {
        match (s.predicted_ed, reference_map[&s.key]) {
            (1, 1) => tp += 1,
            (1, 0) => fp += 1,
            (0, 0) => tn += 1,
            (0, 1) => fn_ += 1,
            _ => return Err(Error::Invalid(format!("label for {} is not binary", s.key))),
        }
    }
    let n = predicted.len() as f64;
    Ok(ScoringMetrics {
        true_positive: tp,
        false_positive: fp,
        true_negative: tn,
        false_negative: fn_,
        accuracy: (tp + tn) as f64 / n,
        precision: (tp + fp > 0).then(|| tp as f64 / (tp + fp) as f64),
        recall: (tp + fn_ > 0).then(|| tp as f64 / (tp + fn_) as f64),
    })
}
