//! Human-coded variables and dual-coder dominance labels.
//!
//! Annotations arrive as CSV keyed by `(group_id, seq)`, one column per
//! manually coded variable plus the two coder columns `ed_a`/`ed_b` and an
//! optional `resolved` consensus column. This module loads and validates that
//! file against the corpus, measures inter-coder reliability (percent
//! agreement and Cohen's kappa), and applies consensus resolutions to
//! disagreements.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::corpus::{CommentKey, Transcript};
use crate::error::Error;
use crate::Result;

/// Per-comment manually coded flags; `choice_reference_pro` is a count
/// because pronoun-resolved choice mentions can repeat within a comment.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManualCodes {
    pub humor: u8,
    pub humor_appreciated: u8,
    pub profanity: u8,
    pub questions: u8,
    pub answers: u8,
    pub call_for_vote: u8,
    pub organizational: u8,
    pub asymmetric_info: u8,
    pub refocus: u8,
    pub choice_reference_pro: usize,
}

/// Manual predictor column names, in design-matrix and CSV order.
pub const MANUAL_COLUMNS: [&str; 10] = [
    "humor",
    "humor_appreciated",
    "profanity",
    "questions",
    "answers",
    "call_for_vote",
    "organizational",
    "asymmetric_info",
    "refocus",
    "choice_reference_pro",
];

impl ManualCodes {
    /// Field values in [`MANUAL_COLUMNS`] order.
    pub fn values(&self) -> [f64; 10] {
        [
            f64::from(self.humor),
            f64::from(self.humor_appreciated),
            f64::from(self.profanity),
            f64::from(self.questions),
            f64::from(self.answers),
            f64::from(self.call_for_vote),
            f64::from(self.organizational),
            f64::from(self.asymmetric_info),
            f64::from(self.refocus),
            self.choice_reference_pro as f64,
        ]
    }
}

/// Two coders' dominance judgments for one comment, plus the consensus value
/// once a disagreement has been reconciled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdLabel {
    pub key: CommentKey,
    pub coder_a: u8,
    pub coder_b: u8,
    pub resolved: Option<u8>,
}

impl EdLabel {
    pub fn agreed(&self) -> bool {
        self.coder_a == self.coder_b
    }
}

/// One annotated comment: the manual codes and the dominance labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationEntry {
    pub codes: ManualCodes,
    pub ed: EdLabel,
}

/// The full annotation layer over a corpus. Complete by construction: every
/// comment in the corpus has an entry, defaulted to zeros when the file did
/// not mention it (each default is tallied in `warnings`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationSet {
    pub entries: BTreeMap<CommentKey, AnnotationEntry>,
    /// Whether any manually coded column was present in the source file.
    /// Without them only the automatic-feature model can be fitted.
    pub manual_columns_present: bool,
    /// Whether the `ed_a` / `ed_b` coder columns were present; reliability
    /// statistics need both.
    pub coder_columns_present: (bool, bool),
    pub warnings: Vec<String>,
}

impl AnnotationSet {
    /// Labels in key order.
    pub fn ed_labels(&self) -> Vec<EdLabel> {
        self.entries.values().map(|e| e.ed.clone()).collect()
    }

    pub fn unresolved_keys(&self) -> Vec<CommentKey> {
        self.entries
            .values()
            .filter(|e| !e.ed.agreed() && e.ed.resolved.is_none())
            .map(|e| e.ed.key.clone())
            .collect()
    }

    /// The consensus 0/1 vector used as the modeling response, in key order.
    ///
    /// Unresolved disagreements are an error unless `fall_back_to_coder_a`
    /// is set, in which case coder A's label stands in.
    pub fn resolved_vector(&self, fall_back_to_coder_a: bool) -> Result<Vec<(CommentKey, u8)>> {
        let unresolved = self.unresolved_keys();
        if !unresolved.is_empty() && !fall_back_to_coder_a {
            return Err(Error::Unresolved(unresolved.len()));
        }
        Ok(self
            .entries
            .values()
            .map(|e| {
                let value = e.ed.resolved.unwrap_or(e.ed.coder_a);
                (e.ed.key.clone(), value)
            })
            .collect())
    }
}

fn parse_flag(raw: &str, column: &str, line: u64) -> Result<Option<u8>> {
    match raw.trim() {
        "" => Ok(None),
        "0" => Ok(Some(0)),
        "1" => Ok(Some(1)),
        other => Err(Error::Parse {
            line,
            message: format!("column '{column}' must be 0 or 1, found '{other}'"),
        }),
    }
}

/// Loads an annotation CSV and validates it against the corpus.
///
/// Keys referencing comments that do not exist are an error; comments without
/// a row get all-zero defaults. When the two coders agree, `resolved` is
/// filled with the common value; a contradictory `resolved` cell is an error.
pub fn load_annotations<R: Read>(source: R, transcripts: &[Transcript]) -> Result<AnnotationSet> {
    let valid_keys: BTreeSet<CommentKey> = transcripts
        .iter()
        .flat_map(|t| t.comments.iter().map(|c| c.key()))
        .collect();

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(source);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .iter()
        .map(|s| s.to_string())
        .collect();

    let col = |name: &str| headers.iter().position(|h| h == name);
    let key_cols = match (col("group_id"), col("seq")) {
        (Some(g), Some(s)) => (g, s),
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: "annotation file must have 'group_id' and 'seq' columns".into(),
            })
        }
    };
    let manual_cols: Vec<(usize, Option<usize>)> = MANUAL_COLUMNS
        .iter()
        .enumerate()
        .map(|(i, name)| (i, col(name)))
        .collect();
    let manual_columns_present = manual_cols.iter().any(|(_, c)| c.is_some());
    let ed_a_col = col("ed_a");
    let ed_b_col = col("ed_b");
    let resolved_col = col("resolved");

    let known: BTreeSet<&str> = ["group_id", "seq", "ed_a", "ed_b", "resolved"]
        .into_iter()
        .chain(MANUAL_COLUMNS)
        .collect();
    let mut warnings: Vec<String> = headers
        .iter()
        .filter(|h| !known.contains(h.as_str()))
        .map(|h| format!("ignoring unknown column '{h}'"))
        .collect();

    let mut default_counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut unknown_keys: Vec<CommentKey> = Vec::new();
    let mut entries: BTreeMap<CommentKey, AnnotationEntry> = BTreeMap::new();

    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);

        let group_id = record.get(key_cols.0).unwrap_or("").to_string();
        let seq: usize = record
            .get(key_cols.1)
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|_| Error::Parse {
                line,
                message: format!(
                    "seq '{}' is not a non-negative integer",
                    record.get(key_cols.1).unwrap_or("")
                ),
            })?;
        let key = CommentKey { group_id, seq };
        if !valid_keys.contains(&key) {
            unknown_keys.push(key);
            continue;
        }
        if entries.contains_key(&key) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate annotation row for comment {key}"),
            });
        }

        fn fetch_flag(
            record: &csv::StringRecord,
            idx: Option<usize>,
            name: &'static str,
            line: u64,
            default_counts: &mut BTreeMap<&'static str, usize>,
        ) -> Result<u8> {
            let value = match idx {
                Some(i) => parse_flag(record.get(i).unwrap_or(""), name, line)?,
                None => None,
            };
            Ok(value.unwrap_or_else(|| {
                *default_counts.entry(name).or_insert(0) += 1;
                0
            }))
        }

        let mut flags = [0u8; 9];
        for (slot, (i, idx)) in flags.iter_mut().zip(&manual_cols[..9]) {
            *slot = fetch_flag(&record, *idx, MANUAL_COLUMNS[*i], line, &mut default_counts)?;
        }
        let choice_pro = match manual_cols[9].1 {
            Some(i) => {
                let raw = record.get(i).unwrap_or("").trim();
                if raw.is_empty() {
                    *default_counts.entry("choice_reference_pro").or_insert(0) += 1;
                    0
                } else {
                    raw.parse::<usize>().map_err(|_| Error::Parse {
                        line,
                        message: format!(
                            "column 'choice_reference_pro' must be a non-negative count, found '{raw}'"
                        ),
                    })?
                }
            }
            None => {
                *default_counts.entry("choice_reference_pro").or_insert(0) += 1;
                0
            }
        };
        let codes = ManualCodes {
            humor: flags[0],
            humor_appreciated: flags[1],
            profanity: flags[2],
            questions: flags[3],
            answers: flags[4],
            call_for_vote: flags[5],
            organizational: flags[6],
            asymmetric_info: flags[7],
            refocus: flags[8],
            choice_reference_pro: choice_pro,
        };

        let coder_a = fetch_flag(&record, ed_a_col, "ed_a", line, &mut default_counts)?;
        let coder_b = fetch_flag(&record, ed_b_col, "ed_b", line, &mut default_counts)?;
        let resolved_cell = match resolved_col {
            Some(i) => parse_flag(record.get(i).unwrap_or(""), "resolved", line)?,
            None => None,
        };
        let resolved = if coder_a == coder_b {
            if let Some(r) = resolved_cell {
                if r != coder_a {
                    return Err(Error::Parse {
                        line,
                        message: format!(
                            "resolved={r} contradicts the agreeing coders ({coder_a}) for {key}"
                        ),
                    });
                }
            }
            Some(coder_a)
        } else {
            resolved_cell
        };

        entries.insert(
            key.clone(),
            AnnotationEntry {
                codes,
                ed: EdLabel {
                    key,
                    coder_a,
                    coder_b,
                    resolved,
                },
            },
        );
    }

    if !unknown_keys.is_empty() {
        unknown_keys.sort();
        return Err(Error::UnknownKeys(unknown_keys));
    }

    let missing_rows = valid_keys.len() - entries.len();
    if missing_rows > 0 {
        warnings.push(format!(
            "{missing_rows} comments have no annotation row; defaulted to all-zero codes"
        ));
    }
    for key in &valid_keys {
        entries
            .entry(key.clone())
            .or_insert_with(|| AnnotationEntry {
                codes: ManualCodes::default(),
                ed: EdLabel {
                    key: key.clone(),
                    coder_a: 0,
                    coder_b: 0,
                    resolved: Some(0),
                },
            });
    }
    for (field, count) in &default_counts {
        warnings.push(format!(
            "field '{field}': {count} missing values defaulted to 0"
        ));
    }

    Ok(AnnotationSet {
        entries,
        manual_columns_present,
        coder_columns_present: (ed_a_col.is_some(), ed_b_col.is_some()),
        warnings,
    })
}

/// Writes an annotation set back out with the full column set, `resolved`
/// filled wherever known.
pub fn write_annotations<W: Write>(writer: W, set: &AnnotationSet) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["group_id", "seq"];
    header.extend(MANUAL_COLUMNS);
    header.extend(["ed_a", "ed_b", "resolved"]);
    wtr.write_record(&header)
        .map_err(crate::corpus::csv_error)?;
    for (key, entry) in &set.entries {
        let mut record = vec![key.group_id.clone(), key.seq.to_string()];
        record.extend(
            entry
                .codes
                .values()
                .iter()
                .map(|v| format!("{}", *v as i64)),
        );
        record.push(entry.ed.coder_a.to_string());
        record.push(entry.ed.coder_b.to_string());
        record.push(entry.ed.resolved.map(|r| r.to_string()).unwrap_or_default());
        wtr.write_record(&record)
            .map_err(crate::corpus::csv_error)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Agreement between two coders on one binary label column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityReport {
    pub n_items: usize,
    pub percent_agreement: f64,
    /// `None` when chance agreement is 1 (both coders constant and
    /// identical), which leaves kappa undefined.
    pub cohens_kappa: Option<f64>,
    /// Counts indexed `[coder_a value][coder_b value]`.
    pub confusion: [[usize; 2]; 2],
}

fn confusion(labels: &[EdLabel]) -> Result<[[usize; 2]; 2]> {
    if labels.is_empty() {
        return Err(Error::Invalid(
            "reliability needs at least one label".into(),
        ));
    }
    let mut m = [[0usize; 2]; 2];
    for l in labels {
        if l.coder_a > 1 || l.coder_b > 1 {
            return Err(Error::Invalid(format!(
                "label for {} is not binary (a={}, b={})",
                l.key, l.coder_a, l.coder_b
            )));
        }
        m[l.coder_a as usize][l.coder_b as usize] += 1;
    }
    Ok(m)
}

/// Fraction of items where the two coders gave the same label.
pub fn percent_agreement(labels: &[EdLabel]) -> Result<f64> {
    let m = confusion(labels)?;
    Ok((m[0][0] + m[1][1]) as f64 / labels.len() as f64)
}

/// Cohen's kappa: `(po - pe) / (1 - pe)` with chance agreement `pe` from the
/// coder marginals. `None` when `pe = 1`.
pub fn cohens_kappa(labels: &[EdLabel]) -> Result<Option<f64>> {
    let m = confusion(labels)?;
    let n = labels.len();
    let a1 = m[1][0] + m[1][1];
    let b1 = m[0][1] + m[1][1];
    // pe = 1 exactly when both coders are constant with the same value
    if (a1 == n && b1 == n) || (a1 == 0 && b1 == 0) {
        return Ok(None);
    }
    let nf = n as f64;
    let po = (m[0][0] + m[1][1]) as f64 / nf;
    let pa1 = a1 as f64 / nf;
    let pb1 = b1 as f64 / nf;
    let pe = pa1 * pb1 + (1.0 - pa1) * (1.0 - pb1);
    Ok(Some((po - pe) / (1.0 - pe)))
}

/// Full reliability report for one label column.
pub fn reliability_report(labels: &[EdLabel]) -> Result<ReliabilityReport> {
    Ok(ReliabilityReport {
        n_items: labels.len(),
        percent_agreement: percent_agreement(labels)?,
        cohens_kappa: cohens_kappa(labels)?,
        confusion: confusion(labels)?,
    })
}

/// Applies consensus resolutions to the disagreeing labels.
///
/// `resolutions` must cover exactly the disagreeing keys; agreed items keep
/// their common value. Returns the final consensus vector in input order.
pub fn reconcile(
    labels: &[EdLabel],
    resolutions: &BTreeMap<CommentKey, u8>,
) -> Result<Vec<(CommentKey, u8)>> {
    for (key, value) in resolutions {
        if *value > 1 {
            return Err(Error::Invalid(format!(
                "resolution for {key} must be 0 or 1, found {value}"
            )));
        }
    }
    let disagreeing: BTreeSet<&CommentKey> = labels
        .iter()
        .filter(|l| !l.agreed())
        .map(|l| &l.key)
        .collect();
    let supplied: BTreeSet<&CommentKey> = resolutions.keys().collect();
    let missing: Vec<CommentKey> = disagreeing
        .difference(&supplied)
        .map(|k| (*k).clone())
        .collect();
    let extraneous: Vec<CommentKey> = supplied
        .difference(&disagreeing)
        .map(|k| (*k).clone())
        .collect();
    if !missing.is_empty() || !extraneous.is_empty() {
        return Err(Error::ResolutionMismatch {
            missing,
            extraneous,
        });
    }
    Ok(labels
        .iter()
        .map(|l| {
            let value = if l.agreed() {
                l.coder_a
            } else {
                resolutions[&l.key]
            };
            (l.key.clone(), value)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Comment;

    fn label(seq: usize, a: u8, b: u8) -> EdLabel {
        EdLabel {
            key: CommentKey {
                group_id: "g1".into(),
                seq,
            },
            coder_a: a,
            coder_b: b,
            resolved: None,
        }
    }

    fn transcript(n: usize) -> Transcript {
        let comments = (0..n)
            .map(|i| Comment {
                group_id: "g1".into(),
                participant_id: format!("p{}", i % 3),
                timestamp: i as f64,
                seq: i,
                text: format!("comment {i}"),
            })
            .collect();
        Transcript::new("g1", comments).unwrap()
    }

    #[test]
    fn percent_agreement_examples() {
        let identical: Vec<EdLabel> = (0..10)
            .map(|i| label(i, (i % 2) as u8, (i % 2) as u8))
            .collect();
        assert_eq!(percent_agreement(&identical).unwrap(), 1.0);

        let mut nine_of_ten = identical.clone();
        nine_of_ten[0].coder_b = 1 - nine_of_ten[0].coder_b;
        assert!((percent_agreement(&nine_of_ten).unwrap() - 0.9).abs() < 1e-15);

        let all_disagree: Vec<EdLabel> = (0..4).map(|i| label(i, 0, 1)).collect();
        assert_eq!(percent_agreement(&all_disagree).unwrap(), 0.0);
    }

    #[test]
    fn kappa_perfect_agreement_with_both_classes() {
        let labels: Vec<EdLabel> = (0..10)
            .map(|i| label(i, (i % 2) as u8, (i % 2) as u8))
            .collect();
        assert_eq!(cohens_kappa(&labels).unwrap(), Some(1.0));
    }

    #[test]
    fn kappa_balanced_marginals_case() {
        // 100 items, both coders 50/50: 30 agree-yes, 30 agree-no, 20+20 split
        let mut labels = Vec::new();
        let mut seq = 0;
        for _ in 0..30 {
            labels.push(label(seq, 1, 1));
            seq += 1;
        }
        for _ in 0..30 {
            labels.push(label(seq, 0, 0));
            seq += 1;
        }
        for _ in 0..20 {
            labels.push(label(seq, 1, 0));
            seq += 1;
        }
        for _ in 0..20 {
            labels.push(label(seq, 0, 1));
            seq += 1;
        }
        let k = cohens_kappa(&labels).unwrap().unwrap();
        assert!((k - 0.2).abs() < 1e-12, "kappa = {k}");
        assert!((percent_agreement(&labels).unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn kappa_constant_coder_a_case() {
        // coder A all-yes, coder B yes on half: po = 0.5, pe = 0.5, kappa = 0
        let mut labels = Vec::new();
        for i in 0..100 {
            labels.push(label(i, 1, u8::from(i < 50)));
        }
        let k = cohens_kappa(&labels).unwrap().unwrap();
        assert!(k.abs() < 1e-12, "kappa = {k}");
    }

    #[test]
    fn kappa_undefined_when_both_coders_constant_and_identical() {
        let labels: Vec<EdLabel> = (0..5).map(|i| label(i, 1, 1)).collect();
        assert_eq!(cohens_kappa(&labels).unwrap(), None);
        let report = reliability_report(&labels).unwrap();
        assert_eq!(report.cohens_kappa, None);
        assert_eq!(report.percent_agreement, 1.0);
    }

    #[test]
    fn kappa_never_exceeds_percent_agreement() {
        let labels: Vec<EdLabel> = vec![
            label(0, 1, 1),
            label(1, 0, 0),
            label(2, 1, 0),
            label(3, 0, 0),
            label(4, 1, 1),
        ];
        let po = percent_agreement(&labels).unwrap();
        let k = cohens_kappa(&labels).unwrap().unwrap();
        assert!(k <= po + 1e-15);
    }

    #[test]
    fn kappa_is_symmetric_in_coders() {
        let labels: Vec<EdLabel> = vec![
            label(0, 1, 0),
            label(1, 0, 0),
            label(2, 1, 1),
            label(3, 0, 1),
            label(4, 1, 0),
            label(5, 1, 1),
        ];
        let swapped: Vec<EdLabel> = labels
            .iter()
            .map(|l| EdLabel {
                key: l.key.clone(),
                coder_a: l.coder_b,
                coder_b: l.coder_a,
                resolved: None,
            })
            .collect();
        assert_eq!(
            cohens_kappa(&labels).unwrap(),
            cohens_kappa(&swapped).unwrap()
        );
        assert_eq!(
            percent_agreement(&labels).unwrap(),
            percent_agreement(&swapped).unwrap()
        );
    }

    #[test]
    fn reconcile_examples() {
        let labels = vec![label(0, 1, 1), label(1, 0, 0)];
        let out = reconcile(&labels, &BTreeMap::new()).unwrap();
        assert_eq!(out.iter().map(|(_, v)| *v).collect::<Vec<_>>(), [1, 0]);

        let labels = vec![label(0, 1, 1), label(1, 0, 1)];
        let mut res = BTreeMap::new();
        res.insert(labels[1].key.clone(), 1u8);
        let out = reconcile(&labels, &res).unwrap();
        assert_eq!(out.iter().map(|(_, v)| *v).collect::<Vec<_>>(), [1, 1]);
    }

    #[test]
    fn reconcile_rejects_resolution_for_agreed_key() {
        let labels = vec![label(0, 1, 1)];
        let mut res = BTreeMap::new();
        res.insert(labels[0].key.clone(), 0u8);
        match reconcile(&labels, &res).unwrap_err() {
            Error::ResolutionMismatch {
                missing,
                extraneous,
            } => {
                assert!(missing.is_empty());
                assert_eq!(extraneous.len(), 1);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn reconcile_reports_missing_resolutions() {
        let labels = vec![label(0, 1, 0), label(1, 0, 1)];
        match reconcile(&labels, &BTreeMap::new()).unwrap_err() {
            Error::ResolutionMismatch {
                missing,
                extraneous,
            } => {
                assert_eq!(missing.len(), 2);
                assert!(extraneous.is_empty());
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn load_call_for_vote_row() {
        let t = transcript(2);
        let csv = "group_id,seq,call_for_vote,ed_a,ed_b\n\
                   g1,0,1,1,1\n\
                   g1,1,0,0,0\n";
        let set = load_annotations(csv.as_bytes(), &[t]).unwrap();
        let key = CommentKey {
            group_id: "g1".into(),
            seq: 0,
        };
        let entry = &set.entries[&key];
        assert_eq!(entry.codes.call_for_vote, 1);
        assert_eq!(entry.codes.humor, 0);
        assert_eq!(entry.ed.resolved, Some(1));
        assert!(set.manual_columns_present);
        // the nine absent manual columns were defaulted with warnings
        assert!(!set.warnings.is_empty());
    }

    #[test]
    fn empty_annotation_file_defaults_to_zero_with_warnings() {
        let t = transcript(3);
        let csv = "group_id,seq,ed_a,ed_b\n";
        let set = load_annotations(csv.as_bytes(), &[t]).unwrap();
        assert_eq!(set.entries.len(), 3);
        assert!(set
            .entries
            .values()
            .all(|e| e.codes == ManualCodes::default()));
        assert!(set.entries.values().all(|e| e.ed.resolved == Some(0)));
        assert!(set
            .warnings
            .iter()
            .any(|w| w.contains("3 comments have no annotation row")));
        assert!(!set.manual_columns_present);
    }

    #[test]
    fn unresolved_disagreement_is_flagged() {
        let t = transcript(1);
        let csv = "group_id,seq,ed_a,ed_b\ng1,0,1,0\n";
        let set = load_annotations(csv.as_bytes(), &[t]).unwrap();
        assert_eq!(set.unresolved_keys().len(), 1);
        assert!(matches!(
            set.resolved_vector(false),
            Err(Error::Unresolved(1))
        ));
        // explicit fallback takes coder A
        let v = set.resolved_vector(true).unwrap();
        assert_eq!(v[0].1, 1);
    }

    #[test]
    fn unknown_keys_are_listed() {
        let t = transcript(1);
        let csv = "group_id,seq,ed_a,ed_b\ng1,5,1,1\ng9,0,0,0\n";
        match load_annotations(csv.as_bytes(), &[t]).unwrap_err() {
            Error::UnknownKeys(keys) => assert_eq!(keys.len(), 2),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn non_binary_flag_reports_line() {
        let t = transcript(1);
        let csv = "group_id,seq,humor,ed_a,ed_b\ng1,0,2,0,0\n";
        match load_annotations(csv.as_bytes(), &[t]).unwrap_err() {
            Error::Parse { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("humor"));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn contradictory_resolved_cell_is_rejected() {
        let t = transcript(1);
        let csv = "group_id,seq,ed_a,ed_b,resolved\ng1,0,1,1,0\n";
        assert!(matches!(
            load_annotations(csv.as_bytes(), &[t]).unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
    }

    #[test]
    fn annotations_round_trip() {
        let t = transcript(3);
        let csv = "group_id,seq,humor,questions,choice_reference_pro,ed_a,ed_b,resolved\n\
                   g1,0,1,0,2,1,0,1\n\
                   g1,1,0,1,0,0,0,\n\
                   g1,2,0,0,1,1,1,\n";
        let set = load_annotations(csv.as_bytes(), std::slice::from_ref(&t)).unwrap();
        let mut out = Vec::new();
        write_annotations(&mut out, &set).unwrap();
        let reloaded = load_annotations(out.as_slice(), &[t]).unwrap();
        assert_eq!(set.entries, reloaded.entries);
    }
}
