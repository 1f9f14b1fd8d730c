//! Transcript data model, CSV ingestion, and corpus descriptive statistics.
//!
//! A transcript file is RFC-4180 CSV with the header
//! `group_id,participant_id,timestamp,text`, UTF-8 encoded, one file per group.
//! Timestamps may be ISO-8601 datetimes or plain non-negative seconds offsets;
//! either way they are stored as seconds relative to the transcript's first
//! comment. Comment text is preserved byte-for-byte.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{Read, Write};

use chrono::{DateTime, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::features;
use crate::Result;

/// Expected transcript CSV header, in column order.
pub const TRANSCRIPT_HEADER: [&str; 4] = ["group_id", "participant_id", "timestamp", "text"];

/// Supported transcript source formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TranscriptFormat {
    /// RFC-4180 CSV with the [`TRANSCRIPT_HEADER`] columns.
    #[default]
    Csv,
}

/// Identifies one comment across the corpus: which group, which position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CommentKey {
    pub group_id: String,
    pub seq: usize,
}

impl fmt::Display for CommentKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.group_id, self.seq)
    }
}

/// One chat utterance exactly as it appeared in the source transcript.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comment {
    pub group_id: String,
    pub participant_id: String,
    /// Seconds since the transcript's first comment. Negative only when the
    /// source timestamps regress, which parsing reports as a warning.
    pub timestamp: f64,
    /// 0-based position within the transcript.
    pub seq: usize,
    /// Raw text, no trimming and no case folding.
    pub text: String,
}

impl Comment {
    pub fn key(&self) -> CommentKey {
        CommentKey {
            group_id: self.group_id.clone(),
            seq: self.seq,
        }
    }
}

/// An ordered group conversation plus the set of participants seen in it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub group_id: String,
    pub comments: Vec<Comment>,
    pub participants: BTreeSet<String>,
}

impl Transcript {
    /// Builds a transcript from comments already carrying this group's id.
    /// Seq values are reassigned to the comments' positions.
    pub fn new(group_id: impl Into<String>, mut comments: Vec<Comment>) -> Result<Self> {
        let group_id = group_id.into();
        for (i, c) in comments.iter_mut().enumerate() {
            if c.group_id != group_id {
                return Err(Error::Design(format!(
                    "comment {} belongs to group '{}', not '{}'",
                    i, c.group_id, group_id
                )));
            }
            c.seq = i;
        }
        let participants = comments
            .iter()
            .map(|c| c.participant_id.clone())
            .collect::<BTreeSet<_>>();
        Ok(Transcript {
            group_id,
            comments,
            participants,
        })
    }

    /// Writes the transcript back out as CSV. Timestamps are the stored
    /// offsets, so `parse_transcript(to_csv(t)) == t`.
    pub fn to_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(TRANSCRIPT_HEADER).map_err(csv_error)?;
        for c in &self.comments {
            wtr.write_record([
                c.group_id.as_str(),
                c.participant_id.as_str(),
                &format!("{}", c.timestamp),
                c.text.as_str(),
            ])
            .map_err(csv_error)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!("is_io_error guarantees the Io kind"),
        }
    } else {
        Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        }
    }
}

/// Timestamp syntax accepted in transcript files. One file uses one form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TimestampMode {
    SecondsOffset,
    Iso8601,
}

fn parse_timestamp(
    raw: &str,
    mode: Option<TimestampMode>,
    line: u64,
) -> Result<(f64, TimestampMode)> {
    let raw = raw.trim();
    let numeric = raw.parse::<f64>().ok();
    let instant = parse_iso_instant(raw);

    let mode = match mode {
        Some(m) => m,
        None => {
            if numeric.is_some() {
                TimestampMode::SecondsOffset
            } else if instant.is_some() {
                TimestampMode::Iso8601
            } else {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "timestamp '{raw}' is neither an ISO-8601 datetime nor a seconds offset"
                    ),
                });
            }
        }
    };

    let value = match mode {
        TimestampMode::SecondsOffset => {
            let secs = numeric.ok_or_else(|| Error::Parse {
                line,
                message: format!("timestamp '{raw}' is not a seconds offset like the earlier rows"),
            })?;
            // negative offsets only arise from regressed sources; tolerated
            // so serialized transcripts always re-parse, warned downstream
            if !secs.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("seconds offset '{raw}' must be finite"),
                });
            }
            secs
        }
        TimestampMode::Iso8601 => instant.ok_or_else(|| Error::Parse {
            line,
            message: format!("timestamp '{raw}' is not an ISO-8601 datetime like the earlier rows"),
        })?,
    };
    Ok((value, mode))
}

/// Seconds since the Unix epoch for an RFC-3339 datetime, or for a naive
/// `YYYY-MM-DDTHH:MM:SS[.frac]` (interpreted as UTC).
fn parse_iso_instant(raw: &str) -> Option<f64> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Some(dt.timestamp() as f64 + f64::from(dt.timestamp_subsec_nanos()) * 1e-9);
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(raw, fmt) {
            let secs = dt.and_utc().timestamp() as f64;
            return Some(secs + f64::from(dt.and_utc().timestamp_subsec_nanos()) * 1e-9);
        }
    }
    None
}

/// Parses one transcript file. Returns the transcript plus any non-fatal
/// warnings (currently: timestamp regressions, which keep file order).
pub fn parse_transcript<R: Read>(
    source: R,
    format: TranscriptFormat,
) -> Result<(Transcript, Vec<String>)> {
    match format {
        TranscriptFormat::Csv => parse_csv_transcript(source),
    }
}

fn parse_csv_transcript<R: Read>(source: R) -> Result<(Transcript, Vec<String>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(source);

    let headers = rdr.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if headers.iter().collect::<Vec<_>>() != TRANSCRIPT_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected header '{}', found '{}'",
                TRANSCRIPT_HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut comments: Vec<Comment> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    let mut group_id: Option<String> = None;
    let mut mode: Option<TimestampMode> = None;
    let mut raw_instants: Vec<f64> = Vec::new();

    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = match e.kind() {
                csv::ErrorKind::UnequalLengths { pos, .. } => {
                    pos.as_ref().map(|p| p.line()).unwrap_or(0)
                }
                _ => e.position().map(|p| p.line()).unwrap_or(0),
            };
            Error::Parse {
                line,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);

        let gid = record.get(0).unwrap_or("");
        let pid = record.get(1).unwrap_or("");
        let ts_raw = record.get(2).unwrap_or("");
        let text = record.get(3).unwrap_or("");
        if gid.is_empty() || pid.is_empty() || ts_raw.is_empty() {
            return Err(Error::Parse {
                line,
                message: "row is missing group_id, participant_id, or timestamp".into(),
            });
        }

        match &group_id {
            None => group_id = Some(gid.to_string()),
            Some(g) if g != gid => {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "group id '{gid}' differs from '{g}'; a transcript holds one group"
                    ),
                });
            }
            Some(_) => {}
        }

        let (instant, m) = parse_timestamp(ts_raw, mode, line)?;
        mode = Some(m);
        if let Some(&prev) = raw_instants.last() {
            if instant < prev {
                warnings.push(format!(
                    "timestamp regression at line {line} ({instant} after {prev}); keeping file order"
                ));
            }
        }
        raw_instants.push(instant);

        comments.push(Comment {
            group_id: gid.to_string(),
            participant_id: pid.to_string(),
            timestamp: 0.0, // rebased below
            seq: comments.len(),
            text: text.to_string(),
        });
    }

    if comments.is_empty() {
        return Err(Error::EmptyTranscript);
    }

    let base = raw_instants[0];
    for (c, t) in comments.iter_mut().zip(&raw_instants) {
        c.timestamp = t - base;
    }

    let transcript = Transcript::new(group_id.expect("non-empty"), comments)?;
    Ok((transcript, warnings))
}

/// Totals for one group: comments, summed character length, summed word count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupTotals {
    pub group_id: String,
    pub comment_count: u64,
    pub char_length_total: u64,
    pub word_count_total: u64,
}

/// Total / mean / sample SD / min / max over the per-group totals of one data item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub total: u64,
    pub mean: f64,
    pub sd: f64,
    pub min: u64,
    pub max: u64,
}

impl SummaryStats {
    fn over(values: &[u64]) -> Self {
        let n = values.len() as f64;
        let total: u64 = values.iter().sum();
        let mean = total as f64 / n;
        let sd = if values.len() < 2 {
            0.0
        } else {
            let ss: f64 = values.iter().map(|&v| (v as f64 - mean).powi(2)).sum();
            (ss / (n - 1.0)).sqrt()
        };
        SummaryStats {
            total,
            mean,
            sd,
            min: *values.iter().min().expect("non-empty"),
            max: *values.iter().max().expect("non-empty"),
        }
    }
}

/// Descriptive statistics over a corpus of transcripts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    /// Per-group totals, sorted by group id.
    pub groups: Vec<GroupTotals>,
    pub comments: SummaryStats,
    pub chars: SummaryStats,
    pub words: SummaryStats,
    /// True when there is only one group, so the sample SDs above are
    /// reported as 0 but undefined.
    pub sd_degenerate: bool,
}

/// Per-group and corpus-wide counts of comments, characters, and words.
///
/// Character length is the Unicode scalar count of the raw text; word counts
/// use [`features::tokenize`]. SD is the sample (n-1) standard deviation over
/// per-group totals.
pub fn corpus_stats(transcripts: &[Transcript]) -> Result<CorpusStats> {
    if transcripts.is_empty() {
        return Err(Error::Config(
            "corpus statistics require at least one transcript".into(),
        ));
    }
    let mut groups: Vec<GroupTotals> = transcripts
        .iter()
        .map(|t| GroupTotals {
            group_id: t.group_id.clone(),
            comment_count: t.comments.len() as u64,
            char_length_total: t
                .comments
                .iter()
                .map(|c| c.text.chars().count() as u64)
                .sum(),
            word_count_total: t
                .comments
                .iter()
                .map(|c| features::tokenize(&c.text).len() as u64)
                .sum(),
        })
        .collect();
    groups.sort_by(|a, b| a.group_id.cmp(&b.group_id));

    let comment_totals: Vec<u64> = groups.iter().map(|g| g.comment_count).collect();
    let char_totals: Vec<u64> = groups.iter().map(|g| g.char_length_total).collect();
    let word_totals: Vec<u64> = groups.iter().map(|g| g.word_count_total).collect();

    Ok(CorpusStats {
        comments: SummaryStats::over(&comment_totals),
        chars: SummaryStats::over(&char_totals),
        words: SummaryStats::over(&word_totals),
        sd_degenerate: groups.len() < 2,
        groups,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(data: &str) -> Result<(Transcript, Vec<String>)> {
        parse_transcript(data.as_bytes(), TranscriptFormat::Csv)
    }

    #[test]
    fn parses_basic_row() {
        let (t, warnings) = parse(
            "group_id,participant_id,timestamp,text\n\
             g1,p3,2024-01-01T10:00:05Z,\"why Nali??\"\n",
        )
        .unwrap();
        assert_eq!(t.group_id, "g1");
        assert_eq!(t.comments.len(), 1);
        let c = &t.comments[0];
        assert_eq!(c.participant_id, "p3");
        assert_eq!(c.seq, 0);
        assert_eq!(c.timestamp, 0.0);
        assert_eq!(c.text, "why Nali??");
        assert!(warnings.is_empty());
        assert!(t.participants.contains("p3"));
    }

    #[test]
    fn empty_file_is_an_error() {
        let err = parse("group_id,participant_id,timestamp,text\n").unwrap_err();
        assert!(matches!(err, Error::EmptyTranscript));
        let err = parse("").unwrap_err();
        assert!(matches!(err, Error::EmptyTranscript | Error::Parse { .. }));
    }

    #[test]
    fn out_of_order_timestamps_warn_but_keep_file_order() {
        let (t, warnings) = parse(
            "group_id,participant_id,timestamp,text\n\
             g1,p1,10,first\n\
             g1,p2,5,second\n\
             g1,p1,7,third\n",
        )
        .unwrap();
        assert_eq!(t.comments.len(), 3);
        assert_eq!(
            t.comments
                .iter()
                .map(|c| c.text.as_str())
                .collect::<Vec<_>>(),
            ["first", "second", "third"]
        );
        assert_eq!(
            warnings.len(),
            1,
            "one regression, one warning: {warnings:?}"
        );
        // offsets are rebased to the first comment
        assert_eq!(t.comments[0].timestamp, 0.0);
        assert_eq!(t.comments[1].timestamp, -5.0);
        assert_eq!(t.comments[2].timestamp, -3.0);
    }

    #[test]
    fn malformed_row_reports_line_number() {
        let err = parse(
            "group_id,participant_id,timestamp,text\n\
             g1,p1,0,ok\n\
             g1,,5,missing participant\n",
        )
        .unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn short_row_reports_line_number() {
        let err = parse(
            "group_id,participant_id,timestamp,text\n\
             g1,p1,0\n",
        )
        .unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn mixed_groups_in_one_file_are_rejected() {
        let err = parse(
            "group_id,participant_id,timestamp,text\n\
             g1,p1,0,hello\n\
             g2,p1,1,world\n",
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn mixed_timestamp_modes_are_rejected() {
        let err = parse(
            "group_id,participant_id,timestamp,text\n\
             g1,p1,2024-01-01T10:00:00Z,hello\n\
             g1,p1,12,world\n",
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn iso_timestamps_become_offsets() {
        let (t, _) = parse(
            "group_id,participant_id,timestamp,text\n\
             g1,p1,2024-01-01T10:00:05Z,a\n\
             g1,p2,2024-01-01T10:01:05Z,b\n",
        )
        .unwrap();
        assert_eq!(t.comments[0].timestamp, 0.0);
        assert_eq!(t.comments[1].timestamp, 60.0);
    }

    #[test]
    fn csv_round_trip_preserves_text_exactly() {
        let tricky = "group_id,participant_id,timestamp,text\n\
                      g1,p1,0,\"comma, \"\"quote\"\" and\nnewline\"\n\
                      g1,p2,3.5,  leading and trailing spaces  \n";
        let (t, _) = parse(tricky).unwrap();
        assert_eq!(t.comments[0].text, "comma, \"quote\" and\nnewline");
        assert_eq!(t.comments[1].text, "  leading and trailing spaces  ");

        let mut out = Vec::new();
        t.to_csv(&mut out).unwrap();
        let (t2, _) = parse(std::str::from_utf8(&out).unwrap()).unwrap();
        assert_eq!(t, t2);
    }

    #[test]
    fn stats_match_seven_group_corpus_shape() {
        // Seven groups whose comment totals sum to 1283 with min 101 and max 388.
        let totals = [101_usize, 388, 150, 160, 170, 154, 160];
        assert_eq!(totals.iter().sum::<usize>(), 1283);
        let transcripts: Vec<Transcript> = totals
            .iter()
            .enumerate()
            .map(|(g, &n)| {
                let comments = (0..n)
                    .map(|i| Comment {
                        group_id: format!("g{g}"),
                        participant_id: format!("p{}", i % 6),
                        timestamp: i as f64,
                        seq: i,
                        text: "hi there".into(),
                    })
                    .collect();
                Transcript::new(format!("g{g}"), comments).unwrap()
            })
            .collect();
        let stats = corpus_stats(&transcripts).unwrap();
        assert_eq!(stats.comments.total, 1283);
        assert!((stats.comments.mean - 1283.0 / 7.0).abs() < 1e-12);
        assert!((stats.comments.mean - 183.29).abs() < 0.005);
        assert_eq!(stats.comments.min, 101);
        assert_eq!(stats.comments.max, 388);
        assert!(!stats.sd_degenerate);
    }

    #[test]
    fn single_group_stats_flag_degenerate_sd() {
        let comments = (0..5)
            .map(|i| Comment {
                group_id: "g1".into(),
                participant_id: "p1".into(),
                timestamp: i as f64,
                seq: i,
                text: "word".into(),
            })
            .collect();
        let t = Transcript::new("g1", comments).unwrap();
        let stats = corpus_stats(&[t]).unwrap();
        assert_eq!(stats.comments.total, 5);
        assert_eq!(stats.comments.mean, 5.0);
        assert_eq!(stats.comments.sd, 0.0);
        assert_eq!(stats.comments.min, 5);
        assert_eq!(stats.comments.max, 5);
        assert!(stats.sd_degenerate);
    }

    #[test]
    fn two_group_sample_sd() {
        let mk = |gid: &str, n: usize| {
            let comments = (0..n)
                .map(|i| Comment {
                    group_id: gid.into(),
                    participant_id: "p1".into(),
                    timestamp: i as f64,
                    seq: i,
                    text: "x".into(),
                })
                .collect();
            Transcript::new(gid, comments).unwrap()
        };
        let stats = corpus_stats(&[mk("a", 100), mk("b", 200)]).unwrap();
        assert_eq!(stats.comments.total, 300);
        assert_eq!(stats.comments.mean, 150.0);
        assert!((stats.comments.sd - 70.71067811865476).abs() < 1e-9);
    }

    #[test]
    fn stats_are_permutation_invariant() {
        let mk = |gid: &str, n: usize| {
            let comments = (0..n)
                .map(|i| Comment {
                    group_id: gid.into(),
                    participant_id: "p1".into(),
                    timestamp: i as f64,
                    seq: i,
                    text: format!("comment {i} !!"),
                })
                .collect();
            Transcript::new(gid, comments).unwrap()
        };
        let a = mk("a", 13);
        let b = mk("b", 29);
        let c = mk("c", 7);
        let s1 = corpus_stats(&[a.clone(), b.clone(), c.clone()]).unwrap();
        let s2 = corpus_stats(&[c, a, b]).unwrap();
        assert_eq!(s1, s2);
    }
}
