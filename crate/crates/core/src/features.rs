//! Per-comment dominance indicators and per-participant aggregates.
//!
//! Every indicator is computed from the raw comment text with a configurable
//! [`LexiconConfig`]: counts of all-caps words, exclamation points, question
//! marks, self-references, references to the decision choices, and a 0/1
//! flag for time talk. Extraction is deterministic and pure, so comments can
//! be processed in any order or in parallel.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::{Comment, Transcript};
use crate::error::Error;
use crate::numfmt::sig6;
use crate::Result;

/// Lexicons driving the token-match indicators.
///
/// All entries must be non-empty, lowercase, and free of whitespace; matching
/// is by exact token equality after case folding, never by substring, so
/// "Johnson" does not match "john".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconConfig {
    pub choice_terms: BTreeSet<String>,
    pub time_terms: BTreeSet<String>,
    pub self_terms: BTreeSet<String>,
    /// Minimum token length for the all-caps count; at the default of 2 a
    /// bare "I" is never an all-caps word.
    pub min_allcaps_len: usize,
}

impl Default for LexiconConfig {
    fn default() -> Self {
        let set = |items: &[&str]| items.iter().map(|s| s.to_string()).collect();
        LexiconConfig {
            choice_terms: set(&["alex", "mansi", "nali", "john", "donahue"]),
            time_terms: set(&[
                "time", "min", "mins", "minute", "minutes", "hour", "hours", "sec", "secs",
                "second", "seconds", "clock", "deadline",
            ]),
            self_terms: set(&[
                "i", "i'm", "im", "i'll", "i've", "i'd", "me", "my", "mine", "myself",
            ]),
            min_allcaps_len: 2,
        }
    }
}

impl LexiconConfig {
    /// Reads a lexicon from its JSON form and validates it.
    pub fn from_json(json: &str) -> Result<Self> {
        let cfg: LexiconConfig =
            serde_json::from_str(json).map_err(|e| Error::Config(format!("lexicon: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_allcaps_len < 1 {
            return Err(Error::Config("min_allcaps_len must be at least 1".into()));
        }
        for (name, terms) in [
            ("choice_terms", &self.choice_terms),
            ("time_terms", &self.time_terms),
            ("self_terms", &self.self_terms),
        ] {
            for term in terms {
                if term.is_empty()
                    || term.chars().any(char::is_whitespace)
                    || term.chars().any(char::is_uppercase)
                {
                    return Err(Error::Config(format!(
                        "{name} entry '{term}' must be non-empty, lowercase, and whitespace-free"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Characters kept when trimming token edges. `#` survives so ordinal
/// references like "#5" stay intact.
fn keep_at_edge(c: char) -> bool {
    c.is_alphanumeric() || c == '#'
}

/// Splits text on Unicode whitespace, trims leading/trailing punctuation from
/// each token, and drops tokens that are punctuation only (emoticons, "...").
/// Internal characters are untouched, so "don't" stays one token, and case is
/// never altered.
pub fn tokenize(text: &str) -> Vec<&str> {
    text.split_whitespace()
        .filter_map(|chunk| {
            let start = chunk.find(keep_at_edge)?;
            let end = chunk.rfind(keep_at_edge)?;
            let token = &chunk[start..end + chunk[end..].chars().next().map_or(1, char::len_utf8)];
            // tokens made of `#` alone carry no word content
            token.chars().any(char::is_alphanumeric).then_some(token)
        })
        .collect()
}

/// Count of tokens of length >= `min_allcaps_len` made entirely of uppercase
/// alphabetic characters: "IT HAS TO BE ALEX" has 5.
pub fn count_all_caps(text: &str, cfg: &LexiconConfig) -> usize {
    tokenize(text)
        .iter()
        .filter(|t| {
            t.chars().count() >= cfg.min_allcaps_len
                && t.chars().all(|c| c.is_alphabetic() && c.is_uppercase())
        })
        .count()
}

/// 1 when the comment mentions time ("only 10 mins left"), else 0. The unit
/// is the comment, so repeated mentions still yield 1.
pub fn count_time_references(text: &str, cfg: &LexiconConfig) -> u8 {
    let hit = tokenize(text)
        .iter()
        .any(|t| cfg.time_terms.contains(&t.to_lowercase()));
    u8::from(hit)
}

/// Count of `!` characters in the raw text: "good point #5!!!" has 3.
pub fn count_exclamations(text: &str) -> usize {
    text.chars().filter(|&c| c == '!').count()
}

/// Count of `?` characters in the raw text: "why Nali??" has 2.
pub fn count_question_marks(text: &str) -> usize {
    text.chars().filter(|&c| c == '?').count()
}

/// Count of first-person-singular tokens: "I don't know" has 1.
pub fn count_self_references(text: &str, cfg: &LexiconConfig) -> usize {
    tokenize(text)
        .iter()
        .filter(|t| cfg.self_terms.contains(&t.to_lowercase()))
        .count()
}

/// Count of tokens naming one of the decision choices: "so it is John or
/// Nali???" has 2. Errors when the choice lexicon is empty, because the
/// indicator is meaningless without one.
pub fn count_choice_references(text: &str, cfg: &LexiconConfig) -> Result<usize> {
    if cfg.choice_terms.is_empty() {
        return Err(Error::Config(
            "choice_terms is empty; the choice-reference indicator needs a lexicon".into(),
        ));
    }
    Ok(tokenize(text)
        .iter()
        .filter(|t| cfg.choice_terms.contains(&t.to_lowercase()))
        .count())
}

/// The automatic indicator vector for one comment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommentFeatures {
    /// Unicode scalar count of the raw text.
    pub comment_length_chars: usize,
    pub word_count: usize,
    /// Mean token length after edge trimming; 0 when there are no tokens.
    pub average_word_length: f64,
    pub choice_reference: usize,
    pub all_caps_words: usize,
    /// Per-comment 0/1 indicator, not a token count.
    pub time_reference: u8,
    pub exclamation_points: usize,
    pub question_marks: usize,
    pub self_references: usize,
}

/// Feature column names, in the order used by design matrices and CSV export.
pub const FEATURE_COLUMNS: [&str; 9] = [
    "comment_length_chars",
    "word_count",
    "average_word_length",
    "choice_reference",
    "all_caps_words",
    "time_reference",
    "exclamation_points",
    "question_marks",
    "self_references",
];

impl CommentFeatures {
    /// Field values in [`FEATURE_COLUMNS`] order.
    pub fn values(&self) -> [f64; 9] {
        [
            self.comment_length_chars as f64,
            self.word_count as f64,
            self.average_word_length,
            self.choice_reference as f64,
            self.all_caps_words as f64,
            f64::from(self.time_reference),
            self.exclamation_points as f64,
            self.question_marks as f64,
            self.self_references as f64,
        ]
    }

    /// Named predictor row for scoring.
    pub fn row(&self) -> BTreeMap<String, f64> {
        FEATURE_COLUMNS
            .iter()
            .map(|s| s.to_string())
            .zip(self.values())
            .collect()
    }
}

/// Computes every automatic indicator for one comment.
pub fn extract_features(comment: &Comment, cfg: &LexiconConfig) -> Result<CommentFeatures> {
    let text = comment.text.as_str();
    let tokens = tokenize(text);
    let word_count = tokens.len();
    let average_word_length = if word_count == 0 {
        0.0
    } else {
        tokens.iter().map(|t| t.chars().count()).sum::<usize>() as f64 / word_count as f64
    };
    Ok(CommentFeatures {
        comment_length_chars: text.chars().count(),
        word_count,
        average_word_length,
        choice_reference: count_choice_references(text, cfg)?,
        all_caps_words: count_all_caps(text, cfg),
        time_reference: count_time_references(text, cfg),
        exclamation_points: count_exclamations(text),
        question_marks: count_question_marks(text),
        self_references: count_self_references(text, cfg),
    })
}

/// Per-participant totals over one transcript: comment count plus the sum of
/// every indicator across that participant's comments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantAggregate {
    pub participant_id: String,
    pub comment_count: usize,
    pub comment_length_chars: usize,
    pub word_count: usize,
    pub average_word_length: f64,
    pub choice_reference: usize,
    pub all_caps_words: usize,
    /// Count of this participant's comments that mention time.
    pub time_reference: usize,
    pub exclamation_points: usize,
    pub question_marks: usize,
    pub self_references: usize,
}

/// Folds per-comment features into per-participant sums. `features` must
/// align 1:1 with `transcript.comments`. Participants appear sorted by id;
/// a participant with no comments cannot appear by construction.
pub fn aggregate_participants(
    transcript: &Transcript,
    features: &[CommentFeatures],
) -> Result<Vec<ParticipantAggregate>> {
    if features.len() != transcript.comments.len() {
        return Err(Error::Design(format!(
            "{} feature rows for {} comments",
            features.len(),
            transcript.comments.len()
        )));
    }
    let mut by_participant: BTreeMap<&str, ParticipantAggregate> = BTreeMap::new();
    for (comment, f) in transcript.comments.iter().zip(features) {
        let agg = by_participant
            .entry(comment.participant_id.as_str())
            .or_insert_with(|| ParticipantAggregate {
                participant_id: comment.participant_id.clone(),
                comment_count: 0,
                comment_length_chars: 0,
                word_count: 0,
                average_word_length: 0.0,
                choice_reference: 0,
                all_caps_words: 0,
                time_reference: 0,
                exclamation_points: 0,
                question_marks: 0,
                self_references: 0,
            });
        agg.comment_count += 1;
        agg.comment_length_chars += f.comment_length_chars;
        agg.word_count += f.word_count;
        agg.average_word_length += f.average_word_length;
        agg.choice_reference += f.choice_reference;
        agg.all_caps_words += f.all_caps_words;
        agg.time_reference += usize::from(f.time_reference);
        agg.exclamation_points += f.exclamation_points;
        agg.question_marks += f.question_marks;
        agg.self_references += f.self_references;
    }
    Ok(by_participant.into_values().collect())
}

/// Writes the feature matrix as CSV: one row per comment, keyed by
/// `group_id,participant_id,seq`, then the [`FEATURE_COLUMNS`] in order.
pub fn write_feature_matrix<W: Write>(
    writer: W,
    transcripts: &[Transcript],
    features: &[Vec<CommentFeatures>],
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["group_id", "participant_id", "seq"];
    header.extend(FEATURE_COLUMNS);
    wtr.write_record(&header)
        .map_err(crate::corpus::csv_error)?;
    for (t, rows) in transcripts.iter().zip(features) {
        for (c, f) in t.comments.iter().zip(rows) {
            let mut record = vec![
                c.group_id.clone(),
                c.participant_id.clone(),
                c.seq.to_string(),
            ];
            record.extend(f.values().iter().map(|v| sig6(*v)));
            wtr.write_record(&record)
                .map_err(crate::corpus::csv_error)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> LexiconConfig {
        LexiconConfig::default()
    }

    fn comment(text: &str) -> Comment {
        Comment {
            group_id: "g1".into(),
            participant_id: "p1".into(),
            timestamp: 0.0,
            seq: 0,
            text: text.into(),
        }
    }

    #[test]
    fn tokenize_splits_on_whitespace() {
        assert_eq!(tokenize("I don't know"), ["I", "don't", "know"]);
    }

    #[test]
    fn tokenize_strips_edge_punctuation() {
        assert_eq!(tokenize("good point #5!!!"), ["good", "point", "#5"]);
        assert_eq!(tokenize("why Nali??"), ["why", "Nali"]);
        assert_eq!(tokenize("'tis (fine)."), ["tis", "fine"]);
    }

    #[test]
    fn tokenize_drops_pure_punctuation() {
        assert_eq!(tokenize(":-) ... !?"), Vec::<&str>::new());
        assert_eq!(tokenize("ok :-)"), ["ok"]);
    }

    #[test]
    fn tokenize_empty_is_empty() {
        assert_eq!(tokenize(""), Vec::<&str>::new());
        assert_eq!(tokenize("   \t\n"), Vec::<&str>::new());
    }

    #[test]
    fn all_caps_golden() {
        assert_eq!(count_all_caps("IT HAS TO BE ALEX", &cfg()), 5);
        assert_eq!(count_all_caps("ok", &cfg()), 0);
        // "I" is below the default length floor, "SAID" counts
        assert_eq!(count_all_caps("I SAID no", &cfg()), 1);
    }

    #[test]
    fn time_reference_golden() {
        assert_eq!(count_time_references("only 10 mins left", &cfg()), 1);
        assert_eq!(count_time_references("alex did it", &cfg()), 0);
        // indicator saturates at the comment level
        assert_eq!(
            count_time_references("hurry we have 2 minutes, TWO MINUTES", &cfg()),
            1
        );
    }

    #[test]
    fn exclamation_golden() {
        assert_eq!(count_exclamations("good point #5!!!"), 3);
        assert_eq!(count_exclamations("no exclamation"), 0);
        assert_eq!(count_exclamations("wow! really!"), 2);
    }

    #[test]
    fn question_mark_golden() {
        assert_eq!(count_question_marks("why Nali??"), 2);
        assert_eq!(count_question_marks("statement."), 0);
        assert_eq!(count_question_marks("so it is John or Nali???"), 3);
    }

    #[test]
    fn self_reference_golden() {
        assert_eq!(count_self_references("I don't know", &cfg()), 1);
        assert_eq!(count_self_references("you did it", &cfg()), 0);
        assert_eq!(
            count_self_references("I think my answer beats me", &cfg()),
            3
        );
    }

    #[test]
    fn choice_reference_golden() {
        assert_eq!(
            count_choice_references("so it is John or Nali???", &cfg()).unwrap(),
            2
        );
        assert_eq!(
            count_choice_references("nobody is named here", &cfg()).unwrap(),
            0
        );
        assert_eq!(
            count_choice_references("ALEX alex Alex", &cfg()).unwrap(),
            3
        );
    }

    #[test]
    fn empty_choice_lexicon_is_a_config_error() {
        let mut c = cfg();
        c.choice_terms.clear();
        assert!(matches!(
            count_choice_references("anything", &c),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn extract_features_why_nali() {
        let f = extract_features(&comment("why Nali??"), &cfg()).unwrap();
        assert_eq!(f.comment_length_chars, 10);
        assert_eq!(f.word_count, 2);
        assert!((f.average_word_length - 3.5).abs() < 1e-12);
        assert_eq!(f.choice_reference, 1);
        assert_eq!(f.all_caps_words, 0);
        assert_eq!(f.time_reference, 0);
        assert_eq!(f.exclamation_points, 0);
        assert_eq!(f.question_marks, 2);
        assert_eq!(f.self_references, 0);
    }

    #[test]
    fn extract_features_empty_comment_is_all_zero() {
        let f = extract_features(&comment(""), &cfg()).unwrap();
        assert_eq!(f.comment_length_chars, 0);
        assert_eq!(f.word_count, 0);
        assert_eq!(f.average_word_length, 0.0);
        assert_eq!(f.choice_reference, 0);
        assert_eq!(f.all_caps_words, 0);
        assert_eq!(f.time_reference, 0);
        assert_eq!(f.exclamation_points, 0);
        assert_eq!(f.question_marks, 0);
        assert_eq!(f.self_references, 0);
    }

    #[test]
    fn extract_features_all_caps_line() {
        let f = extract_features(&comment("IT HAS TO BE ALEX"), &cfg()).unwrap();
        assert_eq!(f.all_caps_words, 5);
        assert_eq!(f.choice_reference, 1);
        assert_eq!(f.question_marks, 0);
        assert_eq!(f.exclamation_points, 0);
        assert_eq!(f.time_reference, 0);
        assert_eq!(f.self_references, 0);
        assert_eq!(f.word_count, 5);
    }

    #[test]
    fn aggregates_sum_per_participant() {
        let mk = |pid: &str, seq: usize, text: &str| Comment {
            group_id: "g1".into(),
            participant_id: pid.into(),
            timestamp: seq as f64,
            seq,
            text: text.into(),
        };
        let t = Transcript::new(
            "g1",
            vec![
                mk("a", 0, "one two three"),
                mk("b", 1, "it is alex!"),
                mk("a", 2, "four five six seven eight nine ten"),
            ],
        )
        .unwrap();
        let c = cfg();
        let feats: Vec<CommentFeatures> = t
            .comments
            .iter()
            .map(|cm| extract_features(cm, &c).unwrap())
            .collect();
        let aggs = aggregate_participants(&t, &feats).unwrap();
        assert_eq!(aggs.len(), 2);
        let a = aggs.iter().find(|x| x.participant_id == "a").unwrap();
        assert_eq!(a.comment_count, 2);
        assert_eq!(a.word_count, 10);
        let b = aggs.iter().find(|x| x.participant_id == "b").unwrap();
        assert_eq!(b.comment_count, 1);
        assert_eq!(b.choice_reference, 1);
        assert_eq!(b.exclamation_points, 1);

        // column sums over participants equal sums over comments
        let total_words: usize = feats.iter().map(|f| f.word_count).sum();
        assert_eq!(
            aggs.iter().map(|x| x.word_count).sum::<usize>(),
            total_words
        );
    }

    #[test]
    fn single_participant_aggregate_equals_totals() {
        let mk = |seq: usize, text: &str| Comment {
            group_id: "g1".into(),
            participant_id: "only".into(),
            timestamp: seq as f64,
            seq,
            text: text.into(),
        };
        let t = Transcript::new("g1", vec![mk(0, "I know!"), mk(1, "why??")]).unwrap();
        let c = cfg();
        let feats: Vec<CommentFeatures> = t
            .comments
            .iter()
            .map(|cm| extract_features(cm, &c).unwrap())
            .collect();
        let aggs = aggregate_participants(&t, &feats).unwrap();
        assert_eq!(aggs.len(), 1);
        assert_eq!(aggs[0].comment_count, 2);
        assert_eq!(
            aggs[0].question_marks,
            feats.iter().map(|f| f.question_marks).sum::<usize>()
        );
        assert_eq!(
            aggs[0].exclamation_points,
            feats.iter().map(|f| f.exclamation_points).sum::<usize>()
        );
    }

    #[test]
    fn known_synthetic_table_of_counts() {
        // 12 comments over 6 participants with hand-counted word totals.
        let texts: [(&str, &str, usize); 12] = [
            ("p1", "yes", 1),
            ("p2", "it was alex", 3),
            ("p3", "no way!!", 2),
            ("p1", "I think so", 3),
            ("p4", "john did it", 3),
            ("p5", "we only have 5 mins", 5),
            ("p6", "ok", 1),
            ("p2", "HE IS GUILTY", 3),
            ("p3", "why?", 1),
            ("p4", "because of the login times", 5),
            ("p5", "vote now", 2),
            ("p1", "agreed", 1),
        ];
        let comments: Vec<Comment> = texts
            .iter()
            .enumerate()
            .map(|(i, (pid, text, _))| Comment {
                group_id: "g".into(),
                participant_id: (*pid).into(),
                timestamp: i as f64,
                seq: i,
                text: (*text).into(),
            })
            .collect();
        let t = Transcript::new("g", comments).unwrap();
        let c = cfg();
        let feats: Vec<CommentFeatures> = t
            .comments
            .iter()
            .map(|cm| extract_features(cm, &c).unwrap())
            .collect();
        for (f, (_, _, words)) in feats.iter().zip(&texts) {
            assert_eq!(f.word_count, *words);
        }
        let aggs = aggregate_participants(&t, &feats).unwrap();
        assert_eq!(aggs.len(), 6);
        let p1 = aggs.iter().find(|a| a.participant_id == "p1").unwrap();
        assert_eq!(p1.comment_count, 3);
        assert_eq!(p1.word_count, 5);
        let p2 = aggs.iter().find(|a| a.participant_id == "p2").unwrap();
        assert_eq!(p2.all_caps_words, 3);
    }

    #[test]
    fn lexicon_validation_rejects_bad_entries() {
        let json =
            r#"{"choice_terms":["Alex"],"time_terms":[],"self_terms":[],"min_allcaps_len":2}"#;
        assert!(matches!(
            LexiconConfig::from_json(json),
            Err(Error::Config(_))
        ));
        let json =
            r#"{"choice_terms":["a lex"],"time_terms":[],"self_terms":[],"min_allcaps_len":2}"#;
        assert!(matches!(
            LexiconConfig::from_json(json),
            Err(Error::Config(_))
        ));
        let json =
            r#"{"choice_terms":["alex"],"time_terms":[],"self_terms":[],"min_allcaps_len":0}"#;
        assert!(matches!(
            LexiconConfig::from_json(json),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn lexicon_json_round_trip() {
        let cfg = LexiconConfig::default();
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(LexiconConfig::from_json(&json).unwrap(), cfg);
    }
}
