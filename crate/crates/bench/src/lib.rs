//! Shared fixtures for the pipeline benchmarks.

use chatdom_core::corpus::{Comment, Transcript};

/// Chat-like lines covering every indicator: names, caps, punctuation runs,
/// self and time references.
pub const SAMPLE_TEXTS: [&str; 12] = [
    "i think it was alex",
    "why Nali??",
    "IT HAS TO BE ALEX",
    "only 10 mins left",
    "good point #5!!!",
    "anyone who think its john type yes",
    "now lets analyze donahue",
    "I don't know, my clue says 2am",
    "get back to work",
    "lol",
    "he was in the office that night",
    "so it is John or Nali???",
];

/// Builds one synthetic transcript of `n` comments cycling the sample lines
/// over six participants.
pub fn synthetic_transcript(n: usize) -> Transcript {
    let comments = (0..n)
        .map(|seq| Comment {
            group_id: "bench".into(),
            participant_id: format!("p{}", seq % 6),
            timestamp: seq as f64 * 7.0,
            seq,
            text: SAMPLE_TEXTS[seq % SAMPLE_TEXTS.len()].to_string(),
        })
        .collect();
    Transcript::new("bench", comments).expect("valid transcript")
}
