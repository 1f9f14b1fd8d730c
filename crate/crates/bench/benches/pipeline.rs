use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

use chatdom_bench::{synthetic_transcript, SAMPLE_TEXTS};
use chatdom_core::annotations::{cohens_kappa, EdLabel};
use chatdom_core::corpus::CommentKey;
use chatdom_core::dominance::{dominance_shares, SdMode};
use chatdom_core::features::{extract_features, tokenize, LexiconConfig};
use chatdom_core::glm::{fit, DesignMatrix, FitOptions};

fn bench_tokenize(c: &mut Criterion) {
    c.bench_function("tokenize_sample_lines", |b| {
        b.iter(|| {
            for text in SAMPLE_TEXTS {
                black_box(tokenize(black_box(text)));
            }
        })
    });
}

fn bench_extract(c: &mut Criterion) {
    let cfg = LexiconConfig::default();
    let mut group = c.benchmark_group("extract_features");
    for n in [100usize, 1000] {
        let transcript = synthetic_transcript(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &transcript, |b, t| {
            b.iter(|| {
                for comment in &t.comments {
                    black_box(extract_features(comment, &cfg).unwrap());
                }
            })
        });
    }
    group.finish();
}

fn bench_fit(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 2000usize;
    let p = 9usize;
    let predictors: Vec<(String, Vec<f64>)> = (0..p)
        .map(|j| {
            (
                format!("x{j}"),
                (0..n).map(|_| rng.random_range(0.0..4.0)).collect(),
            )
        })
        .collect();
    let response: Vec<u8> = (0..n)
        .map(|i| u8::from(predictors[0].1[i] + rng.random_range(-2.0..2.0) > 2.0))
        .collect();
    let design = DesignMatrix::new(predictors, response).unwrap();
    c.bench_function("logit_fit_2000x10", |b| {
        b.iter(|| black_box(fit(&design, &FitOptions::default()).unwrap()))
    });
}

fn bench_kappa(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let labels: Vec<EdLabel> = (0..10_000)
        .map(|seq| EdLabel {
            key: CommentKey {
                group_id: "bench".into(),
                seq,
            },
            coder_a: u8::from(rng.random::<bool>()),
            coder_b: u8::from(rng.random::<bool>()),
            resolved: None,
        })
        .collect();
    c.bench_function("cohens_kappa_10k", |b| {
        b.iter(|| black_box(cohens_kappa(black_box(&labels)).unwrap()))
    });
}

fn bench_dominance(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let transcript = synthetic_transcript(1200);
    let labels: Vec<(CommentKey, u8)> = transcript
        .comments
        .iter()
        .map(|cm| (cm.key(), u8::from(rng.random::<f64>() < 0.25)))
        .collect();
    let transcripts = vec![transcript];
    c.bench_function("dominance_shares_1200", |b| {
        b.iter(|| black_box(dominance_shares(&labels, &transcripts, SdMode::Population).unwrap()))
    });
}

criterion_group!(
    benches,
    bench_tokenize,
    bench_extract,
    bench_fit,
    bench_kappa,
    bench_dominance
);
criterion_main!(benches);
