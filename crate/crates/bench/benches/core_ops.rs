//! Criterion benches over the pipeline stages at synthetic-corpus scale.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use langlens_core::analysis::{tsne_embed, TsneConfig};
use langlens_core::embed::{train, TrainConfig};
use langlens_core::metrics::{classwise_mrr, entropy_series};
use langlens_core::synth::{generate, resources_csv, PlantSpec, Planted};
use langlens_core::taxonomy::{build_taxonomy_from_reader, TaxonomyThresholds};

fn planted() -> Planted {
    generate(&PlantSpec::default()).unwrap()
}

fn bench_detection(c: &mut Criterion) {
    let p = planted();
    let texts: Vec<String> = p
        .corpus
        .papers()
        .iter()
        .map(|r| format!("{} {}", r.title, r.abstract_text))
        .collect();
    c.bench_function("detect_150_papers", |b| {
        b.iter(|| {
            let mut mentions = 0usize;
            for t in &texts {
                mentions += p.gazetteer.detect(black_box(t)).len();
            }
            mentions
        })
    });
}

fn bench_entropy(c: &mut Criterion) {
    let p = planted();
    c.bench_function("entropy_series_one_venue", |b| {
        b.iter(|| entropy_series(black_box(&p.corpus), "V0"))
    });
}

fn bench_mrr(c: &mut Criterion) {
    let p = planted();
    let taxonomy = build_taxonomy_from_reader(
        resources_csv(&PlantSpec::default()).as_bytes(),
        &TaxonomyThresholds::default(),
    )
    .unwrap();
    let classes = taxonomy
        .iter()
        .map(|(id, info)| (id.clone(), info.class))
        .collect();
    let universe = taxonomy.keys().cloned().collect();
    c.bench_function("classwise_mrr_one_venue", |b| {
        b.iter(|| classwise_mrr(black_box(&p.corpus), "V0", &classes, &universe))
    });
}

fn bench_train(c: &mut Criterion) {
    let p = generate(&PlantSpec {
        papers_per_author: 2,
        ..PlantSpec::default()
    })
    .unwrap();
    let cfg = TrainConfig {
        dim: 16,
        epochs: 1,
        min_count: 1,
        ..TrainConfig::default()
    };
    c.bench_function("train_30_papers_one_epoch", |b| {
        b.iter(|| train(black_box(&p.corpus), &cfg).unwrap())
    });
}

fn lcg(state: &mut u64) -> f64 {
    *state = state
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    (*state >> 11) as f64 / (1u64 << 53) as f64
}

fn bench_tsne(c: &mut Criterion) {
    let mut state = 9u64;
    let points: Vec<Vec<f64>> = (0..60)
        .map(|i| {
            let center = (i % 3) as f64 * 10.0;
            (0..8).map(|_| center + lcg(&mut state) - 0.5).collect()
        })
        .collect();
    let cfg = TsneConfig {
        iters: 250,
        ..TsneConfig::default()
    };
    c.bench_function("tsne_60_points_250_iters", |b| {
        b.iter(|| tsne_embed(black_box(&points), &cfg).unwrap())
    });
}

criterion_group!(
    benches,
    bench_detection,
    bench_entropy,
    bench_mrr,
    bench_train,
    bench_tsne
);
criterion_main!(benches);
