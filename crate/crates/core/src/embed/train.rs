//! Seeded skipgram-negative-sampling trainer.
//!
//! With threads = 1 the run is fully deterministic (byte-identical models
//! for identical seed and config). With more threads, updates race benignly
//! on shared matrices (Hogwild-style) and results vary run to run.

use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sgns::SCORE_CLAMP;
use super::{
    build_vocab, collect_entities, paper_entities, paper_tokens, EmbedError, EmbeddingModel,
    TrainConfig, LR_FLOOR,
};
use crate::corpus::Corpus;
use crate::matrix::Matrix;

/// f32 cell updated through relaxed atomics; racy parallel adds are accepted.
struct Real(AtomicU32);

impl Real {
    fn new(v: f32) -> Self {
        Self(AtomicU32::new(v.to_bits()))
    }

    fn get(&self) -> f32 {
        f32::from_bits(self.0.load(Ordering::Relaxed))
    }

    fn set(&self, v: f32) {
        self.0.store(v.to_bits(), Ordering::Relaxed)
    }
}

struct SharedMatrix {
    cols: usize,
    data: Vec<Real>,
}

impl SharedMatrix {
    fn new(rows: usize, cols: usize, init: impl FnMut() -> f32) -> Self {
        let mut init = init;
        Self {
            cols,
            data: (0..rows * cols).map(|_| Real::new(init())).collect(),
        }
    }

    fn row(&self, r: usize) -> &[Real] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    fn to_matrix(&self, rows: usize) -> Matrix {
        Matrix::from_vec(rows, self.cols, self.data.iter().map(Real::get).collect())
    }
}

fn sigmoid32(x: f32) -> f32 {
    let x = x.clamp(-(SCORE_CLAMP as f32), SCORE_CLAMP as f32);
    1.0 / (1.0 + (-x).exp())
}

/// One fused negative-sampling update, Word2Vec style: word rows are updated
/// sequentially against a snapshot of the entity row; the entity row then
/// receives the accumulated update. For distinct word rows this equals one
/// simultaneous SGD step on [`negative_sampling_loss_and_grad`]'s gradients.
///
/// [`negative_sampling_loss_and_grad`]: super::negative_sampling_loss_and_grad
#[allow(clippy::too_many_arguments)]
fn sgd_step(
    entities: &SharedMatrix,
    words: &SharedMatrix,
    entity_idx: usize,
    pos: usize,
    negs: &[usize],
    lr: f32,
    v_buf: &mut [f32],
    ent_upd: &mut [f32],
) -> f64 {
    let ent_row = entities.row(entity_idx);
    for (b, cell) in v_buf.iter_mut().zip(ent_row) {
        *b = cell.get();
    }
    ent_upd.fill(0.0);
    let mut loss = 0.0f64;
    for (target, label) in std::iter::once((pos, 1.0f32)).chain(negs.iter().map(|&n| (n, 0.0f32))) {
        let w_row = words.row(target);
        let mut score = 0.0f32;
        for (v, cell) in v_buf.iter().zip(w_row) {
            score += v * cell.get();
        }
        let sig = sigmoid32(score);
        let prob = if label == 1.0 {
            sig as f64
        } else {
            1.0 - sig as f64
        };
        loss -= prob.ln();
        let g = (label - sig) * lr;
        for ((v, cell), upd) in v_buf.iter().zip(w_row).zip(ent_upd.iter_mut()) {
            let old = cell.get();
            *upd += g * old;
            cell.set(old + g * v);
        }
    }
    for (cell, upd) in ent_row.iter().zip(ent_upd.iter()) {
        cell.set(cell.get() + *upd);
    }
    loss
}

struct PreparedPaper {
    entity_idxs: Vec<usize>,
    token_idxs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainStats {
    /// Mean loss per applied update, one entry per epoch.
    pub epoch_mean_loss: Vec<f64>,
    /// Papers with no in-vocab title+abstract tokens.
    pub skipped_papers: usize,
    pub total_updates: u64,
}

#[derive(Debug)]
pub struct Trained {
    pub model: EmbeddingModel,
    pub stats: TrainStats,
}

/// Cumulative unigram^0.75 noise distribution over vocab indices.
struct NoiseTable {
    cumulative: Vec<f64>,
    total: f64,
}

impl NoiseTable {
    fn new(counts: impl Iterator<Item = u64>) -> Self {
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        for c in counts {
            acc += (c as f64).powf(0.75);
            cumulative.push(acc);
        }
        Self {
            cumulative,
            total: acc,
        }
    }

    fn sample(&self, rng: &mut impl Rng) -> usize {
        let x = rng.random::<f64>() * self.total;
        self.cumulative
            .partition_point(|&c| c <= x)
            .min(self.cumulative.len() - 1)
    }
}

pub fn train(corpus: &Corpus, cfg: &TrainConfig) -> Result<Trained, EmbedError> {
    cfg.validate()?;
    let vocab = build_vocab(corpus, cfg.min_count)?;
    let entities = collect_entities(corpus);
    if entities.is_empty() {
        return Err(EmbedError::NoEntities);
    }

    let mut prepared = Vec::new();
    let mut skipped_papers = 0usize;
    for p in corpus.papers() {
        let token_idxs: Vec<usize> = paper_tokens(p)
            .iter()
            .filter_map(|t| vocab.index_of(t))
            .collect();
        if token_idxs.is_empty() {
            skipped_papers += 1;
            continue;
        }
        let entity_idxs: Vec<usize> = paper_entities(p)
            .iter()
            .map(|e| {
                entities
                    .binary_search(e)
                    .expect("paper entity missing from collected table")
            })
            .collect();
        prepared.push(PreparedPaper {
            entity_idxs,
            token_idxs,
        });
    }
    if prepared.is_empty() {
        return Err(EmbedError::AllPapersSkipped {
            skipped: skipped_papers,
        });
    }

    let dim = cfg.dim;
    let mut main_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let half = 0.5 / dim as f32;
    let ent_mat = SharedMatrix::new(entities.len(), dim, || main_rng.random_range(-half..half));
    let word_mat = SharedMatrix::new(vocab.len(), dim, || 0.0);

    let noise = NoiseTable::new((0..vocab.len()).map(|i| vocab.count(i)));
    let keep_prob: Option<Vec<f64>> = (cfg.subsample > 0.0).then(|| {
        let total = vocab.total_count() as f64;
        (0..vocab.len())
            .map(|i| {
                let f = vocab.count(i) as f64 / total;
                (((f / cfg.subsample).sqrt() + 1.0) * cfg.subsample / f).min(1.0)
            })
            .collect()
    });

    let updates_per_epoch: u64 = prepared
        .iter()
        .map(|p| (p.entity_idxs.len() * cfg.k_words) as u64)
        .sum();
    let scheduled = updates_per_epoch * cfg.epochs as u64;
    let counter = AtomicU64::new(0);

    let mut order: Vec<usize> = (0..prepared.len()).collect();
    let mut epoch_mean_loss = Vec::with_capacity(cfg.epochs);
    let mut total_updates = 0u64;

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut main_rng);
        let chunk_size = order.len().div_ceil(cfg.threads);
        let (loss_sum, loss_count) = std::thread::scope(|s| {
            let handles: Vec<_> = order
                .chunks(chunk_size)
                .enumerate()
                .map(|(tid, chunk)| {
                    let prepared = &prepared;
                    let ent_mat = &ent_mat;
                    let word_mat = &word_mat;
                    let noise = &noise;
                    let keep_prob = &keep_prob;
                    let counter = &counter;
                    s.spawn(move || {
                        let mut rng = ChaCha8Rng::seed_from_u64(
                            cfg.seed
                                .wrapping_add(1)
                                .wrapping_add((epoch * cfg.threads + tid) as u64),
                        );
                        let mut v_buf = vec![0.0f32; dim];
                        let mut ent_upd = vec![0.0f32; dim];
                        let mut negs = Vec::with_capacity(cfg.negatives);
                        let mut loss_sum = 0.0f64;
                        let mut loss_count = 0u64;
                        for &pi in chunk {
                            let paper = &prepared[pi];
                            for &e_idx in &paper.entity_idxs {
                                for _ in 0..cfg.k_words {
                                    let t = counter.fetch_add(1, Ordering::Relaxed);
                                    let lr = (cfg.initial_lr * (1.0 - t as f64 / scheduled as f64))
                                        .max(LR_FLOOR)
                                        as f32;
                                    let pos = paper.token_idxs
                                        [rng.random_range(0..paper.token_idxs.len())];
                                    if let Some(keep) = keep_prob {
                                        if keep[pos] < 1.0 && rng.random::<f64>() >= keep[pos] {
                                            continue;
                                        }
                                    }
                                    negs.clear();
                                    for _ in 0..cfg.negatives {
                                        let n = noise.sample(&mut rng);
                                        if n != pos {
                                            negs.push(n);
                                        }
                                    }
                                    loss_sum += sgd_step(
                                        ent_mat,
                                        word_mat,
                                        e_idx,
                                        pos,
                                        &negs,
                                        lr,
                                        &mut v_buf,
                                        &mut ent_upd,
                                    );
                                    loss_count += 1;
                                }
                            }
                        }
                        (loss_sum, loss_count)
                    })
                })
                .collect();
            let mut loss_sum = 0.0f64;
            let mut loss_count = 0u64;
            for h in handles {
                let (s, c) = h.join().expect("training thread panicked");
                loss_sum += s;
                loss_count += c;
            }
            (loss_sum, loss_count)
        });
        epoch_mean_loss.push(if loss_count == 0 {
            0.0
        } else {
            loss_sum / loss_count as f64
        });
        total_updates += loss_count;
    }

    let model = EmbeddingModel {
        dim,
        entity_vectors: ent_mat.to_matrix(entities.len()),
        word_vectors: word_mat.to_matrix(vocab.len()),
        entities,
        vocab,
        config: cfg.clone(),
    };
    if !model.is_finite() {
        return Err(EmbedError::NonFinite);
    }
    Ok(Trained {
        model,
        stats: TrainStats {
            epoch_mean_loss,
            skipped_papers,
            total_updates,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::super::negative_sampling_loss_and_grad;
    use super::*;
    use crate::corpus::PaperRecord;

    fn paper(
        id: &str,
        venue: &str,
        year: i32,
        title: &str,
        author: &str,
        lang: &str,
    ) -> PaperRecord {
        PaperRecord {
            id: id.into(),
            title: title.into(),
            abstract_text: format!("{title} {title}"),
            year,
            venue: venue.into(),
            authors: vec![author.into()],
            body: None,
            languages: Some([lang.to_string()].into()),
        }
    }

    fn small_corpus() -> Corpus {
        let mut papers = Vec::new();
        for i in 0..12 {
            let (venue, lang, topic) = if i % 2 == 0 {
                ("VA", "la", "alpha beta gamma")
            } else {
                ("VB", "lb", "delta epsilon zeta")
            };
            papers.push(paper(
                &format!("p{i}"),
                venue,
                2000 + i % 3,
                topic,
                &format!("au{}", i % 4),
                lang,
            ));
        }
        Corpus::new(papers).unwrap()
    }

    fn small_cfg() -> TrainConfig {
        TrainConfig {
            dim: 8,
            epochs: 5,
            k_words: 4,
            negatives: 3,
            min_count: 1,
            seed: 42,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn fixed_seed_single_thread_is_deterministic() {
        let c = small_corpus();
        let a = train(&c, &small_cfg()).unwrap();
        let b = train(&c, &small_cfg()).unwrap();
        assert_eq!(a.model, b.model);
        assert_eq!(a.stats, b.stats);
    }

    #[test]
    fn different_seed_changes_the_model() {
        let c = small_corpus();
        let a = train(&c, &small_cfg()).unwrap();
        let b = train(
            &c,
            &TrainConfig {
                seed: 43,
                ..small_cfg()
            },
        )
        .unwrap();
        assert_ne!(a.model.entity_vectors, b.model.entity_vectors);
    }

    // Two disjoint 8-word topics: negatives rarely collide with a pair's
    // other positives, so the mean epoch loss has room to fall.
    fn loss_corpus() -> Corpus {
        let topics = [
            "alpha beta gamma delta epsilon zeta eta theta",
            "iota kappa lambda mu nu xi omicron pi",
        ];
        let mut papers = Vec::new();
        for i in 0..40 {
            let t = i % 2;
            papers.push(paper(
                &format!("p{i}"),
                if t == 0 { "VA" } else { "VB" },
                2000 + (i % 3) as i32,
                topics[t],
                &format!("au{}", i % 8),
                if t == 0 { "la" } else { "lb" },
            ));
        }
        Corpus::new(papers).unwrap()
    }

    #[test]
    fn loss_decreases_over_epochs() {
        let c = loss_corpus();
        let t = train(
            &c,
            &TrainConfig {
                epochs: 6,
                k_words: 6,
                ..small_cfg()
            },
        )
        .unwrap();
        let first = t.stats.epoch_mean_loss[0];
        for (i, &l) in t.stats.epoch_mean_loss.iter().enumerate().skip(2) {
            assert!(
                l < first,
                "epoch {i} loss {l} not below first-epoch loss {first}"
            );
        }
    }

    #[test]
    fn entity_vectors_are_finite_and_nonzero() {
        let c = small_corpus();
        let t = train(&c, &small_cfg()).unwrap();
        assert!(t.model.is_finite());
        for i in 0..t.model.entities.len() {
            let v = t.model.entity_vector(i);
            assert!(
                v.iter().any(|&x| x != 0.0),
                "zero vector for {:?}",
                t.model.entities[i]
            );
        }
    }

    #[test]
    fn paper_without_invocab_tokens_is_skipped() {
        let mut papers = vec![paper("p0", "VA", 2000, "alpha alpha alpha", "au", "la")];
        let mut odd = paper("p1", "VA", 2000, "", "au", "la");
        odd.abstract_text = String::new();
        papers.push(odd);
        let c = Corpus::new(papers).unwrap();
        let t = train(
            &c,
            &TrainConfig {
                min_count: 3,
                ..small_cfg()
            },
        )
        .unwrap();
        assert_eq!(t.stats.skipped_papers, 1);
    }

    #[test]
    fn starved_corpus_errors_instead_of_training() {
        // Every vocab word occurs in some paper, so the empty-vocab error
        // fires before the all-skipped one can.
        let mut p0 = paper("p0", "VA", 2000, "solo solo solo", "au", "la");
        p0.abstract_text = String::new();
        let c = Corpus::new(vec![p0]).unwrap();
        let err = train(
            &c,
            &TrainConfig {
                min_count: 4,
                ..small_cfg()
            },
        )
        .unwrap_err();
        assert!(matches!(err, EmbedError::EmptyVocab { .. }));
    }

    #[test]
    fn total_updates_match_schedule_without_subsampling() {
        let c = small_corpus();
        let cfg = small_cfg();
        let t = train(&c, &cfg).unwrap();
        // Every paper has 1 author + 1 language + venue + iteration = 4 entities.
        let expected = (12 * 4 * cfg.k_words * cfg.epochs) as u64;
        assert_eq!(t.stats.total_updates, expected);
    }

    #[test]
    fn sgd_step_applies_the_analytic_gradients() {
        let dim = 6;
        let ents = SharedMatrix::new(1, dim, {
            let mut x = 0.0f32;
            move || {
                x += 0.1;
                x
            }
        });
        let words = SharedMatrix::new(3, dim, {
            let mut x = 0.3f32;
            move || {
                x = -x * 0.9;
                x
            }
        });
        let v0: Vec<f32> = ents.row(0).iter().map(Real::get).collect();
        let w0: Vec<Vec<f32>> = (0..3)
            .map(|r| words.row(r).iter().map(Real::get).collect())
            .collect();

        let lr = 0.05f32;
        let mut v_buf = vec![0.0; dim];
        let mut ent_upd = vec![0.0; dim];
        let loss = sgd_step(&ents, &words, 0, 0, &[1, 2], lr, &mut v_buf, &mut ent_upd);

        let negs: Vec<&[f32]> = vec![&w0[1], &w0[2]];
        let (want_loss, grad_v, grad_w) = negative_sampling_loss_and_grad(&v0, &w0[0], &negs);
        assert!((loss - want_loss as f64).abs() < 1e-5);
        for c in 0..dim {
            let want = v0[c] - lr * grad_v[c];
            assert!((ents.row(0)[c].get() - want).abs() < 1e-6);
            for (r, gw) in grad_w.iter().enumerate() {
                let want = w0[r][c] - lr * gw[c];
                assert!((words.row(r)[c].get() - want).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn noise_table_samples_every_index() {
        let noise = NoiseTable::new([5u64, 1, 1].into_iter());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut seen = [0usize; 3];
        for _ in 0..3000 {
            seen[noise.sample(&mut rng)] += 1;
        }
        assert!(seen.iter().all(|&s| s > 0));
        assert!(seen[0] > seen[1] && seen[0] > seen[2]);
    }

    #[test]
    fn multithreaded_training_completes() {
        let c = small_corpus();
        let t = train(
            &c,
            &TrainConfig {
                threads: 3,
                ..small_cfg()
            },
        )
        .unwrap();
        assert!(t.model.is_finite());
        assert_eq!(t.stats.total_updates, 12 * 4 * 4 * 5);
    }
}
