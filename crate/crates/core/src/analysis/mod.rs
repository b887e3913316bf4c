//! Downstream analyses over a trained embedding model.

pub mod regression;
pub mod tsne;

pub use regression::{year_regression_eval, RegressionEval};
pub use tsne::{tsne_embed, tsne_project, Projection2D, TsneConfig};

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::PaperRecord;
use crate::embed::{paper_tokens, EmbeddingModel, EntityKind};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("cosine distance of a zero vector is undefined")]
    ZeroVector,
    #[error("need {need} {what}, model has {have}")]
    NotEnoughEntities {
        what: &'static str,
        need: usize,
        have: usize,
    },
    #[error("t-SNE needs at least {need} points, got {have}")]
    TooFewPoints { need: usize, have: usize },
    #[error("regression needs at least {need} non-OOV papers, got {have}")]
    TooFewPapers { need: usize, have: usize },
    #[error("train fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
    #[error("linear solve failed: {0}")]
    SolveFailed(&'static str),
}

/// 1 − cos(a, b), in [0, 2]. Zero vectors are an error.
pub fn cosine_distance(a: &[f32], b: &[f32]) -> Result<f64, AnalysisError> {
    debug_assert_eq!(a.len(), b.len());
    let mut dot = 0.0f64;
    let mut na = 0.0f64;
    let mut nb = 0.0f64;
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x as f64, y as f64);
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(AnalysisError::ZeroVector);
    }
    Ok((1.0 - dot / (na.sqrt() * nb.sqrt())).clamp(0.0, 2.0))
}

fn cosine_distance_f64(a: &[f64], b: &[f64]) -> Result<f64, AnalysisError> {
    let mut dot = 0.0f64;
    let mut na = 0.0f64;
    let mut nb = 0.0f64;
    for (&x, &y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(AnalysisError::ZeroVector);
    }
    Ok((1.0 - dot / (na.sqrt() * nb.sqrt())).clamp(0.0, 2.0))
}

/// Cosine distances between each venue vector and per-class mean language
/// vectors. Classes with no embedded language are omitted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceTable {
    pub venues: Vec<String>,
    /// Classes present among the model's languages, ascending.
    pub classes: Vec<u8>,
    /// values[i][j] = distance(venue i, mean of class classes[j]).
    pub values: Vec<Vec<f64>>,
    /// Languages absent from the taxonomy, defaulted to class 0.
    pub defaulted_languages: usize,
}

impl DistanceTable {
    /// Distance of one venue to one class, if both are present.
    pub fn get(&self, venue: &str, class: u8) -> Option<f64> {
        let i = self.venues.iter().position(|v| v == venue)?;
        let j = self.classes.iter().position(|&c| c == class)?;
        Some(self.values[i][j])
    }
}

pub fn class_distance_table(
    model: &EmbeddingModel,
    taxonomy: &BTreeMap<String, u8>,
) -> Result<DistanceTable, AnalysisError> {
    let mut sums: BTreeMap<u8, (Vec<f64>, usize)> = BTreeMap::new();
    let mut defaulted = 0usize;
    for idx in model.indices_of_kind(EntityKind::Language) {
        let class = match taxonomy.get(&model.entities[idx].key) {
            Some(c) => *c,
            None => {
                defaulted += 1;
                0
            }
        };
        let entry = sums
            .entry(class)
            .or_insert_with(|| (vec![0.0; model.dim], 0));
        for (s, &v) in entry.0.iter_mut().zip(model.entity_vector(idx)) {
            *s += v as f64;
        }
        entry.1 += 1;
    }
    let classes: Vec<u8> = sums.keys().copied().collect();
    let means: Vec<Vec<f64>> = sums
        .values()
        .map(|(sum, n)| sum.iter().map(|s| s / *n as f64).collect())
        .collect();

    let mut venues = Vec::new();
    let mut values = Vec::new();
    for idx in model.indices_of_kind(EntityKind::Venue) {
        let vvec: Vec<f64> = model.entity_vector(idx).iter().map(|&v| v as f64).collect();
        let row: Result<Vec<f64>, _> = means
            .iter()
            .map(|m| cosine_distance_f64(&vvec, m))
            .collect();
        venues.push(model.entities[idx].key.clone());
        values.push(row?);
    }
    Ok(DistanceTable {
        venues,
        classes,
        values,
        defaulted_languages: defaulted,
    })
}

/// Language-Author-Language MRR per class, for one or more K values at a
/// fixed M.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LalMrrTable {
    /// Languages ranked per author.
    pub m: usize,
    /// class -> K -> mean MRR over that class's languages.
    pub per_class: BTreeMap<u8, BTreeMap<usize, f64>>,
    /// language -> K -> MRR.
    pub per_language: BTreeMap<String, BTreeMap<usize, f64>>,
}

/// For each language, take its K nearest authors by cosine distance; each
/// author votes 1/rank if the language sits within the author's M nearest
/// languages, else 0. Ties break by entity key.
pub fn lal_mrr(
    model: &EmbeddingModel,
    taxonomy: &BTreeMap<String, u8>,
    ks: &[usize],
    m: usize,
) -> Result<LalMrrTable, AnalysisError> {
    let authors = model.indices_of_kind(EntityKind::Author);
    let languages = model.indices_of_kind(EntityKind::Language);
    let k_max = ks.iter().copied().max().unwrap_or(0);
    if k_max == 0 {
        return Err(AnalysisError::NotEnoughEntities {
            what: "K values",
            need: 1,
            have: 0,
        });
    }
    if authors.len() < k_max {
        return Err(AnalysisError::NotEnoughEntities {
            what: "authors",
            need: k_max,
            have: authors.len(),
        });
    }
    if languages.len() < m {
        return Err(AnalysisError::NotEnoughEntities {
            what: "languages",
            need: m,
            have: languages.len(),
        });
    }

    // Each author's M nearest languages, by (distance, key).
    let mut shortlist: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &a in &authors {
        let mut ranked: Vec<(f64, usize)> = languages
            .iter()
            .map(|&l| {
                Ok((
                    cosine_distance(model.entity_vector(a), model.entity_vector(l))?,
                    l,
                ))
            })
            .collect::<Result<_, AnalysisError>>()?;
        ranked.sort_by(|x, y| {
            x.0.total_cmp(&y.0)
                .then_with(|| model.entities[x.1].key.cmp(&model.entities[y.1].key))
        });
        shortlist.insert(a, ranked.into_iter().take(m).map(|(_, l)| l).collect());
    }

    let mut per_language: BTreeMap<String, BTreeMap<usize, f64>> = BTreeMap::new();
    let mut class_sums: BTreeMap<u8, BTreeMap<usize, (f64, usize)>> = BTreeMap::new();
    for &l in &languages {
        let mut nearest: Vec<(f64, usize)> = authors
            .iter()
            .map(|&a| {
                Ok((
                    cosine_distance(model.entity_vector(l), model.entity_vector(a))?,
                    a,
                ))
            })
            .collect::<Result<_, AnalysisError>>()?;
        nearest.sort_by(|x, y| {
            x.0.total_cmp(&y.0)
                .then_with(|| model.entities[x.1].key.cmp(&model.entities[y.1].key))
        });
        let key = &model.entities[l].key;
        let class = taxonomy.get(key).copied().unwrap_or(0);
        for &k in ks {
            let mut sum = 0.0;
            for &(_, a) in nearest.iter().take(k) {
                if let Some(rank) = shortlist[&a].iter().position(|&cand| cand == l) {
                    sum += 1.0 / (rank + 1) as f64;
                }
            }
            let mrr = sum / k as f64;
            per_language.entry(key.clone()).or_default().insert(k, mrr);
            let cell = class_sums
                .entry(class)
                .or_default()
                .entry(k)
                .or_insert((0.0, 0));
            cell.0 += mrr;
            cell.1 += 1;
        }
    }
    let per_class = class_sums
        .into_iter()
        .map(|(class, by_k)| {
            (
                class,
                by_k.into_iter()
                    .map(|(k, (sum, n))| (k, sum / n as f64))
                    .collect(),
            )
        })
        .collect();
    Ok(LalMrrTable {
        m,
        per_class,
        per_language,
    })
}

/// Mean of the paper's in-vocab title+abstract word vectors (multiset: a
/// token counts once per occurrence). All-OOV papers yield zero and a flag.
pub fn paper_vector(model: &EmbeddingModel, paper: &PaperRecord) -> (Vec<f64>, bool) {
    let mut sum = vec![0.0f64; model.dim];
    let mut n = 0usize;
    for tok in paper_tokens(paper) {
        if let Some(i) = model.vocab.index_of(&tok) {
            for (s, &v) in sum.iter_mut().zip(model.word_vector(i)) {
                *s += v as f64;
            }
            n += 1;
        }
    }
    if n == 0 {
        return (sum, true);
    }
    for s in &mut sum {
        *s /= n as f64;
    }
    (sum, false)
}
