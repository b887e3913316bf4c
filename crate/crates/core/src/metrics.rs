//! Frequency-based inclusion metrics: occurrence matrices, occurrence
//! entropy, and class-wise mean reciprocal rank.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::corpus::Corpus;
use crate::matrix::Matrix;

/// Binary paper-language mention matrix for one venue-year.
#[derive(Debug, Clone, PartialEq)]
pub struct OccurrenceMatrix {
    pub venue: String,
    pub year: i32,
    /// Papers of (venue, year) in corpus order.
    pub paper_ids: Vec<String>,
    /// Sorted; the mentioned languages plus any requested universe columns.
    pub language_ids: Vec<String>,
    pub bits: Matrix,
}

/// Mention matrix over the languages actually mentioned in (venue, year).
pub fn occurrence_matrix(corpus: &Corpus, venue: &str, year: i32) -> OccurrenceMatrix {
    occurrence_matrix_with_universe(corpus, venue, year, &BTreeSet::new())
}

/// Mention matrix whose columns are the mentioned languages united with
/// `universe`; universe-only columns are all zero.
pub fn occurrence_matrix_with_universe(
    corpus: &Corpus,
    venue: &str,
    year: i32,
    universe: &BTreeSet<String>,
) -> OccurrenceMatrix {
    let papers: Vec<_> = corpus
        .papers()
        .iter()
        .filter(|p| p.venue == venue && p.year == year)
        .collect();
    let mut langs: BTreeSet<String> = universe.clone();
    for p in &papers {
        langs.extend(p.languages().iter().cloned());
    }
    let language_ids: Vec<String> = langs.into_iter().collect();
    let col: BTreeMap<&str, usize> = language_ids
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let mut bits = Matrix::zeros(papers.len(), language_ids.len());
    let mut paper_ids = Vec::with_capacity(papers.len());
    for (r, p) in papers.iter().enumerate() {
        paper_ids.push(p.id.clone());
        for l in p.languages() {
            if let Some(&c) = col.get(l.as_str()) {
                bits.set(r, c, 1.0);
            }
        }
    }
    OccurrenceMatrix {
        venue: venue.to_string(),
        year,
        paper_ids,
        language_ids,
        bits,
    }
}

/// Occurrence entropy of one venue-year, in nats.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyResult {
    pub venue: String,
    pub year: i32,
    pub papers: usize,
    pub languages_mentioned: usize,
    pub entropy: f64,
}

/// S_j = (1/P)·Σ_i M_ij, S'_j = S_j/Σ_j S_j, S = −Σ_j S'_j·ln S'_j with
/// 0·ln 0 = 0. S = 0 when P = 0 or nothing is mentioned.
pub fn occurrence_entropy(m: &OccurrenceMatrix) -> EntropyResult {
    let p = m.bits.rows();
    let mut s = vec![0.0f64; m.bits.cols()];
    if p > 0 {
        for (j, sj) in s.iter_mut().enumerate() {
            *sj = m.bits.col_sum(j) / p as f64;
        }
    }
    let languages_mentioned = s.iter().filter(|&&v| v > 0.0).count();
    let total: f64 = s.iter().sum();
    let mut entropy = 0.0;
    if total > 0.0 {
        for sj in &s {
            let norm = sj / total;
            if norm > 0.0 {
                entropy -= norm * norm.ln();
            }
        }
    }
    EntropyResult {
        venue: m.venue.clone(),
        year: m.year,
        papers: p,
        languages_mentioned,
        entropy,
    }
}

/// One entropy result per year of the venue that has at least one paper,
/// ordered by year. Unknown venues give an empty list.
pub fn entropy_series(corpus: &Corpus, venue: &str) -> Vec<EntropyResult> {
    let years: BTreeSet<i32> = corpus
        .papers()
        .iter()
        .filter(|p| p.venue == venue)
        .map(|p| p.year)
        .collect();
    years
        .into_iter()
        .map(|y| occurrence_entropy(&occurrence_matrix(corpus, venue, y)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMrr {
    pub mrr: f64,
    pub inverse_mrr: f64,
    pub queries: usize,
}

/// Per-class mean reciprocal rank for one venue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MrrTable {
    pub venue: String,
    pub per_class: BTreeMap<u8, ClassMrr>,
}

/// Number of venue papers mentioning each language (binary per paper).
pub fn mention_frequencies(corpus: &Corpus, venue: &str) -> BTreeMap<String, usize> {
    let mut freq = BTreeMap::new();
    for p in corpus.papers().iter().filter(|p| p.venue == venue) {
        for l in p.languages() {
            *freq.entry(l.clone()).or_insert(0) += 1;
        }
    }
    freq
}

/// Ranks every universe language by venue mention frequency (competition
/// ranking: ties share the smallest rank of the group; zero-mention
/// languages all share rank = |universe|), then averages reciprocal ranks
/// per taxonomy class. Classes with no member languages are omitted.
///
/// Callers must pass a universe that contains every taxonomy language; ids
/// outside the universe are ignored.
pub fn classwise_mrr(
    corpus: &Corpus,
    venue: &str,
    taxonomy: &BTreeMap<String, u8>,
    universe: &BTreeSet<String>,
) -> MrrTable {
    let freq = mention_frequencies(corpus, venue);
    let freq_of = |lang: &str| freq.get(lang).copied().unwrap_or(0);
    let mentioned: Vec<usize> = universe
        .iter()
        .map(|l| freq_of(l))
        .filter(|&f| f > 0)
        .collect();
    let rank_of = |lang: &str| -> usize {
        let f = freq_of(lang);
        if f == 0 {
            universe.len()
        } else {
            1 + mentioned.iter().filter(|&&g| g > f).count()
        }
    };
    let mut sums: BTreeMap<u8, (f64, usize)> = BTreeMap::new();
    for (lang, class) in taxonomy {
        if !universe.contains(lang) {
            continue;
        }
        let e = sums.entry(*class).or_insert((0.0, 0));
        e.0 += 1.0 / rank_of(lang) as f64;
        e.1 += 1;
    }
    let per_class = sums
        .into_iter()
        .map(|(class, (sum, n))| {
            let mrr = sum / n as f64;
            (
                class,
                ClassMrr {
                    mrr,
                    inverse_mrr: 1.0 / mrr,
                    queries: n,
                },
            )
        })
        .collect();
    MrrTable {
        venue: venue.to_string(),
        per_class,
    }
}
