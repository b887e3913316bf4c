//! Jointly trained entity and word embeddings.
//!
//! Authors, languages, venues, and venue iterations are embedded in the same
//! space as words by predicting, for each entity attached to a paper, words
//! sampled from that paper's title and abstract (skipgram with negative
//! sampling).

mod io;
mod sgns;
mod train;

pub use io::{load_model, save_model};
pub use sgns::negative_sampling_loss_and_grad;
pub use train::{train, TrainStats, Trained};

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, PaperRecord};
use crate::matrix::Matrix;
use crate::tokenize::vocab_tokens;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("empty vocabulary at min_count {min_count}; lower --min-count")]
    EmptyVocab { min_count: u64 },
    #[error("corpus yields no entities")]
    NoEntities,
    #[error("all {skipped} papers skipped (no in-vocab tokens); lower --min-count")]
    AllPapersSkipped { skipped: usize },
    #[error("invalid train config: {0}")]
    InvalidConfig(String),
    #[error("bad magic: not a model file")]
    BadMagic,
    #[error("model file truncated: expected {expected} bytes, got {actual}")]
    Truncated { expected: u64, actual: u64 },
    #[error("model file has {0} trailing bytes")]
    TrailingBytes(usize),
    #[error("dimension mismatch: header says dim {header}, config says dim {config}")]
    DimMismatch { header: u32, config: u32 },
    #[error("unknown entity kind byte {0}")]
    InvalidKind(u8),
    #[error("invalid utf-8 in model file: {0}")]
    Utf8(#[from] std::string::FromUtf8Error),
    #[error("invalid config block: {0}")]
    Json(#[from] serde_json::Error),
    #[error("non-finite value in model vectors")]
    NonFinite,
}

/// Entity kinds, in table order. The discriminants are the on-disk bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EntityKind {
    Author = 0,
    Language = 1,
    Venue = 2,
    VenueIteration = 3,
}

impl EntityKind {
    pub fn as_byte(self) -> u8 {
        self as u8
    }

    pub fn from_byte(b: u8) -> Result<Self, EmbedError> {
        match b {
            0 => Ok(Self::Author),
            1 => Ok(Self::Language),
            2 => Ok(Self::Venue),
            3 => Ok(Self::VenueIteration),
            other => Err(EmbedError::InvalidKind(other)),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Author => "author",
            Self::Language => "language",
            Self::Venue => "venue",
            Self::VenueIteration => "venue_iteration",
        }
    }
}

/// A (kind, key) pair, unique within a model's entity table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntityId {
    pub kind: EntityKind,
    pub key: String,
}

impl EntityId {
    pub fn new(kind: EntityKind, key: impl Into<String>) -> Self {
        Self {
            kind,
            key: key.into(),
        }
    }
}

/// Word list ordered by descending count, ties by token; index positions are
/// the word-vector row indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocab {
    words: Vec<String>,
    counts: Vec<u64>,
    min_count: u64,
    index: HashMap<String, usize>,
}

impl Vocab {
    pub fn new(pairs: Vec<(String, u64)>, min_count: u64) -> Self {
        let mut pairs = pairs;
        pairs.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let mut v = Self {
            words: pairs.iter().map(|(w, _)| w.clone()).collect(),
            counts: pairs.iter().map(|(_, c)| *c).collect(),
            min_count,
            index: HashMap::new(),
        };
        v.rebuild_index();
        v
    }

    /// Rebuilds from an already-ordered table, e.g. a model file; the stored
    /// order is preserved verbatim.
    pub(crate) fn from_ordered(words: Vec<String>, counts: Vec<u64>, min_count: u64) -> Self {
        let mut v = Self {
            words,
            counts,
            min_count,
            index: HashMap::new(),
        };
        v.rebuild_index();
        v
    }

    fn rebuild_index(&mut self) {
        self.index = self
            .words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, i: usize) -> &str {
        &self.words[i]
    }

    pub fn count(&self, i: usize) -> u64 {
        self.counts[i]
    }

    pub fn total_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }
}

/// Counts lowercased alphanumeric tokens of every title and abstract and
/// keeps words with count >= min_count.
pub fn build_vocab(corpus: &Corpus, min_count: u64) -> Result<Vocab, EmbedError> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for p in corpus.papers() {
        for tok in paper_tokens(p) {
            *counts.entry(tok).or_insert(0) += 1;
        }
    }
    let pairs: Vec<(String, u64)> = counts
        .into_iter()
        .filter(|(_, c)| *c >= min_count)
        .collect();
    if pairs.is_empty() {
        return Err(EmbedError::EmptyVocab { min_count });
    }
    Ok(Vocab::new(pairs, min_count))
}

/// Tokens of the title plus abstract, in text order, duplicates kept.
pub fn paper_tokens(p: &PaperRecord) -> Vec<String> {
    let mut toks = vocab_tokens(&p.title);
    toks.extend(vocab_tokens(&p.abstract_text));
    toks
}

/// All entities of the corpus, ordered by (kind, key).
pub fn collect_entities(corpus: &Corpus) -> Vec<EntityId> {
    let mut set: BTreeSet<EntityId> = BTreeSet::new();
    for p in corpus.papers() {
        for e in paper_entities(p) {
            set.insert(e);
        }
    }
    set.into_iter().collect()
}

/// Entities attached to one paper: authors in stored order, languages in
/// sorted order, then venue and venue iteration.
pub fn paper_entities(p: &PaperRecord) -> Vec<EntityId> {
    let mut out: Vec<EntityId> = Vec::with_capacity(p.authors.len() + 3);
    for a in &p.authors {
        out.push(EntityId::new(EntityKind::Author, a.clone()));
    }
    for l in p.languages() {
        out.push(EntityId::new(EntityKind::Language, l.clone()));
    }
    out.push(EntityId::new(EntityKind::Venue, p.venue.clone()));
    out.push(EntityId::new(
        EntityKind::VenueIteration,
        p.venue_iteration(),
    ));
    out
}

pub const LR_FLOOR: f64 = 1e-4;

/// Training hyperparameters; persisted verbatim in the model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub dim: usize,
    pub epochs: usize,
    /// Words sampled per (entity, paper) pair per epoch, with replacement.
    pub k_words: usize,
    pub negatives: usize,
    /// Decays linearly to the 1e-4 floor over all scheduled updates.
    pub initial_lr: f64,
    pub min_count: u64,
    pub seed: u64,
    /// More than one thread trades determinism for speed.
    pub threads: usize,
    /// Word2Vec-style frequent-word subsampling threshold; 0 disables.
    pub subsample: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            dim: 75,
            epochs: 5,
            k_words: 20,
            negatives: 5,
            initial_lr: 0.025,
            min_count: 5,
            seed: 42,
            threads: 1,
            subsample: 0.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), EmbedError> {
        let mut problems = Vec::new();
        if self.dim < 2 {
            problems.push("dim must be >= 2");
        }
        if self.epochs == 0 {
            problems.push("epochs must be positive");
        }
        if self.k_words == 0 {
            problems.push("k_words must be positive");
        }
        if self.negatives == 0 {
            problems.push("negatives must be positive");
        }
        if self.initial_lr.is_nan() || self.initial_lr <= 0.0 {
            problems.push("initial_lr must be positive");
        }
        if self.min_count == 0 {
            problems.push("min_count must be positive");
        }
        if self.threads == 0 {
            problems.push("threads must be positive");
        }
        if self.subsample.is_nan() || self.subsample < 0.0 {
            problems.push("subsample must be nonnegative");
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(EmbedError::InvalidConfig(problems.join("; ")))
        }
    }
}

/// Trained model: entity table, vocab, and the two weight matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    pub dim: usize,
    pub entities: Vec<EntityId>,
    pub vocab: Vocab,
    /// E x dim, row per entity.
    pub entity_vectors: Matrix,
    /// V x dim, row per vocab word.
    pub word_vectors: Matrix,
    pub config: TrainConfig,
}

impl EmbeddingModel {
    pub fn entity_index(&self, kind: EntityKind, key: &str) -> Option<usize> {
        self.entities
            .binary_search_by(|e| e.kind.cmp(&kind).then_with(|| e.key.as_str().cmp(key)))
            .ok()
    }

    pub fn entity_vector(&self, i: usize) -> &[f32] {
        self.entity_vectors.row(i)
    }

    pub fn word_vector(&self, i: usize) -> &[f32] {
        self.word_vectors.row(i)
    }

    /// Indices of all entities of one kind; contiguous because the table is
    /// sorted by (kind, key).
    pub fn indices_of_kind(&self, kind: EntityKind) -> Vec<usize> {
        self.entities
            .iter()
            .enumerate()
            .filter(|(_, e)| e.kind == kind)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.entity_vectors.data().iter().all(|v| v.is_finite())
            && self.word_vectors.data().iter().all(|v| v.is_finite())
    }
}
