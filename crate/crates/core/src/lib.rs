//! Corpus analytics for language inclusion in scholarly publishing.
//!
//! The crate is organized around a small pipeline:
//!
//! 1. [`corpus`] loads a JSONL publication corpus and detects language
//!    mentions with a gazetteer.
//! 2. [`taxonomy`] classifies languages into six resource classes and
//!    computes typology-exclusion statistics.
//! 3. [`metrics`] derives frequency-based inclusion metrics per venue:
//!    occurrence matrices, occurrence entropy, and class-wise MRR.
//! 4. [`embed`] jointly trains entity and word embeddings with skipgram
//!    negative sampling and persists them in a binary format.
//! 5. [`analysis`] runs downstream analyses over a trained model:
//!    distance tables, language-author-language MRR, year-prediction
//!    regression, and an exact t-SNE projection.
//! 6. [`synth`] generates seeded synthetic corpora with planted community
//!    structure, used as checkable ground truth by tests and demos.
//!
//! All randomized stages take an explicit seed and are deterministic for a
//! fixed seed on a single thread.

pub mod analysis;
pub mod corpus;
pub mod embed;
pub mod matrix;
pub mod metrics;
pub mod report;
pub mod synth;
pub mod taxonomy;
pub mod tokenize;

pub use analysis::{DistanceTable, LalMrrTable, Projection2D, RegressionEval};
pub use corpus::{Corpus, FieldSelection, Gazetteer, PaperRecord};
pub use embed::{EmbeddingModel, EntityId, EntityKind, TrainConfig, Vocab};
pub use matrix::Matrix;
pub use metrics::{EntropyResult, MrrTable, OccurrenceMatrix};
pub use synth::PlantSpec;
pub use taxonomy::{LanguageInfo, TaxonomyThresholds, TypologyTable};
