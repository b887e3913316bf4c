//! Seeded synthetic corpora with planted community structure.
//!
//! Each community owns one language, a set of authors, a venue, and a
//! topical vocabulary. Paper text mixes topical and shared words 80/20 and
//! appends year-marked drift tokens, giving embedding and regression tests
//! checkable ground truth.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::{Corpus, CorpusError, Gazetteer, PaperRecord};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid plant spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Shape of the planted corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantSpec {
    pub communities: usize,
    pub authors_per_community: usize,
    pub papers_per_author: usize,
    pub topical_words_per_community: usize,
    pub shared_words: usize,
    pub venues: usize,
    pub year_start: i32,
    pub year_end: i32,
    pub drift_words_per_year: usize,
    pub seed: u64,
}

impl Default for PlantSpec {
    fn default() -> Self {
        Self {
            communities: 3,
            authors_per_community: 5,
            papers_per_author: 10,
            topical_words_per_community: 30,
            shared_words: 20,
            venues: 3,
            year_start: 2005,
            year_end: 2014,
            drift_words_per_year: 3,
            seed: 42,
        }
    }
}

impl PlantSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        let positive = [
            ("communities", self.communities),
            ("authors_per_community", self.authors_per_community),
            ("papers_per_author", self.papers_per_author),
            (
                "topical_words_per_community",
                self.topical_words_per_community,
            ),
            ("shared_words", self.shared_words),
            ("venues", self.venues),
            ("drift_words_per_year", self.drift_words_per_year),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(SynthError::InvalidSpec(format!("{name} must be positive")));
            }
        }
        if self.year_end < self.year_start {
            return Err(SynthError::InvalidSpec(format!(
                "empty year range {}..={}",
                self.year_start, self.year_end
            )));
        }
        Ok(())
    }

    fn years(&self) -> Vec<i32> {
        (self.year_start..=self.year_end).collect()
    }
}

/// Community membership and per-paper facts recorded at generation time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    /// community -> canonical language id.
    pub community_language: Vec<String>,
    /// community -> author ids.
    pub community_authors: Vec<Vec<String>>,
    /// community -> venue code (shared when venues < communities).
    pub community_venue: Vec<String>,
    /// community -> topical words.
    pub community_topics: Vec<Vec<String>>,
    pub paper_community: BTreeMap<String, usize>,
    pub paper_year: BTreeMap<String, i32>,
}

#[derive(Debug)]
pub struct Planted {
    pub corpus: Corpus,
    pub gazetteer: Gazetteer,
    pub truth: GroundTruth,
}

/// Spreadsheet-style letter suffix: 0 -> "A", 25 -> "Z", 26 -> "AA".
fn letters(mut c: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'A' + (c % 26) as u8);
        c /= 26;
        if c == 0 {
            break;
        }
        c -= 1;
    }
    out.reverse();
    String::from_utf8(out).unwrap()
}

fn language_name(c: usize) -> String {
    format!("Lang{}", letters(c))
}

fn language_id(c: usize) -> String {
    language_name(c).to_lowercase()
}

/// TSV accepted by the gazetteer loader, one row per community language.
pub fn gazetteer_tsv(spec: &PlantSpec) -> String {
    let mut out = String::from("# synthetic gazetteer\n");
    for c in 0..spec.communities {
        let _ = writeln!(out, "{}\t{}\t", language_id(c), language_name(c));
    }
    out
}

/// Resource-count CSV mapping community c to taxonomy class c mod 6.
pub fn resources_csv(spec: &PlantSpec) -> String {
    // Representative (labeled, unlabeled) counts inside each class region
    // under the default thresholds.
    const COUNTS: [(u64, u64); 6] = [
        (0, 0),
        (0, 1_000),
        (5, 1_000),
        (5, 20_000),
        (50, 20_000),
        (200, 200_000),
    ];
    let mut out = String::from("id,name,labeled_count,unlabeled_count,speakers\n");
    for c in 0..spec.communities {
        let (labeled, unlabeled) = COUNTS[c % 6];
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            language_id(c),
            language_name(c),
            labeled,
            unlabeled,
            1_000 * (c as u64 + 1)
        );
    }
    out
}

const TITLE_TOKENS: usize = 8;
const ABSTRACT_TOKENS: usize = 92;
/// Probability (out of 10) that a content token is topical.
const TOPICAL_OUT_OF_10: u32 = 8;

pub fn generate(spec: &PlantSpec) -> Result<Planted, SynthError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let years = spec.years();

    let shared: Vec<String> = (0..spec.shared_words)
        .map(|k| format!("shared{k}"))
        .collect();
    let mut truth = GroundTruth {
        community_language: (0..spec.communities).map(language_id).collect(),
        community_authors: (0..spec.communities)
            .map(|c| {
                (0..spec.authors_per_community)
                    .map(|a| format!("author_c{c}_{a}"))
                    .collect()
            })
            .collect(),
        community_venue: (0..spec.communities)
            .map(|c| format!("V{}", c % spec.venues))
            .collect(),
        community_topics: (0..spec.communities)
            .map(|c| {
                (0..spec.topical_words_per_community)
                    .map(|k| format!("topic{c}w{k}"))
                    .collect()
            })
            .collect(),
        paper_community: BTreeMap::new(),
        paper_year: BTreeMap::new(),
    };

    let mut papers = Vec::new();
    let mut global_paper = 0usize;
    for c in 0..spec.communities {
        let topics = &truth.community_topics[c];
        for a in 0..spec.authors_per_community {
            for j in 0..spec.papers_per_author {
                let year = years[global_paper % years.len()];
                let id = format!("p_c{c}_a{a}_{j}");
                let mut draw = |n: usize| {
                    let mut toks = Vec::with_capacity(n);
                    for _ in 0..n {
                        let pool = if rng.random_range(0..10u32) < TOPICAL_OUT_OF_10 {
                            topics
                        } else {
                            &shared
                        };
                        toks.push(pool[rng.random_range(0..pool.len())].clone());
                    }
                    toks
                };
                let title = draw(TITLE_TOKENS).join(" ");
                let mut abs_tokens = vec![language_name(c)];
                abs_tokens.extend(draw(ABSTRACT_TOKENS));
                for k in 0..spec.drift_words_per_year {
                    abs_tokens.push(format!("drift{year}x{k}"));
                }
                truth.paper_community.insert(id.clone(), c);
                truth.paper_year.insert(id.clone(), year);
                papers.push(PaperRecord {
                    id,
                    title,
                    abstract_text: abs_tokens.join(" "),
                    year,
                    venue: truth.community_venue[c].clone(),
                    authors: vec![truth.community_authors[c][a].clone()],
                    body: None,
                    languages: Some([truth.community_language[c].clone()].into()),
                });
                global_paper += 1;
            }
        }
    }

    let gazetteer = Gazetteer::from_tsv_reader(gazetteer_tsv(spec).as_bytes())?;
    Ok(Planted {
        corpus: Corpus::new(papers)?,
        gazetteer,
        truth,
    })
}

/// Input files as the CLI consumes them. The corpus is written without
/// language annotations so ingestion exercises gazetteer detection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthPaths {
    pub corpus: PathBuf,
    pub gazetteer: PathBuf,
    pub resources: PathBuf,
}

pub fn write_inputs(spec: &PlantSpec, dir: &Path) -> Result<SynthPaths, SynthError> {
    let planted = generate(spec)?;
    let mut stripped: Vec<PaperRecord> = planted.corpus.papers().to_vec();
    for p in &mut stripped {
        p.languages = None;
    }
    let paths = SynthPaths {
        corpus: dir.join("corpus.jsonl"),
        gazetteer: dir.join("gazetteer.tsv"),
        resources: dir.join("resources.csv"),
    };
    Corpus::new(stripped)?.to_jsonl_path(&paths.corpus)?;
    std::fs::write(&paths.gazetteer, gazetteer_tsv(spec))?;
    std::fs::write(&paths.resources, resources_csv(spec))?;
    Ok(paths)
}
