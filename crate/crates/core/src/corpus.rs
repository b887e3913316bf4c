//! Corpus loading and gazetteer-based language mention detection.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tokenize::detection_tokens;

pub const YEAR_MIN: i32 = 1950;
pub const YEAR_MAX: i32 = 2100;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: malformed paper record: {source}")]
    MalformedLine {
        line: usize,
        source: serde_json::Error,
    },
    #[error("line {line}: duplicate paper id \"{id}\"")]
    DuplicatePaperId { id: String, line: usize },
    #[error("line {line}: paper id must be nonempty")]
    EmptyPaperId { line: usize },
    #[error("paper \"{id}\": year {year} outside {YEAR_MIN}..={YEAR_MAX}")]
    YearOutOfRange { id: String, year: i32 },
    #[error("gazetteer line {line}: expected at least canonical_id and canonical_name")]
    GazetteerMalformedLine { line: usize },
    #[error("gazetteer line {line}: duplicate canonical id \"{id}\"")]
    DuplicateCanonicalId { id: String, line: usize },
    #[error("gazetteer alias \"{alias}\" claimed by both \"{first}\" and \"{second}\"")]
    AliasCollision {
        alias: String,
        first: String,
        second: String,
    },
    #[error("gazetteer alias \"{alias}\" for \"{id}\" contains no letters")]
    UnmatchableAlias { alias: String, id: String },
}

/// One publication. `languages` is `None` until detection runs; a record
/// loaded with an explicit `languages` array keeps it and skips detection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub id: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub year: i32,
    pub venue: String,
    pub authors: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub languages: Option<BTreeSet<String>>,
}

impl PaperRecord {
    /// Venue-iteration key, e.g. "ACL_2015".
    pub fn venue_iteration(&self) -> String {
        format!("{}_{}", self.venue, self.year)
    }

    /// Detected or provided language ids; empty when detection has not run.
    pub fn languages(&self) -> &BTreeSet<String> {
        static EMPTY: BTreeSet<String> = BTreeSet::new();
        self.languages.as_ref().unwrap_or(&EMPTY)
    }
}

/// Which text fields detection scans. Body is opt-in: language names in
/// running text collide with common words far more often than in titles
/// and abstracts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldSelection {
    pub title: bool,
    pub abstract_text: bool,
    pub body: bool,
}

impl Default for FieldSelection {
    fn default() -> Self {
        Self {
            title: true,
            abstract_text: true,
            body: false,
        }
    }
}

impl FieldSelection {
    pub fn all() -> Self {
        Self {
            title: true,
            abstract_text: true,
            body: true,
        }
    }
}

/// Immutable publication corpus; line order of the source file is preserved.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    papers: Vec<PaperRecord>,
}

impl Corpus {
    pub fn new(papers: Vec<PaperRecord>) -> Result<Self, CorpusError> {
        let mut seen = BTreeSet::new();
        for (i, p) in papers.iter().enumerate() {
            let line = i + 1;
            if p.id.is_empty() {
                return Err(CorpusError::EmptyPaperId { line });
            }
            if !seen.insert(p.id.clone()) {
                return Err(CorpusError::DuplicatePaperId {
                    id: p.id.clone(),
                    line,
                });
            }
            if !(YEAR_MIN..=YEAR_MAX).contains(&p.year) {
                return Err(CorpusError::YearOutOfRange {
                    id: p.id.clone(),
                    year: p.year,
                });
            }
        }
        let mut papers = papers;
        for p in &mut papers {
            dedup_preserving_order(&mut p.authors);
        }
        Ok(Self { papers })
    }

    pub fn from_jsonl_path(path: &Path) -> Result<Self, CorpusError> {
        Self::from_jsonl_reader(BufReader::new(File::open(path)?))
    }

    pub fn from_jsonl_reader(reader: impl BufRead) -> Result<Self, CorpusError> {
        let mut papers = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: PaperRecord =
                serde_json::from_str(&line).map_err(|source| CorpusError::MalformedLine {
                    line: line_no,
                    source,
                })?;
            papers.push(rec);
        }
        // Re-map index-based line numbers from new() onto source lines: since
        // blank lines were dropped, recheck duplicates here for exact lines.
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, p) in papers.iter().enumerate() {
            if p.id.is_empty() {
                return Err(CorpusError::EmptyPaperId { line: i + 1 });
            }
            if seen.insert(p.id.as_str(), i).is_some() {
                return Err(CorpusError::DuplicatePaperId {
                    id: p.id.clone(),
                    line: i + 1,
                });
            }
        }
        Self::new(papers)
    }

    pub fn to_jsonl_writer(&self, mut w: impl Write) -> Result<(), CorpusError> {
        for p in &self.papers {
            serde_json::to_writer(&mut w, p)
                .map_err(|e| CorpusError::Io(std::io::Error::other(e)))?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl_path(&self, path: &Path) -> Result<(), CorpusError> {
        let mut f = std::io::BufWriter::new(File::create(path)?);
        self.to_jsonl_writer(&mut f)?;
        f.flush()?;
        Ok(())
    }

    pub fn papers(&self) -> &[PaperRecord] {
        &self.papers
    }

    pub fn len(&self) -> usize {
        self.papers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty()
    }

    pub fn venues(&self) -> BTreeSet<String> {
        self.papers.iter().map(|p| p.venue.clone()).collect()
    }

    pub fn years(&self) -> BTreeSet<i32> {
        self.papers.iter().map(|p| p.year).collect()
    }

    /// Runs mention detection on every paper that has no `languages`
    /// annotation yet. Returns the number of papers newly annotated.
    /// Per-paper results are deterministic, so parallelism is observable
    /// only as speed.
    pub fn detect_all(&mut self, gaz: &Gazetteer, fields: FieldSelection) -> usize {
        self.papers
            .par_iter_mut()
            .map(|p| {
                if p.languages.is_some() {
                    return 0;
                }
                p.languages = Some(detect_languages(p, gaz, fields));
                1
            })
            .sum()
    }
}

fn dedup_preserving_order(items: &mut Vec<String>) {
    let mut seen = BTreeSet::new();
    items.retain(|it| seen.insert(it.clone()));
}

/// Case-sensitive whole-word language mention detection over the selected
/// fields. Multi-word aliases match as contiguous token sequences.
pub fn detect_languages(
    paper: &PaperRecord,
    gaz: &Gazetteer,
    fields: FieldSelection,
) -> BTreeSet<String> {
    let mut found = BTreeSet::new();
    if fields.title {
        gaz.detect_into(&paper.title, &mut found);
    }
    if fields.abstract_text {
        gaz.detect_into(&paper.abstract_text, &mut found);
    }
    if fields.body {
        if let Some(body) = &paper.body {
            gaz.detect_into(body, &mut found);
        }
    }
    found
}

/// Alias table mapping surface forms to canonical language ids.
///
/// Every alias belongs to exactly one canonical id; matching is
/// case-sensitive on whole detection tokens.
#[derive(Debug, Clone)]
pub struct Gazetteer {
    entries: BTreeMap<String, Vec<String>>,
    // first token of each alias -> (full alias token seq, canonical id)
    index: HashMap<String, Vec<(Vec<String>, String)>>,
}

impl Gazetteer {
    pub fn from_tsv_path(path: &Path) -> Result<Self, CorpusError> {
        Self::from_tsv_reader(BufReader::new(File::open(path)?))
    }

    pub fn from_tsv_reader(reader: impl BufRead) -> Result<Self, CorpusError> {
        let mut rows = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() < 2 || cols[0].trim().is_empty() || cols[1].trim().is_empty() {
                return Err(CorpusError::GazetteerMalformedLine { line: line_no });
            }
            let id = cols[0].trim().to_string();
            let name = cols[1].trim().to_string();
            let mut aliases = vec![name];
            if let Some(field) = cols.get(2) {
                for a in field.split('|') {
                    let a = a.trim();
                    if !a.is_empty() {
                        aliases.push(a.to_string());
                    }
                }
            }
            rows.push((id, aliases, line_no));
        }
        Self::from_rows(rows)
    }

    fn from_rows(rows: Vec<(String, Vec<String>, usize)>) -> Result<Self, CorpusError> {
        let mut entries: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let mut owner: BTreeMap<String, String> = BTreeMap::new();
        for (id, aliases, line) in rows {
            if entries.contains_key(&id) {
                return Err(CorpusError::DuplicateCanonicalId { id, line });
            }
            let mut kept = Vec::new();
            for alias in aliases {
                match owner.get(&alias) {
                    Some(prev) if *prev == id => continue,
                    Some(prev) => {
                        return Err(CorpusError::AliasCollision {
                            alias,
                            first: prev.clone(),
                            second: id,
                        })
                    }
                    None => {
                        owner.insert(alias.clone(), id.clone());
                        kept.push(alias);
                    }
                }
            }
            entries.insert(id, kept);
        }
        let mut index: HashMap<String, Vec<(Vec<String>, String)>> = HashMap::new();
        for (id, aliases) in &entries {
            for alias in aliases {
                let toks: Vec<String> = detection_tokens(alias)
                    .into_iter()
                    .map(str::to_string)
                    .collect();
                let Some(first) = toks.first() else {
                    return Err(CorpusError::UnmatchableAlias {
                        alias: alias.clone(),
                        id: id.clone(),
                    });
                };
                index
                    .entry(first.clone())
                    .or_default()
                    .push((toks, id.clone()));
            }
        }
        Ok(Self { entries, index })
    }

    pub fn canonical_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn aliases(&self, id: &str) -> Option<&[String]> {
        self.entries.get(id).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Canonical ids whose alias occurs in `text` as a contiguous,
    /// case-sensitive whole-token sequence.
    pub fn detect(&self, text: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.detect_into(text, &mut out);
        out
    }

    fn detect_into(&self, text: &str, out: &mut BTreeSet<String>) {
        let tokens = detection_tokens(text);
        for i in 0..tokens.len() {
            let Some(cands) = self.index.get(tokens[i]) else {
                continue;
            };
            for (seq, id) in cands {
                if out.contains(id) {
                    continue;
                }
                if i + seq.len() <= tokens.len()
                    && seq.iter().zip(&tokens[i..]).all(|(a, b)| a == b)
                {
                    out.insert(id.clone());
                }
            }
        }
    }
}
