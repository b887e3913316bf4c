//! Resource-based language taxonomy (classes 0-5) and typology exclusions.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row} (\"{id}\"): negative {field}")]
    NegativeCount {
        row: usize,
        id: String,
        field: &'static str,
    },
    #[error("row {row}: duplicate language id \"{id}\"")]
    DuplicateLanguage { row: usize, id: String },
    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),
    #[error("row {row}: duplicate (language, feature) pair (\"{language}\", \"{feature}\")")]
    DuplicateTypologyPair {
        row: usize,
        language: String,
        feature: String,
    },
    #[error("row {row}: empty {field}")]
    EmptyTypologyField { row: usize, field: &'static str },
}

/// Cut points of the six-class decision list. Classes are assigned by the
/// first matching rule, checked from class 5 downward, so the class-3 rule
/// (high unlabeled, low labeled) wins over class 2 where both could fire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaxonomyThresholds {
    pub l1: u64,
    pub l2: u64,
    pub l3: u64,
    pub u1: u64,
    pub u2: u64,
    pub u3: u64,
}

impl Default for TaxonomyThresholds {
    fn default() -> Self {
        Self {
            l1: 1,
            l2: 10,
            l3: 100,
            u1: 100,
            u2: 10_000,
            u3: 100_000,
        }
    }
}

impl TaxonomyThresholds {
    pub fn validate(&self) -> Result<(), TaxonomyError> {
        let ok_l = 0 < self.l1 && self.l1 <= self.l2 && self.l2 <= self.l3;
        let ok_u = 0 < self.u1 && self.u1 <= self.u2 && self.u2 <= self.u3;
        if !ok_l {
            return Err(TaxonomyError::InvalidThresholds(format!(
                "need 0 < l1 <= l2 <= l3, got ({}, {}, {})",
                self.l1, self.l2, self.l3
            )));
        }
        if !ok_u {
            return Err(TaxonomyError::InvalidThresholds(format!(
                "need 0 < u1 <= u2 <= u3, got ({}, {}, {})",
                self.u1, self.u2, self.u3
            )));
        }
        Ok(())
    }

    pub fn from_json_path(path: &Path) -> Result<Self, TaxonomyError> {
        let mut buf = String::new();
        File::open(path)?.read_to_string(&mut buf)?;
        let t: Self = serde_json::from_str(&buf)
            .map_err(|e| TaxonomyError::InvalidThresholds(e.to_string()))?;
        t.validate()?;
        Ok(t)
    }
}

/// One language with resource counts and its derived class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageInfo {
    pub id: String,
    pub name: String,
    pub labeled_count: u64,
    pub unlabeled_count: u64,
    pub speakers: u64,
    pub class: u8,
}

/// Ordered decision list over (labeled, unlabeled) resource counts.
pub fn classify_language(labeled: u64, unlabeled: u64, t: &TaxonomyThresholds) -> u8 {
    if labeled >= t.l3 && unlabeled >= t.u3 {
        5
    } else if labeled >= t.l2 && unlabeled >= t.u2 {
        4
    } else if labeled < t.l2 && unlabeled >= t.u2 {
        3
    } else if labeled >= t.l1 && unlabeled >= t.u1 {
        2
    } else if labeled < t.l1 && unlabeled >= t.u1 {
        1
    } else {
        0
    }
}

#[derive(Debug, Deserialize)]
struct ResourceRow {
    id: String,
    name: String,
    labeled_count: i64,
    unlabeled_count: i64,
    speakers: i64,
}

/// Loads the resource-count CSV (header id,name,labeled_count,
/// unlabeled_count,speakers) and classifies every language.
pub fn build_taxonomy(
    path: &Path,
    t: &TaxonomyThresholds,
) -> Result<BTreeMap<String, LanguageInfo>, TaxonomyError> {
    t.validate()?;
    build_taxonomy_from_reader(File::open(path)?, t)
}

pub fn build_taxonomy_from_reader(
    reader: impl Read,
    t: &TaxonomyThresholds,
) -> Result<BTreeMap<String, LanguageInfo>, TaxonomyError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = BTreeMap::new();
    for (i, rec) in rdr.deserialize::<ResourceRow>().enumerate() {
        let row = i + 1;
        let rec = rec?;
        for (field, v) in [
            ("labeled_count", rec.labeled_count),
            ("unlabeled_count", rec.unlabeled_count),
            ("speakers", rec.speakers),
        ] {
            if v < 0 {
                return Err(TaxonomyError::NegativeCount {
                    row,
                    id: rec.id,
                    field,
                });
            }
        }
        if out.contains_key(&rec.id) {
            return Err(TaxonomyError::DuplicateLanguage { row, id: rec.id });
        }
        let labeled = rec.labeled_count as u64;
        let unlabeled = rec.unlabeled_count as u64;
        let info = LanguageInfo {
            class: classify_language(labeled, unlabeled, t),
            id: rec.id.clone(),
            name: rec.name,
            labeled_count: labeled,
            unlabeled_count: unlabeled,
            speakers: rec.speakers as u64,
        };
        out.insert(rec.id, info);
    }
    Ok(out)
}

/// Number of languages per class.
pub fn class_histogram(taxonomy: &BTreeMap<String, LanguageInfo>) -> [usize; 6] {
    let mut h = [0usize; 6];
    for info in taxonomy.values() {
        h[info.class as usize] += 1;
    }
    h
}

/// (language, feature, category) rows with no duplicate (language, feature).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TypologyTable {
    rows: Vec<(String, String, String)>,
}

#[derive(Debug, Deserialize)]
struct TypologyRow {
    language_id: String,
    feature_id: String,
    category_id: String,
}

impl TypologyTable {
    pub fn new(rows: Vec<(String, String, String)>) -> Result<Self, TaxonomyError> {
        let mut seen = BTreeSet::new();
        for (i, (lang, feat, cat)) in rows.iter().enumerate() {
            let row = i + 1;
            if lang.is_empty() {
                return Err(TaxonomyError::EmptyTypologyField {
                    row,
                    field: "language_id",
                });
            }
            if feat.is_empty() {
                return Err(TaxonomyError::EmptyTypologyField {
                    row,
                    field: "feature_id",
                });
            }
            if cat.is_empty() {
                return Err(TaxonomyError::EmptyTypologyField {
                    row,
                    field: "category_id",
                });
            }
            if !seen.insert((lang.clone(), feat.clone())) {
                return Err(TaxonomyError::DuplicateTypologyPair {
                    row,
                    language: lang.clone(),
                    feature: feat.clone(),
                });
            }
        }
        Ok(Self { rows })
    }

    pub fn from_csv_path(path: &Path) -> Result<Self, TaxonomyError> {
        Self::from_csv_reader(File::open(path)?)
    }

    pub fn from_csv_reader(reader: impl Read) -> Result<Self, TaxonomyError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut rows = Vec::new();
        for rec in rdr.deserialize::<TypologyRow>() {
            let rec = rec?;
            rows.push((rec.language_id, rec.feature_id, rec.category_id));
        }
        Self::new(rows)
    }

    pub fn rows(&self) -> &[(String, String, String)] {
        &self.rows
    }
}

/// Result of [`typology_exclusions`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypologyExclusions {
    /// (feature, category) pairs attested only among class-{0,1,2} languages.
    pub total_excluded: usize,
    pub per_feature: BTreeMap<String, usize>,
    /// Unique (feature, category) pairs over the whole table.
    pub universe: usize,
    /// Languages in the table with no class assignment; their rows still
    /// count toward the universe.
    pub skipped_languages: usize,
}

/// Counts (feature, category) pairs present among low-resource languages
/// (classes 0-2) and absent among high-resource ones (classes 3-5).
pub fn typology_exclusions(
    table: &TypologyTable,
    classes: &BTreeMap<String, u8>,
) -> TypologyExclusions {
    let mut universe: BTreeSet<(&str, &str)> = BTreeSet::new();
    let mut low: BTreeSet<(&str, &str)> = BTreeSet::new();
    let mut high: BTreeSet<(&str, &str)> = BTreeSet::new();
    let mut skipped: BTreeSet<&str> = BTreeSet::new();
    for (lang, feat, cat) in table.rows() {
        let pair = (feat.as_str(), cat.as_str());
        universe.insert(pair);
        match classes.get(lang) {
            Some(c) if *c <= 2 => {
                low.insert(pair);
            }
            Some(_) => {
                high.insert(pair);
            }
            None => {
                skipped.insert(lang);
            }
        }
    }
    let mut per_feature: BTreeMap<String, usize> = BTreeMap::new();
    let mut total = 0usize;
    for pair in low.difference(&high) {
        total += 1;
        *per_feature.entry(pair.0.to_string()).or_default() += 1;
    }
    TypologyExclusions {
        total_excluded: total,
        per_feature,
        universe: universe.len(),
        skipped_languages: skipped.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn defaults() -> TaxonomyThresholds {
        TaxonomyThresholds::default()
    }

    #[test]
    fn no_resources_is_class_zero() {
        assert_eq!(classify_language(0, 0, &defaults()), 0);
    }

    #[test]
    fn rich_language_is_class_five() {
        assert_eq!(classify_language(200, 2_000_000, &defaults()), 5);
    }

    #[test]
    fn unlabeled_only_is_class_one() {
        assert_eq!(classify_language(0, 5_000, &defaults()), 1);
    }

    #[test]
    fn one_language_per_class_fixture() {
        // One (labeled, unlabeled) pair straddling each boundary.
        let cases = [
            (0, 0, 0u8),
            (0, 100, 1),
            (1, 100, 2),
            (5, 10_000, 3),
            (10, 10_000, 4),
            (100, 100_000, 5),
        ];
        let mut hist = [0usize; 6];
        for (l, u, want) in cases {
            let got = classify_language(l, u, &defaults());
            assert_eq!(got, want, "({l}, {u})");
            hist[got as usize] += 1;
        }
        assert_eq!(hist, [1, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn build_taxonomy_classifies_english() {
        let csv =
            "id,name,labeled_count,unlabeled_count,speakers\neng,English,300,6000000,1452000000\n";
        let tax = build_taxonomy_from_reader(csv.as_bytes(), &defaults()).unwrap();
        assert_eq!(tax["eng"].class, 5);
    }

    #[test]
    fn build_taxonomy_empty_file() {
        let csv = "id,name,labeled_count,unlabeled_count,speakers\n";
        let tax = build_taxonomy_from_reader(csv.as_bytes(), &defaults()).unwrap();
        assert!(tax.is_empty());
        assert_eq!(class_histogram(&tax), [0; 6]);
    }

    #[test]
    fn negative_count_names_row() {
        let csv = "id,name,labeled_count,unlabeled_count,speakers\nxx,X,1,-5,0\n";
        let err = build_taxonomy_from_reader(csv.as_bytes(), &defaults()).unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("row 1") && msg.contains("unlabeled_count"),
            "{msg}"
        );
    }

    #[test]
    fn thresholds_must_be_ordered_and_positive() {
        let bad = TaxonomyThresholds {
            l1: 5,
            l2: 2,
            ..defaults()
        };
        assert!(bad.validate().is_err());
        let bad = TaxonomyThresholds {
            u1: 0,
            ..defaults()
        };
        assert!(bad.validate().is_err());
        assert!(defaults().validate().is_ok());
    }

    fn classes(pairs: &[(&str, u8)]) -> BTreeMap<String, u8> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn table(rows: &[(&str, &str, &str)]) -> TypologyTable {
        TypologyTable::new(
            rows.iter()
                .map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn exclusions_spec_example() {
        let t = table(&[
            ("A", "F1", "a"),
            ("B", "F1", "a"),
            ("A", "F2", "c"),
            ("B", "F2", "b"),
        ]);
        let c = classes(&[("A", 0), ("B", 5)]);
        let got = typology_exclusions(&t, &c);
        assert_eq!(got.total_excluded, 1);
        assert_eq!(got.universe, 3);
        assert_eq!(got.per_feature, BTreeMap::from([("F2".to_string(), 1)]));
        assert_eq!(got.skipped_languages, 0);
    }

    #[test]
    fn fully_covered_categories_mean_no_exclusions() {
        let t = table(&[
            ("A", "F1", "a"),
            ("B", "F1", "a"),
            ("A", "F2", "b"),
            ("B", "F2", "b"),
        ]);
        let c = classes(&[("A", 1), ("B", 5)]);
        assert_eq!(typology_exclusions(&t, &c).total_excluded, 0);
    }

    #[test]
    fn unknown_language_is_skipped_but_counts_in_universe() {
        let t = table(&[("A", "F1", "a"), ("Z", "F9", "z")]);
        let c = classes(&[("A", 0)]);
        let got = typology_exclusions(&t, &c);
        assert_eq!(got.skipped_languages, 1);
        assert_eq!(got.universe, 2);
        assert_eq!(got.total_excluded, 1); // (F1, a) has no high-class witness
    }

    #[test]
    fn duplicate_language_feature_pair_rejected() {
        let err = TypologyTable::new(vec![
            ("A".into(), "F1".into(), "a".into()),
            ("A".into(), "F1".into(), "b".into()),
        ])
        .unwrap_err();
        assert!(matches!(
            err,
            TaxonomyError::DuplicateTypologyPair { row: 2, .. }
        ));
    }

    #[test]
    fn typology_csv_parses() {
        let csv = "language_id,feature_id,category_id\nA,F1,a\nB,F1,a\n";
        let t = TypologyTable::from_csv_reader(csv.as_bytes()).unwrap();
        assert_eq!(t.rows().len(), 2);
    }

    proptest! {
        // Increasing either resource count never lowers the class.
        #[test]
        fn classify_is_monotone(l in 0u64..300, u in 0u64..200_000, dl in 0u64..300, du in 0u64..200_000) {
            let t = defaults();
            let base = classify_language(l, u, &t);
            prop_assert!(classify_language(l + dl, u, &t) >= base || dl == 0);
            prop_assert!(classify_language(l, u + du, &t) >= base || du == 0);
            prop_assert!(classify_language(l + dl, u + du, &t) >= base);
        }

        // Promoting a language from a low class to a high class can only
        // shrink the excluded set.
        #[test]
        fn promotion_never_adds_exclusions(
            rows in proptest::collection::vec((0u8..4, 0u8..3, 0u8..3), 1..20),
            promoted in 0u8..4,
        ) {
            // Dedup (language, feature) pairs; the table type rejects repeats.
            let mut seen = BTreeSet::new();
            let rows: Vec<(String, String, String)> = rows
                .iter()
                .filter(|(l, f, _)| seen.insert((*l, *f)))
                .map(|(l, f, c)| (format!("L{l}"), format!("F{f}"), format!("c{c}")))
                .collect();
            let t = TypologyTable::new(rows).unwrap();
            let mut cls: BTreeMap<String, u8> =
                (0u8..4).map(|l| (format!("L{l}"), if l % 2 == 0 { 2 } else { 5 })).collect();
            let before = typology_exclusions(&t, &cls).total_excluded;
            cls.insert(format!("L{promoted}"), 3);
            let after = typology_exclusions(&t, &cls).total_excluded;
            prop_assert!(after <= before);
        }
    }
}
