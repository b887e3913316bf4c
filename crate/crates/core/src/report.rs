//! CSV and JSON emitters for the analysis outputs.
//!
//! Column layouts are part of the tool's contract:
//!   classes:    id,name,labeled_count,unlabeled_count,speakers,class
//!   typology:   feature_id,excluded (totals live in the JSON form)
//!   entropy:    venue,year,papers,languages,entropy
//!   mrr:        venue,class,mrr,inverse_mrr
//!   distances:  venue,class,distance
//!   lalmrr:     class,k,mrr
//!   regression: r2,mae,split_seed,train_fraction,train_size,test_size,oov_excluded
//!   projection: kind,key,x,y

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{DistanceTable, LalMrrTable, Projection2D, RegressionEval};
use crate::metrics::{EntropyResult, MrrTable};
use crate::taxonomy::{LanguageInfo, TypologyExclusions};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn json_to<T: Serialize>(value: &T, mut w: impl Write) -> Result<(), ReportError> {
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn classes_csv(
    taxonomy: &BTreeMap<String, LanguageInfo>,
    w: impl Write,
) -> Result<(), ReportError> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record([
        "id",
        "name",
        "labeled_count",
        "unlabeled_count",
        "speakers",
        "class",
    ])?;
    for info in taxonomy.values() {
        csv.write_record([
            info.id.as_str(),
            info.name.as_str(),
            &info.labeled_count.to_string(),
            &info.unlabeled_count.to_string(),
            &info.speakers.to_string(),
            &info.class.to_string(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

pub fn classes_json(
    taxonomy: &BTreeMap<String, LanguageInfo>,
    w: impl Write,
) -> Result<(), ReportError> {
    json_to(&taxonomy, w)
}

pub fn typology_csv(excl: &TypologyExclusions, w: impl Write) -> Result<(), ReportError> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["feature_id", "excluded"])?;
    for (feature, n) in &excl.per_feature {
        csv.write_record([feature.as_str(), &n.to_string()])?;
    }
    csv.flush()?;
    Ok(())
}

pub fn typology_json(excl: &TypologyExclusions, w: impl Write) -> Result<(), ReportError> {
    json_to(excl, w)
}

pub fn entropy_csv(results: &[EntropyResult], w: impl Write) -> Result<(), ReportError> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["venue", "year", "papers", "languages", "entropy"])?;
    for r in results {
        csv.write_record([
            r.venue.as_str(),
            &r.year.to_string(),
            &r.papers.to_string(),
            &r.languages_mentioned.to_string(),
            &r.entropy.to_string(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

pub fn entropy_json(results: &[EntropyResult], w: impl Write) -> Result<(), ReportError> {
    json_to(&results, w)
}

pub fn mrr_csv(tables: &[MrrTable], w: impl Write) -> Result<(), ReportError> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["venue", "class", "mrr", "inverse_mrr"])?;
    for t in tables {
        for (class, cell) in &t.per_class {
            csv.write_record([
                t.venue.as_str(),
                &class.to_string(),
                &cell.mrr.to_string(),
                &cell.inverse_mrr.to_string(),
            ])?;
        }
    }
    csv.flush()?;
    Ok(())
}

pub fn mrr_json(tables: &[MrrTable], w: impl Write) -> Result<(), ReportError> {
    json_to(&tables, w)
}

pub fn distances_csv(table: &DistanceTable, w: impl Write) -> Result<(), ReportError> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["venue", "class", "distance"])?;
    for (i, venue) in table.venues.iter().enumerate() {
        for (j, class) in table.classes.iter().enumerate() {
            csv.write_record([
                venue.as_str(),
                &class.to_string(),
                &table.values[i][j].to_string(),
            ])?;
        }
    }
    csv.flush()?;
    Ok(())
}

pub fn distances_json(table: &DistanceTable, w: impl Write) -> Result<(), ReportError> {
    json_to(table, w)
}

pub fn lalmrr_csv(table: &LalMrrTable, w: impl Write) -> Result<(), ReportError> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["class", "k", "mrr"])?;
    for (class, by_k) in &table.per_class {
        for (k, mrr) in by_k {
            csv.write_record([&class.to_string(), &k.to_string(), &mrr.to_string()])?;
        }
    }
    csv.flush()?;
    Ok(())
}

pub fn lalmrr_json(table: &LalMrrTable, w: impl Write) -> Result<(), ReportError> {
    json_to(table, w)
}

pub fn regression_csv(eval: &RegressionEval, w: impl Write) -> Result<(), ReportError> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record([
        "r2",
        "mae",
        "split_seed",
        "train_fraction",
        "train_size",
        "test_size",
        "oov_excluded",
    ])?;
    // Undefined R² (single-year test split) becomes an empty field.
    csv.write_record([
        &eval.r2.map(|v| v.to_string()).unwrap_or_default(),
        &eval.mae.to_string(),
        &eval.split_seed.to_string(),
        &eval.train_fraction.to_string(),
        &eval.train_size.to_string(),
        &eval.test_size.to_string(),
        &eval.oov_excluded.to_string(),
    ])?;
    csv.flush()?;
    Ok(())
}

pub fn regression_json(eval: &RegressionEval, w: impl Write) -> Result<(), ReportError> {
    json_to(eval, w)
}

pub fn projection_csv(p: &Projection2D, w: impl Write) -> Result<(), ReportError> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["kind", "key", "x", "y"])?;
    for (label, coord) in p.labels.iter().zip(&p.coords) {
        csv.write_record([
            label.kind.label(),
            label.key.as_str(),
            &coord[0].to_string(),
            &coord[1].to_string(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

pub fn projection_json(p: &Projection2D, w: impl Write) -> Result<(), ReportError> {
    json_to(p, w)
}
