//! Behavioral tests for the binary: exit codes, stream discipline, and a
//! small end-to-end pipeline over synthetic inputs.

use std::process::{Command, Output};

use langlens_core::synth::{write_inputs, PlantSpec};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_langlens"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should spawn")
}

fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn small_spec() -> PlantSpec {
    PlantSpec {
        communities: 3,
        authors_per_community: 3,
        papers_per_author: 4,
        topical_words_per_community: 10,
        shared_words: 8,
        venues: 3,
        year_start: 2005,
        year_end: 2009,
        drift_words_per_year: 2,
        seed: 7,
    }
}

#[test]
fn no_arguments_prints_usage_on_stderr_and_exits_1() {
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn help_prints_to_stdout_and_exits_0() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"));
}

#[test]
fn unknown_flag_exits_1() {
    let out = run(&["classify", "--nope"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_input_file_is_a_data_error() {
    let out = run(&[
        "entropy",
        "--corpus",
        "/nonexistent.jsonl",
        "--venue",
        "ACL",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn pipeline_over_synthetic_inputs() {
    let dir = TempDir::new().unwrap();
    let paths = write_inputs(&small_spec(), dir.path()).unwrap();
    let corpus = paths.corpus.to_str().unwrap();
    let gazetteer = paths.gazetteer.to_str().unwrap();
    let resources = paths.resources.to_str().unwrap();
    let annotated = dir.path().join("annotated.jsonl");
    let annotated = annotated.to_str().unwrap();

    // ingest: all 36 papers get annotations, output is valid JSONL.
    let out = run_ok(&[
        "ingest",
        "--corpus",
        corpus,
        "--gazetteer",
        gazetteer,
        "--out",
        annotated,
    ]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("annotated 36 of 36"));
    for line in std::fs::read_to_string(annotated).unwrap().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["languages"].is_array(), "missing annotation: {line}");
    }

    // entropy on the annotated corpus needs no gazetteer and emits one row
    // per year of the venue.
    let e_csv = dir.path().join("entropy.csv");
    run_ok(&[
        "entropy",
        "--corpus",
        annotated,
        "--venue",
        "V0",
        "--out",
        e_csv.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&e_csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("venue,year,papers,languages,entropy"));
    assert_eq!(lines.count(), 5, "five years planted: {text}");

    // mrr over all venues emits rows for the planted classes.
    let out = run_ok(&[
        "mrr",
        "--corpus",
        annotated,
        "--resources",
        resources,
        "--format",
        "json",
    ]);
    let tables: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(tables.as_array().unwrap().len(), 3);

    // train twice with the same seed: byte-identical models.
    let m1 = dir.path().join("m1.bin");
    let m2 = dir.path().join("m2.bin");
    for m in [&m1, &m2] {
        run_ok(&[
            "train",
            "--corpus",
            annotated,
            "--dim",
            "8",
            "--epochs",
            "2",
            "--min-count",
            "1",
            "--seed",
            "42",
            "--out",
            m.to_str().unwrap(),
        ]);
    }
    let b1 = std::fs::read(&m1).unwrap();
    assert_eq!(
        b1,
        std::fs::read(&m2).unwrap(),
        "same seed must reproduce bytes"
    );

    let model = m1.to_str().unwrap();
    let entity_count = langlens_core::embed::load_model(&m1)
        .unwrap()
        .entities
        .len();

    // distances, lalmrr, yearreg: parseable CSV with the pinned headers.
    for (args, header) in [
        (
            vec!["distances", "--model", model, "--resources", resources],
            "venue,class,distance",
        ),
        (
            vec![
                "lalmrr",
                "--model",
                model,
                "--resources",
                resources,
                "--k",
                "1,3",
                "--m",
                "3",
            ],
            "class,k,mrr",
        ),
        (
            vec!["yearreg", "--model", model, "--corpus", annotated],
            "r2,mae,split_seed,train_fraction,train_size,test_size,oov_excluded",
        ),
    ] {
        let out = run_ok(&args);
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.starts_with(header), "args {args:?} produced: {text}");
    }

    // project to SVG: one circle per entity, classes colored from resources.
    let svg_path = dir.path().join("projection.svg");
    run_ok(&[
        "project",
        "--model",
        model,
        "--resources",
        resources,
        "--iters",
        "50",
        "--out",
        svg_path.to_str().unwrap(),
    ]);
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<?xml"));
    assert_eq!(svg.matches("<circle ").count(), entity_count);

    // report writes the full bundle.
    let report_dir = dir.path().join("report");
    run_ok(&[
        "report",
        "--corpus",
        annotated,
        "--resources",
        resources,
        "--model",
        model,
        "--iters",
        "50",
        "--out",
        report_dir.to_str().unwrap(),
    ]);
    for name in [
        "classes.csv",
        "classes.json",
        "entropy.csv",
        "entropy.json",
        "mrr.csv",
        "mrr.json",
        "distances.csv",
        "distances.json",
        "lalmrr.csv",
        "lalmrr.json",
        "yearreg.csv",
        "yearreg.json",
        "projection.csv",
        "projection.svg",
        "manifest.json",
    ] {
        assert!(report_dir.join(name).is_file(), "missing artifact {name}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(report_dir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["papers"], 36);
    assert!(manifest["artifacts"].as_array().unwrap().len() >= 14);
}

#[test]
fn venue_missing_from_corpus_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    let paths = write_inputs(&small_spec(), dir.path()).unwrap();
    let out = run(&[
        "entropy",
        "--corpus",
        paths.corpus.to_str().unwrap(),
        "--gazetteer",
        paths.gazetteer.to_str().unwrap(),
        "--venue",
        "NOSUCH",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NOSUCH"));
}

#[test]
fn classify_writes_to_stdout_when_out_is_omitted() {
    let dir = TempDir::new().unwrap();
    let paths = write_inputs(&small_spec(), dir.path()).unwrap();
    let out = run_ok(&["classify", "--resources", paths.resources.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("id,name,labeled_count,unlabeled_count,speakers,class"));
    // Communities 0..2 plant classes 0..2.
    assert!(text.contains("langa,LangA,0,0,1000,0"), "{text}");
    assert!(text.contains("langc,LangC,5,1000,3000,2"), "{text}");
}

#[test]
fn typology_reports_exclusions() {
    let dir = TempDir::new().unwrap();
    let paths = write_inputs(&small_spec(), dir.path()).unwrap();
    let wals = dir.path().join("wals.csv");
    std::fs::write(
        &wals,
        "language_id,feature_id,category_id\n\
         langa,F1,cat1\n\
         langc,F1,cat1\n\
         langb,F2,cat9\n",
    )
    .unwrap();
    let out = run_ok(&[
        "typology",
        "--resources",
        paths.resources.to_str().unwrap(),
        "--wals",
        wals.to_str().unwrap(),
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // All planted classes are low-resource (0..2), so every pair is excluded.
    assert_eq!(v["total_excluded"], 2);
    assert_eq!(v["universe"], 2);
}

#[test]
fn report_honors_cached_annotations() {
    // A corpus whose annotations disagree with what detection would find:
    // report must keep the cached values rather than re-detecting.
    let dir = TempDir::new().unwrap();
    let paths = write_inputs(&small_spec(), dir.path()).unwrap();
    let mut corpus = langlens_core::Corpus::from_jsonl_path(&paths.corpus).unwrap();
    let gaz = langlens_core::Gazetteer::from_tsv_path(&paths.gazetteer).unwrap();
    corpus.detect_all(&gaz, langlens_core::FieldSelection::default());
    let cached = dir.path().join("cached.jsonl");
    corpus.to_jsonl_path(&cached).unwrap();

    let model = dir.path().join("m.bin");
    run_ok(&[
        "train",
        "--corpus",
        cached.to_str().unwrap(),
        "--dim",
        "8",
        "--epochs",
        "2",
        "--min-count",
        "1",
        "--out",
        model.to_str().unwrap(),
    ]);
    let report_dir = dir.path().join("report");
    let out = run_ok(&[
        "report",
        "--corpus",
        cached.to_str().unwrap(),
        "--resources",
        paths.resources.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
        "--iters",
        "50",
        "--out",
        report_dir.to_str().unwrap(),
    ]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        !stderr.contains("lack language annotations"),
        "fully annotated corpus should not warn: {stderr}"
    );
    assert!(report_dir.join("entropy.csv").is_file());
}
