//! Command-line front end over the core pipeline: ingestion, taxonomy,
//! inclusion metrics, embedding training, and downstream analyses, with
//! CSV/JSON/SVG emission.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error. Diagnostics go to
//! stderr; data goes to `--out` or stdout.

pub mod svg;

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use langlens_core::analysis::{
    class_distance_table, lal_mrr, tsne_project, year_regression_eval, TsneConfig,
};
use langlens_core::corpus::{Corpus, FieldSelection, Gazetteer};
use langlens_core::embed::{
    load_model, save_model, train, EmbeddingModel, EntityKind, TrainConfig,
};
use langlens_core::metrics::{classwise_mrr, entropy_series, EntropyResult, MrrTable};
use langlens_core::report;
use langlens_core::taxonomy::{
    build_taxonomy, typology_exclusions, LanguageInfo, TaxonomyThresholds, TypologyTable,
};

/// Parses `argv` and runs the selected subcommand.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap routes help/version to stdout and errors (with usage) to
            // stderr on its own.
            let _ = e.print();
            return usage_code(e.kind());
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn usage_code(kind: clap::error::ErrorKind) -> u8 {
    use clap::error::ErrorKind;
    match kind {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
        _ => 1,
    }
}

#[derive(Parser)]
#[command(
    name = "langlens",
    version,
    about = "Corpus analytics for language inclusion in scholarly publishing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect language mentions and write the annotated corpus
    Ingest(IngestArgs),
    /// Classify languages into the six resource classes
    Classify(ClassifyArgs),
    /// Typological feature values attested only in low-resource classes
    Typology(TypologyArgs),
    /// Occurrence entropy per year for one venue
    Entropy(EntropyArgs),
    /// Class-wise mean reciprocal rank of language mentions per venue
    Mrr(MrrArgs),
    /// Train joint entity-word embeddings
    Train(TrainArgs),
    /// Venue-to-class cosine distance table
    Distances(DistancesArgs),
    /// Language-author-language MRR in embedding space
    Lalmrr(LalmrrArgs),
    /// Predict publication year from mean paper word vectors
    Yearreg(YearregArgs),
    /// Project entity vectors to 2-D with exact t-SNE
    Project(ProjectArgs),
    /// Run every analysis and write a report bundle
    Report(ReportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProjectionFormat {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Author,
    Language,
    Venue,
    VenueIteration,
}

impl KindArg {
    fn kind(self) -> EntityKind {
        match self {
            KindArg::Author => EntityKind::Author,
            KindArg::Language => EntityKind::Language,
            KindArg::Venue => EntityKind::Venue,
            KindArg::VenueIteration => EntityKind::VenueIteration,
        }
    }
}

#[derive(Args)]
struct IngestArgs {
    /// Corpus JSONL (one paper per line)
    #[arg(long)]
    corpus: PathBuf,
    /// Gazetteer TSV of canonical language ids and aliases
    #[arg(long)]
    gazetteer: PathBuf,
    /// Also scan paper bodies, not just title and abstract
    #[arg(long)]
    body: bool,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Resource CSV: id,name,labeled_count,unlabeled_count,speakers
    #[arg(long)]
    resources: PathBuf,
    /// Threshold overrides as JSON
    #[arg(long)]
    thresholds: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TypologyArgs {
    #[arg(long)]
    resources: PathBuf,
    /// Typology CSV: language_id,feature_id,category_id
    #[arg(long)]
    wals: PathBuf,
    #[arg(long)]
    thresholds: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: TableFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EntropyArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Detect mentions for unannotated papers; cached annotations are kept
    #[arg(long)]
    gazetteer: Option<PathBuf>,
    #[arg(long)]
    body: bool,
    /// Venue whose yearly series to compute
    #[arg(long)]
    venue: String,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MrrArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    gazetteer: Option<PathBuf>,
    #[arg(long)]
    body: bool,
    #[arg(long)]
    resources: PathBuf,
    #[arg(long)]
    thresholds: Option<PathBuf>,
    /// Restrict to one venue; all venues when omitted
    #[arg(long)]
    venue: Option<String>,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    gazetteer: Option<PathBuf>,
    #[arg(long)]
    body: bool,
    #[arg(long, default_value_t = TrainConfig::default().dim)]
    dim: usize,
    #[arg(long, default_value_t = TrainConfig::default().epochs)]
    epochs: usize,
    /// Words sampled per (entity, paper) pair per epoch
    #[arg(long, default_value_t = TrainConfig::default().k_words)]
    k_words: usize,
    #[arg(long, default_value_t = TrainConfig::default().negatives)]
    negatives: usize,
    #[arg(long, default_value_t = TrainConfig::default().initial_lr)]
    initial_lr: f64,
    #[arg(long, default_value_t = TrainConfig::default().min_count)]
    min_count: u64,
    /// Word2Vec-style frequent-word subsampling threshold; 0 disables
    #[arg(long, default_value_t = TrainConfig::default().subsample)]
    subsample: f64,
    #[arg(long, default_value_t = TrainConfig::default().seed)]
    seed: u64,
    /// More than one thread trades determinism for speed
    #[arg(long, default_value_t = TrainConfig::default().threads)]
    threads: usize,
    /// Model file to write
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DistancesArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    resources: PathBuf,
    #[arg(long)]
    thresholds: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LalmrrArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    resources: PathBuf,
    #[arg(long)]
    thresholds: Option<PathBuf>,
    /// Nearest authors per language; repeat or comma-separate for several
    #[arg(long = "k", value_delimiter = ',', default_values_t = [1usize, 3])]
    ks: Vec<usize>,
    /// Languages ranked per author
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct YearregArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    /// Fraction of papers used to fit the regression
    #[arg(long, default_value_t = 0.8)]
    train_fraction: f64,
    /// Seed for the train/test split
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProjectArgs {
    #[arg(long)]
    model: PathBuf,
    /// Entity kinds to project
    #[arg(
        long,
        value_delimiter = ',',
        default_values = ["author", "language", "venue", "venue-iteration"]
    )]
    kinds: Vec<KindArg>,
    /// Resource CSV; colors languages by class in SVG output
    #[arg(long)]
    resources: Option<PathBuf>,
    #[arg(long)]
    thresholds: Option<PathBuf>,
    #[arg(long, default_value_t = 30.0)]
    perplexity: f64,
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    #[arg(long, default_value_t = 200.0)]
    learning_rate: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value = "svg")]
    format: ProjectionFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    gazetteer: Option<PathBuf>,
    #[arg(long)]
    body: bool,
    #[arg(long)]
    resources: PathBuf,
    /// Typology CSV; the typology artifacts are skipped when omitted
    #[arg(long)]
    wals: Option<PathBuf>,
    #[arg(long)]
    thresholds: Option<PathBuf>,
    #[arg(long)]
    model: PathBuf,
    /// K values for language-author-language MRR (clamped to author count)
    #[arg(long = "k", value_delimiter = ',', default_values_t = [1usize, 3])]
    ks: Vec<usize>,
    /// Languages ranked per author (clamped to language count)
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, default_value_t = 0.8)]
    train_fraction: f64,
    #[arg(long, default_value_t = 30.0)]
    perplexity: f64,
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Directory for the report bundle
    #[arg(long)]
    out: PathBuf,
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Typology(a) => cmd_typology(a),
        Command::Entropy(a) => cmd_entropy(a),
        Command::Mrr(a) => cmd_mrr(a),
        Command::Train(a) => cmd_train(a),
        Command::Distances(a) => cmd_distances(a),
        Command::Lalmrr(a) => cmd_lalmrr(a),
        Command::Yearreg(a) => cmd_yearreg(a),
        Command::Project(a) => cmd_project(a),
        Command::Report(a) => cmd_report(a),
    }
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    Corpus::from_jsonl_path(path).with_context(|| format!("reading corpus {}", path.display()))
}

fn load_gazetteer(path: &Path) -> Result<Gazetteer> {
    Gazetteer::from_tsv_path(path).with_context(|| format!("reading gazetteer {}", path.display()))
}

fn load_thresholds(path: &Option<PathBuf>) -> Result<TaxonomyThresholds> {
    match path {
        Some(p) => TaxonomyThresholds::from_json_path(p)
            .with_context(|| format!("reading thresholds {}", p.display())),
        None => Ok(TaxonomyThresholds::default()),
    }
}

fn load_taxonomy(
    resources: &Path,
    thresholds: &Option<PathBuf>,
) -> Result<BTreeMap<String, LanguageInfo>> {
    let t = load_thresholds(thresholds)?;
    build_taxonomy(resources, &t)
        .with_context(|| format!("reading resources {}", resources.display()))
}

fn classes_of(taxonomy: &BTreeMap<String, LanguageInfo>) -> BTreeMap<String, u8> {
    taxonomy
        .iter()
        .map(|(id, info)| (id.clone(), info.class))
        .collect()
}

fn load_embedding(path: &Path) -> Result<EmbeddingModel> {
    load_model(path).with_context(|| format!("reading model {}", path.display()))
}

/// Annotates unannotated papers when a gazetteer is given; otherwise keeps
/// cached annotations and warns about papers that have none.
fn annotate(corpus: &mut Corpus, gazetteer: Option<&Path>, body: bool) -> Result<usize> {
    match gazetteer {
        Some(g) => {
            let gaz = load_gazetteer(g)?;
            let fields = if body {
                FieldSelection::all()
            } else {
                FieldSelection::default()
            };
            Ok(corpus.detect_all(&gaz, fields))
        }
        None => {
            let missing = corpus
                .papers()
                .iter()
                .filter(|p| p.languages.is_none())
                .count();
            if missing > 0 {
                eprintln!(
                    "note: {missing} papers lack language annotations; pass --gazetteer to detect"
                );
            }
            Ok(0)
        }
    }
}

/// All languages eligible for ranking: the taxonomy plus everything the
/// corpus mentions.
fn mention_universe(
    corpus: &Corpus,
    taxonomy: &BTreeMap<String, LanguageInfo>,
) -> BTreeSet<String> {
    let mut universe: BTreeSet<String> = taxonomy.keys().cloned().collect();
    for p in corpus.papers() {
        universe.extend(p.languages().iter().cloned());
    }
    universe
}

fn write_output(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout()
                .write_all(bytes)
                .context("writing to stdout")?;
            Ok(())
        }
    }
}

fn emit_table(
    format: TableFormat,
    out: &Option<PathBuf>,
    csv_fn: impl FnOnce(&mut Vec<u8>) -> Result<(), report::ReportError>,
    json_fn: impl FnOnce(&mut Vec<u8>) -> Result<(), report::ReportError>,
) -> Result<()> {
    let mut buf = Vec::new();
    match format {
        TableFormat::Csv => csv_fn(&mut buf)?,
        TableFormat::Json => json_fn(&mut buf)?,
    }
    write_output(out, &buf)
}

fn cmd_ingest(a: IngestArgs) -> Result<()> {
    let mut corpus = load_corpus(&a.corpus)?;
    let newly = annotate(&mut corpus, Some(&a.gazetteer), a.body)?;
    let mut buf = Vec::new();
    corpus.to_jsonl_writer(&mut buf)?;
    write_output(&a.out, &buf)?;
    eprintln!("annotated {newly} of {} papers", corpus.len());
    Ok(())
}

fn cmd_classify(a: ClassifyArgs) -> Result<()> {
    let taxonomy = load_taxonomy(&a.resources, &a.thresholds)?;
    let hist = langlens_core::taxonomy::class_histogram(&taxonomy);
    emit_table(
        a.format,
        &a.out,
        |b| report::classes_csv(&taxonomy, b),
        |b| report::classes_json(&taxonomy, b),
    )?;
    eprintln!(
        "classified {} languages; per-class counts {hist:?}",
        taxonomy.len()
    );
    Ok(())
}

fn cmd_typology(a: TypologyArgs) -> Result<()> {
    let taxonomy = load_taxonomy(&a.resources, &a.thresholds)?;
    let table = TypologyTable::from_csv_path(&a.wals)
        .with_context(|| format!("reading typology table {}", a.wals.display()))?;
    let excl = typology_exclusions(&table, &classes_of(&taxonomy));
    emit_table(
        a.format,
        &a.out,
        |b| report::typology_csv(&excl, b),
        |b| report::typology_json(&excl, b),
    )?;
    eprintln!(
        "{} of {} feature values excluded; {} languages without class skipped",
        excl.total_excluded, excl.universe, excl.skipped_languages
    );
    Ok(())
}

fn require_venue(corpus: &Corpus, venue: &str) -> Result<()> {
    if !corpus.venues().contains(venue) {
        bail!(
            "venue {venue:?} has no papers in the corpus (venues: {})",
            corpus.venues().into_iter().collect::<Vec<_>>().join(", ")
        );
    }
    Ok(())
}

fn cmd_entropy(a: EntropyArgs) -> Result<()> {
    let mut corpus = load_corpus(&a.corpus)?;
    annotate(&mut corpus, a.gazetteer.as_deref(), a.body)?;
    require_venue(&corpus, &a.venue)?;
    let series = entropy_series(&corpus, &a.venue);
    emit_table(
        a.format,
        &a.out,
        |b| report::entropy_csv(&series, b),
        |b| report::entropy_json(&series, b),
    )
}

fn cmd_mrr(a: MrrArgs) -> Result<()> {
    let mut corpus = load_corpus(&a.corpus)?;
    annotate(&mut corpus, a.gazetteer.as_deref(), a.body)?;
    let taxonomy = load_taxonomy(&a.resources, &a.thresholds)?;
    let classes = classes_of(&taxonomy);
    let universe = mention_universe(&corpus, &taxonomy);
    let venues: Vec<String> = match &a.venue {
        Some(v) => {
            require_venue(&corpus, v)?;
            vec![v.clone()]
        }
        None => corpus.venues().into_iter().collect(),
    };
    let tables: Vec<MrrTable> = venues
        .iter()
        .map(|v| classwise_mrr(&corpus, v, &classes, &universe))
        .collect();
    emit_table(
        a.format,
        &a.out,
        |b| report::mrr_csv(&tables, b),
        |b| report::mrr_json(&tables, b),
    )
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let mut corpus = load_corpus(&a.corpus)?;
    annotate(&mut corpus, a.gazetteer.as_deref(), a.body)?;
    if a.threads > 1 {
        eprintln!(
            "note: --threads {} makes training nondeterministic",
            a.threads
        );
    }
    let cfg = TrainConfig {
        dim: a.dim,
        epochs: a.epochs,
        k_words: a.k_words,
        negatives: a.negatives,
        initial_lr: a.initial_lr,
        min_count: a.min_count,
        seed: a.seed,
        threads: a.threads,
        subsample: a.subsample,
    };
    let trained = train(&corpus, &cfg).context("training failed")?;
    save_model(&trained.model, &a.out)
        .with_context(|| format!("writing model {}", a.out.display()))?;
    let losses = &trained.stats.epoch_mean_loss;
    eprintln!(
        "trained {} entities, {} words, dim {}; {} updates; mean loss {:.4} -> {:.4}; {} papers skipped",
        trained.model.entities.len(),
        trained.model.vocab.len(),
        trained.model.dim,
        trained.stats.total_updates,
        losses.first().copied().unwrap_or(f64::NAN),
        losses.last().copied().unwrap_or(f64::NAN),
        trained.stats.skipped_papers
    );
    Ok(())
}

fn cmd_distances(a: DistancesArgs) -> Result<()> {
    let model = load_embedding(&a.model)?;
    let taxonomy = load_taxonomy(&a.resources, &a.thresholds)?;
    let table = class_distance_table(&model, &classes_of(&taxonomy))?;
    if table.defaulted_languages > 0 {
        eprintln!(
            "note: {} model languages missing from the resource table defaulted to class 0",
            table.defaulted_languages
        );
    }
    emit_table(
        a.format,
        &a.out,
        |b| report::distances_csv(&table, b),
        |b| report::distances_json(&table, b),
    )
}

fn cmd_lalmrr(a: LalmrrArgs) -> Result<()> {
    let model = load_embedding(&a.model)?;
    let taxonomy = load_taxonomy(&a.resources, &a.thresholds)?;
    let table = lal_mrr(&model, &classes_of(&taxonomy), &a.ks, a.m)?;
    emit_table(
        a.format,
        &a.out,
        |b| report::lalmrr_csv(&table, b),
        |b| report::lalmrr_json(&table, b),
    )
}

fn cmd_yearreg(a: YearregArgs) -> Result<()> {
    let model = load_embedding(&a.model)?;
    let corpus = load_corpus(&a.corpus)?;
    let eval = year_regression_eval(&model, &corpus, a.seed, a.train_fraction)?;
    emit_table(
        a.format,
        &a.out,
        |b| report::regression_csv(&eval, b),
        |b| report::regression_json(&eval, b),
    )
}

fn cmd_project(a: ProjectArgs) -> Result<()> {
    let model = load_embedding(&a.model)?;
    let kinds: BTreeSet<EntityKind> = a.kinds.iter().map(|k| k.kind()).collect();
    let selection: Vec<usize> = (0..model.entities.len())
        .filter(|&i| kinds.contains(&model.entities[i].kind))
        .collect();
    let cfg = TsneConfig {
        perplexity: a.perplexity,
        iters: a.iters,
        learning_rate: a.learning_rate,
        seed: a.seed,
    };
    let projection = tsne_project(&model, &selection, &cfg)?;
    eprintln!(
        "projected {} points; KL {:.4} -> {:.4}",
        selection.len(),
        projection.initial_kl,
        projection.final_kl
    );
    let mut buf = Vec::new();
    match a.format {
        ProjectionFormat::Csv => report::projection_csv(&projection, &mut buf)?,
        ProjectionFormat::Json => report::projection_json(&projection, &mut buf)?,
        ProjectionFormat::Svg => {
            let classes = match &a.resources {
                Some(r) => classes_of(&load_taxonomy(r, &a.thresholds)?),
                None => BTreeMap::new(),
            };
            buf.extend_from_slice(svg::svg_scatter(&projection, &classes).as_bytes());
        }
    }
    write_output(&a.out, &buf)
}

fn write_artifact(
    dir: &Path,
    name: &str,
    artifacts: &mut Vec<String>,
    fill: impl FnOnce(&mut Vec<u8>) -> Result<()>,
) -> Result<()> {
    let mut buf = Vec::new();
    fill(&mut buf)?;
    let path = dir.join(name);
    std::fs::write(&path, &buf).with_context(|| format!("writing {}", path.display()))?;
    artifacts.push(name.to_string());
    Ok(())
}

fn cmd_report(a: ReportArgs) -> Result<()> {
    std::fs::create_dir_all(&a.out)
        .with_context(|| format!("creating report directory {}", a.out.display()))?;
    let dir = a.out.as_path();
    let mut artifacts: Vec<String> = Vec::new();

    let mut corpus = load_corpus(&a.corpus)?;
    annotate(&mut corpus, a.gazetteer.as_deref(), a.body)?;
    let taxonomy = load_taxonomy(&a.resources, &a.thresholds)?;
    let classes = classes_of(&taxonomy);

    write_artifact(dir, "classes.csv", &mut artifacts, |b| {
        Ok(report::classes_csv(&taxonomy, b)?)
    })?;
    write_artifact(dir, "classes.json", &mut artifacts, |b| {
        Ok(report::classes_json(&taxonomy, b)?)
    })?;

    if let Some(wals) = &a.wals {
        let table = TypologyTable::from_csv_path(wals)
            .with_context(|| format!("reading typology table {}", wals.display()))?;
        let excl = typology_exclusions(&table, &classes);
        write_artifact(dir, "typology.csv", &mut artifacts, |b| {
            Ok(report::typology_csv(&excl, b)?)
        })?;
        write_artifact(dir, "typology.json", &mut artifacts, |b| {
            Ok(report::typology_json(&excl, b)?)
        })?;
    }

    let venues: Vec<String> = corpus.venues().into_iter().collect();
    let mut series: Vec<EntropyResult> = Vec::new();
    for v in &venues {
        series.extend(entropy_series(&corpus, v));
    }
    write_artifact(dir, "entropy.csv", &mut artifacts, |b| {
        Ok(report::entropy_csv(&series, b)?)
    })?;
    write_artifact(dir, "entropy.json", &mut artifacts, |b| {
        Ok(report::entropy_json(&series, b)?)
    })?;

    let universe = mention_universe(&corpus, &taxonomy);
    let tables: Vec<MrrTable> = venues
        .iter()
        .map(|v| classwise_mrr(&corpus, v, &classes, &universe))
        .collect();
    write_artifact(dir, "mrr.csv", &mut artifacts, |b| {
        Ok(report::mrr_csv(&tables, b)?)
    })?;
    write_artifact(dir, "mrr.json", &mut artifacts, |b| {
        Ok(report::mrr_json(&tables, b)?)
    })?;

    let model = load_embedding(&a.model)?;

    let distance_table = class_distance_table(&model, &classes)?;
    write_artifact(dir, "distances.csv", &mut artifacts, |b| {
        Ok(report::distances_csv(&distance_table, b)?)
    })?;
    write_artifact(dir, "distances.json", &mut artifacts, |b| {
        Ok(report::distances_json(&distance_table, b)?)
    })?;

    let author_count = model.indices_of_kind(EntityKind::Author).len();
    let language_count = model.indices_of_kind(EntityKind::Language).len();
    let mut ks: Vec<usize> =
        a.ks.iter()
            .copied()
            .filter(|&k| k > 0)
            .map(|k| k.min(author_count))
            .collect();
    ks.sort_unstable();
    ks.dedup();
    let m = a.m.min(language_count);
    if ks != a.ks || m != a.m {
        eprintln!(
            "note: clamped lal-mrr parameters to K {ks:?}, M {m} ({author_count} authors, {language_count} languages)"
        );
    }
    if !ks.is_empty() && m > 0 {
        let lal = lal_mrr(&model, &classes, &ks, m)?;
        write_artifact(dir, "lalmrr.csv", &mut artifacts, |b| {
            Ok(report::lalmrr_csv(&lal, b)?)
        })?;
        write_artifact(dir, "lalmrr.json", &mut artifacts, |b| {
            Ok(report::lalmrr_json(&lal, b)?)
        })?;
    } else {
        eprintln!("note: skipping lal-mrr, model has no authors or no languages");
    }

    let eval = year_regression_eval(&model, &corpus, a.seed, a.train_fraction)?;
    write_artifact(dir, "yearreg.csv", &mut artifacts, |b| {
        Ok(report::regression_csv(&eval, b)?)
    })?;
    write_artifact(dir, "yearreg.json", &mut artifacts, |b| {
        Ok(report::regression_json(&eval, b)?)
    })?;

    let selection: Vec<usize> = (0..model.entities.len()).collect();
    let tsne_cfg = TsneConfig {
        perplexity: a.perplexity,
        iters: a.iters,
        learning_rate: 200.0,
        seed: a.seed,
    };
    let projection = tsne_project(&model, &selection, &tsne_cfg)?;
    write_artifact(dir, "projection.csv", &mut artifacts, |b| {
        Ok(report::projection_csv(&projection, b)?)
    })?;
    write_artifact(dir, "projection.svg", &mut artifacts, |b| {
        b.extend_from_slice(svg::svg_scatter(&projection, &classes).as_bytes());
        Ok(())
    })?;

    let manifest = serde_json::json!({
        "tool": "langlens",
        "seed": a.seed,
        "k": ks,
        "m": m,
        "train_fraction": a.train_fraction,
        "perplexity": a.perplexity,
        "iters": a.iters,
        "venues": venues,
        "papers": corpus.len(),
        "artifacts": artifacts,
    });
    let path = dir.join("manifest.json");
    std::fs::write(&path, format!("{:#}\n", manifest))
        .with_context(|| format!("writing {}", path.display()))?;

    eprintln!("report bundle written to {}", dir.display());
    Ok(())
}
