//! The `wespad` command line.

use std::collections::HashSet;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::corpus::{hex, load_posts, load_unlabeled_posts, tokenize, Corpus, PostFormat};
use crate::embeddings::{load_embeddings, EmbeddingFormat, EmbeddingTable, LoadOptions};
use crate::error::{Error, Result};
use crate::eval::{
    benchmark, sweep_csv, Baseline, Experiment, Fixture, FixtureSpec, GridSpec, MeanMetrics,
    Removal,
};
use crate::treebank::{load_conll, mine_frequent_subtrees, ConllColumns, MiningOptions, Treebank};
use crate::wespad::{fit_wespad, FeatureGroup, ModelBundle, Predictor, RegionParams, WespadConfig};

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_FIT: i32 = 3;
pub const EXIT_BUNDLE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "wespad",
    version,
    about = "Personal health mention classification"
)]
pub struct Cli {
    /// Concurrent fold and grid-point evaluations (default: available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model on labeled posts and write a model bundle.
    Train(TrainArgs),
    /// Label posts with a trained bundle, one JSON line per post.
    Predict(PredictArgs),
    /// Cross-validate one or more methods on shared folds.
    Cv(CvArgs),
    /// Cross-validate WESPAD at every grid point without nested selection.
    Grid(GridCmdArgs),
    /// Remove feature groups one at a time and report the change in F1.
    Ablate(AblateArgs),
    /// Vary the number of partitions (K = K2) at a fixed alpha.
    SweepK(SweepKArgs),
    /// Subsample training positives and compare methods.
    SweepPos(SweepPosArgs),
    /// Mine frequent dependency subtrees.
    Mine(MineArgs),
    /// Write a seeded synthetic corpus, embedding table and treebank.
    GenFixture(GenFixtureArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Labeled posts, JSON lines (`.jsonl`) or `label<TAB>text` rows.
    #[arg(long)]
    pub posts: PathBuf,
    /// Word vectors.
    #[arg(long, env = "WESPAD_EMBEDDINGS")]
    pub embeddings: PathBuf,
    #[command(flatten)]
    pub vectors: VectorArgs,
    /// Dependency parses in CoNLL format with `# id = <post id>` comments.
    #[arg(long)]
    pub trees: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VectorArgs {
    /// word2vec-binary, word2vec-text, glove-text, or auto (by extension and header).
    #[arg(long, default_value = "auto")]
    pub embedding_format: String,
    /// Fold embedding words to lowercase to match the tokenizer.
    #[arg(long)]
    pub lowercase_embeddings: bool,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Flat JSON configuration; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub alpha2: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub k2: Option<usize>,
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub min_support: Option<usize>,
    /// Feature group to switch off (repeatable), e.g. `syn_feats`.
    #[arg(long, value_name = "GROUP")]
    pub disable: Vec<String>,
    /// Feature group to switch on (repeatable).
    #[arg(long, value_name = "GROUP")]
    pub enable: Vec<String>,
}

#[derive(Debug, Args)]
pub struct FoldArgs {
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 0)]
    pub fold_seed: u64,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.15, 0.3])]
    pub alphas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [3, 4, 5])]
    pub ks: Vec<usize>,
    /// Search alpha2 independently of alpha.
    #[arg(long)]
    pub untie_alpha: bool,
    /// Search K2 independently of K.
    #[arg(long)]
    pub untie_k: bool,
}

impl GridArgs {
    fn spec(&self) -> GridSpec {
        GridSpec {
            alphas: self.alphas.clone(),
            ks: self.ks.clone(),
            tie_alpha: !self.untie_alpha,
            tie_k: !self.untie_k,
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Bundle path; the run manifest goes next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Posts to label; labels are optional.
    #[arg(long)]
    pub posts: PathBuf,
    #[arg(long, env = "WESPAD_EMBEDDINGS")]
    pub embeddings: PathBuf,
    #[command(flatten)]
    pub vectors: VectorArgs,
    #[arg(long)]
    pub trees: Option<PathBuf>,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub folds: FoldArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Method to evaluate (repeatable): me_lex, me_cen, me_lex_emb, me_lex_cen, wespad.
    #[arg(long = "baseline", value_name = "METHOD")]
    pub baselines: Vec<String>,
    /// Cross-validate separately within each topic and average over topics.
    #[arg(long)]
    pub per_topic: bool,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct GridCmdArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub folds: FoldArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub folds: FoldArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Groups to remove, one run each; join with `+` to remove together.
    /// Default: every group of the full model.
    #[arg(long = "remove", value_name = "GROUPS")]
    pub removals: Vec<String>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepKArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub folds: FoldArgs,
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3, 4, 5])]
    pub ks: Vec<usize>,
    /// Fixed alpha = alpha2 (default: the configured alpha).
    #[arg(long)]
    pub sweep_alpha: Option<f64>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepPosArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub folds: FoldArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0])]
    pub fractions: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = ["me_lex".to_string(), "wespad".to_string()])]
    pub baselines: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub subsample_seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[arg(long)]
    pub trees: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub min_support: usize,
    #[arg(long, default_value_t = 2)]
    pub min_size: usize,
    #[arg(long)]
    pub max_size: Option<usize>,
    /// Output TSV (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FixtureVariant {
    /// Mostly rare positive vocabulary.
    HeldOut,
    /// Adds a topic whose negatives use positive vocabulary.
    Impure,
    /// 40 posts.
    Small,
}

#[derive(Debug, Args)]
pub struct GenFixtureArgs {
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = FixtureVariant::HeldOut)]
    pub variant: FixtureVariant,
    /// Override the number of posts.
    #[arg(long)]
    pub posts: Option<usize>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

/// Input digests, configuration and timing of one command. Written next to
/// the outputs rather than inside them so that reports stay byte-identical
/// across runs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: Option<u64>,
    pub config: Option<WespadConfig>,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<PathBuf>,
    pub elapsed_ms: u128,
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub role: &'static str,
    pub path: PathBuf,
    pub sha256: String,
}

impl RunManifest {
    fn new(command: &str) -> Self {
        RunManifest {
            tool: "wespad",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed: None,
            config: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            elapsed_ms: 0,
        }
    }

    fn input(&mut self, role: &'static str, path: &Path) -> Result<()> {
        self.inputs.push(InputDigest {
            role,
            path: path.to_path_buf(),
            sha256: file_digest(path)?,
        });
        Ok(())
    }

    fn with_config(&mut self, config: &WespadConfig) {
        self.seed = Some(config.seed);
        self.config = Some(config.clone());
    }

    fn write(mut self, path: &Path, started: Instant) -> Result<()> {
        self.elapsed_ms = started.elapsed().as_millis();
        let mut text = serde_json::to_string_pretty(&self)?;
        text.push('\n');
        write_file(path, text.as_bytes())
    }
}

pub fn file_digest(path: &Path) -> Result<String> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    io::copy(&mut file, &mut hasher).map_err(|e| Error::io(path, e))?;
    Ok(hex(&hasher.finalize()))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Exit status for an error: 2 for bad input, 3 for fitting failures, 4
/// for unusable bundles.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Io { .. }
        | Error::Parse { .. }
        | Error::DuplicateId(_)
        | Error::UnknownLabel { .. }
        | Error::DimensionMismatch { .. }
        | Error::MalformedHeader(_)
        | Error::InvalidTree { .. }
        | Error::Config(_)
        | Error::Json(_) => EXIT_INPUT,
        Error::TooFewExamples { .. }
        | Error::EmptyDataset
        | Error::NonFiniteFeature { .. }
        | Error::VectorDimension { .. }
        | Error::TooFewPoints { .. }
        | Error::SingleClass => EXIT_FIT,
        Error::Bundle(_) => EXIT_BUNDLE,
    }
}

fn embedding_format(spec: &str, path: &Path) -> Result<EmbeddingFormat> {
    if spec != "auto" {
        return spec.parse().map_err(Error::Config);
    }
    if path.extension().is_some_and(|e| e == "bin") {
        return Ok(EmbeddingFormat::Word2vecBinary);
    }
    // A word2vec text file starts with a "<count> <dim>" header.
    let mut first = String::new();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    io::BufRead::read_line(&mut io::BufReader::new(file), &mut first)
        .map_err(|e| Error::io(path, e))?;
    let fields: Vec<&str> = first.split_whitespace().collect();
    let header = fields.len() == 2 && fields.iter().all(|f| f.parse::<usize>().is_ok());
    Ok(if header {
        EmbeddingFormat::Word2vecText
    } else {
        EmbeddingFormat::GloveText
    })
}

fn load_vectors(path: &Path, args: &VectorArgs, words: HashSet<String>) -> Result<EmbeddingTable> {
    let format = embedding_format(&args.embedding_format, path)?;
    let options = LoadOptions {
        vocabulary: Some(words),
        lowercase: args.lowercase_embeddings,
    };
    load_embeddings(path, format, &options)
}

fn corpus_words<'a>(posts: impl IntoIterator<Item = &'a crate::corpus::Post>) -> HashSet<String> {
    let mut words = HashSet::new();
    for post in posts {
        words.extend(post.tokens.iter().cloned());
        for text in [&post.prev_text, &post.next_text].into_iter().flatten() {
            words.extend(tokenize(text));
        }
    }
    words
}

fn load_trees(path: Option<&Path>) -> Result<Treebank> {
    match path {
        Some(p) => load_conll(p, ConllColumns::default()),
        None => Ok(Treebank::new()),
    }
}

struct Loaded {
    corpus: Corpus,
    table: EmbeddingTable,
    trees: Treebank,
}

fn load_inputs(input: &InputArgs, manifest: &mut RunManifest) -> Result<Loaded> {
    manifest.input("posts", &input.posts)?;
    manifest.input("embeddings", &input.embeddings)?;
    if let Some(t) = &input.trees {
        manifest.input("trees", t)?;
    }
    let corpus = load_posts(&input.posts, PostFormat::from_path(&input.posts))?;
    let table = load_vectors(
        &input.embeddings,
        &input.vectors,
        corpus_words(corpus.posts()),
    )?;
    let trees = load_trees(input.trees.as_deref())?;
    Ok(Loaded {
        corpus,
        table,
        trees,
    })
}

fn load_config(args: &ConfigArgs, manifest: &mut RunManifest) -> Result<WespadConfig> {
    let mut config = match &args.config {
        Some(path) => {
            manifest.input("config", path)?;
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        None => WespadConfig::default(),
    };
    if let Some(v) = args.alpha {
        config.alpha = v;
    }
    if let Some(v) = args.alpha2 {
        config.alpha2 = v;
    }
    if let Some(v) = args.k {
        config.k_partitions = v;
    }
    if let Some(v) = args.k2 {
        config.k2_partitions = v;
    }
    if let Some(v) = args.l2 {
        config.l2 = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = args.min_support {
        config.min_support = v;
    }
    for name in &args.disable {
        config.set_enabled(name.parse::<FeatureGroup>()?, false);
    }
    for name in &args.enable {
        config.set_enabled(name.parse::<FeatureGroup>()?, true);
    }
    config.validate()?;
    manifest.with_config(&config);
    Ok(config)
}

fn parse_baselines(names: &[String]) -> Result<Vec<Baseline>> {
    if names.is_empty() {
        return Ok(vec![Baseline::Wespad]);
    }
    names.iter().map(|n| n.parse()).collect()
}

fn mean_row(label: &str, m: &MeanMetrics) -> String {
    format!(
        "{label}\t{:.6}\t{:.6}\t{:.6}\n",
        m.precision, m.recall, m.f1
    )
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let started = Instant::now();
    let mut manifest = RunManifest::new("train");
    let config = load_config(&args.config, &mut manifest)?;
    let inputs = load_inputs(&args.input, &mut manifest)?;
    let model = fit_wespad(&inputs.corpus, &config, &inputs.table, &inputs.trees)?;
    ModelBundle::new(model).save(&args.out)?;
    manifest.outputs.push(args.out.clone());
    manifest.write(&sibling(&args.out, "manifest.json"), started)
}

/// `model.json` -> `model.json.manifest.json`
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().map(OsString::from).unwrap_or_default();
    name.push(".");
    name.push(suffix);
    path.with_file_name(name)
}

#[derive(Serialize)]
struct PredictionLine<'a> {
    id: &'a str,
    label: &'a str,
    probability: f64,
}

fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let started = Instant::now();
    let mut manifest = RunManifest::new("predict");
    manifest.input("model", &args.model)?;
    let bundle = ModelBundle::load(&args.model)?;
    let model = bundle.model;
    manifest.with_config(model.config());
    manifest.input("posts", &args.posts)?;
    manifest.input("embeddings", &args.embeddings)?;
    let posts = load_unlabeled_posts(&args.posts, PostFormat::from_path(&args.posts))?;
    let mut words = corpus_words(&posts);
    if let Some(ig) = &model.extractor.ig {
        words.extend(ig.train_vocab().map(str::to_string));
    }
    let table = load_vectors(&args.embeddings, &args.vectors, words)?;
    if let Some(t) = &args.trees {
        manifest.input("trees", t)?;
    }
    let trees = load_trees(args.trees.as_deref())?;
    let predictor = Predictor::new(&model, &table)?;

    let mut out: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::io(p, e))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let out_name = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("<stdout>"));
    for post in &posts {
        let p = predictor.predict(post, trees.get(&post.id));
        let line = PredictionLine {
            id: &post.id,
            label: p.label.as_str(),
            probability: p.probability,
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n").map_err(|e| Error::io(&out_name, e))?;
    }
    out.flush().map_err(|e| Error::io(&out_name, e))?;
    if let Some(p) = &args.out {
        manifest.outputs.push(p.clone());
        manifest.write(&sibling(p, "manifest.json"), started)?;
    }
    Ok(())
}

fn cmd_cv(args: &CvArgs) -> Result<()> {
    let started = Instant::now();
    let mut manifest = RunManifest::new("cv");
    let config = load_config(&args.config, &mut manifest)?;
    let inputs = load_inputs(&args.input, &mut manifest)?;
    let methods = parse_baselines(&args.baselines)?;
    let grid = args.grid.spec();
    grid.validate()?;
    let result = benchmark(
        &inputs.corpus,
        &inputs.table,
        &inputs.trees,
        &config,
        &grid,
        &methods,
        args.folds.folds,
        args.folds.fold_seed,
        args.per_topic,
    )?;

    create_dir(&args.out_dir)?;
    let mut outputs = Vec::new();
    for topic in &result.topics {
        for report in &topic.reports {
            let stem = if args.per_topic {
                format!("{}.{}", topic.topic, report.method)
            } else {
                report.method.clone()
            };
            let tsv = args.out_dir.join(format!("{stem}.tsv"));
            write_file(&tsv, report.to_tsv().as_bytes())?;
            let json = args.out_dir.join(format!("{stem}.json"));
            write_file(&json, report.to_json()?.as_bytes())?;
            outputs.extend([tsv, json]);
        }
    }
    let summary = args.out_dir.join("summary.tsv");
    let mut text = String::new();
    for topic in &result.topics {
        text.push_str(&format!(
            "# plan_hash\t{}\t{}\n",
            topic.topic, topic.plan_hash
        ));
    }
    text.push_str(&result.to_tsv());
    write_file(&summary, text.as_bytes())?;
    outputs.push(summary);
    print!("{}", result.to_tsv());
    manifest.outputs = outputs;
    manifest.write(&args.out_dir.join("manifest.json"), started)
}

fn experiment_folds(corpus: &Corpus, folds: &FoldArgs) -> Result<crate::corpus::FoldPlan> {
    crate::corpus::stratified_folds(corpus, folds.folds, folds.fold_seed)
}

fn cmd_grid(args: &GridCmdArgs) -> Result<()> {
    let started = Instant::now();
    let mut manifest = RunManifest::new("grid");
    let config = load_config(&args.config, &mut manifest)?;
    let inputs = load_inputs(&args.input, &mut manifest)?;
    let plan = experiment_folds(&inputs.corpus, &args.folds)?;
    let ex = Experiment {
        corpus: &inputs.corpus,
        folds: &plan,
        table: &inputs.table,
        trees: &inputs.trees,
    };
    let grid = args.grid.spec();
    grid.validate()?;
    let mut text = format!(
        "# plan_hash\t{}\nalpha\talpha2\tk\tk2\tprecision\trecall\tf1\n",
        plan.hash()
    );
    for RegionParams {
        alpha,
        alpha2,
        k,
        k2,
    } in grid.points()
    {
        let point = RegionParams {
            alpha,
            alpha2,
            k,
            k2,
        };
        let report = ex.cross_validate("wespad", &config.with_region_params(point), None)?;
        let m = report.mean;
        text.push_str(&format!(
            "{alpha}\t{alpha2}\t{k}\t{k2}\t{:.6}\t{:.6}\t{:.6}\n",
            m.precision, m.recall, m.f1
        ));
    }
    create_dir(&args.out_dir)?;
    let out = args.out_dir.join("grid.tsv");
    write_file(&out, text.as_bytes())?;
    print!("{text}");
    manifest.outputs.push(out);
    manifest.write(&args.out_dir.join("manifest.json"), started)
}

fn cmd_ablate(args: &AblateArgs) -> Result<()> {
    let started = Instant::now();
    let mut manifest = RunManifest::new("ablate");
    let config = load_config(&args.config, &mut manifest)?;
    let inputs = load_inputs(&args.input, &mut manifest)?;
    let plan = experiment_folds(&inputs.corpus, &args.folds)?;
    let ex = Experiment {
        corpus: &inputs.corpus,
        folds: &plan,
        table: &inputs.table,
        trees: &inputs.trees,
    };
    let removals = if args.removals.is_empty() {
        Removal::defaults()
    } else {
        args.removals
            .iter()
            .map(|r| r.parse())
            .collect::<Result<_>>()?
    };
    let grid = args.grid.spec();
    grid.validate()?;
    let report = ex.ablate(&config, &grid, &removals)?;
    create_dir(&args.out_dir)?;
    let out = args.out_dir.join("ablation.tsv");
    write_file(&out, report.to_tsv().as_bytes())?;
    print!("{}", report.to_tsv());
    manifest.outputs.push(out);
    manifest.write(&args.out_dir.join("manifest.json"), started)
}

fn cmd_sweep_k(args: &SweepKArgs) -> Result<()> {
    let started = Instant::now();
    let mut manifest = RunManifest::new("sweep-k");
    let config = load_config(&args.config, &mut manifest)?;
    let inputs = load_inputs(&args.input, &mut manifest)?;
    let plan = experiment_folds(&inputs.corpus, &args.folds)?;
    let ex = Experiment {
        corpus: &inputs.corpus,
        folds: &plan,
        table: &inputs.table,
        trees: &inputs.trees,
    };
    let rows = ex.partition_sweep(&config, &args.ks, args.sweep_alpha.unwrap_or(config.alpha))?;
    let csv = format!("# plan_hash,{}\n{}", plan.hash(), sweep_csv("k", &rows));
    create_dir(&args.out_dir)?;
    let out = args.out_dir.join("sweep_k.csv");
    write_file(&out, csv.as_bytes())?;
    for r in &rows {
        print!("{}", mean_row(&format!("k={}", r.x), &r.mean));
    }
    manifest.outputs.push(out);
    manifest.write(&args.out_dir.join("manifest.json"), started)
}

fn cmd_sweep_pos(args: &SweepPosArgs) -> Result<()> {
    let started = Instant::now();
    let mut manifest = RunManifest::new("sweep-pos");
    let config = load_config(&args.config, &mut manifest)?;
    let inputs = load_inputs(&args.input, &mut manifest)?;
    let plan = experiment_folds(&inputs.corpus, &args.folds)?;
    let ex = Experiment {
        corpus: &inputs.corpus,
        folds: &plan,
        table: &inputs.table,
        trees: &inputs.trees,
    };
    let baselines = parse_baselines(&args.baselines)?;
    let grid = args.grid.spec();
    grid.validate()?;
    let rows = ex.positive_fraction_sweep(
        &config,
        &grid,
        &args.fractions,
        &baselines,
        args.subsample_seed,
    )?;
    let csv = format!(
        "# plan_hash,{}\n{}",
        plan.hash(),
        sweep_csv("fraction", &rows)
    );
    create_dir(&args.out_dir)?;
    let out = args.out_dir.join("sweep_pos.csv");
    write_file(&out, csv.as_bytes())?;
    for r in &rows {
        print!("{}", mean_row(&format!("{}@{}", r.method, r.x), &r.mean));
    }
    manifest.outputs.push(out);
    manifest.write(&args.out_dir.join("manifest.json"), started)
}

fn cmd_mine(args: &MineArgs) -> Result<()> {
    let treebank = load_conll(&args.trees, ConllColumns::default())?;
    let trees: Vec<_> = treebank.values().flat_map(|f| f.sentences.iter()).collect();
    let options = MiningOptions {
        min_support: args.min_support,
        min_size: args.min_size,
        max_size: args.max_size,
    };
    if options.min_support == 0 || options.min_size == 0 {
        return Err(Error::Config(
            "min_support and min_size must be at least 1".to_string(),
        ));
    }
    let mut text = String::from("support\tsize\tpattern\n");
    for p in mine_frequent_subtrees(&trees, options) {
        text.push_str(&format!("{}\t{}\t{}\n", p.support, p.size(), p.shape));
    }
    match &args.out {
        Some(path) => write_file(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_gen_fixture(args: &GenFixtureArgs) -> Result<()> {
    let mut spec = match args.variant {
        FixtureVariant::HeldOut => FixtureSpec::held_out(args.seed),
        FixtureVariant::Impure => FixtureSpec::impure(args.seed),
        FixtureVariant::Small => FixtureSpec::small(args.seed),
    };
    if let Some(n) = args.posts {
        spec.posts = n;
    }
    Fixture::generate(&spec)?.write_to(&args.out_dir)
}

fn dispatch(command: &Command) -> Result<()> {
    match command {
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Cv(a) => cmd_cv(a),
        Command::Grid(a) => cmd_grid(a),
        Command::Ablate(a) => cmd_ablate(a),
        Command::SweepK(a) => cmd_sweep_k(a),
        Command::SweepPos(a) => cmd_sweep_pos(a),
        Command::Mine(a) => cmd_mine(a),
        Command::GenFixture(a) => cmd_gen_fixture(a),
    }
}

/// Runs the command line and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    match pool.install(|| dispatch(&cli.command)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
