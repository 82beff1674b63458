use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use frlstsvm::classifier::{load_model, save_model, Kernel, KernelKind, PreparedTraining, TrainConfig, DEFAULT_DELTA};
use frlstsvm::dataset::{load_csv, load_keel, parse_feature_csv, CsvOptions, LabelColumn, LabeledDataset};
use frlstsvm::experiment::{
    parse_assignments, run_nested_cv, summary_table, write_results, DataFormat, ExperimentConfig,
};
use frlstsvm::fsutil::write_atomic;
use frlstsvm::fuzzy_rough::{subsample_majority, FuzzyParams, Implicator, ScoreMode, TNorm};
use frlstsvm::linalg::DenseMatrix;
use frlstsvm::metrics::{confusion, report, MetricConvention};
use frlstsvm::Error;

#[derive(Parser)]
#[command(
    name = "frlstsvm",
    version,
    about = "Fuzzy-rough weighted least-squares twin SVM for imbalanced data"
)]
struct Cli {
    /// More log output (repeat for debug)
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Fit a model and write it to a file
    Train(TrainArgs),
    /// Label new rows with a saved model
    Predict(PredictArgs),
    /// Score a saved model on labelled data
    Eval(EvalArgs),
    /// Print majority-class scores and the rows kept at a threshold
    Subsample(SubsampleArgs),
    /// Repeated nested cross-validation with grid search
    Cv(CvArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Dataset file (KEEL .dat or CSV)
    data: PathBuf,
    /// Input format; guessed from the extension when omitted
    #[arg(long)]
    format: Option<DataFormat>,
    /// Class value treated as the minority (+1) class
    #[arg(long, default_value = "positive")]
    positive_label: String,
    /// CSV label column: "last", a zero-based index or a header name
    #[arg(long, default_value = "last")]
    label_column: String,
    /// CSV file has no header row
    #[arg(long)]
    no_header: bool,
}

impl DataArgs {
    fn format(&self) -> DataFormat {
        self.format.unwrap_or_else(|| DataFormat::guess(&self.data))
    }

    fn load(&self) -> frlstsvm::Result<LabeledDataset> {
        load_dataset(
            &self.data,
            self.format(),
            &self.positive_label,
            &self.label_column,
            !self.no_header,
        )
    }
}

fn load_dataset(
    path: &Path,
    format: DataFormat,
    positive: &str,
    label_column: &str,
    header: bool,
) -> frlstsvm::Result<LabeledDataset> {
    match format {
        DataFormat::Keel => load_keel(path, positive),
        DataFormat::Csv => {
            let opts = CsvOptions {
                label_column: label_column.parse::<LabelColumn>().unwrap_or(LabelColumn::Last),
                positive_label: positive.to_string(),
                has_header: header,
            };
            load_csv(path, &opts)
        }
    }
}

#[derive(Args)]
struct FuzzyArgs {
    /// Similarity sharpness γ
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value = "density")]
    score_mode: ScoreMode,
    #[arg(long, default_value = "minimum")]
    tnorm: TNorm,
    #[arg(long, default_value = "lukasiewicz")]
    implicator: Implicator,
}

impl FuzzyArgs {
    fn params(&self) -> FuzzyParams {
        FuzzyParams {
            gamma: self.gamma,
            tnorm: self.tnorm,
            implicator: self.implicator,
            score_mode: self.score_mode,
        }
    }
}

#[derive(Args)]
struct ModelArgs {
    /// Majority rows scoring below τ are dropped
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    #[arg(long, default_value_t = 1.0)]
    c1: f64,
    /// Defaults to --c1
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    #[arg(long, default_value = "linear")]
    kernel: KernelKind,
    /// Gaussian kernel width
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[command(flatten)]
    fuzzy: FuzzyArgs,
    /// Keep every majority row
    #[arg(long)]
    no_subsample: bool,
    /// Use unit instance weights
    #[arg(long)]
    no_weights: bool,
}

impl ModelArgs {
    fn config(&self) -> TrainConfig {
        TrainConfig {
            c1: self.c1,
            c2: self.c2.unwrap_or(self.c1),
            delta: self.delta,
            tau: self.tau,
            fuzzy: self.fuzzy.params(),
            kernel: match self.kernel {
                KernelKind::Linear => Kernel::Linear,
                KernelKind::Gaussian => Kernel::Gaussian { sigma: self.sigma },
            },
            subsample: !self.no_subsample,
            weights: !self.no_weights,
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Model file to write
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    /// Model file from `train`
    model: PathBuf,
    /// Rows to label. CSV input is read as attributes only unless
    /// --label-column is given; KEEL input drops its output column.
    data: PathBuf,
    #[arg(long)]
    format: Option<DataFormat>,
    #[arg(long, default_value = "positive")]
    positive_label: String,
    /// CSV column to ignore
    #[arg(long)]
    label_column: Option<String>,
    #[arg(long)]
    no_header: bool,
    /// Predictions CSV; standard output when omitted
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    model: PathBuf,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value = "standard")]
    metric_convention: MetricConvention,
}

#[derive(Args)]
struct SubsampleArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    #[command(flatten)]
    fuzzy: FuzzyArgs,
    /// Table file; standard output when omitted
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CvArgs {
    /// Dataset; may also come from the config file
    data: Option<PathBuf>,
    /// `key = value` file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    positive_label: Option<String>,
    /// Comma-separated grid, e.g. 0,0.2,0.4
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    c1: Option<String>,
    #[arg(long)]
    c2: Option<String>,
    /// Search c1 and c2 independently
    #[arg(long)]
    untie_c: bool,
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    score_mode: Option<String>,
    #[arg(long)]
    tnorm: Option<String>,
    #[arg(long)]
    implicator: Option<String>,
    #[arg(long)]
    no_subsample: bool,
    #[arg(long)]
    no_weights: bool,
    #[arg(long)]
    metric_convention: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    folds: Option<String>,
    #[arg(long)]
    inner_folds: Option<String>,
    #[arg(long)]
    repeats: Option<String>,
    /// Parallel workers; 0 uses every core
    #[arg(long)]
    workers: Option<String>,
    /// Result files are written to <out>.csv and <out>.jsonl
    #[arg(long, short)]
    out: Option<PathBuf>,
}

impl CvArgs {
    fn config(&self) -> frlstsvm::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            for (k, v) in parse_assignments(&text)? {
                cfg.set(&k, &v)?;
            }
        }
        let flags = [
            ("format", &self.format),
            ("positive_label", &self.positive_label),
            ("tau", &self.tau),
            ("gamma", &self.gamma),
            ("c1", &self.c1),
            ("c2", &self.c2),
            ("sigma", &self.sigma),
            ("kernel", &self.kernel),
            ("delta", &self.delta),
            ("score_mode", &self.score_mode),
            ("tnorm", &self.tnorm),
            ("implicator", &self.implicator),
            ("metric_convention", &self.metric_convention),
            ("seed", &self.seed),
            ("folds", &self.folds),
            ("inner_folds", &self.inner_folds),
            ("repeats", &self.repeats),
            ("workers", &self.workers),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        if self.untie_c {
            cfg.untie_c = true;
        }
        if self.no_subsample {
            cfg.subsample = false;
        }
        if self.no_weights {
            cfg.weights = false;
        }
        if let Some(d) = &self.data {
            cfg.dataset = Some(d.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Errors that come from bad flags or config values rather than from the run.
fn is_usage(e: &Error) -> bool {
    matches!(e, Error::Config(_) | Error::Parameter(_))
}

fn emit(out: Option<&Path>, text: &str) -> frlstsvm::Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            stdout(text);
            Ok(())
        }
    }
}

/// Writes to standard output. A closed pipe (`frlstsvm ... | head`) ends
/// the output quietly instead of panicking.
fn stdout(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error writing output: {e}");
        }
    }
}

fn cmd_train(a: &TrainArgs) -> frlstsvm::Result<()> {
    let config = a.model.config();
    config.validate()?;
    let ds = a.data.load()?;
    let model = PreparedTraining::new(&ds)?.fit(&config, None)?;
    save_model(&a.out, &model)?;
    let s = model.summary();
    eprintln!(
        "trained {} model: {} minority, {} of {} majority rows kept",
        config.kernel.name(),
        s.m1,
        s.m2_kept,
        s.m2
    );
    Ok(())
}

fn cmd_predict(a: &PredictArgs) -> frlstsvm::Result<()> {
    let model = load_model(&a.model)?;
    let format = a.format.unwrap_or_else(|| DataFormat::guess(&a.data));
    let x: DenseMatrix = match (format, &a.label_column) {
        (DataFormat::Keel, _) => load_keel(&a.data, &a.positive_label)?.features().clone(),
        (DataFormat::Csv, Some(col)) => load_dataset(&a.data, format, &a.positive_label, col, !a.no_header)?
            .features()
            .clone(),
        (DataFormat::Csv, None) => {
            let text = std::fs::read_to_string(&a.data).map_err(|e| Error::Io {
                path: a.data.clone(),
                source: e,
            })?;
            parse_feature_csv(&text, !a.no_header)?
        }
    };
    if x.cols() != model.n_attributes() {
        return Err(Error::Shape(format!(
            "model was trained on {} attributes but the input has {}",
            model.n_attributes(),
            x.cols()
        )));
    }
    let mut out = String::from("row,label,dist1,dist2\n");
    for (i, d) in model.decide_all(&x)?.iter().enumerate() {
        writeln!(out, "{i},{},{},{}", d.label.sign(), d.dist1, d.dist2).unwrap();
    }
    emit(a.out.as_deref(), &out)
}

fn cmd_eval(a: &EvalArgs) -> frlstsvm::Result<()> {
    let model = load_model(&a.model)?;
    let ds = a.data.load()?;
    let pred = model.predict_all(ds.features())?;
    let cm = confusion(ds.labels(), &pred)?;
    let r = report(&cm, a.metric_convention);
    let name = a.data.data.file_stem().and_then(|s| s.to_str()).unwrap_or("data");
    stdout(&format!(
        "{}{}\n",
        r.table(),
        r.csv_line(name, model.config().kernel.name())
    ));
    if r.degenerate {
        eprintln!("warning: a 0/0 ratio was reported as 0");
    }
    Ok(())
}

fn cmd_subsample(a: &SubsampleArgs) -> frlstsvm::Result<()> {
    let ds = a.data.load()?;
    let prepared = PreparedTraining::new(&ds)?;
    let sim = prepared.similarity(&a.fuzzy.params())?;
    let sub = subsample_majority(sim.majority_scores(), a.tau)?;
    let rows = &prepared.split.majority_rows;
    let mut out = String::from("row,score,kept\n");
    let mut kept = sub.kept.iter().peekable();
    for (i, (&row, score)) in rows.iter().zip(&sub.scores).enumerate() {
        let k = kept.next_if_eq(&&i).is_some();
        writeln!(out, "{row},{score},{}", u8::from(k)).unwrap();
    }
    emit(a.out.as_deref(), &out)?;
    eprintln!(
        "kept {} of {} majority rows at tau = {}",
        sub.kept.len(),
        rows.len(),
        a.tau
    );
    Ok(())
}

fn cmd_cv(a: &CvArgs) -> frlstsvm::Result<()> {
    let cfg = a.config()?;
    let path = cfg
        .dataset
        .clone()
        .ok_or_else(|| Error::Config("no dataset given (positional argument or `dataset =`)".into()))?;
    let format = cfg.format.unwrap_or_else(|| DataFormat::guess(&path));
    let ds = load_dataset(&path, format, &cfg.positive_label, "last", true)?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("data").to_string();
    match run_nested_cv(&ds, &name, &cfg) {
        Ok(res) => {
            stdout(&summary_table(&res));
            eprintln!("wall time {:.1} s", res.wall_seconds);
            if let Some(out) = &a.out {
                let (csv, jsonl) = write_results(&res, out)?;
                eprintln!("wrote {} and {}", csv.display(), jsonl.display());
            }
            Ok(())
        }
        Err(partial) => {
            if let Some(out) = &a.out {
                if !partial.partial.records.is_empty() {
                    let (csv, _) = write_results(&partial.partial, out)?;
                    eprintln!(
                        "run aborted; {} finished folds written to {}",
                        partial.partial.records.len(),
                        csv.display()
                    );
                }
            }
            Err(partial.error)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match &cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Subsample(a) => cmd_subsample(a),
        Command::Cv(a) => cmd_cv(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_usage(&e) { 2 } else { 1 })
        }
    }
}
