mod commands;

use std::fs::OpenOptions;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

/// Efficacy endpoint extraction from oncology trial sentences.
#[derive(Debug, Parser)]
#[command(name = "oncoextract", version)]
pub struct Cli {
    /// Worker threads for sentence-level work; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,

    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split raw inputs into a sentence corpus.
    Ingest(IngestArgs),
    /// Keep sentences selected by the query library.
    Filter(FilterArgs),
    /// Produce span annotations for a corpus.
    Tag(TagArgs),
    /// Turn annotations into endpoint observations.
    Resolve(ResolveArgs),
    /// Split a corpus into folds or a pmid-disjoint train/test pair.
    Split(SplitArgs),
    /// Exact-match precision, recall and F1 per class.
    Score(ScoreArgs),
    /// Token-level agreement between two annotation sets.
    Agree(AgreeArgs),
    /// Generate a labelled synthetic corpus.
    Synth(SynthArgs),
    /// Write the fine-tuning hyperparameter grid.
    ExportGrid(GridArgs),
    /// Run the review service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    PlainSentences,
    AbstractRecords,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "abstract-records")]
    pub format: Format,
    /// Output corpus; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Directory with endpoints/, negatives/, high_recall.pat and
    /// mentions.lex; the bundled library when absent.
    #[arg(long)]
    pub queries: Option<PathBuf>,
    /// Also keep sentences matched by a negative ensemble, for training data.
    #[arg(long)]
    pub with_negatives: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum Backend {
    Rule,
    Import,
}

#[derive(Debug, Args)]
pub struct TagArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, value_enum, default_value = "rule")]
    pub backend: Backend,
    /// Span records from an external model (import backend).
    #[arg(long, required_if_eq("backend", "import"))]
    pub predictions: Option<PathBuf>,
    #[arg(long)]
    pub queries: Option<PathBuf>,
    /// Source name recorded in the output; defaults to the backend or file stem.
    #[arg(long)]
    pub source: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Rule diagnostics or rejected import records, one JSON line each.
    #[arg(long)]
    pub diagnostics: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ResolveArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub annotations: PathBuf,
    /// Observations TSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Resolution issues, one JSON line per sentence with issues.
    #[arg(long)]
    pub diagnostics: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, conflicts_with = "test_pmids", required_unless_present = "test_pmids")]
    pub kfold: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// File with one held-out pmid per line.
    #[arg(long)]
    pub test_pmids: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    /// Report TSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AgreeArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    /// JSON report with the per-sentence differences.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_corpus: PathBuf,
    #[arg(long)]
    pub out_gold: PathBuf,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, value_delimiter = ',')]
    pub epochs: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    pub learning_rates: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub batch_sizes: Option<Vec<u32>>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Corpus files; each is served under its file stem.
    #[arg(long, required = true)]
    pub corpus: Vec<PathBuf>,
    /// Annotation files. With several corpora, prefix with `<corpus id>=`.
    #[arg(long)]
    pub annotations: Vec<String>,
    #[arg(long, default_value_t = 8765)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Where logs and snapshots are kept; in memory when neither this nor
    /// ONCOEXTRACT_STATE_DIR is set.
    #[arg(long, env = "ONCOEXTRACT_STATE_DIR")]
    pub state_dir: Option<PathBuf>,
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let mut builder = env_logger::Builder::new();
    builder.filter_level(level);
    if let Some(dir) = std::env::var_os("ONCOEXTRACT_LOG_DIR") {
        let dir = PathBuf::from(dir);
        let file = std::fs::create_dir_all(&dir).and_then(|_| OpenOptions::new().create(true).append(true).open(dir.join("oncoextract.log")));
        match file {
            Ok(f) => {
                builder.target(env_logger::Target::Pipe(Box::new(f)));
            }
            Err(e) => eprintln!("warning: cannot open log file in {}: {e}", dir.display()),
        }
    }
    builder.init();
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    init_logging(cli.verbose);
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            log::warn!("keeping the default thread pool: {e}");
        }
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
