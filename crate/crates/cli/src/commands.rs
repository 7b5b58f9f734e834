use std::collections::BTreeSet;
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use oncoextract::dataset::{
    build_training_corpus, export_finetune_grid, generate_synthetic, ingest, kfold, split_pmid_disjoint, write_corpus, Corpus, GridAxes,
    IngestFormat, SynthConfig,
};
use oncoextract::eval::{agreement, score, write_report};
use oncoextract::library::QueryLibrary;
use oncoextract::pattern::sentence_passes;
use oncoextract::resolver::{resolve_sentence, write_observations};
use oncoextract::schema::{AnnotationSet, SentenceRecord};
use oncoextract::tagger::{import_predictions, write_annotations, RuleTagger};
use oncoextract::Error;
use oncoextract_review::service::{corpus_id, load_annotations, load_corpus};
use oncoextract_review::ReviewError;
use rayon::prelude::*;

use crate::{AgreeArgs, Backend, Command, FilterArgs, Format, GridArgs, IngestArgs, ResolveArgs, ScoreArgs, ServeArgs, SplitArgs, SynthArgs, TagArgs};

#[derive(Debug)]
pub enum Failure {
    /// Inputs were read but are not acceptable.
    Validation(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Io(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(m) | Failure::Io(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        if err.is_io() {
            Failure::Io(err.to_string())
        } else {
            Failure::Validation(err.to_string())
        }
    }
}

impl From<ReviewError> for Failure {
    fn from(err: ReviewError) -> Self {
        match err {
            ReviewError::Invalid(e) => e.into(),
            ReviewError::Io { .. } => Failure::Io(err.to_string()),
            other => Failure::Validation(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(err: io::Error) -> Self {
        Failure::Io(err.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn io_at(path: &Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

/// A buffered writer on `path`, or stdout.
fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(io_at(parent))?;
            }
            Ok(Box::new(BufWriter::new(File::create(p).map_err(io_at(p))?)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn finish(mut out: Box<dyn Write>) -> Outcome {
    out.flush().map_err(Failure::from)
}

fn library(dir: Option<&Path>) -> Result<std::borrow::Cow<'static, QueryLibrary>, Failure> {
    Ok(match dir {
        Some(d) => std::borrow::Cow::Owned(QueryLibrary::load(d)?),
        None => std::borrow::Cow::Borrowed(QueryLibrary::builtin()),
    })
}

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Ingest(a) => run_ingest(a),
        Command::Filter(a) => run_filter(a),
        Command::Tag(a) => run_tag(a),
        Command::Resolve(a) => run_resolve(a),
        Command::Split(a) => run_split(a),
        Command::Score(a) => run_score(a),
        Command::Agree(a) => run_agree(a),
        Command::Synth(a) => run_synth(a),
        Command::ExportGrid(a) => run_grid(a),
        Command::Serve(a) => run_serve(a),
    }
}

fn run_ingest(a: IngestArgs) -> Outcome {
    let format = match a.format {
        Format::PlainSentences => IngestFormat::PlainSentences,
        Format::AbstractRecords => IngestFormat::AbstractRecords,
    };
    let corpus = ingest(&a.input, format)?;
    log::info!("{} documents, {} sentences", corpus.documents().len(), corpus.len());
    let mut out = output(a.out.as_deref())?;
    write_corpus(&corpus, &mut out)?;
    finish(out)
}

fn run_filter(a: FilterArgs) -> Outcome {
    let corpus = load_corpus(&a.corpus)?;
    let lib = library(a.queries.as_deref())?;
    let kept: Vec<SentenceRecord> = if a.with_negatives {
        build_training_corpus(&lib.endpoints, &lib.negatives, &corpus)
    } else {
        let sentences: Vec<&SentenceRecord> = corpus.sentences().collect();
        let pass: Vec<bool> = sentences.par_iter().map(|s| sentence_passes(&lib.endpoints, &s.text)).collect();
        sentences.into_iter().zip(pass).filter(|(_, p)| *p).map(|(s, _)| s.clone()).collect()
    };
    eprintln!("kept {} of {} sentences", kept.len(), corpus.len());
    let mut out = output(a.out.as_deref())?;
    write_corpus(&Corpus::from_sentences(kept)?, &mut out)?;
    finish(out)
}

fn write_jsonl<T: serde::Serialize>(path: &Path, items: impl IntoIterator<Item = T>) -> Outcome {
    let mut out = output(Some(path))?;
    for item in items {
        serde_json::to_writer(&mut out, &item).map_err(|e| Failure::Io(e.to_string()))?;
        out.write_all(b"\n")?;
    }
    finish(out)
}

fn run_tag(a: TagArgs) -> Outcome {
    let corpus = load_corpus(&a.corpus)?;
    let set = match a.backend {
        Backend::Rule => {
            let lib = library(a.queries.as_deref())?;
            let tagger = RuleTagger::new(&lib);
            let sentences: Vec<&SentenceRecord> = corpus.sentences().collect();
            let outputs: Vec<_> = sentences.par_iter().map(|s| tagger.tag(&s.text)).collect();
            let mut set = AnnotationSet::new(a.source.clone().unwrap_or_else(|| "rule".into()));
            let mut notes = Vec::new();
            for (s, o) in sentences.iter().zip(outputs) {
                set.insert(s, o.spans)?;
                notes.extend(o.diagnostics.into_iter().map(|d| serde_json::json!({"sentence_id": s.sentence_id, "diagnostic": d})));
            }
            if let Some(path) = &a.diagnostics {
                write_jsonl(path, notes)?;
            }
            set
        }
        Backend::Import => {
            let path = a.predictions.as_deref().expect("required by the argument parser");
            let file = File::open(path).map_err(io_at(path))?;
            let source = a.source.clone().unwrap_or_else(|| corpus_id(path));
            let (set, report) = import_predictions(&source, BufReader::new(file), &corpus)?;
            for (index, err) in &report.rejected {
                log::warn!("{} record {index}: {err}", path.display());
            }
            eprintln!("accepted {} records, rejected {}", report.accepted, report.rejected.len());
            if let Some(diag) = &a.diagnostics {
                write_jsonl(diag, report.rejected.iter().map(|(index, err)| serde_json::json!({"record": index, "error": err.to_string()})))?;
            }
            set
        }
    };
    let mut out = output(a.out.as_deref())?;
    write_annotations(&set, &corpus, &mut out)?;
    finish(out)
}

fn run_resolve(a: ResolveArgs) -> Outcome {
    let corpus = load_corpus(&a.corpus)?;
    let set = load_annotations(&a.annotations, &corpus)?;
    let sentences: Vec<&SentenceRecord> = corpus.sentences().collect();
    let resolved: Vec<_> = sentences.par_iter().map(|s| resolve_sentence(s, set.get(&s.sentence_id))).collect();
    let mut observations = Vec::new();
    let mut issues = Vec::new();
    for (obs, diag) in resolved {
        observations.extend(obs);
        if !diag.is_empty() {
            issues.push(diag);
        }
    }
    eprintln!("{} observations, {} sentences with issues", observations.len(), issues.len());
    if let Some(path) = &a.diagnostics {
        write_jsonl(path, &issues)?;
    }
    let mut out = output(a.out.as_deref())?;
    write_observations(&observations, &mut out)?;
    finish(out)
}

fn write_sentences(path: &Path, sentences: Vec<SentenceRecord>) -> Result<usize, Failure> {
    let n = sentences.len();
    let mut out = output(Some(path))?;
    write_corpus(&Corpus::from_sentences(sentences)?, &mut out)?;
    finish(out)?;
    Ok(n)
}

fn read_pmids(path: &Path) -> Result<BTreeSet<String>, Failure> {
    let file = File::open(path).map_err(io_at(path))?;
    let mut pmids = BTreeSet::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(io_at(path))?;
        let pmid = line.trim();
        if !pmid.is_empty() && !pmid.starts_with('#') {
            pmids.insert(pmid.to_string());
        }
    }
    Ok(pmids)
}

fn run_split(a: SplitArgs) -> Outcome {
    let corpus = load_corpus(&a.corpus)?;
    let sentences = corpus.into_sentences();
    fs::create_dir_all(&a.out_dir).map_err(io_at(&a.out_dir))?;
    if let Some(k) = a.kfold {
        let folds = kfold(&sentences, k, a.seed)?;
        let mut sizes = Vec::with_capacity(k);
        for (i, fold) in folds.into_iter().enumerate() {
            sizes.push(write_sentences(&a.out_dir.join(format!("fold-{i}.jsonl")), fold)?.to_string());
        }
        println!("{}", sizes.join("/"));
    } else {
        let path = a.test_pmids.as_deref().expect("required by the argument parser");
        let pmids = read_pmids(path)?;
        let (train, test) = split_pmid_disjoint(sentences, &pmids);
        let train_n = write_sentences(&a.out_dir.join("train.jsonl"), train)?;
        let test_n = write_sentences(&a.out_dir.join("test.jsonl"), test)?;
        println!("train {train_n} test {test_n}");
    }
    Ok(())
}

fn run_score(a: ScoreArgs) -> Outcome {
    let corpus = load_corpus(&a.corpus)?;
    let gold = load_annotations(&a.gold, &corpus)?;
    let pred = load_annotations(&a.pred, &corpus)?;
    let report = score(&gold, &pred, &corpus);
    let mut out = output(a.out.as_deref())?;
    write_report(&report, &mut out)?;
    finish(out)?;
    let o = report.overall;
    eprintln!("overall F1 {:.4} (precision {:.4}, recall {:.4})", o.f1, o.precision, o.recall);
    Ok(())
}

fn run_agree(a: AgreeArgs) -> Outcome {
    let corpus = load_corpus(&a.corpus)?;
    let left = load_annotations(&a.a, &corpus)?;
    let right = load_annotations(&a.b, &corpus)?;
    let report = agreement(&left, &right, &corpus)?;
    println!(
        "token agreement {:.4} ({} of {} tokens); {} sentences disagree",
        report.token_agreement,
        report.agreeing_tokens,
        report.tokens,
        report.disagreeing_sentences.len()
    );
    if let Some(path) = &a.out {
        let mut out = output(Some(path))?;
        serde_json::to_writer_pretty(&mut out, &report).map_err(|e| Failure::Io(e.to_string()))?;
        out.write_all(b"\n")?;
        finish(out)?;
    }
    Ok(())
}

fn run_synth(a: SynthArgs) -> Outcome {
    let (corpus, gold) = generate_synthetic(&SynthConfig::new(a.n, a.seed))?;
    let mut out = output(Some(&a.out_corpus))?;
    write_corpus(&corpus, &mut out)?;
    finish(out)?;
    let mut out = output(Some(&a.out_gold))?;
    write_annotations(&gold, &corpus, &mut out)?;
    finish(out)?;
    eprintln!("{} sentences, {} gold spans", corpus.len(), gold.span_count());
    Ok(())
}

fn run_grid(a: GridArgs) -> Outcome {
    let defaults = GridAxes::default();
    let axes = GridAxes {
        epochs: a.epochs.unwrap_or(defaults.epochs),
        learning_rates: a.learning_rates.unwrap_or(defaults.learning_rates),
        batch_sizes: a.batch_sizes.unwrap_or(defaults.batch_sizes),
        seed: a.seed.unwrap_or(defaults.seed),
        model_name: a.model.unwrap_or(defaults.model_name),
    };
    let mut out = output(a.out.as_deref())?;
    let n = export_finetune_grid(&axes, &mut out)?;
    finish(out)?;
    eprintln!("{n} runs");
    Ok(())
}

/// Splits `id=path` annotation arguments; bare paths go to the only corpus.
fn assign_annotations<'a>(ids: &[String], args: &'a [String]) -> Result<Vec<Vec<&'a Path>>, Failure> {
    let mut out = vec![Vec::new(); ids.len()];
    for arg in args {
        let (target, path) = match arg.split_once('=') {
            Some((id, path)) if ids.iter().any(|i| i == id) => (ids.iter().position(|i| i == id).unwrap(), path),
            _ if ids.len() == 1 => (0, arg.as_str()),
            _ => return Err(Failure::Validation(format!("annotation `{arg}` must name its corpus as <id>=<path>"))),
        };
        out[target].push(Path::new(path));
    }
    Ok(out)
}

fn run_serve(a: ServeArgs) -> Outcome {
    let ids: Vec<String> = a.corpus.iter().map(|p| corpus_id(p)).collect();
    if let Some(dup) = ids.iter().enumerate().find(|(i, id)| ids[..*i].contains(id)).map(|(_, id)| id) {
        return Err(Failure::Validation(format!("two corpora share the id `{dup}`")));
    }
    let assigned = assign_annotations(&ids, &a.annotations)?;
    let state_dir: Option<PathBuf> = a.state_dir.clone();
    if state_dir.is_none() {
        log::warn!("no state directory: corrections are kept in memory only");
    }
    let services = a
        .corpus
        .iter()
        .zip(&assigned)
        .map(|(path, annotations)| oncoextract_review::open_service(path, annotations, state_dir.as_deref()))
        .collect::<Result<Vec<_>, _>>()?;
    let addr: SocketAddr = format!("{}:{}", a.host, a.port)
        .parse()
        .map_err(|e| Failure::Validation(format!("bad address {}:{}: {e}", a.host, a.port)))?;
    eprintln!("serving {} on http://{addr}", ids.join(", "));
    oncoextract_review::http::serve_blocking(services, addr)?;
    Ok(())
}
