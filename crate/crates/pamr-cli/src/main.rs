//! `pamr` — batch commands over PAMR corpora: parse/round-trip PENMAN
//! graphs, lint annotations against the guideline rules, Smatch-score
//! parallel files, and report corpus statistics and inter-annotator
//! agreement.
//!
//! Exit codes: 0 success (no error findings), 1 validator errors (warnings
//! too under `--strict`), 2 usage or format error, 3 I/O error.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use pamr::corpus::{
    self, context_from_metadata, parse_corpus, split_raw, AnnotatedSentence, CorpusError,
};
use pamr::diagnostics::Severity;
use pamr::graph::{Constant, Graph, Triple};
use pamr::lexicon::{Lexicon, LexiconError};
use pamr::penman::{parse_penman, serialize_penman, SerializeStyle};
use pamr::smatch::{score_corpus, ScoreMode, ScoreReport, SmatchConfig};
use pamr::validator::{validate_in_context, RuleConfig};
use pamr::RuleId;

#[derive(Parser)]
#[command(name = "pamr", version, about = "Persian AMR corpus toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parse records and print round-tripped graphs or their triples.
    Parse {
        /// Corpus-format or bare PENMAN file (`-` for stdin).
        file: String,
        /// Rename variables canonically (x, x2, ...) by preorder.
        #[arg(long)]
        canonical: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Lint annotations against the guideline rule catalog.
    Check {
        /// Corpus-format file (`-` for stdin).
        file: String,
        /// Extra lexicon file merged over the builtin one.
        #[arg(long, env = "PAMR_LEXICON")]
        lexicon: Option<PathBuf>,
        /// Comma-separated rule ids to enable (all by default), e.g. R1,R5.
        #[arg(long, value_delimiter = ',')]
        rules: Option<Vec<String>>,
        /// Warnings also set the failure exit code.
        #[arg(long)]
        strict: bool,
    },
    /// Smatch-score two corpus files whose records pair by ::id.
    Score {
        file_a: String,
        file_b: String,
        /// Disregard edge labels when matching.
        #[arg(long)]
        unlabeled: bool,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Leave the TOP triple out of the totals.
        #[arg(long)]
        no_top: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Corpus statistics: concept/role tables, reentrancies, triple sizes.
    Stats {
        file: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Inter-annotator agreement across two or more corpus files.
    Iaa {
        /// One corpus file per annotator.
        #[arg(num_args = 2.., required = true)]
        files: Vec<String>,
        #[arg(long)]
        unlabeled: bool,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        no_top: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

/// A failure with its process exit code (2 usage/format, 3 I/O).
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Failure {
        Failure {
            code: 3,
            message: message.into(),
        }
    }

    fn prefixed(self, file: &str) -> Failure {
        Failure {
            code: self.code,
            message: format!("{file}: {}", self.message),
        }
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Failure {
        match e {
            CorpusError::Io { .. } => Failure::io(e.to_string()),
            other => Failure::usage(other.to_string()),
        }
    }
}

impl From<LexiconError> for Failure {
    fn from(e: LexiconError) -> Failure {
        match e {
            LexiconError::Io { .. } => Failure::io(e.to_string()),
            other => Failure::usage(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    // Die quietly when the consumer closes the pipe (e.g. `pamr parse | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("pamr: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Parse {
            file,
            canonical,
            format,
        } => cmd_parse(&file, canonical, format),
        Command::Check {
            file,
            lexicon,
            rules,
            strict,
        } => cmd_check(&file, lexicon.as_deref(), rules.as_deref(), strict),
        Command::Score {
            file_a,
            file_b,
            unlabeled,
            restarts,
            seed,
            no_top,
            format,
        } => cmd_score(
            &file_a,
            &file_b,
            smatch_config(unlabeled, restarts, seed, no_top),
            format,
        ),
        Command::Stats { file, format } => cmd_stats(&file, format),
        Command::Iaa {
            files,
            unlabeled,
            restarts,
            seed,
            no_top,
            format,
        } => cmd_iaa(
            &files,
            smatch_config(unlabeled, restarts, seed, no_top),
            format,
        ),
    }
}

fn smatch_config(unlabeled: bool, restarts: usize, seed: u64, no_top: bool) -> SmatchConfig {
    SmatchConfig {
        restarts,
        seed,
        include_top: !no_top,
        mode: if unlabeled {
            ScoreMode::Unlabeled
        } else {
            ScoreMode::Labeled
        },
        ..SmatchConfig::default()
    }
}

/// Reads a file argument; `-` means stdin.
fn read_input(file: &str) -> Result<String, Failure> {
    if file == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::io(format!("cannot read stdin: {e}")))?;
        Ok(text)
    } else {
        std::fs::read_to_string(file)
            .map_err(|e| Failure::io(format!("cannot read {file}: {e}")))
    }
}

// ---------------------------------------------------------------------------
// parse

fn cmd_parse(file: &str, canonical: bool, format: Format) -> Result<u8, Failure> {
    let text = read_input(file)?;
    let records = split_raw(&text);
    if records.is_empty() {
        return Err(Failure::usage(format!("{file}: no records to parse")));
    }

    let mut parsed: Vec<(Option<String>, Graph)> = Vec::new();
    for record in &records {
        let label = record
            .id()
            .map(str::to_string)
            .unwrap_or_else(|| format!("record {}", record.ordinal));
        let graph = parse_penman(&record.body).map_err(|d| {
            Failure::usage(format!("{file}: {label}: {d}"))
        })?;
        let diags = graph.check_wellformed();
        if !diags.is_empty() {
            let rules: Vec<&str> = diags.iter().map(|d| d.rule.as_str()).collect();
            return Err(Failure::usage(format!(
                "{file}: {label}: graph is not wellformed: {}",
                rules.join(", ")
            )));
        }
        parsed.push((record.id().map(str::to_string), graph));
    }

    match format {
        Format::Text => {
            let style = SerializeStyle {
                canonical_vars: canonical,
            };
            let blocks: Vec<String> = parsed
                .iter()
                .map(|(_, g)| serialize_penman(g, style).expect("wellformed"))
                .collect();
            println!("{}", blocks.join("\n\n"));
        }
        Format::Json => {
            let records: Vec<serde_json::Value> = parsed
                .iter()
                .map(|(id, g)| {
                    let graph = if canonical {
                        g.canonicalize().expect("wellformed")
                    } else {
                        g.clone()
                    };
                    let triples: Vec<serde_json::Value> =
                        graph.triples(true).iter().map(triple_json).collect();
                    json!({ "id": id, "triples": triples })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&records).unwrap());
        }
    }
    Ok(0)
}

fn triple_json(triple: &Triple) -> serde_json::Value {
    match triple {
        Triple::Top { root, concept } => json!({
            "kind": "top",
            "root": root.as_str(),
            "concept": concept.as_str(),
        }),
        Triple::Instance { var, concept } => json!({
            "kind": "instance",
            "var": var.as_str(),
            "concept": concept.as_str(),
        }),
        Triple::Relation {
            source,
            role,
            target,
        } => json!({
            "kind": "relation",
            "source": source.as_str(),
            "role": role.as_str(),
            "target": target.as_str(),
        }),
        Triple::Attribute {
            source,
            role,
            value,
        } => {
            let (value_type, value) = match value {
                Constant::Text(s) => ("text", s.clone()),
                Constant::Number(n) => ("number", n.clone()),
                Constant::Plus => ("plus", "+".to_string()),
                Constant::Minus => ("minus", "-".to_string()),
            };
            json!({
                "kind": "attribute",
                "source": source.as_str(),
                "role": role.as_str(),
                "value": value,
                "value_type": value_type,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// check

fn cmd_check(
    file: &str,
    lexicon: Option<&Path>,
    rules: Option<&[String]>,
    strict: bool,
) -> Result<u8, Failure> {
    let lexicon = match lexicon {
        Some(path) => Lexicon::load(path)?,
        None => Lexicon::builtin(),
    };
    let cfg = match rules {
        None => RuleConfig::default(),
        Some(ids) => {
            let parsed: Result<Vec<RuleId>, _> =
                ids.iter().map(|s| s.trim().parse::<RuleId>()).collect();
            RuleConfig::only(parsed.map_err(|e| Failure::usage(e.to_string()))?)
        }
    };

    let text = read_input(file)?;
    let records = split_raw(&text);
    if records.is_empty() {
        return Err(Failure::usage(format!("{file}: no records to check")));
    }

    let mut errors = 0usize;
    let mut warnings = 0usize;
    for record in &records {
        let label = record
            .id()
            .map(str::to_string)
            .unwrap_or_else(|| format!("#{}", record.ordinal));
        let graph = parse_penman(&record.body)
            .map_err(|d| Failure::usage(format!("{file}: {label}: {d}")))?;
        let ctx = context_from_metadata(&record.metadata);
        for d in validate_in_context(&graph, &lexicon, &cfg, &ctx) {
            match d.severity {
                Severity::Error => errors += 1,
                Severity::Warning => warnings += 1,
                Severity::Info => {}
            }
            println!("{label}\t{d}");
        }
    }
    println!("{errors} errors, {warnings} warnings");
    if errors > 0 || (strict && warnings > 0) {
        Ok(1)
    } else {
        Ok(0)
    }
}

// ---------------------------------------------------------------------------
// score

fn cmd_score(
    file_a: &str,
    file_b: &str,
    cfg: SmatchConfig,
    format: Format,
) -> Result<u8, Failure> {
    let corpus_a = parse_corpus(&read_input(file_a)?)
        .map_err(|e| Failure::from(e).prefixed(file_a))?;
    let corpus_b = parse_corpus(&read_input(file_b)?)
        .map_err(|e| Failure::from(e).prefixed(file_b))?;

    let index_b: BTreeMap<&str, &AnnotatedSentence> =
        corpus_b.iter().map(|s| (s.id.as_str(), s)).collect();
    let only_a: Vec<&str> = corpus_a
        .iter()
        .map(|s| s.id.as_str())
        .filter(|id| !index_b.contains_key(id))
        .collect();
    let ids_a: std::collections::BTreeSet<&str> =
        corpus_a.iter().map(|s| s.id.as_str()).collect();
    let only_b: Vec<&str> = corpus_b
        .iter()
        .map(|s| s.id.as_str())
        .filter(|id| !ids_a.contains(id))
        .collect();
    if !only_a.is_empty() || !only_b.is_empty() {
        return Err(Failure::usage(format!(
            "ids do not align: only in {file_a}: [{}]; only in {file_b}: [{}]",
            only_a.join(", "),
            only_b.join(", ")
        )));
    }

    let pairs: Vec<(&Graph, &Graph)> = corpus_a
        .iter()
        .map(|s| (&s.graph, &index_b[s.id.as_str()].graph))
        .collect();
    let score = score_corpus(&pairs, &cfg).map_err(|e| Failure::usage(e.to_string()))?;

    match format {
        Format::Text => {
            for (s, report) in corpus_a.iter().zip(&score.per_pair) {
                println!("{}\t{}", s.id, score_line(report));
            }
            println!("micro\t{}", score_line(&score.micro));
        }
        Format::Json => {
            let pairs: Vec<serde_json::Value> = corpus_a
                .iter()
                .zip(&score.per_pair)
                .map(|(s, report)| {
                    let mut value = serde_json::to_value(report).unwrap();
                    value["id"] = json!(s.id);
                    value
                })
                .collect();
            let out = json!({
                "pairs": pairs,
                "micro": serde_json::to_value(&score.micro).unwrap(),
            });
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
        }
    }
    Ok(0)
}

fn score_line(report: &ScoreReport) -> String {
    format!(
        "{:.6}\t{:.6}\t{:.6}",
        report.precision, report.recall, report.f1
    )
}

// ---------------------------------------------------------------------------
// stats

fn cmd_stats(file: &str, format: Format) -> Result<u8, Failure> {
    let corpus =
        parse_corpus(&read_input(file)?).map_err(|e| Failure::from(e).prefixed(file))?;
    let stats = corpus::stats(&corpus).map_err(Failure::from)?;

    match format {
        Format::Text => {
            println!("sentences: {}", stats.sentence_count);
            println!("triples_mean: {:.6}", stats.triples_mean);
            println!("triples_median: {:.6}", stats.triples_median);
            println!("reentrancies: {}", stats.reentrancy_count);
            println!("lvc_concepts: {}", stats.lvc_concept_count);
            println!("concepts:");
            for (label, count) in frequency_order(&stats.concepts) {
                println!("\t{label}\t{count}");
            }
            println!("roles:");
            for (label, count) in frequency_order(&stats.roles) {
                println!("\t{label}\t{count}");
            }
        }
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(&stats).unwrap());
        }
    }
    Ok(0)
}

/// Highest count first, ties alphabetically.
fn frequency_order(table: &BTreeMap<String, usize>) -> Vec<(&str, usize)> {
    let mut rows: Vec<(&str, usize)> = table.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    rows
}

// ---------------------------------------------------------------------------
// iaa

fn cmd_iaa(files: &[String], cfg: SmatchConfig, format: Format) -> Result<u8, Failure> {
    let mut corpora: BTreeMap<String, Vec<AnnotatedSentence>> = BTreeMap::new();
    for file in files {
        let corpus =
            parse_corpus(&read_input(file)?).map_err(|e| Failure::from(e).prefixed(file))?;
        let annotator = corpus
            .iter()
            .find_map(|s| s.annotator.clone())
            .unwrap_or_else(|| file_stem(file));
        if corpora.insert(annotator.clone(), corpus).is_some() {
            return Err(Failure::usage(format!(
                "two corpora identify the same annotator `{annotator}`"
            )));
        }
    }
    let report = corpus::iaa(&corpora, &cfg).map_err(Failure::from)?;

    match format {
        Format::Text => {
            println!("annotators: {}", report.annotators.join(", "));
            println!("shared_ids: {}", report.shared_ids.len());
            for pair in &report.pairwise {
                println!("{}\t{}\t{:.6}", pair.a, pair.b, pair.score.f1);
            }
            println!("average_f1: {:.6}", report.average_f1);
        }
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
        }
    }
    Ok(0)
}

fn file_stem(file: &str) -> String {
    Path::new(file)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| file.to_string())
}
