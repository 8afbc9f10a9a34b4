//! Corpus ingestion, statistics, and the inter-annotator-agreement pipeline.
//!
//! The corpus file format: UTF-8 text, records separated by one or more blank
//! lines. Each record starts with comment/metadata lines (`# ::<key> <value>`;
//! several `::key value` groups may share one line) followed by one PENMAN
//! graph. `::id` and `::snt` are required, `::annotator` is optional, all
//! other keys are kept verbatim. Graphs must parse and be wellformed.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::graph::{Graph, GraphError, Var};
use crate::penman::{parse_penman, serialize_penman, SerializeStyle};
use crate::smatch::{score_corpus, ScoreMode, ScoreReport, SmatchConfig, SmatchError};
use crate::validator::ValidationContext;

/// Metadata key whose value lists clitic-expanded variables, e.g.
/// `# ::clitic-expanded x2 x4`. Feeds the pronoun-inventory check.
pub const CLITIC_EXPANDED_KEY: &str = "clitic-expanded";

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedSentence {
    pub id: String,
    pub snt: String,
    pub annotator: Option<String>,
    /// Metadata keys other than `id`, `snt`, and `annotator`.
    pub metadata: BTreeMap<String, String>,
    pub graph: Graph,
}

impl AnnotatedSentence {
    /// Context for guideline validation, extracted from record metadata.
    pub fn validation_context(&self) -> ValidationContext {
        context_from_metadata(&self.metadata)
    }
}

/// Builds a validation context from record metadata (see
/// [`CLITIC_EXPANDED_KEY`]). Tokens that are not valid variables are ignored.
pub fn context_from_metadata(metadata: &BTreeMap<String, String>) -> ValidationContext {
    let mut ctx = ValidationContext::default();
    if let Some(value) = metadata.get(CLITIC_EXPANDED_KEY) {
        for token in value.split_whitespace() {
            if let Ok(var) = Var::new(token) {
                ctx.clitic_expanded.insert(var);
            }
        }
    }
    ctx
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read corpus {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("record {ordinal} (line {line}): {message}")]
    Record {
        ordinal: usize,
        line: usize,
        message: String,
    },
    #[error("record {ordinal} (line {line}): duplicate ::id `{id}`")]
    DuplicateId {
        ordinal: usize,
        line: usize,
        id: String,
    },
    #[error("corpus is empty")]
    Empty,
    #[error("inter-annotator agreement needs at least two corpora")]
    NeedTwoAnnotators,
    #[error("no sentence ids are shared by all annotators")]
    NoSharedIds,
    #[error(transparent)]
    Score(#[from] SmatchError),
    #[error(transparent)]
    Serialize(#[from] GraphError),
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<AnnotatedSentence>, CorpusError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_corpus(&text)
}

/// Parses corpus-format text. Records must carry unique `::id`s, an `::snt`,
/// and a wellformed graph.
pub fn parse_corpus(text: &str) -> Result<Vec<AnnotatedSentence>, CorpusError> {
    let mut sentences = Vec::new();
    let mut ids = BTreeSet::new();
    for record in split_raw(text) {
        let sentence = interpret_record(&record)?;
        if !ids.insert(sentence.id.clone()) {
            return Err(CorpusError::DuplicateId {
                ordinal: record.ordinal,
                line: record.line,
                id: sentence.id,
            });
        }
        sentences.push(sentence);
    }
    Ok(sentences)
}

/// Renders sentences back to the corpus format: `::id`, `::snt`, `::annotator`,
/// remaining keys sorted, then the serialized graph.
pub fn write_corpus(sentences: &[AnnotatedSentence]) -> Result<String, CorpusError> {
    let mut out = String::new();
    for s in sentences {
        writeln!(out, "# ::id {}", s.id).unwrap();
        writeln!(out, "# ::snt {}", s.snt).unwrap();
        if let Some(annotator) = &s.annotator {
            writeln!(out, "# ::annotator {annotator}").unwrap();
        }
        for (key, value) in &s.metadata {
            writeln!(out, "# ::{key} {value}").unwrap();
        }
        out.push_str(&serialize_penman(&s.graph, SerializeStyle::default())?);
        out.push_str("\n\n");
    }
    Ok(out)
}

/// A record split out of corpus text with its metadata collected but not yet
/// interpreted. The body keeps comment lines, so PENMAN parse spans stay
/// relative to the record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRecord {
    /// 1-based record number, not counting comment-only header blocks.
    pub ordinal: usize,
    /// File line where the record starts.
    pub line: usize,
    /// Every `::key value` group from the record's comment lines.
    pub metadata: BTreeMap<String, String>,
    /// The full record text, comments included.
    pub body: String,
}

impl RawRecord {
    pub fn id(&self) -> Option<&str> {
        self.metadata.get("id").map(String::as_str)
    }
}

/// Splits corpus text into raw records on blank lines. Blocks of nothing but
/// comment lines (file headers) are not records.
pub fn split_raw(text: &str) -> Vec<RawRecord> {
    let mut blocks: Vec<(usize, String)> = Vec::new();
    let mut current = String::new();
    let mut start_line = 0usize;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                blocks.push((start_line, std::mem::take(&mut current)));
            }
        } else {
            if current.is_empty() {
                start_line = i + 1;
            }
            current.push_str(line);
            current.push('\n');
        }
    }
    if !current.is_empty() {
        blocks.push((start_line, current));
    }

    blocks
        .into_iter()
        .filter(|(_, body)| body.lines().any(|l| !l.starts_with('#')))
        .enumerate()
        .map(|(i, (line, body))| {
            let mut metadata = BTreeMap::new();
            for body_line in body.lines() {
                let Some(rest) = body_line.strip_prefix('#') else {
                    break; // the PENMAN block starts here
                };
                for (key, value) in metadata_groups(rest.trim_start()) {
                    metadata.insert(key, value);
                }
            }
            RawRecord {
                ordinal: i + 1,
                line,
                metadata,
                body,
            }
        })
        .collect()
}

fn interpret_record(record: &RawRecord) -> Result<AnnotatedSentence, CorpusError> {
    let fail = |message: String| CorpusError::Record {
        ordinal: record.ordinal,
        line: record.line,
        message,
    };

    let mut metadata = record.metadata.clone();
    let id = metadata
        .remove("id")
        .filter(|v| !v.is_empty())
        .ok_or_else(|| fail("missing `::id` metadata".into()))?;
    let snt = metadata
        .remove("snt")
        .ok_or_else(|| fail(format!("record `{id}` is missing `::snt` metadata")))?;
    let annotator = metadata.remove("annotator");

    let graph = parse_penman(&record.body).map_err(|d| {
        fail(format!(
            "cannot parse graph of `{id}`: {} (record line {}, bytes {}..{})",
            d.message, d.span.line, d.span.start, d.span.end
        ))
    })?;
    let diags = graph.check_wellformed();
    if !diags.is_empty() {
        let rules: Vec<&str> = diags.iter().map(|d| d.rule.as_str()).collect();
        return Err(fail(format!(
            "graph of `{id}` is not wellformed: {}",
            rules.join(", ")
        )));
    }

    Ok(AnnotatedSentence {
        id,
        snt,
        annotator,
        metadata,
        graph,
    })
}

/// Splits `::key value ::key2 value2` groups on one metadata line. A `::` only
/// starts a new group at the start or after whitespace.
fn metadata_groups(s: &str) -> Vec<(String, String)> {
    let mut starts = Vec::new();
    let bytes = s.as_bytes();
    for (i, _) in s.match_indices("::") {
        if i == 0 || bytes[i - 1].is_ascii_whitespace() {
            starts.push(i);
        }
    }
    let mut groups = Vec::new();
    for (n, &start) in starts.iter().enumerate() {
        let end = starts.get(n + 1).copied().unwrap_or(s.len());
        let group = &s[start + 2..end];
        let (key, value) = match group.split_once(char::is_whitespace) {
            Some((k, v)) => (k, v.trim()),
            None => (group.trim(), ""),
        };
        if !key.is_empty() {
            groups.push((key.to_string(), value.to_string()));
        }
    }
    groups
}

// ---------------------------------------------------------------------------
// Statistics

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub sentence_count: usize,
    /// Instance-concept frequencies.
    pub concepts: BTreeMap<String, usize>,
    /// Role frequencies over relation and attribute triples.
    pub roles: BTreeMap<String, usize>,
    /// Edges whose target was already introduced when the edge is read in
    /// recorded order (reused targets and ancestor references).
    pub reentrancy_count: usize,
    /// Mean content triples (instances + relations + attributes) per graph.
    pub triples_mean: f64,
    pub triples_median: f64,
    /// Instances whose concept is an underscore-joined LVC lemma.
    pub lvc_concept_count: usize,
}

pub fn stats(corpus: &[AnnotatedSentence]) -> Result<CorpusStats, CorpusError> {
    if corpus.is_empty() {
        return Err(CorpusError::Empty);
    }
    let mut concepts: BTreeMap<String, usize> = BTreeMap::new();
    let mut roles: BTreeMap<String, usize> = BTreeMap::new();
    let mut reentrancy_count = 0;
    let mut lvc_concept_count = 0;
    let mut triple_counts: Vec<usize> = Vec::new();

    for sentence in corpus {
        let g = &sentence.graph;
        for (_, concept) in g.instances() {
            *concepts.entry(concept.as_str().to_string()).or_insert(0) += 1;
            if concept.as_str().contains('_') {
                lvc_concept_count += 1;
            }
        }
        for (_, role, _) in g.edges() {
            *roles.entry(role.as_str().to_string()).or_insert(0) += 1;
        }
        for (_, role, _) in g.attributes() {
            *roles.entry(role.as_str().to_string()).or_insert(0) += 1;
        }
        reentrancy_count += reentrancies(g);
        triple_counts.push(g.triples(false).len());
    }

    triple_counts.sort_unstable();
    let n = triple_counts.len();
    let triples_mean = triple_counts.iter().sum::<usize>() as f64 / n as f64;
    let triples_median = if n % 2 == 1 {
        triple_counts[n / 2] as f64
    } else {
        (triple_counts[n / 2 - 1] + triple_counts[n / 2]) as f64 / 2.0
    };

    Ok(CorpusStats {
        sentence_count: n,
        concepts,
        roles,
        reentrancy_count,
        triples_mean,
        triples_median,
        lvc_concept_count,
    })
}

/// Edges that re-enter an already-introduced variable, in recorded order.
fn reentrancies(g: &Graph) -> usize {
    let mut introduced: BTreeSet<&Var> = BTreeSet::new();
    introduced.insert(g.root());
    let mut count = 0;
    for (_, _, target) in g.edges() {
        if !introduced.insert(target) {
            count += 1;
        }
    }
    count
}

// ---------------------------------------------------------------------------
// Inter-annotator agreement

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnotatorPair {
    pub a: String,
    pub b: String,
    /// Micro Smatch over the shared sentences.
    pub score: ScoreReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IaaReport {
    pub annotators: Vec<String>,
    pub shared_ids: Vec<String>,
    pub pairwise: Vec<AnnotatorPair>,
    /// Arithmetic mean of the pairwise micro F1 scores.
    pub average_f1: f64,
    pub mode: ScoreMode,
}

/// Pairwise micro Smatch between every two annotators over the ids shared by
/// all of them, averaged arithmetically.
pub fn iaa(
    corpora: &BTreeMap<String, Vec<AnnotatedSentence>>,
    cfg: &SmatchConfig,
) -> Result<IaaReport, CorpusError> {
    if corpora.len() < 2 {
        return Err(CorpusError::NeedTwoAnnotators);
    }
    let annotators: Vec<String> = corpora.keys().cloned().collect();
    let by_id: BTreeMap<&String, HashMap<&str, &AnnotatedSentence>> = corpora
        .iter()
        .map(|(annotator, sentences)| {
            let index: HashMap<&str, &AnnotatedSentence> =
                sentences.iter().map(|s| (s.id.as_str(), s)).collect();
            (annotator, index)
        })
        .collect();

    let mut shared: BTreeSet<&str> = by_id
        .values()
        .next()
        .expect("at least two annotators")
        .keys()
        .copied()
        .collect();
    for index in by_id.values() {
        shared.retain(|id| index.contains_key(id));
    }
    if shared.is_empty() {
        return Err(CorpusError::NoSharedIds);
    }
    let shared_ids: Vec<String> = shared.iter().map(|s| s.to_string()).collect();

    let mut pairwise = Vec::new();
    for (i, a) in annotators.iter().enumerate() {
        for b in &annotators[i + 1..] {
            let pairs: Vec<(&Graph, &Graph)> = shared
                .iter()
                .map(|id| (&by_id[a][id].graph, &by_id[b][id].graph))
                .collect();
            let score = score_corpus(&pairs, cfg)?;
            pairwise.push(AnnotatorPair {
                a: a.clone(),
                b: b.clone(),
                score: score.micro,
            });
        }
    }
    let average_f1 =
        pairwise.iter().map(|p| p.score.f1).sum::<f64>() / pairwise.len() as f64;

    Ok(IaaReport {
        annotators,
        shared_ids,
        pairwise,
        average_f1,
        mode: cfg.mode,
    })
}
