//! Toolkit for Persian Abstract Meaning Representation (PAMR) annotations.
//!
//! The crate covers the full annotation workflow:
//!
//! - [`penman`]: parse PENMAN-notation text into [`graph::Graph`] values and
//!   serialize graphs back to canonical PENMAN text.
//! - [`graph`]: the AMR graph model (variables, concepts, labeled edges,
//!   constants, reentrancy) with wellformedness checking and triple extraction.
//! - [`lexicon`]: the valency lexicon driving normalization and validation:
//!   verb frames with core-argument slots, light-verb-construction entries,
//!   abstract-concept and pronoun inventories.
//! - [`validator`]: the PAMR guideline as a rule catalog producing diagnostics
//!   over a graph plus a lexicon.
//! - [`smatch`]: Smatch similarity between graph pairs — hill-climbing search
//!   over variable mappings, an exact oracle for small graphs, and corpus-level
//!   micro aggregation.
//! - [`corpus`]: AMR corpus ingestion, statistics, and the
//!   inter-annotator-agreement pipeline.
//!
//! All graph values are immutable after construction and every operation here
//! is a pure function, so the API is safe to call from many threads at once.
//!
//! ```
//! use pamr::{parse_penman, score_pair, SmatchConfig};
//!
//! let gold = parse_penman("(x / raftan :ARG0 (y / dalghak))")?;
//! let other = parse_penman("(a / raftan :ARG0 (b / dalghak))")?;
//! let report = score_pair(&gold, &other, &SmatchConfig::default())?;
//! assert_eq!(report.f1, 1.0);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod corpus;
pub mod diagnostics;
pub mod graph;
pub mod lexicon;
pub mod penman;
pub mod smatch;
pub mod validator;

#[cfg(test)]
pub(crate) mod test_gen;

pub use diagnostics::{Diagnostic, RuleId, Severity};
pub use graph::{Concept, Constant, Graph, GraphBuilder, Role, Triple, Var};
pub use lexicon::Lexicon;
pub use penman::{parse_penman, serialize_penman, SerializeStyle};
pub use smatch::{score_corpus, score_exact, score_pair, ScoreMode, ScoreReport, SmatchConfig};

/// Normalizes a string to Unicode NFC. Idempotent; ZWNJ (U+200C) is preserved.
pub(crate) fn nfc(s: &str) -> String {
    use unicode_normalization::UnicodeNormalization;
    s.nfc().collect()
}
