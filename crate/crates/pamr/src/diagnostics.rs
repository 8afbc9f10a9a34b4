//! Diagnostics shared by graph-level wellformedness checks (`G-*` rules) and
//! the guideline validator (`R1`..`R10`).

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::graph::Var;

/// Stable rule identifiers, usable in config files and CLI flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum RuleId {
    /// Every variable has exactly one concept instance; the root has one.
    GInstance,
    /// Edge and attribute endpoints refer to instantiated variables.
    GDangle,
    /// Every variable is reachable from the root.
    GUnreachable,
    /// The (inverse-normalized) edge relation is acyclic.
    GCycle,
    /// Predicates must be lexicon frame lemmas (infinitive convention).
    R1InfinitiveLemma,
    /// Separated light-verb constructions must be one fused concept.
    R2LvcUnified,
    /// Variant light verbs and simple equivalents normalize to the canonical LVC.
    R3VariantLv,
    /// Formal variants normalize to the canonical lemma plus `:polite +`.
    R4PoliteForm,
    /// `shâyad` is an adverb: only ever the target of a `mod` edge.
    R5ShayadAsMod,
    /// Modal verbs take an event-denoting `ARG1`.
    R6ModalVerbArgs,
    /// Possessor constructions use the full `dâshtan` frame (ARG1 + ARG2).
    R7PossessorClitic,
    /// Clitic-expanded leaves must come from the pronoun inventory.
    R8PronounInventory,
    /// `ARG0` without any other core argument on a frame that defines `ARG1`.
    R9CausativeArgs,
    /// Core argument indices must be defined by the predicate's frame.
    R10ArgInFrame,
}

impl RuleId {
    pub const ALL: [RuleId; 14] = [
        RuleId::GInstance,
        RuleId::GDangle,
        RuleId::GUnreachable,
        RuleId::GCycle,
        RuleId::R1InfinitiveLemma,
        RuleId::R2LvcUnified,
        RuleId::R3VariantLv,
        RuleId::R4PoliteForm,
        RuleId::R5ShayadAsMod,
        RuleId::R6ModalVerbArgs,
        RuleId::R7PossessorClitic,
        RuleId::R8PronounInventory,
        RuleId::R9CausativeArgs,
        RuleId::R10ArgInFrame,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::GInstance => "G-INSTANCE",
            RuleId::GDangle => "G-DANGLE",
            RuleId::GUnreachable => "G-UNREACHABLE",
            RuleId::GCycle => "G-CYCLE",
            RuleId::R1InfinitiveLemma => "R1",
            RuleId::R2LvcUnified => "R2",
            RuleId::R3VariantLv => "R3",
            RuleId::R4PoliteForm => "R4",
            RuleId::R5ShayadAsMod => "R5",
            RuleId::R6ModalVerbArgs => "R6",
            RuleId::R7PossessorClitic => "R7",
            RuleId::R8PronounInventory => "R8",
            RuleId::R9CausativeArgs => "R9",
            RuleId::R10ArgInFrame => "R10",
        }
    }

    /// Default severity of findings reported under this rule. `R4` reports its
    /// bad-value finding as [`Severity::Error`] regardless of this default.
    pub fn default_severity(self) -> Severity {
        match self {
            RuleId::GInstance | RuleId::GDangle | RuleId::GUnreachable | RuleId::GCycle => {
                Severity::Error
            }
            RuleId::R1InfinitiveLemma
            | RuleId::R2LvcUnified
            | RuleId::R5ShayadAsMod
            | RuleId::R6ModalVerbArgs
            | RuleId::R8PronounInventory
            | RuleId::R10ArgInFrame => Severity::Error,
            RuleId::R3VariantLv | RuleId::R4PoliteForm | RuleId::R9CausativeArgs => {
                Severity::Warning
            }
            RuleId::R7PossessorClitic => Severity::Info,
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Error for parsing a rule id from its stable string form.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown rule id `{0}`")]
pub struct UnknownRule(pub String);

impl FromStr for RuleId {
    type Err = UnknownRule;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleId::ALL
            .iter()
            .copied()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| UnknownRule(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single validator or wellformedness finding, attached to a variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub rule: RuleId,
    pub severity: Severity,
    pub variable: Var,
    pub message: String,
}

impl Diagnostic {
    pub fn new(rule: RuleId, variable: Var, message: impl Into<String>) -> Self {
        Diagnostic {
            rule,
            severity: rule.default_severity(),
            variable,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}",
            self.rule, self.severity, self.variable, self.message
        )
    }
}
