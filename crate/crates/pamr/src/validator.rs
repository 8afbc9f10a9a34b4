//! The PAMR annotation guideline as a rule catalog over a graph plus a
//! lexicon. Pure and deterministic: diagnostics come back ordered by variable
//! preorder, then rule id.
//!
//! Graph-level wellformedness (`G-*`) runs first; the guideline rules are
//! skipped while the graph is ill-formed. Rule conditions are evaluated
//! independently of which rules are enabled, so toggling a rule changes
//! exactly that rule's findings; where one rule is the specific diagnosis of
//! another's generic condition (a separated LVC is also a missing frame), the
//! generic rule yields.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::diagnostics::{Diagnostic, RuleId, Severity};
use crate::graph::{Constant, Graph, Role, Var};
use crate::lexicon::Lexicon;

/// The adverbial modal that may only appear under `:mod`.
const SHAYAD: &str = "shâyad";
/// Lexical modal verbs that take an event `:ARG1`.
const MODAL_VERBS: [&str; 2] = ["bâyestan", "tavânestan"];
/// The possessor-construction verb.
const POSSESSIVE_VERB: &str = "dâshtan";
const POLITE_ROLE: &str = "polite";

/// Which rules run and with what severity.
#[derive(Debug, Clone)]
pub struct RuleConfig {
    enabled: BTreeSet<RuleId>,
    overrides: BTreeMap<RuleId, Severity>,
}

impl Default for RuleConfig {
    fn default() -> Self {
        RuleConfig {
            enabled: RuleId::ALL.into_iter().collect(),
            overrides: BTreeMap::new(),
        }
    }
}

impl RuleConfig {
    /// Only the given rules enabled.
    pub fn only(rules: impl IntoIterator<Item = RuleId>) -> Self {
        RuleConfig {
            enabled: rules.into_iter().collect(),
            overrides: BTreeMap::new(),
        }
    }

    pub fn disable(mut self, rule: RuleId) -> Self {
        self.enabled.remove(&rule);
        self
    }

    pub fn enable(mut self, rule: RuleId) -> Self {
        self.enabled.insert(rule);
        self
    }

    /// Overrides the severity of every finding the rule reports.
    pub fn override_severity(mut self, rule: RuleId, severity: Severity) -> Self {
        self.overrides.insert(rule, severity);
        self
    }

    pub fn is_enabled(&self, rule: RuleId) -> bool {
        self.enabled.contains(&rule)
    }
}

/// Per-sentence facts that come from corpus metadata rather than the graph.
#[derive(Debug, Clone, Default)]
pub struct ValidationContext {
    /// Variables whose concept was expanded from a pronominal clitic.
    pub clitic_expanded: BTreeSet<Var>,
}

/// Validates with an empty context (no corpus metadata).
pub fn validate(graph: &Graph, lexicon: &Lexicon, cfg: &RuleConfig) -> Vec<Diagnostic> {
    validate_in_context(graph, lexicon, cfg, &ValidationContext::default())
}

pub fn validate_in_context(
    graph: &Graph,
    lexicon: &Lexicon,
    cfg: &RuleConfig,
    ctx: &ValidationContext,
) -> Vec<Diagnostic> {
    let wellformedness = graph.check_wellformed();
    if !wellformedness.is_empty() {
        return finalize(wellformedness, graph, cfg);
    }

    let mut diags = Vec::new();
    let semantic = graph.semantic_edges();

    for var in graph.vars() {
        let concept = graph.concept_of(var).expect("wellformed").as_str();
        let norm = lexicon.normalize_verb(concept);
        let frame = lexicon.lookup_frame(&norm.canonical);

        let out_edges: Vec<(&Role, &Var)> = semantic
            .iter()
            .filter(|(s, _, _)| *s == var)
            .map(|(_, r, t)| (r, *t))
            .collect();
        let in_roles: Vec<&Role> = semantic
            .iter()
            .filter(|(_, _, t)| *t == var)
            .map(|(_, r, _)| r)
            .collect();
        let attrs: Vec<(&Role, &Constant)> = graph
            .attributes()
            .filter(|(s, _, _)| *s == var)
            .map(|(_, r, v)| (r, v))
            .collect();
        let mut core_indices: Vec<u8> = out_edges
            .iter()
            .filter_map(|(r, _)| r.core_index())
            .chain(attrs.iter().filter_map(|(r, _)| r.core_index()))
            .collect();
        core_indices.sort_unstable();
        core_indices.dedup();

        // R2: a bare light verb with no frame of its own, taking a registered
        // nonverbal element as a core argument, is a separated LVC. When the
        // light verb does have a frame (the heavy homograph reading), the
        // annotator's choice stands.
        let split_lvc: Option<(&str, &str)> = if lexicon.is_light_verb(concept)
            && frame.is_none()
        {
            out_edges
                .iter()
                .filter(|(r, _)| r.core_index().is_some())
                .find_map(|(_, t)| {
                    let nv = graph.concept_of(t).expect("wellformed").as_str();
                    lexicon.lvc_for_pair(nv, concept).map(|c| (nv, c))
                })
        } else {
            None
        };
        if let Some((nv, canonical)) = split_lvc {
            diags.push(Diagnostic::new(
                RuleId::R2LvcUnified,
                var.clone(),
                format!(
                    "separated light-verb construction: `{nv}` + `{concept}` must be annotated \
                     as the single event `{canonical}`"
                ),
            ));
        }

        // R1: anything governing core arguments must be a frame lemma once
        // normalized. R2 and R5 carve out their own nodes.
        if !core_indices.is_empty()
            && frame.is_none()
            && split_lvc.is_none()
            && concept != SHAYAD
        {
            diags.push(Diagnostic::new(
                RuleId::R1InfinitiveLemma,
                var.clone(),
                format!(
                    "`{concept}` governs core arguments but is not an infinitive frame lemma \
                     in the lexicon"
                ),
            ));
        }

        // R3: variant light verbs and simple equivalents.
        if norm.changed && !norm.polite {
            diags.push(Diagnostic::new(
                RuleId::R3VariantLv,
                var.clone(),
                format!(
                    "`{concept}` is a variant form; the canonical lemma is `{}`",
                    norm.canonical
                ),
            ));
        }

        // R4: formal variants want the canonical lemma plus `:polite +`;
        // `polite` only ever takes `+`.
        let has_polite_plus = attrs
            .iter()
            .any(|(r, v)| r.as_str() == POLITE_ROLE && **v == Constant::Plus);
        if norm.polite && !has_polite_plus {
            diags.push(Diagnostic::new(
                RuleId::R4PoliteForm,
                var.clone(),
                format!(
                    "formal variant `{concept}`: annotate as `{}` with `:polite +`",
                    norm.canonical
                ),
            ));
        }
        for (r, v) in &attrs {
            if r.as_str() == POLITE_ROLE && **v != Constant::Plus {
                diags.push(Diagnostic {
                    rule: RuleId::R4PoliteForm,
                    severity: Severity::Error,
                    variable: var.clone(),
                    message: format!("`:polite` only takes `+`, found `{v}`"),
                });
            }
        }

        // R5: shâyad is an adverb.
        if concept == SHAYAD {
            if !out_edges.is_empty() {
                diags.push(Diagnostic::new(
                    RuleId::R5ShayadAsMod,
                    var.clone(),
                    "`shâyad` used as a predicate; it may only appear as the target of a \
                     `:mod` edge"
                        .to_string(),
                ));
            } else if in_roles.iter().any(|r| r.as_str() != "mod") {
                diags.push(Diagnostic::new(
                    RuleId::R5ShayadAsMod,
                    var.clone(),
                    "`shâyad` may only appear as the target of a `:mod` edge".to_string(),
                ));
            }
        }

        // R6: modal verbs take an event-denoting ARG1.
        if MODAL_VERBS.contains(&concept) {
            let arg1_targets: Vec<&Var> = out_edges
                .iter()
                .filter(|(r, _)| r.core_index() == Some(1))
                .map(|(_, t)| *t)
                .collect();
            if arg1_targets.is_empty() {
                diags.push(Diagnostic::new(
                    RuleId::R6ModalVerbArgs,
                    var.clone(),
                    format!("modal `{concept}` requires an `:ARG1` event"),
                ));
            } else {
                for t in arg1_targets {
                    let t_concept = graph.concept_of(t).expect("wellformed").as_str();
                    let t_norm = lexicon.normalize_verb(t_concept);
                    if lexicon.lookup_frame(&t_norm.canonical).is_none() {
                        diags.push(Diagnostic::new(
                            RuleId::R6ModalVerbArgs,
                            var.clone(),
                            format!(
                                "modal `{concept}` takes an event as `:ARG1`, but \
                                 `{t_concept}` is not a frame lemma"
                            ),
                        ));
                    }
                }
            }
        }

        // R7: the possessor construction uses the full frame arity.
        if norm.canonical == POSSESSIVE_VERB {
            let missing: Vec<String> = [1u8, 2]
                .iter()
                .filter(|i| !core_indices.contains(i))
                .map(|i| format!("ARG{i}"))
                .collect();
            if !missing.is_empty() {
                diags.push(Diagnostic::new(
                    RuleId::R7PossessorClitic,
                    var.clone(),
                    format!(
                        "`dâshtan` expects ARG1 (owner) and ARG2 (possession); missing {}",
                        missing.join(", ")
                    ),
                ));
            }
        }

        // R9: ARG0 alone on a frame that defines ARG1 looks like a causative
        // missing its theme; ARG1 without ARG0 is the inchoative reading and
        // is fine.
        if let Some(frame) = frame {
            if frame.defines(1) && core_indices == [0] {
                diags.push(Diagnostic::new(
                    RuleId::R9CausativeArgs,
                    var.clone(),
                    format!(
                        "`{concept}` has `:ARG0` but no other core argument; the causative \
                         reading needs its theme"
                    ),
                ));
            }

            // R10: used indices must be defined by the frame.
            for index in &core_indices {
                if !frame.defines(*index) {
                    diags.push(Diagnostic::new(
                        RuleId::R10ArgInFrame,
                        var.clone(),
                        format!(
                            "role `ARG{index}` is not defined by the frame of `{}`",
                            frame.lemma
                        ),
                    ));
                }
            }
        }
    }

    // R8: clitic-expanded variables must hold inventory pronouns.
    for var in &ctx.clitic_expanded {
        match graph.concept_of(var) {
            Some(concept) if lexicon.is_pronoun(concept.as_str()) => {}
            Some(concept) => diags.push(Diagnostic::new(
                RuleId::R8PronounInventory,
                var.clone(),
                format!(
                    "clitic-expanded variable `{var}` has concept `{concept}`, which is not \
                     in the pronoun inventory"
                ),
            )),
            None => diags.push(Diagnostic::new(
                RuleId::R8PronounInventory,
                var.clone(),
                format!("clitic-expanded variable `{var}` does not appear in the graph"),
            )),
        }
    }

    finalize(diags, graph, cfg)
}

fn finalize(mut diags: Vec<Diagnostic>, graph: &Graph, cfg: &RuleConfig) -> Vec<Diagnostic> {
    diags.retain(|d| cfg.is_enabled(d.rule));
    for d in &mut diags {
        if let Some(&severity) = cfg.overrides.get(&d.rule) {
            d.severity = severity;
        }
    }
    let preorder: HashMap<Var, usize> = graph
        .preorder()
        .into_iter()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();
    diags.sort_by(|a, b| {
        let ka = (preorder.get(&a.variable).copied().unwrap_or(usize::MAX), a.rule);
        let kb = (preorder.get(&b.variable).copied().unwrap_or(usize::MAX), b.rule);
        ka.cmp(&kb).then_with(|| a.variable.cmp(&b.variable))
    });
    diags
}
