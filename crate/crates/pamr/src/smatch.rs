//! Smatch similarity between two graphs: the maximum triple-overlap F1 over
//! injective variable mappings.
//!
//! Small pairs (by variable count) are scored by exhaustive enumeration and
//! the result is exact. Larger pairs use seeded hill-climbing with restarts:
//! a greedy concept-match seeding first, uniformly random injections after,
//! with single-reassignment and pairwise-swap moves. Identical configuration
//! and seed always produce identical reports, and scoring distinct pairs
//! shares no mutable state, so corpus scoring parallelizes freely.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use std::collections::HashMap;

use crate::diagnostics::Diagnostic;
use crate::graph::{Constant, Graph, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScoreMode {
    /// Relation and attribute roles must match.
    Labeled,
    /// Edge labels are disregarded; endpoints (and attribute values) still count.
    Unlabeled,
}

#[derive(Debug, Clone, Copy)]
pub struct SmatchConfig {
    /// Total restarts; the first is greedy, the rest random. Must be ≥ 1.
    pub restarts: usize,
    pub seed: u64,
    /// Include the TOP triple in totals and matching.
    pub include_top: bool,
    pub mode: ScoreMode,
    /// Pairs whose larger side has at most this many variables are scored
    /// exhaustively; the hill-climbing parameters are then irrelevant.
    pub exact_threshold: usize,
}

impl Default for SmatchConfig {
    fn default() -> Self {
        SmatchConfig {
            restarts: 8,
            seed: 0,
            include_top: true,
            mode: ScoreMode::Labeled,
            exact_threshold: 6,
        }
    }
}

/// A partial injective map from variables of the candidate graph to variables
/// of the reference graph, in candidate variable order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Mapping {
    pub pairs: Vec<(Var, Var)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    pub matched: usize,
    pub total_a: usize,
    pub total_b: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub mapping: Mapping,
    pub mode: ScoreMode,
}

#[derive(Debug, thiserror::Error)]
pub enum SmatchError {
    #[error("{side} graph is not wellformed: {}", .diagnostics.iter().map(|d| d.rule.as_str()).collect::<Vec<_>>().join(", "))]
    NotWellformed {
        side: &'static str,
        diagnostics: Vec<Diagnostic>,
    },
    #[error("graph has {vars} variables, above the exact-search cap of {cap}")]
    TooLarge { vars: usize, cap: usize },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("cannot score an empty pair list")]
    EmptyCorpus,
}

/// Hard cap for [`score_exact`]; enumeration is factorial beyond this.
pub const EXACT_CAP: usize = 8;

/// Scores a candidate/reference pair. Exact for small pairs, hill-climbing
/// otherwise; see [`SmatchConfig`].
pub fn score_pair(a: &Graph, b: &Graph, cfg: &SmatchConfig) -> Result<ScoreReport, SmatchError> {
    if cfg.restarts == 0 {
        return Err(SmatchError::BadConfig("restarts must be at least 1".into()));
    }
    let (ca, cb) = compile_pair(a, b, cfg)?;
    if ca.vars.len().max(cb.vars.len()) <= cfg.exact_threshold {
        return Ok(exact_search(&ca, &cb, cfg));
    }
    Ok(climb_search(&ca, &cb, cfg))
}

/// Exhaustive maximum over all injective mappings. Deterministic; refuses
/// pairs whose larger side exceeds [`EXACT_CAP`] variables.
pub fn score_exact(a: &Graph, b: &Graph, cfg: &SmatchConfig) -> Result<ScoreReport, SmatchError> {
    let (ca, cb) = compile_pair(a, b, cfg)?;
    let vars = ca.vars.len().max(cb.vars.len());
    if vars > EXACT_CAP {
        return Err(SmatchError::TooLarge {
            vars,
            cap: EXACT_CAP,
        });
    }
    Ok(exact_search(&ca, &cb, cfg))
}

/// Per-pair reports plus the micro-aggregated totals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusScore {
    pub micro: ScoreReport,
    pub per_pair: Vec<ScoreReport>,
}

/// Scores every (candidate, reference) pair and micro-aggregates: matched and
/// totals are summed before computing precision/recall/F1. Pairs are scored
/// in parallel; per-pair seeds derive from the pair index, so results do not
/// depend on scheduling.
pub fn score_corpus(
    pairs: &[(&Graph, &Graph)],
    cfg: &SmatchConfig,
) -> Result<CorpusScore, SmatchError> {
    if pairs.is_empty() {
        return Err(SmatchError::EmptyCorpus);
    }
    let per_pair: Vec<ScoreReport> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let pair_cfg = SmatchConfig {
                seed: cfg.seed.wrapping_add(i as u64),
                ..*cfg
            };
            score_pair(a, b, &pair_cfg)
        })
        .collect::<Result<_, _>>()?;
    let matched = per_pair.iter().map(|r| r.matched).sum();
    let total_a = per_pair.iter().map(|r| r.total_a).sum();
    let total_b = per_pair.iter().map(|r| r.total_b).sum();
    Ok(CorpusScore {
        micro: finish(matched, total_a, total_b, Mapping::default(), cfg.mode),
        per_pair,
    })
}

// ---------------------------------------------------------------------------
// Compiled triple view

/// A graph lowered to variable indices for mapping search. Variable order is
/// the graph's canonical (first-instance) order.
struct Compiled {
    vars: Vec<Var>,
    concepts: Vec<String>,
    root: usize,
    relations: Vec<(usize, String, usize)>,
    attributes: Vec<(usize, String, Constant)>,
}

impl Compiled {
    fn new(g: &Graph) -> Compiled {
        let vars: Vec<Var> = g.vars().into_iter().cloned().collect();
        let index: HashMap<&Var, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
        Compiled {
            concepts: vars
                .iter()
                .map(|v| g.concept_of(v).expect("wellformed").as_str().to_string())
                .collect(),
            root: index[g.root()],
            relations: g
                .edges()
                .map(|(s, r, t)| (index[s], r.as_str().to_string(), index[t]))
                .collect(),
            attributes: g
                .attributes()
                .map(|(s, r, c)| (index[s], r.as_str().to_string(), c.clone()))
                .collect(),
            vars,
        }
    }

    fn total(&self, include_top: bool) -> usize {
        self.vars.len() + self.relations.len() + self.attributes.len() + usize::from(include_top)
    }
}

fn compile_pair(
    a: &Graph,
    b: &Graph,
    _cfg: &SmatchConfig,
) -> Result<(Compiled, Compiled), SmatchError> {
    for (side, g) in [("candidate", a), ("reference", b)] {
        let diagnostics = g.check_wellformed();
        if !diagnostics.is_empty() {
            return Err(SmatchError::NotWellformed { side, diagnostics });
        }
    }
    Ok((Compiled::new(a), Compiled::new(b)))
}

/// Multiset tables over the reference graph, keyed with the role erased in
/// unlabeled mode.
struct RefTables<'b> {
    relations: HashMap<(usize, Option<&'b str>, usize), usize>,
    attributes: HashMap<(usize, Option<&'b str>, &'b Constant), usize>,
}

impl<'b> RefTables<'b> {
    fn new(b: &'b Compiled, mode: ScoreMode) -> Self {
        let mut relations = HashMap::new();
        for (s, r, t) in &b.relations {
            *relations.entry((*s, label_for(r, mode), *t)).or_insert(0) += 1;
        }
        let mut attributes = HashMap::new();
        for (s, r, c) in &b.attributes {
            *attributes.entry((*s, label_for(r, mode), c)).or_insert(0) += 1;
        }
        RefTables {
            relations,
            attributes,
        }
    }
}

/// The role component of a match key; erased in unlabeled mode.
fn label_for(role: &str, mode: ScoreMode) -> Option<&str> {
    match mode {
        ScoreMode::Labeled => Some(role),
        ScoreMode::Unlabeled => None,
    }
}

/// Number of candidate triples that map onto distinct equal reference triples
/// under `mapping` (candidate variable index -> reference variable index).
fn matched_count(
    a: &Compiled,
    b: &Compiled,
    tables: &RefTables,
    mapping: &[Option<usize>],
    mode: ScoreMode,
    include_top: bool,
) -> usize {
    let mut matched = 0;
    if include_top && mapping[a.root] == Some(b.root) && a.concepts[a.root] == b.concepts[b.root]
    {
        matched += 1;
    }
    for (i, m) in mapping.iter().enumerate() {
        if let Some(j) = m {
            if a.concepts[i] == b.concepts[*j] {
                matched += 1;
            }
        }
    }
    // Greedy decrement over the reference multiset equals the per-key minimum.
    let mut relations = tables.relations.clone();
    for (s, r, t) in &a.relations {
        if let (Some(ms), Some(mt)) = (mapping[*s], mapping[*t]) {
            if let Some(n) = relations.get_mut(&(ms, label_for(r, mode), mt)) {
                if *n > 0 {
                    *n -= 1;
                    matched += 1;
                }
            }
        }
    }
    let mut attributes = tables.attributes.clone();
    for (s, r, c) in &a.attributes {
        if let Some(ms) = mapping[*s] {
            if let Some(n) = attributes.get_mut(&(ms, label_for(r, mode), c)) {
                if *n > 0 {
                    *n -= 1;
                    matched += 1;
                }
            }
        }
    }
    matched
}

fn finish(
    matched: usize,
    total_a: usize,
    total_b: usize,
    mapping: Mapping,
    mode: ScoreMode,
) -> ScoreReport {
    debug_assert!(matched <= total_a.min(total_b));
    let precision = matched as f64 / total_a as f64;
    let recall = matched as f64 / total_b as f64;
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    ScoreReport {
        matched,
        total_a,
        total_b,
        precision,
        recall,
        f1,
        mapping,
        mode,
    }
}

fn to_mapping(a: &Compiled, b: &Compiled, mapping: &[Option<usize>]) -> Mapping {
    Mapping {
        pairs: mapping
            .iter()
            .enumerate()
            .filter_map(|(i, m)| m.map(|j| (a.vars[i].clone(), b.vars[j].clone())))
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Exact search

fn exact_search(a: &Compiled, b: &Compiled, cfg: &SmatchConfig) -> ScoreReport {
    let tables = RefTables::new(b, cfg.mode);
    let na = a.vars.len();
    let nb = b.vars.len();
    let bound = a.total(cfg.include_top).min(b.total(cfg.include_top));
    let mut best_matched = 0;
    let mut best: Vec<Option<usize>> = vec![None; na];

    // Enumerate injections from the smaller side in lexicographic order and
    // keep the first maximum, so the reported mapping is deterministic.
    // Stopping at the upper bound cannot change the result: later mappings
    // only replace the kept one when strictly better.
    if na <= nb {
        let mut assignment: Vec<Option<usize>> = vec![None; na];
        let mut used = vec![false; nb];
        enumerate_injections(0, na, nb, &mut assignment, &mut used, &mut |mapping| {
            let m = matched_count(a, b, &tables, mapping, cfg.mode, cfg.include_top);
            if m > best_matched {
                best_matched = m;
                best = mapping.to_vec();
            }
            best_matched < bound
        });
    } else {
        let mut assignment: Vec<Option<usize>> = vec![None; nb];
        let mut used = vec![false; na];
        let mut forward = vec![None; na];
        enumerate_injections(0, nb, na, &mut assignment, &mut used, &mut |inverse| {
            forward.iter_mut().for_each(|m| *m = None);
            for (j, m) in inverse.iter().enumerate() {
                if let Some(i) = m {
                    forward[*i] = Some(j);
                }
            }
            let m = matched_count(a, b, &tables, &forward, cfg.mode, cfg.include_top);
            if m > best_matched {
                best_matched = m;
                best = forward.clone();
            }
            best_matched < bound
        });
        if best_matched == 0 {
            // Keep a defined (empty-overlap) mapping shape for the report.
            best = vec![None; na];
        }
    }

    finish(
        best_matched,
        a.total(cfg.include_top),
        b.total(cfg.include_top),
        to_mapping(a, b, &best),
        cfg.mode,
    )
}

/// Depth-first enumeration of injections; the visitor returns `false` to
/// stop the whole search. Returns `false` when stopped early.
fn enumerate_injections(
    pos: usize,
    n_from: usize,
    n_to: usize,
    assignment: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
    visit: &mut impl FnMut(&[Option<usize>]) -> bool,
) -> bool {
    if pos == n_from {
        return visit(assignment);
    }
    for j in 0..n_to {
        if used[j] {
            continue;
        }
        used[j] = true;
        assignment[pos] = Some(j);
        let keep_going =
            enumerate_injections(pos + 1, n_from, n_to, assignment, used, visit);
        assignment[pos] = None;
        used[j] = false;
        if !keep_going {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Hill-climbing search

fn climb_search(a: &Compiled, b: &Compiled, cfg: &SmatchConfig) -> ScoreReport {
    let tables = RefTables::new(b, cfg.mode);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let bound = a.total(cfg.include_top).min(b.total(cfg.include_top));
    let mut best_matched = 0;
    let mut best: Vec<Option<usize>> = vec![None; a.vars.len()];

    for restart in 0..cfg.restarts {
        let start = if restart == 0 {
            greedy_seed(a, b)
        } else {
            random_injection(a.vars.len(), b.vars.len(), &mut rng)
        };
        let (matched, mapping) = climb(a, b, &tables, start, cfg);
        if matched > best_matched {
            best_matched = matched;
            best = mapping;
        }
        // Later restarts only replace on strict improvement, so stopping at
        // the upper bound leaves the result unchanged.
        if best_matched == bound {
            break;
        }
    }

    finish(
        best_matched,
        a.total(cfg.include_top),
        b.total(cfg.include_top),
        to_mapping(a, b, &best),
        cfg.mode,
    )
}

/// Restart 0: assign each candidate variable the first free reference
/// variable with an equal concept, then fill the rest in order.
fn greedy_seed(a: &Compiled, b: &Compiled) -> Vec<Option<usize>> {
    let na = a.vars.len();
    let nb = b.vars.len();
    let mut mapping = vec![None; na];
    let mut used = vec![false; nb];
    for (i, slot) in mapping.iter_mut().enumerate() {
        if let Some(j) = (0..nb).find(|&j| !used[j] && a.concepts[i] == b.concepts[j]) {
            *slot = Some(j);
            used[j] = true;
        }
    }
    for m in mapping.iter_mut() {
        if m.is_none() {
            if let Some(j) = (0..nb).find(|&j| !used[j]) {
                *m = Some(j);
                used[j] = true;
            }
        }
    }
    mapping
}

/// A uniformly random injection between the variable sets, seeded.
fn random_injection(na: usize, nb: usize, rng: &mut ChaCha8Rng) -> Vec<Option<usize>> {
    let mut targets: Vec<usize> = (0..nb).collect();
    targets.shuffle(rng);
    if na <= nb {
        (0..na).map(|i| Some(targets[i])).collect()
    } else {
        let mut sources: Vec<usize> = (0..na).collect();
        sources.shuffle(rng);
        let mut mapping = vec![None; na];
        for (j, &i) in sources.iter().take(nb).enumerate() {
            mapping[i] = Some(targets[j]);
        }
        mapping
    }
}

/// Steepest-ascent hill climbing. Moves are single reassignments to a free
/// reference variable and swaps of two assignments; the largest gain wins,
/// ties broken by the lowest candidate variable index (reassignments
/// enumerate before swaps). Terminates when no move has positive gain.
fn climb(
    a: &Compiled,
    b: &Compiled,
    tables: &RefTables,
    mut mapping: Vec<Option<usize>>,
    cfg: &SmatchConfig,
) -> (usize, Vec<Option<usize>>) {
    let na = a.vars.len();
    let nb = b.vars.len();
    let mut current = matched_count(a, b, tables, &mapping, cfg.mode, cfg.include_top);
    loop {
        let mut best_gain = 0isize;
        let mut best_move: Option<Move> = None;
        let used: Vec<bool> = {
            let mut used = vec![false; nb];
            for m in mapping.iter().flatten() {
                used[*m] = true;
            }
            used
        };

        for i in 0..na {
            for (j, &taken) in used.iter().enumerate() {
                if taken || mapping[i] == Some(j) {
                    continue;
                }
                let old = mapping[i];
                mapping[i] = Some(j);
                let m = matched_count(a, b, tables, &mapping, cfg.mode, cfg.include_top);
                mapping[i] = old;
                let gain = m as isize - current as isize;
                if gain > best_gain {
                    best_gain = gain;
                    best_move = Some(Move::Reassign(i, j));
                }
            }
        }
        for i1 in 0..na {
            for i2 in (i1 + 1)..na {
                if mapping[i1] == mapping[i2] {
                    continue; // both None
                }
                mapping.swap(i1, i2);
                let m = matched_count(a, b, tables, &mapping, cfg.mode, cfg.include_top);
                mapping.swap(i1, i2);
                let gain = m as isize - current as isize;
                if gain > best_gain {
                    best_gain = gain;
                    best_move = Some(Move::Swap(i1, i2));
                }
            }
        }

        match best_move {
            Some(Move::Reassign(i, j)) => mapping[i] = Some(j),
            Some(Move::Swap(i1, i2)) => mapping.swap(i1, i2),
            None => return (current, mapping),
        }
        current = (current as isize + best_gain) as usize;
    }
}

enum Move {
    Reassign(usize, usize),
    Swap(usize, usize),
}
