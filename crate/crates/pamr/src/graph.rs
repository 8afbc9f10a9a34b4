//! The AMR graph data model: variables, concepts, labeled edges, constants,
//! reentrancy; wellformedness checking and triple extraction.
//!
//! A [`Graph`] is a rooted, directed, acyclic semantic graph. Variables may be
//! the target of more than one edge (reentrancy). Graph values are immutable
//! after construction; wellformedness is a separate check
//! ([`Graph::check_wellformed`]), so ill-formed graphs can be represented and
//! diagnosed rather than rejected at construction time.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::diagnostics::{Diagnostic, RuleId};
use crate::nfc;

/// A graph variable such as `x` or `x2`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Var(String);

impl Var {
    pub fn new(id: &str) -> Result<Var, GraphError> {
        check_token("variable", id)?;
        Ok(Var(nfc(id)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A node label: a lexical lemma (`xastan`, `latme_zadan`), a frame name
/// (`want-01`), or an abstract type (`city`, `name`). Multiword lemmas use a
/// single underscore as the joiner. Whether a concept is lexical or abstract
/// is decided by the lexicon, not stored here.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Concept(String);

impl Concept {
    pub fn new(label: &str) -> Result<Concept, GraphError> {
        check_token("concept", label)?;
        Ok(Concept(nfc(label)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An edge or attribute label, stored without the leading `:`.
///
/// Core argument roles are restricted to `ARG0`..`ARG5` (optionally with the
/// `-of` inverse suffix); anything else shaped like `ARG<digits>` is rejected.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Role(String);

impl Role {
    pub fn new(label: &str) -> Result<Role, GraphError> {
        check_token("role", label)?;
        let label = nfc(label);
        let base = label.strip_suffix("-of").unwrap_or(&label);
        if let Some(digits) = base.strip_prefix("ARG") {
            let core = digits.len() == 1 && matches!(digits.as_bytes()[0], b'0'..=b'5');
            if !core && digits.chars().all(|c| c.is_ascii_digit()) && !digits.is_empty() {
                return Err(GraphError::InvalidToken {
                    kind: "role",
                    token: label.clone(),
                    reason: "core roles are restricted to ARG0..ARG5",
                });
            }
        }
        Ok(Role(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The core argument index for roles `ARG0`..`ARG5`; `None` otherwise
    /// (including inverse `-of` forms).
    pub fn core_index(&self) -> Option<u8> {
        let digits = self.0.strip_prefix("ARG")?;
        if digits.len() == 1 && matches!(digits.as_bytes()[0], b'0'..=b'5') {
            Some(digits.as_bytes()[0] - b'0')
        } else {
            None
        }
    }

    /// For an inverse role like `ARG0-of`, the forward role `ARG0`.
    pub fn inverse_base(&self) -> Option<Role> {
        self.0
            .strip_suffix("-of")
            .filter(|b| !b.is_empty())
            .map(|b| Role(b.to_string()))
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An attribute value: a quoted string, a number (lexical form preserved),
/// or one of the `+` / `-` markers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Constant {
    Text(String),
    Number(String),
    Plus,
    Minus,
}

impl Constant {
    pub fn text(value: &str) -> Result<Constant, GraphError> {
        if value.contains('"') {
            return Err(GraphError::InvalidToken {
                kind: "string constant",
                token: value.to_string(),
                reason: "must not contain a double quote",
            });
        }
        Ok(Constant::Text(nfc(value)))
    }

    pub fn number(lexeme: &str) -> Result<Constant, GraphError> {
        if !is_number_token(lexeme) {
            return Err(GraphError::InvalidToken {
                kind: "number constant",
                token: lexeme.to_string(),
                reason: "must be an optionally signed decimal number",
            });
        }
        Ok(Constant::Number(lexeme.to_string()))
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Text(s) => write!(f, "\"{s}\""),
            Constant::Number(n) => f.write_str(n),
            Constant::Plus => f.write_str("+"),
            Constant::Minus => f.write_str("-"),
        }
    }
}

/// Recognizes the lexical shape of a number constant.
pub(crate) fn is_number_token(s: &str) -> bool {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() {
        return false;
    }
    let (int, frac) = match digits.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (digits, None),
    };
    let all_digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
    all_digits(int) && frac.is_none_or(all_digits)
}

fn check_token(kind: &'static str, s: &str) -> Result<(), GraphError> {
    let err = |reason| GraphError::InvalidToken {
        kind,
        token: s.to_string(),
        reason,
    };
    if s.is_empty() {
        return Err(err("must be nonempty"));
    }
    if s.chars().any(char::is_whitespace) {
        return Err(err("must not contain whitespace"));
    }
    if s.contains(['(', ')', '"', '/']) {
        return Err(err("must not contain `(`, `)`, `\"`, or `/`"));
    }
    if s.starts_with(':') {
        return Err(err("must not begin with `:`"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("invalid {kind} token `{token}`: {reason}")]
    InvalidToken {
        kind: &'static str,
        token: String,
        reason: &'static str,
    },
    #[error("graph is not wellformed: {}", summarize(.0))]
    NotWellformed(Vec<Diagnostic>),
}

fn summarize(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| format!("{} at {}", d.rule, d.variable))
        .collect::<Vec<_>>()
        .join("; ")
}

/// One recorded fact of a graph, in global recording order. Keeping a single
/// ordered list preserves the interleaving of edges and attributes under each
/// node, which the serializer reproduces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Item {
    Instance(Var, Concept),
    Edge(Var, Role, Var),
    Attribute(Var, Role, Constant),
}

/// An atomic unit for matching and serialization.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Triple {
    /// Marks the root variable and its concept.
    Top { root: Var, concept: Concept },
    Instance { var: Var, concept: Concept },
    Relation { source: Var, role: Role, target: Var },
    Attribute { source: Var, role: Role, value: Constant },
}

/// A rooted, directed semantic graph with labeled edges, constants, and
/// reentrancy. Construct through [`GraphBuilder`] or [`crate::penman::parse_penman`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub(crate) root: Var,
    pub(crate) items: Vec<Item>,
}

/// A target position under a node, in recorded order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outgoing<'g> {
    Edge(&'g Role, &'g Var),
    Attribute(&'g Role, &'g Constant),
}

impl Graph {
    pub(crate) fn from_parts(root: Var, items: Vec<Item>) -> Graph {
        Graph { root, items }
    }

    pub fn root(&self) -> &Var {
        &self.root
    }

    /// Variables in first-instance order. This is the canonical variable
    /// order used for deterministic tie-breaking elsewhere.
    pub fn vars(&self) -> Vec<&Var> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for item in &self.items {
            if let Item::Instance(v, _) = item {
                if seen.insert(v) {
                    out.push(v);
                }
            }
        }
        out
    }

    pub fn var_count(&self) -> usize {
        self.vars().len()
    }

    /// The concept of a variable's (first) instance, if any.
    pub fn concept_of(&self, var: &Var) -> Option<&Concept> {
        self.items.iter().find_map(|item| match item {
            Item::Instance(v, c) if v == var => Some(c),
            _ => None,
        })
    }

    pub fn instances(&self) -> impl Iterator<Item = (&Var, &Concept)> {
        self.items.iter().filter_map(|item| match item {
            Item::Instance(v, c) => Some((v, c)),
            _ => None,
        })
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Var, &Role, &Var)> {
        self.items.iter().filter_map(|item| match item {
            Item::Edge(s, r, t) => Some((s, r, t)),
            _ => None,
        })
    }

    pub fn attributes(&self) -> impl Iterator<Item = (&Var, &Role, &Constant)> {
        self.items.iter().filter_map(|item| match item {
            Item::Attribute(s, r, v) => Some((s, r, v)),
            _ => None,
        })
    }

    /// Edges and attributes with the given source, in recorded order.
    pub fn outgoing<'g>(&'g self, var: &'g Var) -> impl Iterator<Item = Outgoing<'g>> {
        self.items.iter().filter_map(move |item| match item {
            Item::Edge(s, r, t) if s == var => Some(Outgoing::Edge(r, t)),
            Item::Attribute(s, r, v) if s == var => Some(Outgoing::Attribute(r, v)),
            _ => None,
        })
    }

    fn edge_count(&self) -> usize {
        self.edges().count()
    }

    fn attribute_count(&self) -> usize {
        self.attributes().count()
    }

    /// All triples in a fixed order: TOP (if requested), then instances,
    /// relations, and attributes, each in recorded order. The count is
    /// `vars + edges + attributes`, plus one for TOP.
    pub fn triples(&self, include_top: bool) -> Vec<Triple> {
        let mut out = Vec::with_capacity(
            self.var_count() + self.edge_count() + self.attribute_count() + 1,
        );
        if include_top {
            if let Some(concept) = self.concept_of(&self.root) {
                out.push(Triple::Top {
                    root: self.root.clone(),
                    concept: concept.clone(),
                });
            }
        }
        for (v, c) in self.instances() {
            out.push(Triple::Instance {
                var: v.clone(),
                concept: c.clone(),
            });
        }
        for (s, r, t) in self.edges() {
            out.push(Triple::Relation {
                source: s.clone(),
                role: r.clone(),
                target: t.clone(),
            });
        }
        for (s, r, v) in self.attributes() {
            out.push(Triple::Attribute {
                source: s.clone(),
                role: r.clone(),
                value: v.clone(),
            });
        }
        out
    }

    /// Edges with inverse (`-of`) roles flipped to their forward orientation.
    /// This is the semantic edge relation used for cycle detection and
    /// guideline checks; the recorded orientation is kept for serialization.
    pub fn semantic_edges(&self) -> Vec<(&Var, Role, &Var)> {
        self.edges()
            .map(|(s, r, t)| match r.inverse_base() {
                Some(base) => (t, base, s),
                None => (s, r.clone(), t),
            })
            .collect()
    }

    /// Depth-first preorder over the recorded (syntactic) edge orientation,
    /// children in recorded order. Variables never reached from the root are
    /// appended in first-instance order.
    pub fn preorder(&self) -> Vec<Var> {
        let mut order = Vec::new();
        let mut seen = HashSet::new();
        let mut stack = vec![self.root.clone()];
        while let Some(v) = stack.pop() {
            if !seen.insert(v.clone()) {
                continue;
            }
            order.push(v.clone());
            let children: Vec<Var> = self
                .outgoing(&v)
                .filter_map(|o| match o {
                    Outgoing::Edge(_, t) if !seen.contains(t) => Some(t.clone()),
                    _ => None,
                })
                .collect();
            for child in children.into_iter().rev() {
                stack.push(child);
            }
        }
        for v in self.vars() {
            if seen.insert(v.clone()) {
                order.push(v.clone());
            }
        }
        order
    }

    /// Wellformedness diagnostics; empty iff the graph has exactly one
    /// instance per variable, no dangling endpoints, full reachability from
    /// the root, and no directed cycle in the semantic edge relation.
    pub fn check_wellformed(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();

        // G-INSTANCE: duplicate instances, or a root without one.
        let mut counts: HashMap<&Var, usize> = HashMap::new();
        for (v, _) in self.instances() {
            *counts.entry(v).or_insert(0) += 1;
        }
        for v in self.vars() {
            if counts[v] > 1 {
                diags.push(Diagnostic::new(
                    RuleId::GInstance,
                    v.clone(),
                    format!("variable `{v}` has {} instance triples", counts[v]),
                ));
            }
        }
        if !counts.contains_key(&self.root) {
            diags.push(Diagnostic::new(
                RuleId::GInstance,
                self.root.clone(),
                format!("root variable `{}` has no instance", self.root),
            ));
        }

        // G-DANGLE: edge or attribute endpoints without an instance.
        let mut endpoints: Vec<&Var> = Vec::new();
        for (s, _, t) in self.edges() {
            endpoints.push(s);
            endpoints.push(t);
        }
        for (s, _, _) in self.attributes() {
            endpoints.push(s);
        }
        let mut flagged = HashSet::new();
        for v in endpoints {
            if !counts.contains_key(v) && flagged.insert(v.clone()) {
                diags.push(Diagnostic::new(
                    RuleId::GDangle,
                    v.clone(),
                    format!("variable `{v}` is referenced but never instantiated"),
                ));
            }
        }

        // G-UNREACHABLE: instance variables not reached from the root along
        // the recorded orientation.
        let mut reach = HashSet::new();
        let mut stack = vec![&self.root];
        while let Some(v) = stack.pop() {
            if !reach.insert(v) {
                continue;
            }
            for out in self.outgoing(v) {
                if let Outgoing::Edge(_, t) = out {
                    stack.push(t);
                }
            }
        }
        for v in self.vars() {
            if !reach.contains(v) {
                diags.push(Diagnostic::new(
                    RuleId::GUnreachable,
                    v.clone(),
                    format!("variable `{v}` is not reachable from root `{}`", self.root),
                ));
            }
        }

        // G-CYCLE: one diagnostic per strongly connected cycle in the
        // semantic (inverse-normalized) edge relation.
        for v in self.cycle_representatives() {
            diags.push(Diagnostic::new(
                RuleId::GCycle,
                v.clone(),
                format!("directed cycle through variable `{v}`"),
            ));
        }

        diags
    }

    /// First variable (in appearance order) of each cycle in the semantic
    /// edge relation.
    fn cycle_representatives(&self) -> Vec<Var> {
        // Intern variables by appearance so reported representatives are stable.
        let mut order: Vec<Var> = Vec::new();
        let mut index: HashMap<Var, usize> = HashMap::new();
        let mut id_of = |v: &Var| -> usize {
            if let Some(&i) = index.get(v) {
                i
            } else {
                let i = order.len();
                order.push(v.clone());
                index.insert(v.clone(), i);
                i
            }
        };
        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for (s, _, t) in self.semantic_edges() {
            let si = id_of(s);
            let ti = id_of(t);
            adj.entry(si).or_default().push(ti);
        }

        // Iterative three-color DFS; a back edge marks the cycle entry node.
        let n = order.len();
        let mut color = vec![0u8; n]; // 0 white, 1 gray, 2 black
        let mut cycle_entries: Vec<usize> = Vec::new();
        for start in 0..n {
            if color[start] != 0 {
                continue;
            }
            let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
            color[start] = 1;
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                let neighbors = adj.get(&node).map(Vec::as_slice).unwrap_or(&[]);
                if *next < neighbors.len() {
                    let target = neighbors[*next];
                    *next += 1;
                    match color[target] {
                        0 => {
                            color[target] = 1;
                            stack.push((target, 0));
                        }
                        1
                            if !cycle_entries.contains(&target) => {
                                cycle_entries.push(target);
                            }
                        _ => {}
                    }
                } else {
                    color[node] = 2;
                    stack.pop();
                }
            }
        }
        cycle_entries.sort_unstable();
        cycle_entries
            .into_iter()
            .map(|i| order[i].clone())
            .collect()
    }

    /// Renames variables deterministically by depth-first preorder from the
    /// root (`x`, `x2`, `x3`, ...). The triple multiset is unchanged up to
    /// the renaming bijection; recorded order is preserved. Idempotent.
    pub fn canonicalize(&self) -> Result<Graph, GraphError> {
        let diags = self.check_wellformed();
        if !diags.is_empty() {
            return Err(GraphError::NotWellformed(diags));
        }
        let mut rename: HashMap<Var, Var> = HashMap::new();
        for (i, v) in self.preorder().into_iter().enumerate() {
            let fresh = if i == 0 {
                "x".to_string()
            } else {
                format!("x{}", i + 1)
            };
            rename.insert(v, Var(fresh));
        }
        let map = |v: &Var| rename[v].clone();
        let items = self
            .items
            .iter()
            .map(|item| match item {
                Item::Instance(v, c) => Item::Instance(map(v), c.clone()),
                Item::Edge(s, r, t) => Item::Edge(map(s), r.clone(), map(t)),
                Item::Attribute(s, r, c) => Item::Attribute(map(s), r.clone(), c.clone()),
            })
            .collect();
        Ok(Graph {
            root: map(&self.root),
            items,
        })
    }
}

/// Programmatic graph construction. Token shapes are validated; graph shape
/// is not, so ill-formed graphs can be built and then diagnosed.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    root: Var,
    items: Vec<Item>,
}

impl GraphBuilder {
    pub fn new(root: &str) -> Result<GraphBuilder, GraphError> {
        Ok(GraphBuilder {
            root: Var::new(root)?,
            items: Vec::new(),
        })
    }

    pub fn instance(mut self, var: &str, concept: &str) -> Result<Self, GraphError> {
        self.items
            .push(Item::Instance(Var::new(var)?, Concept::new(concept)?));
        Ok(self)
    }

    pub fn edge(mut self, source: &str, role: &str, target: &str) -> Result<Self, GraphError> {
        self.items
            .push(Item::Edge(Var::new(source)?, Role::new(role)?, Var::new(target)?));
        Ok(self)
    }

    pub fn attribute(
        mut self,
        source: &str,
        role: &str,
        value: Constant,
    ) -> Result<Self, GraphError> {
        self.items
            .push(Item::Attribute(Var::new(source)?, Role::new(role)?, value));
        Ok(self)
    }

    pub fn build(self) -> Graph {
        Graph {
            root: self.root,
            items: self.items,
        }
    }
}
