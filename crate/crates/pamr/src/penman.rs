//! PENMAN notation: parsing into [`Graph`] values and deterministic
//! serialization back to text.
//!
//! Parsing is strict: any input yields either a graph or exactly one
//! [`ParseDiagnostic`] with a byte-offset span. There is no error recovery;
//! corpus files are curated artifacts and should fail fast.
//!
//! Unicode handling: extracted tokens and string constants are normalized to
//! NFC. ZERO WIDTH NON-JOINER (U+200C) is not whitespace and is preserved
//! inside tokens. Spans refer to the raw input bytes, before normalization.

use std::collections::HashSet;
use std::fmt;

use crate::graph::{is_number_token, Concept, Constant, Graph, GraphError, Role, Var};
use crate::graph::{Item, Outgoing};
use crate::nfc;

/// A half-open byte range in the input, plus the 1-based line of its start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnbalancedParen,
    DuplicateVariable,
    UndefinedVariable,
    BadToken,
    EmptyGraph,
}

/// A fatal parse finding. Every kind aborts the parse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub span: SourceSpan,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, bytes {}..{}: {}",
            self.span.line, self.span.start, self.span.end, self.message
        )
    }
}

impl std::error::Error for ParseDiagnostic {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    LParen,
    RParen,
    Slash,
    /// `:role`, stored without the colon.
    Role(String),
    /// A bare token: variable, concept part, number, `+`, or `-`.
    Word(String),
    /// A quoted string, without the quotes.
    Str(String),
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
    /// Comment skipping is only active before the first `(`.
    graph_started: bool,
    peeked: Option<Option<(Token, SourceSpan)>>,
}

const TERMINATORS: [char; 5] = ['(', ')', '/', '"', ':'];

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            text,
            pos: 0,
            line: 1,
            graph_started: false,
            peeked: None,
        }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn advance(&mut self, bytes: usize) {
        let consumed = &self.text[self.pos..self.pos + bytes];
        self.line += consumed.matches('\n').count();
        self.pos += bytes;
    }

    fn skip_trivia(&mut self) {
        loop {
            let ws = self
                .rest()
                .char_indices()
                .find(|(_, c)| !c.is_whitespace())
                .map_or(self.rest().len(), |(i, _)| i);
            self.advance(ws);
            // Comment lines before the graph belong to the corpus layer;
            // tolerate them here so bare records also parse.
            if !self.graph_started && self.rest().starts_with('#') {
                let eol = self.rest().find('\n').map_or(self.rest().len(), |i| i + 1);
                self.advance(eol);
            } else {
                return;
            }
        }
    }

    fn span_from(&self, start: usize, start_line: usize) -> SourceSpan {
        SourceSpan {
            start,
            end: self.pos,
            line: start_line,
        }
    }

    fn eof_span(&self) -> SourceSpan {
        SourceSpan {
            start: self.text.len(),
            end: self.text.len(),
            line: self.line,
        }
    }

    fn peek(&mut self) -> Result<Option<&(Token, SourceSpan)>, ParseDiagnostic> {
        if self.peeked.is_none() {
            let next = self.lex()?;
            self.peeked = Some(next);
        }
        Ok(self.peeked.as_ref().unwrap().as_ref())
    }

    fn next(&mut self) -> Result<Option<(Token, SourceSpan)>, ParseDiagnostic> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lex(),
        }
    }

    fn lex(&mut self) -> Result<Option<(Token, SourceSpan)>, ParseDiagnostic> {
        self.skip_trivia();
        let start = self.pos;
        let line = self.line;
        let Some(c) = self.rest().chars().next() else {
            return Ok(None);
        };
        let token = match c {
            '(' => {
                self.graph_started = true;
                self.advance(1);
                Token::LParen
            }
            ')' => {
                self.advance(1);
                Token::RParen
            }
            '/' => {
                self.advance(1);
                Token::Slash
            }
            '"' => {
                self.advance(1);
                let Some(close) = self.rest().find('"') else {
                    self.advance(self.rest().len());
                    return Err(ParseDiagnostic {
                        span: self.span_from(start, line),
                        kind: ParseErrorKind::BadToken,
                        message: "unterminated string constant".into(),
                    });
                };
                let value = nfc(&self.rest()[..close]);
                self.advance(close + 1);
                Token::Str(value)
            }
            ':' => {
                self.advance(1);
                let label = self.take_word();
                if label.is_empty() {
                    return Err(ParseDiagnostic {
                        span: self.span_from(start, line),
                        kind: ParseErrorKind::BadToken,
                        message: "`:` must be followed by a role name".into(),
                    });
                }
                Token::Role(label)
            }
            _ => Token::Word(self.take_word()),
        };
        Ok(Some((token, self.span_from(start, line))))
    }

    fn take_word(&mut self) -> String {
        let end = self
            .rest()
            .char_indices()
            .find(|(_, c)| c.is_whitespace() || TERMINATORS.contains(c))
            .map_or(self.rest().len(), |(i, _)| i);
        let word = nfc(&self.rest()[..end]);
        self.advance(end);
        word
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    items: Vec<Item>,
    defined: HashSet<Var>,
    /// Bare variable references, checked after the whole graph is read so
    /// forward references are allowed.
    pending_refs: Vec<(Var, SourceSpan)>,
}

impl<'a> Parser<'a> {
    fn bad(span: SourceSpan, message: impl Into<String>) -> ParseDiagnostic {
        ParseDiagnostic {
            span,
            kind: ParseErrorKind::BadToken,
            message: message.into(),
        }
    }

    fn unbalanced(&self) -> ParseDiagnostic {
        ParseDiagnostic {
            span: self.lexer.eof_span(),
            kind: ParseErrorKind::UnbalancedParen,
            message: "unexpected end of input: unclosed `(`".into(),
        }
    }

    fn role(&self, label: &str, span: SourceSpan) -> Result<Role, ParseDiagnostic> {
        Role::new(label).map_err(|e| Self::bad(span, e.to_string()))
    }

    /// Parses `(var / concept {relation})`, returning the node's variable.
    /// The opening `(` has already been consumed.
    fn node(&mut self) -> Result<Var, ParseDiagnostic> {
        let (var, var_span) = match self.next_or_unbalanced()? {
            (Token::Word(w), span) => {
                let var = Var::new(&w).map_err(|e| Self::bad(span, e.to_string()))?;
                (var, span)
            }
            (_, span) => return Err(Self::bad(span, "expected a variable after `(`")),
        };
        match self.next_or_unbalanced()? {
            (Token::Slash, _) => {}
            (_, span) => {
                return Err(Self::bad(
                    span,
                    format!("expected `/` after variable `{var}`"),
                ))
            }
        }
        let mut label = match self.next_or_unbalanced()? {
            (Token::Word(w), _) => w,
            (_, span) => return Err(Self::bad(span, "expected a concept after `/`")),
        };
        // Multiword concepts: adjacent bare tokens join with an underscore.
        while let Some((Token::Word(_), _)) = self.lexer.peek()? {
            let Some((Token::Word(w), _)) = self.lexer.next()? else {
                unreachable!()
            };
            label.push('_');
            label.push_str(&w);
        }
        let concept =
            Concept::new(&label).map_err(|e| Self::bad(var_span, e.to_string()))?;
        if !self.defined.insert(var.clone()) {
            return Err(ParseDiagnostic {
                span: var_span,
                kind: ParseErrorKind::DuplicateVariable,
                message: format!("variable `{var}` is introduced more than once"),
            });
        }
        self.items.push(Item::Instance(var.clone(), concept));

        loop {
            match self.next_or_unbalanced()? {
                (Token::RParen, _) => return Ok(var),
                (Token::Role(label), role_span) => {
                    let role = self.role(&label, role_span)?;
                    self.target(&var, role)?;
                }
                (_, span) => {
                    return Err(Self::bad(span, "expected a `:role` or `)` inside node"))
                }
            }
        }
    }

    fn target(&mut self, source: &Var, role: Role) -> Result<(), ParseDiagnostic> {
        match self.next_or_unbalanced()? {
            (Token::LParen, _) => {
                // Record the edge at the role's document position; the target
                // variable is patched in once the nested node is read.
                let slot = self.items.len();
                self.items
                    .push(Item::Edge(source.clone(), role, source.clone()));
                let child = self.node()?;
                let Item::Edge(_, _, target) = &mut self.items[slot] else {
                    unreachable!("slot holds the reserved edge");
                };
                *target = child;
            }
            (Token::Str(s), span) => {
                let value = Constant::text(&s).map_err(|e| Self::bad(span, e.to_string()))?;
                self.items.push(Item::Attribute(source.clone(), role, value));
            }
            (Token::Word(w), span) => {
                let item = if w == "+" {
                    Item::Attribute(source.clone(), role, Constant::Plus)
                } else if w == "-" {
                    Item::Attribute(source.clone(), role, Constant::Minus)
                } else if is_number_token(&w) {
                    Item::Attribute(source.clone(), role, Constant::Number(w))
                } else {
                    let target = Var::new(&w).map_err(|e| Self::bad(span, e.to_string()))?;
                    self.pending_refs.push((target.clone(), span));
                    Item::Edge(source.clone(), role, target)
                };
                self.items.push(item);
            }
            (_, span) => {
                return Err(Self::bad(
                    span,
                    format!("expected a node, variable, or constant after `:{}`", role),
                ))
            }
        }
        Ok(())
    }

    fn next_or_unbalanced(&mut self) -> Result<(Token, SourceSpan), ParseDiagnostic> {
        match self.lexer.next()? {
            Some(t) => Ok(t),
            None => Err(self.unbalanced()),
        }
    }
}

/// Parses one PENMAN graph. Leading whitespace and leading `#` comment lines
/// are tolerated; anything after the closing parenthesis is an error.
pub fn parse_penman(text: &str) -> Result<Graph, ParseDiagnostic> {
    let mut parser = Parser {
        lexer: Lexer::new(text),
        items: Vec::new(),
        defined: HashSet::new(),
        pending_refs: Vec::new(),
    };

    let root = match parser.lexer.next()? {
        None => {
            return Err(ParseDiagnostic {
                span: parser.lexer.eof_span(),
                kind: ParseErrorKind::EmptyGraph,
                message: "input contains no graph".into(),
            })
        }
        Some((Token::LParen, _)) => parser.node()?,
        Some((_, span)) => return Err(Parser::bad(span, "expected `(` to open a graph")),
    };

    match parser.lexer.next()? {
        None => {}
        Some((Token::RParen, span)) => {
            return Err(ParseDiagnostic {
                span,
                kind: ParseErrorKind::UnbalancedParen,
                message: "unmatched `)` after graph".into(),
            })
        }
        Some((_, span)) => {
            return Err(Parser::bad(span, "unexpected trailing text after graph"))
        }
    }

    for (var, span) in &parser.pending_refs {
        if !parser.defined.contains(var) {
            return Err(ParseDiagnostic {
                span: *span,
                kind: ParseErrorKind::UndefinedVariable,
                message: format!("variable `{var}` is referenced but never defined"),
            });
        }
    }

    Ok(Graph::from_parts(root, parser.items))
}

/// Serialization options.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SerializeStyle {
    /// Rename variables to `x`, `x2`, `x3`, ... by depth-first preorder.
    pub canonical_vars: bool,
}

/// Serializes a wellformed graph to PENMAN text. Children of each node are
/// emitted in recorded order, one relation per line, indented three spaces
/// per depth level; reentrant references are emitted as bare variables at
/// their second and later occurrences.
pub fn serialize_penman(graph: &Graph, style: SerializeStyle) -> Result<String, GraphError> {
    let diags = graph.check_wellformed();
    if !diags.is_empty() {
        return Err(GraphError::NotWellformed(diags));
    }
    let canonical;
    let graph = if style.canonical_vars {
        canonical = graph.canonicalize()?;
        &canonical
    } else {
        graph
    };
    let mut out = String::new();
    let mut visited = HashSet::new();
    emit_node(graph, graph.root(), 0, &mut visited, &mut out);
    Ok(out)
}

fn emit_node(graph: &Graph, var: &Var, depth: usize, visited: &mut HashSet<Var>, out: &mut String) {
    visited.insert(var.clone());
    let concept = graph
        .concept_of(var)
        .expect("wellformed graph has an instance per variable");
    out.push('(');
    out.push_str(var.as_str());
    out.push_str(" / ");
    out.push_str(concept.as_str());
    let children: Vec<Outgoing> = graph.outgoing(var).collect();
    for child in children {
        out.push('\n');
        for _ in 0..(depth + 1) * 3 {
            out.push(' ');
        }
        match child {
            Outgoing::Attribute(role, value) => {
                out.push(':');
                out.push_str(role.as_str());
                out.push(' ');
                out.push_str(&value.to_string());
            }
            Outgoing::Edge(role, target) => {
                out.push(':');
                out.push_str(role.as_str());
                out.push(' ');
                if visited.contains(target) {
                    out.push_str(target.as_str());
                } else {
                    emit_node(graph, target, depth + 1, visited, out);
                }
            }
        }
    }
    out.push(')');
}
