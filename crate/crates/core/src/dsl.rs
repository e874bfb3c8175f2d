//! A small line-oriented text format for quivers with relations.
//!
//! ```text
//! quiver linear
//! vertices 1 2 3
//! arrow a 1 2
//! arrow b 2 3
//! rel b a        # b after a; requires source(b) = target(a)
//! ```
//!
//! Declarations may appear in any order; `#` starts a comment.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::Error;
use crate::quiver::{Arrow, ArrowId, QuiverWithRelations, Relation, VertexId};

/// 1-based line and column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnknownDirective(String),
    WrongArity { directive: &'static str, expected: &'static str },
    InvalidToken(String),
    MissingHeader,
    DuplicateHeader,
    DuplicateVertex(String),
    DuplicateArrow(String),
    DuplicateRelation(String, String),
    UndeclaredVertex(String),
    UnknownArrow(String),
    BadRelationComposability { first: String, second: String },
    NoVertices,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ParseErrorKind::*;
        match self {
            UnknownDirective(d) => write!(f, "unknown directive `{d}`"),
            WrongArity { directive, expected } => write!(f, "`{directive}` expects {expected}"),
            InvalidToken(t) => write!(f, "invalid token `{t}`"),
            MissingHeader => f.write_str("missing `quiver NAME` line"),
            DuplicateHeader => f.write_str("second `quiver` line"),
            DuplicateVertex(v) => write!(f, "duplicate vertex `{v}`"),
            DuplicateArrow(a) => write!(f, "duplicate arrow `{a}`"),
            DuplicateRelation(a, b) => write!(f, "duplicate relation ({a}, {b})"),
            UndeclaredVertex(v) => write!(f, "undeclared vertex `{v}`"),
            UnknownArrow(a) => write!(f, "unknown arrow `{a}`"),
            BadRelationComposability { first, second } => write!(
                f,
                "relation ({first}, {second}) is not composable: source of `{first}` differs from target of `{second}`"
            ),
            NoVertices => f.write_str("no vertices declared"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub position: Position,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.position, self.kind)
    }
}

impl std::error::Error for ParseError {}

/// Where each entity was declared.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceSpans {
    pub vertices: BTreeMap<VertexId, Position>,
    pub arrows: BTreeMap<ArrowId, Position>,
    pub relations: BTreeMap<Relation, Position>,
}

#[derive(Clone, Debug)]
pub struct QuiverDocument {
    pub name: String,
    pub body: QuiverWithRelations,
    pub spans: SourceSpans,
}

/// Documents compare by name and body; spans are diagnostics only.
impl PartialEq for QuiverDocument {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.body == other.body
    }
}

impl Eq for QuiverDocument {}

impl QuiverDocument {
    pub fn new(name: impl Into<String>, body: QuiverWithRelations) -> Self {
        QuiverDocument {
            name: name.into(),
            body,
            spans: SourceSpans::default(),
        }
    }
}

struct Token<'a> {
    text: &'a str,
    pos: Position,
}

fn tokenize(line_no: usize, line: &str) -> Vec<Token<'_>> {
    let code = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in code.char_indices().chain(std::iter::once((code.len(), ' '))) {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &code[s..i],
                    pos: Position {
                        line: line_no,
                        column: code[..s].chars().count() + 1,
                    },
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    out
}

fn is_token(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses a document, reporting every diagnostic sorted by position.
pub fn parse_dsl(text: &str) -> Result<QuiverDocument, Vec<ParseError>> {
    let mut errors = Vec::new();
    let mut err = |pos: Position, kind: ParseErrorKind| errors.push(ParseError { position: pos, kind });

    let mut name: Option<String> = None;
    let mut vertices: Vec<(String, Position)> = Vec::new();
    let mut arrows: Vec<([String; 3], [Position; 3])> = Vec::new();
    let mut rels: Vec<([String; 2], [Position; 2])> = Vec::new();

    for (i, line) in text.lines().enumerate() {
        let toks = tokenize(i + 1, line);
        let Some((head, args)) = toks.split_first() else {
            continue;
        };
        let mut bad = false;
        for t in args {
            if !is_token(t.text) {
                err(t.pos, ParseErrorKind::InvalidToken(t.text.to_string()));
                bad = true;
            }
        }
        if bad {
            continue;
        }
        let arity = |n: usize| args.len() == n;
        match head.text {
            "quiver" if arity(1) => {
                if name.is_some() {
                    err(head.pos, ParseErrorKind::DuplicateHeader);
                } else {
                    name = Some(args[0].text.to_string());
                }
            }
            "quiver" => err(head.pos, ParseErrorKind::WrongArity { directive: "quiver", expected: "one name" }),
            "vertices" => vertices.extend(args.iter().map(|t| (t.text.to_string(), t.pos))),
            "arrow" if arity(3) => arrows.push((
                [0, 1, 2].map(|k| args[k].text.to_string()),
                [0, 1, 2].map(|k| args[k].pos),
            )),
            "arrow" => err(head.pos, ParseErrorKind::WrongArity { directive: "arrow", expected: "ID SOURCE TARGET" }),
            "rel" if arity(2) => rels.push(([0, 1].map(|k| args[k].text.to_string()), [0, 1].map(|k| args[k].pos))),
            "rel" => err(head.pos, ParseErrorKind::WrongArity { directive: "rel", expected: "two arrow ids" }),
            other => err(head.pos, ParseErrorKind::UnknownDirective(other.to_string())),
        }
    }

    let mut spans = SourceSpans::default();
    for (v, pos) in &vertices {
        let id = VertexId::new(v.as_str()).expect("checked token");
        if spans.vertices.insert(id, *pos).is_some() {
            err(*pos, ParseErrorKind::DuplicateVertex(v.clone()));
        }
    }
    let mut ends: HashMap<String, (String, String)> = HashMap::new();
    let mut arrow_list = Vec::new();
    for ([id, s, t], [ipos, spos, tpos]) in &arrows {
        let mut ok = true;
        for (v, pos) in [(s, spos), (t, tpos)] {
            if !spans.vertices.contains_key(&VertexId::new(v.as_str()).expect("checked token")) {
                err(*pos, ParseErrorKind::UndeclaredVertex(v.clone()));
                ok = false;
            }
        }
        if ends.contains_key(id) {
            err(*ipos, ParseErrorKind::DuplicateArrow(id.clone()));
            continue;
        }
        ends.insert(id.clone(), (s.clone(), t.clone()));
        spans.arrows.insert(ArrowId::new(id.as_str()).expect("checked token"), *ipos);
        if ok {
            arrow_list.push(Arrow::new(id, s, t).expect("checked tokens"));
        }
    }
    let mut rel_list = Vec::new();
    for ([a, b], [apos, bpos]) in &rels {
        let (ea, eb) = (ends.get(a), ends.get(b));
        if ea.is_none() {
            err(*apos, ParseErrorKind::UnknownArrow(a.clone()));
        }
        if eb.is_none() {
            err(*bpos, ParseErrorKind::UnknownArrow(b.clone()));
        }
        let (Some((sa, _)), Some((_, tb))) = (ea, eb) else {
            continue;
        };
        if sa != tb {
            err(
                *apos,
                ParseErrorKind::BadRelationComposability {
                    first: a.clone(),
                    second: b.clone(),
                },
            );
            continue;
        }
        let r = Relation::new(a, b).expect("checked tokens");
        if spans.relations.insert(r.clone(), *apos).is_some() {
            err(*apos, ParseErrorKind::DuplicateRelation(a.clone(), b.clone()));
            continue;
        }
        rel_list.push(r);
    }

    let origin = Position { line: 1, column: 1 };
    if name.is_none() {
        err(origin, ParseErrorKind::MissingHeader);
    }
    if vertices.is_empty() {
        err(origin, ParseErrorKind::NoVertices);
    }
    if !errors.is_empty() {
        errors.sort_by_key(|e| e.position);
        return Err(errors);
    }
    let body = QuiverWithRelations::new(spans.vertices.keys().cloned(), arrow_list, rel_list).map_err(|e| {
        vec![ParseError {
            position: origin,
            kind: ParseErrorKind::InvalidToken(e.to_string()),
        }]
    })?;
    Ok(QuiverDocument {
        name: name.expect("checked above"),
        body,
        spans,
    })
}

/// Shared header of every emitted document.
pub const HEADER: &str = "\
# rel A B declares (A, B) in R: the path runs B then A, so source(A) = target(B).
";

/// Canonical text: vertices, arrows and relations each sorted.
pub fn emit(doc: &QuiverDocument) -> String {
    emit_quiver(&doc.name, &doc.body)
}

pub fn emit_quiver(name: &str, q: &QuiverWithRelations) -> String {
    let mut out = String::from(HEADER);
    out.push_str(&format!("quiver {name}\n"));
    let vs: Vec<&str> = q.vertices().map(VertexId::as_str).collect();
    out.push_str(&format!("vertices {}\n", vs.join(" ")));
    for a in q.arrows() {
        out.push_str(&format!("arrow {} {} {}\n", a.id, a.source, a.target));
    }
    for r in q.relations() {
        out.push_str(&format!("rel {} {}\n", r.first, r.second));
    }
    out
}

/// Parses and folds diagnostics into a single error value.
pub fn parse_quiver(text: &str) -> crate::error::Result<QuiverDocument> {
    parse_dsl(text).map_err(|errs| {
        Error::Precondition(errs.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))
    })
}
