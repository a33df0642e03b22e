//! Line-oriented context language.
//!
//! ```text
//! node <label>
//! edge <label> -> <label> : <grade>
//! 0edge <label> -> <label>
//! 1edge <label> -> <label>
//! 2edge <label> -> <label>
//! fact <label> = <grade>
//! scenario <name>
//!   observe <label> = <grade>
//!   clamp <label> = <grade>
//!   exclude <label> -> <label> : <floor>
//! end
//! ```
//!
//! `#` starts a comment. Labels containing whitespace or punctuation are
//! double-quoted, with `\"` and `\\` as the only escapes.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use super::{validate_label, ContextGraph, EdgeKind, GraphError, VertexId};
use crate::scale::Likeliness;
use crate::update::EvidenceMode;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("grade {0} is outside 0..=6")]
    GradeOutOfRange(i64),
    #[error("exclusion floor {0} is outside 0..=2")]
    FloorOutOfRange(u8),
    #[error("{0}")]
    Contradiction(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvidenceDecl {
    pub label: String,
    pub value: Likeliness,
    pub mode: EvidenceMode,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExclusionDecl {
    pub condition: String,
    pub target: String,
    pub floor: Likeliness,
    pub line: usize,
}

/// A scenario block as written, referring to vertices by label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioDecl {
    pub name: String,
    pub line: usize,
    pub evidence: Vec<EvidenceDecl>,
    pub exclusions: Vec<ExclusionDecl>,
}

/// Everything a context file can declare.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    pub graph: ContextGraph,
    pub scenarios: Vec<ScenarioDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Quoted(String),
    Arrow,
    Colon,
    Equals,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Quoted(q) => write!(f, "{q:?}"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Equals => f.write_str("`=`"),
        }
    }
}

fn is_break(c: char) -> bool {
    c.is_whitespace() || matches!(c, '"' | '#' | ':' | '=')
}

fn tokenize(line: &str, line_no: usize) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |col: usize, msg: &str| ParseError {
        line: line_no,
        column: col,
        kind: ParseErrorKind::Syntax(msg.to_string()),
    };
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c == '#' {
            break;
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err(err(col, "unterminated quoted label")),
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => {
                        let next = chars.get(i + 1).ok_or_else(|| err(col, "unterminated quoted label"))?;
                        s.push(*next);
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            out.push((col, Tok::Quoted(s)));
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push((col, Tok::Arrow));
            i += 2;
        } else if c == ':' {
            out.push((col, Tok::Colon));
            i += 1;
        } else if c == '=' {
            out.push((col, Tok::Equals));
            i += 1;
        } else {
            let start = i;
            while i < chars.len()
                && !is_break(chars[i])
                && !(chars[i] == '-' && chars.get(i + 1) == Some(&'>'))
            {
                i += 1;
            }
            out.push((col, Tok::Word(chars[start..i].iter().collect())));
        }
    }
    Ok(out)
}

struct Line<'a> {
    no: usize,
    toks: &'a [(usize, Tok)],
    pos: usize,
    end_col: usize,
}

impl<'a> Line<'a> {
    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.0)
    }

    fn error(&self, col: usize, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.no,
            column: col,
            kind,
        }
    }

    fn syntax(&self, msg: String) -> ParseError {
        self.error(self.col(), ParseErrorKind::Syntax(msg))
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a Tok), ParseError> {
        match self.toks.get(self.pos) {
            Some((col, tok)) => {
                self.pos += 1;
                Ok((*col, tok))
            }
            None => Err(self.syntax(format!("expected {what}, found end of line"))),
        }
    }

    fn label(&mut self) -> Result<(usize, String), ParseError> {
        let (col, tok) = self.next("a label")?;
        match tok {
            Tok::Word(w) | Tok::Quoted(w) => {
                validate_label(w).map_err(|e| self.error(col, e.into()))?;
                Ok((col, w.clone()))
            }
            other => Err(self.error(col, ParseErrorKind::Syntax(format!("expected a label, found {other}")))),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        let (col, tok) = self.next(&want.to_string())?;
        if *tok == want {
            Ok(())
        } else {
            Err(self.error(col, ParseErrorKind::Syntax(format!("expected {want}, found {tok}"))))
        }
    }

    fn grade(&mut self) -> Result<(usize, Likeliness), ParseError> {
        let (col, tok) = self.next("a grade")?;
        let Tok::Word(w) = tok else {
            return Err(self.error(col, ParseErrorKind::Syntax(format!("expected a grade, found {tok}"))));
        };
        let n: i64 = w
            .parse()
            .map_err(|_| self.error(col, ParseErrorKind::Syntax(format!("expected a grade 0..6, found `{w}`"))))?;
        Likeliness::new(n)
            .map(|l| (col, l))
            .map_err(|_| self.error(col, ParseErrorKind::GradeOutOfRange(n)))
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.toks.get(self.pos) {
            None => Ok(()),
            Some((col, tok)) => Err(self.error(*col, ParseErrorKind::Syntax(format!("unexpected {tok}")))),
        }
    }
}

struct Builder {
    doc: Document,
    /// Line of the first declaration of each implication edge and fact.
    edge_lines: HashMap<(VertexId, VertexId), usize>,
    fact_lines: HashMap<VertexId, usize>,
    open: Option<ScenarioDecl>,
}

impl Builder {
    fn vertex(&mut self, line: &Line, col: usize, label: &str) -> Result<VertexId, ParseError> {
        self.doc
            .graph
            .add_vertex(label)
            .map_err(|e| line.error(col, e.into()))
    }

    fn directive(&mut self, mut line: Line) -> Result<(), ParseError> {
        let (col, head) = line.next("a directive")?;
        let word = match head {
            Tok::Word(w) => w.as_str(),
            other => return Err(line.error(col, ParseErrorKind::Syntax(format!("expected a directive, found {other}")))),
        };
        let in_scenario = self.open.is_some();
        let scenario_only = matches!(word, "observe" | "clamp" | "exclude" | "end");
        if scenario_only && !in_scenario {
            return Err(line.error(col, ParseErrorKind::Syntax(format!("`{word}` outside a scenario block"))));
        }
        if !scenario_only && in_scenario {
            return Err(line.error(col, ParseErrorKind::Syntax(format!("`{word}` inside a scenario block"))));
        }
        match word {
            "node" => {
                let (c, l) = line.label()?;
                line.finish()?;
                self.vertex(&line, c, &l)?;
            }
            "fact" => {
                let (c, l) = line.label()?;
                line.expect(Tok::Equals)?;
                let (_, value) = line.grade()?;
                line.finish()?;
                let v = self.vertex(&line, c, &l)?;
                if let Some(previous) = self.doc.graph.facts().get(v) {
                    if previous != value {
                        return Err(line.error(
                            c,
                            ParseErrorKind::Contradiction(format!(
                                "fact `{l}` = {value} contradicts {previous} declared on line {}",
                                self.fact_lines[&v]
                            )),
                        ));
                    }
                }
                self.doc.graph.set_fact(v, value).map_err(|e| line.error(c, e.into()))?;
                self.fact_lines.entry(v).or_insert(line.no);
            }
            "scenario" => {
                let (_, name) = line.label()?;
                line.finish()?;
                if let Some(prev) = self.doc.scenarios.iter().find(|s| s.name == name) {
                    return Err(line.error(
                        col,
                        ParseErrorKind::Contradiction(format!(
                            "scenario `{name}` already declared on line {}",
                            prev.line
                        )),
                    ));
                }
                self.open = Some(ScenarioDecl {
                    name,
                    line: line.no,
                    evidence: Vec::new(),
                    exclusions: Vec::new(),
                });
            }
            "observe" | "clamp" => {
                let (_, label) = line.label()?;
                line.expect(Tok::Equals)?;
                let (_, value) = line.grade()?;
                line.finish()?;
                let mode = if word == "observe" {
                    EvidenceMode::Source
                } else {
                    EvidenceMode::Clamp
                };
                let s = self.open.as_mut().expect("checked above");
                s.evidence.push(EvidenceDecl {
                    label,
                    value,
                    mode,
                    line: line.no,
                });
            }
            "exclude" => {
                let (_, condition) = line.label()?;
                line.expect(Tok::Arrow)?;
                let (_, target) = line.label()?;
                line.expect(Tok::Colon)?;
                let (c, floor) = line.grade()?;
                line.finish()?;
                if floor.grade() > 2 {
                    return Err(line.error(c, ParseErrorKind::FloorOutOfRange(floor.grade())));
                }
                let s = self.open.as_mut().expect("checked above");
                s.exclusions.push(ExclusionDecl {
                    condition,
                    target,
                    floor,
                    line: line.no,
                });
            }
            "end" => {
                line.finish()?;
                let s = self.open.take().expect("checked above");
                self.doc.scenarios.push(s);
            }
            other => {
                let Some(kind) = EdgeKind::from_keyword(other) else {
                    return Err(line.error(col, ParseErrorKind::Syntax(format!("unknown directive `{other}`"))));
                };
                let (sc, src) = line.label()?;
                line.expect(Tok::Arrow)?;
                let (dc, dst) = line.label()?;
                let value = if kind == EdgeKind::Implication {
                    line.expect(Tok::Colon)?;
                    Some(line.grade()?.1)
                } else {
                    None
                };
                line.finish()?;
                let s = self.vertex(&line, sc, &src)?;
                let d = self.vertex(&line, dc, &dst)?;
                match value {
                    Some(value) => {
                        if let Some(previous) = self.doc.graph.implication(s, d) {
                            if previous != value {
                                return Err(line.error(
                                    col,
                                    ParseErrorKind::Contradiction(format!(
                                        "edge `{src}` -> `{dst}` : {value} contradicts grade {previous} declared on line {}",
                                        self.edge_lines[&(s, d)]
                                    )),
                                ));
                            }
                        }
                        self.doc
                            .graph
                            .add_implication(s, d, value)
                            .map_err(|e| line.error(col, e.into()))?;
                        self.edge_lines.entry((s, d)).or_insert(line.no);
                    }
                    None => {
                        self.doc
                            .graph
                            .add_structural(s, d, kind)
                            .map_err(|e| line.error(col, e.into()))?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Parses a context file, including any scenario blocks it contains.
pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let mut b = Builder {
        doc: Document::default(),
        edge_lines: HashMap::new(),
        fact_lines: HashMap::new(),
        open: None,
    };
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let no = idx + 1;
        last_line = no;
        let toks = tokenize(raw, no)?;
        if toks.is_empty() {
            continue;
        }
        b.directive(Line {
            no,
            toks: &toks,
            pos: 0,
            end_col: raw.chars().count() + 1,
        })?;
    }
    if let Some(open) = b.open {
        return Err(ParseError {
            line: last_line.max(open.line),
            column: 1,
            kind: ParseErrorKind::Syntax(format!(
                "scenario `{}` opened on line {} is missing `end`",
                open.name, open.line
            )),
        });
    }
    Ok(b.doc)
}

/// Parses a context file into its graph. Scenario blocks are validated but
/// not returned; use [`parse_document`] to keep them.
pub fn parse_context(text: &str) -> Result<ContextGraph, ParseError> {
    parse_document(text).map(|d| d.graph)
}

/// Renders `label` as a DSL token, quoting when needed.
pub fn quote_label(label: &str) -> String {
    let needs_quotes = label.contains("->")
        || label.chars().any(|c| is_break(c) || c == '\\');
    if !needs_quotes {
        return label.to_string();
    }
    let mut s = String::with_capacity(label.len() + 2);
    s.push('"');
    for c in label.chars() {
        if c == '"' || c == '\\' {
            s.push('\\');
        }
        s.push(c);
    }
    s.push('"');
    s
}

pub const HEADER: &str = "# likelic context\n";

/// Deterministic rendering: vertices, then edges, then facts, each sorted by label.
pub fn serialize_context(g: &ContextGraph) -> String {
    let mut out = String::from(HEADER);
    for v in g.vertices_by_label() {
        out.push_str(&format!("node {}\n", quote_label(g.label(v))));
    }
    let mut edges: Vec<_> = g
        .edges()
        .map(|e| (g.label(e.src), g.label(e.dst), e.kind, e.value))
        .collect();
    edges.sort();
    for (src, dst, kind, value) in edges {
        let line = match value {
            Some(v) => format!("{} {} -> {} : {}\n", kind.keyword(), quote_label(src), quote_label(dst), v),
            None => format!("{} {} -> {}\n", kind.keyword(), quote_label(src), quote_label(dst)),
        };
        out.push_str(&line);
    }
    let facts: BTreeMap<_, _> = g.facts().by_label(g);
    for (label, value) in facts {
        out.push_str(&format!("fact {} = {}\n", quote_label(label), value));
    }
    out
}
