//! Context graphs: proposition vertices joined by graded implication edges,
//! plus the unvalued structural links (`0` isa, `1` subject, `2` object).
//!
//! Vertex ids are dense indices assigned in insertion order; labels are the
//! stable identity used for I/O and for comparing graphs.

mod dot;
mod dsl;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::scale::Likeliness;

pub use dot::export_dot;
pub use dsl::{
    parse_context, parse_document, quote_label, serialize_context, Document, ExclusionDecl,
    EvidenceDecl, ParseError, ParseErrorKind, ScenarioDecl,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid vertex label {0:?}: labels must be nonempty and contain no newline")]
    InvalidLabel(String),
    #[error("unknown vertex `{0}`")]
    UnknownLabel(String),
    #[error("unknown vertex id {0}")]
    UnknownVertex(VertexId),
    #[error("self-loop on `{0}` is not allowed")]
    SelfLoop(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(index: usize) -> Self {
        VertexId(index as u32)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    Implication,
    /// `0`: is / isa.
    Is0,
    /// `1`: subject.
    Subj1,
    /// `2`: object.
    Obj2,
}

impl EdgeKind {
    pub fn is_structural(self) -> bool {
        self != EdgeKind::Implication
    }

    /// The DSL keyword introducing an edge of this kind.
    pub fn keyword(self) -> &'static str {
        match self {
            EdgeKind::Implication => "edge",
            EdgeKind::Is0 => "0edge",
            EdgeKind::Subj1 => "1edge",
            EdgeKind::Obj2 => "2edge",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Some(match word {
            "edge" => EdgeKind::Implication,
            "0edge" => EdgeKind::Is0,
            "1edge" => EdgeKind::Subj1,
            "2edge" => EdgeKind::Obj2,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub src: VertexId,
    pub dst: VertexId,
    pub kind: EdgeKind,
    /// Present exactly for implication edges.
    pub value: Option<Likeliness>,
}

/// Outcome of inserting an implication edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeInsert {
    New,
    Unchanged,
    /// An existing edge was overwritten. Stored implications are meant to be
    /// stable, so callers should surface this.
    Replaced { previous: Likeliness },
}

/// A partial assignment of grades to vertices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Valuation {
    values: BTreeMap<VertexId, Likeliness>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: VertexId) -> Option<Likeliness> {
        self.values.get(&v).copied()
    }

    pub fn set(&mut self, v: VertexId, value: Likeliness) -> Option<Likeliness> {
        self.values.insert(v, value)
    }

    pub fn remove(&mut self, v: VertexId) -> Option<Likeliness> {
        self.values.remove(&v)
    }

    /// Raise `v` to `value` if that is higher than its current grade.
    pub fn raise(&mut self, v: VertexId, value: Likeliness) {
        let slot = self.values.entry(v).or_insert(value);
        if value > *slot {
            *slot = value;
        }
    }

    /// Pointwise maximum with `other`.
    pub fn merge_max(&mut self, other: &Valuation) {
        for (&v, &value) in &other.values {
            self.raise(v, value);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, Likeliness)> + '_ {
        self.values.iter().map(|(&v, &l)| (v, l))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Entries keyed by label, sorted by label.
    pub fn by_label<'g>(&self, g: &'g ContextGraph) -> BTreeMap<&'g str, Likeliness> {
        self.iter().map(|(v, l)| (g.label(v), l)).collect()
    }
}

impl FromIterator<(VertexId, Likeliness)> for Valuation {
    fn from_iter<T: IntoIterator<Item = (VertexId, Likeliness)>>(iter: T) -> Self {
        Valuation {
            values: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ContextGraph {
    labels: Vec<String>,
    index: HashMap<String, VertexId>,
    implications: BTreeMap<(VertexId, VertexId), Likeliness>,
    structural: BTreeSet<(VertexId, VertexId, EdgeKind)>,
    facts: Valuation,
}

pub fn validate_label(label: &str) -> Result<(), GraphError> {
    if label.is_empty() || label.contains(['\n', '\r']) {
        Err(GraphError::InvalidLabel(label.to_string()))
    } else {
        Ok(())
    }
}

impl ContextGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn implication_count(&self) -> usize {
        self.implications.len()
    }

    pub fn structural_count(&self) -> usize {
        self.structural.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Adds a vertex, or returns the existing one with the same label.
    pub fn add_vertex(&mut self, label: &str) -> Result<VertexId, GraphError> {
        validate_label(label)?;
        if let Some(&id) = self.index.get(label) {
            return Ok(id);
        }
        let id = VertexId(self.labels.len() as u32);
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), id);
        Ok(id)
    }

    pub fn vertex(&self, label: &str) -> Option<VertexId> {
        self.index.get(label).copied()
    }

    pub fn require(&self, label: &str) -> Result<VertexId, GraphError> {
        self.vertex(label)
            .ok_or_else(|| GraphError::UnknownLabel(label.to_string()))
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.index() < self.labels.len()
    }

    fn check(&self, v: VertexId) -> Result<(), GraphError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(GraphError::UnknownVertex(v))
        }
    }

    /// Panics on an id from another graph.
    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v.index()]
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.labels.len()).map(VertexId::from_index)
    }

    /// Vertex ids ordered by label.
    pub fn vertices_by_label(&self) -> Vec<VertexId> {
        let mut vs: Vec<_> = self.vertices().collect();
        vs.sort_by(|&a, &b| self.label(a).cmp(self.label(b)));
        vs
    }

    pub fn add_implication(
        &mut self,
        src: VertexId,
        dst: VertexId,
        value: Likeliness,
    ) -> Result<EdgeInsert, GraphError> {
        self.check(src)?;
        self.check(dst)?;
        if src == dst {
            return Err(GraphError::SelfLoop(self.label(src).to_string()));
        }
        Ok(match self.implications.insert((src, dst), value) {
            None => EdgeInsert::New,
            Some(previous) if previous == value => EdgeInsert::Unchanged,
            Some(previous) => {
                log::warn!(
                    "implication {} -> {} changed from {} to {}",
                    self.label(src),
                    self.label(dst),
                    previous,
                    value
                );
                EdgeInsert::Replaced { previous }
            }
        })
    }

    /// Adds an unvalued structural link. Returns `false` if it was already present.
    pub fn add_structural(
        &mut self,
        src: VertexId,
        dst: VertexId,
        kind: EdgeKind,
    ) -> Result<bool, GraphError> {
        assert!(kind.is_structural(), "implication edges carry a grade");
        self.check(src)?;
        self.check(dst)?;
        if src == dst {
            return Err(GraphError::SelfLoop(self.label(src).to_string()));
        }
        Ok(self.structural.insert((src, dst, kind)))
    }

    pub fn implication(&self, src: VertexId, dst: VertexId) -> Option<Likeliness> {
        self.implications.get(&(src, dst)).copied()
    }

    pub fn implications(&self) -> impl Iterator<Item = (VertexId, VertexId, Likeliness)> + '_ {
        self.implications.iter().map(|(&(s, d), &l)| (s, d, l))
    }

    pub fn out_implications(
        &self,
        src: VertexId,
    ) -> impl Iterator<Item = (VertexId, Likeliness)> + '_ {
        self.implications
            .range((src, VertexId(0))..=(src, VertexId(u32::MAX)))
            .map(|(&(_, d), &l)| (d, l))
    }

    pub fn structural_edges(&self) -> impl Iterator<Item = (VertexId, VertexId, EdgeKind)> + '_ {
        self.structural.iter().copied()
    }

    /// All edges, implications first.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.implications()
            .map(|(src, dst, l)| Edge {
                src,
                dst,
                kind: EdgeKind::Implication,
                value: Some(l),
            })
            .chain(self.structural_edges().map(|(src, dst, kind)| Edge {
                src,
                dst,
                kind,
                value: None,
            }))
    }

    /// Out-neighbours over every edge kind, deduplicated.
    pub fn out_neighbors(&self, src: VertexId) -> BTreeSet<VertexId> {
        let mut out: BTreeSet<_> = self.out_implications(src).map(|(d, _)| d).collect();
        out.extend(
            self.structural
                .range((src, VertexId(0), EdgeKind::Implication)..)
                .take_while(|(s, _, _)| *s == src)
                .map(|&(_, d, _)| d),
        );
        out
    }

    pub fn set_fact(&mut self, v: VertexId, value: Likeliness) -> Result<Option<Likeliness>, GraphError> {
        self.check(v)?;
        Ok(self.facts.set(v, value))
    }

    /// The base valuation declared with `fact` lines.
    pub fn facts(&self) -> &Valuation {
        &self.facts
    }

    fn canonical(&self) -> Canonical<'_> {
        let edges = self
            .edges()
            .map(|e| (self.label(e.src), self.label(e.dst), e.kind, e.value))
            .collect();
        let facts = self.facts.by_label(self);
        Canonical {
            vertices: self.labels.iter().map(String::as_str).collect(),
            edges,
            facts,
        }
    }
}

type CanonicalEdge<'a> = (&'a str, &'a str, EdgeKind, Option<Likeliness>);

#[derive(PartialEq)]
struct Canonical<'a> {
    vertices: BTreeSet<&'a str>,
    edges: BTreeSet<CanonicalEdge<'a>>,
    facts: BTreeMap<&'a str, Likeliness>,
}

/// Graphs compare by labelled content, independent of vertex numbering.
impl PartialEq for ContextGraph {
    fn eq(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl Eq for ContextGraph {}
