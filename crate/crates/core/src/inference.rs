//! Path valuation and derived implications.
//!
//! A path is worth the weakest implication along it (`min`); an implication
//! between two vertices is worth the best path between them (`max`). This is
//! the widest-path problem over the (max, min) semiring.
//!
//! A stored implication `a → b` is authoritative: [`derived_implication`]
//! returns it unchanged even when a longer chain would score higher.
//! [`widest_path`] answers the pure path question without that rule.

use std::collections::{BinaryHeap, VecDeque};
use std::fmt::Write;

use thiserror::Error;

use crate::graph::{ContextGraph, GraphError, VertexId};
use crate::scale::Likeliness;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferenceError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("no implication edge `{0}` -> `{1}` on the path")]
    MissingEdge(String, String),
    #[error("a path needs at least two vertices")]
    PathTooShort,
    #[error("self-implication of `{0}` is not defined")]
    Reflexive(String),
    #[error("exhaustive search is limited to {limit} vertices, graph has {actual}")]
    GraphTooLarge { limit: usize, actual: usize },
}

/// A simple path together with its bottleneck grade.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathWitness {
    pub vertices: Vec<VertexId>,
    pub value: Likeliness,
}

impl PathWitness {
    /// `a -(5)-> b -(4)-> c : 4`
    pub fn render(&self, g: &ContextGraph) -> String {
        let mut out = String::from(g.label(self.vertices[0]));
        for w in self.vertices.windows(2) {
            let grade = g.implication(w[0], w[1]).expect("witness follows implication edges");
            write!(out, " -({grade})-> {}", g.label(w[1])).expect("writing to a String");
        }
        write!(out, " : {}", self.value).expect("writing to a String");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derived {
    pub value: Likeliness,
    pub witness: Option<PathWitness>,
    /// The value came from a stored edge rather than a path search.
    pub stored: bool,
}

fn check_vertex(g: &ContextGraph, v: VertexId) -> Result<(), InferenceError> {
    if g.contains(v) {
        Ok(())
    } else {
        Err(GraphError::UnknownVertex(v).into())
    }
}

fn check_pair(g: &ContextGraph, a: VertexId, b: VertexId) -> Result<(), InferenceError> {
    check_vertex(g, a)?;
    check_vertex(g, b)?;
    if a == b {
        return Err(InferenceError::Reflexive(g.label(a).to_string()));
    }
    Ok(())
}

/// Minimum edge grade along `vertices`.
pub fn path_likeliness(g: &ContextGraph, vertices: &[VertexId]) -> Result<Likeliness, InferenceError> {
    if vertices.len() < 2 {
        return Err(InferenceError::PathTooShort);
    }
    for &v in vertices {
        check_vertex(g, v)?;
    }
    let mut value = Likeliness::NECESSARY;
    for w in vertices.windows(2) {
        let grade = g.implication(w[0], w[1]).ok_or_else(|| {
            InferenceError::MissingEdge(g.label(w[0]).to_string(), g.label(w[1]).to_string())
        })?;
        value = value.min(grade);
    }
    Ok(value)
}

/// Best bottleneck from `source` to every vertex, `None` where unreachable.
/// The source itself carries 6, the identity of `min`.
///
/// Best-first search: vertices are settled in decreasing order of bottleneck,
/// relaxing with `min(bottleneck, grade)`. `O(E log V)`.
pub fn widest_from(g: &ContextGraph, source: VertexId) -> Vec<Option<Likeliness>> {
    let mut best: Vec<Option<Likeliness>> = vec![None; g.vertex_count()];
    let mut settled = vec![false; g.vertex_count()];
    let mut heap = BinaryHeap::new();
    best[source.index()] = Some(Likeliness::NECESSARY);
    heap.push((Likeliness::NECESSARY, std::cmp::Reverse(source)));
    while let Some((width, std::cmp::Reverse(v))) = heap.pop() {
        if settled[v.index()] {
            continue;
        }
        settled[v.index()] = true;
        for (w, grade) in g.out_implications(v) {
            let candidate = width.min(grade);
            if !settled[w.index()] && best[w.index()].is_none_or(|b| candidate > b) {
                best[w.index()] = Some(candidate);
                heap.push((candidate, std::cmp::Reverse(w)));
            }
        }
    }
    best
}

/// Max over all `a → b` paths of their bottleneck, ignoring the stored-edge
/// rule. `None` when `b` is unreachable.
pub fn widest_path(g: &ContextGraph, a: VertexId, b: VertexId) -> Result<Option<Likeliness>, InferenceError> {
    check_pair(g, a, b)?;
    Ok(widest_from(g, a)[b.index()])
}

/// Among the paths whose bottleneck is at least `width`, the one with fewest
/// edges, ties broken by the lexicographically smallest label sequence.
fn witness(g: &ContextGraph, a: VertexId, b: VertexId, width: Likeliness) -> Option<Vec<VertexId>> {
    let n = g.vertex_count();
    let mut incoming: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for (s, d, grade) in g.implications() {
        if grade >= width {
            incoming[d.index()].push(s);
        }
    }
    // Hop distance to b over admissible edges.
    let mut dist = vec![usize::MAX; n];
    dist[b.index()] = 0;
    let mut queue = VecDeque::from([b]);
    while let Some(v) = queue.pop_front() {
        for &u in &incoming[v.index()] {
            if dist[u.index()] == usize::MAX {
                dist[u.index()] = dist[v.index()] + 1;
                queue.push_back(u);
            }
        }
    }
    if dist[a.index()] == usize::MAX {
        return None;
    }
    let mut path = vec![a];
    let mut cur = a;
    while cur != b {
        let next = g
            .out_implications(cur)
            .filter(|&(w, grade)| grade >= width && dist[w.index()].checked_add(1) == Some(dist[cur.index()]))
            .map(|(w, _)| w)
            .min_by(|&x, &y| g.label(x).cmp(g.label(y)))
            .expect("distance labels guarantee a successor");
        path.push(next);
        cur = next;
    }
    Some(path)
}

/// `l(a → b)`: the stored grade when the edge exists, otherwise the best path
/// bottleneck. Unreachable pairs score 0 without a witness.
pub fn derived_implication(g: &ContextGraph, a: VertexId, b: VertexId) -> Result<Derived, InferenceError> {
    check_pair(g, a, b)?;
    if let Some(value) = g.implication(a, b) {
        return Ok(Derived {
            value,
            witness: Some(PathWitness {
                vertices: vec![a, b],
                value,
            }),
            stored: true,
        });
    }
    Ok(match widest_from(g, a)[b.index()] {
        None => Derived {
            value: Likeliness::IMPOSSIBLE,
            witness: None,
            stored: false,
        },
        Some(value) => {
            let vertices = witness(g, a, b, value).expect("b is reachable at this width");
            Derived {
                value,
                witness: Some(PathWitness { vertices, value }),
                stored: false,
            }
        }
    })
}

/// Square matrix of derived implications indexed by vertex id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedMatrix {
    n: usize,
    cells: Vec<Likeliness>,
}

impl DerivedMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    /// The diagonal is 6 by convention only; self-implication is not derived.
    pub fn get(&self, a: VertexId, b: VertexId) -> Likeliness {
        self.cells[a.index() * self.n + b.index()]
    }

    pub fn row(&self, a: VertexId) -> &[Likeliness] {
        &self.cells[a.index() * self.n..(a.index() + 1) * self.n]
    }
}

/// All-pairs derived implications via Floyd–Warshall over (max, min), with
/// stored edges overriding their own cell afterwards.
pub fn all_pairs_derived(g: &ContextGraph) -> DerivedMatrix {
    let n = g.vertex_count();
    let mut m = vec![Likeliness::IMPOSSIBLE; n * n];
    for i in 0..n {
        m[i * n + i] = Likeliness::NECESSARY;
    }
    for (s, d, grade) in g.implications() {
        m[s.index() * n + d.index()] = grade;
    }
    for k in 0..n {
        for i in 0..n {
            let ik = m[i * n + k];
            if ik == Likeliness::IMPOSSIBLE {
                continue;
            }
            for j in 0..n {
                let through = ik.min(m[k * n + j]);
                if through > m[i * n + j] {
                    m[i * n + j] = through;
                }
            }
        }
    }
    for i in 0..n {
        m[i * n + i] = Likeliness::NECESSARY;
    }
    for (s, d, grade) in g.implications() {
        m[s.index() * n + d.index()] = grade;
    }
    DerivedMatrix { n, cells: m }
}

/// Largest graph [`brute_force_derived`] accepts.
pub const BRUTE_FORCE_LIMIT: usize = 12;

/// Exhaustive oracle: max over every simple `a → b` path of its minimum edge.
/// No stored-edge rule; 0 when no path exists.
pub fn brute_force_derived(g: &ContextGraph, a: VertexId, b: VertexId) -> Result<Likeliness, InferenceError> {
    if g.vertex_count() > BRUTE_FORCE_LIMIT {
        return Err(InferenceError::GraphTooLarge {
            limit: BRUTE_FORCE_LIMIT,
            actual: g.vertex_count(),
        });
    }
    check_pair(g, a, b)?;
    fn dfs(
        g: &ContextGraph,
        v: VertexId,
        target: VertexId,
        bottleneck: u8,
        on_path: &mut [bool],
        best: &mut Option<u8>,
    ) {
        if v == target {
            *best = Some(best.map_or(bottleneck, |b| b.max(bottleneck)));
            return;
        }
        on_path[v.index()] = true;
        for (w, grade) in g.out_implications(v) {
            if !on_path[w.index()] {
                dfs(g, w, target, bottleneck.min(grade.grade()), on_path, best);
            }
        }
        on_path[v.index()] = false;
    }
    let mut on_path = vec![false; g.vertex_count()];
    let mut best = None;
    dfs(g, a, b, 6, &mut on_path, &mut best);
    Ok(Likeliness::new(best.unwrap_or(0) as i64).expect("grades stay in range"))
}

/// Human-readable chain for `a → b`, or `"no path"`.
pub fn explain(g: &ContextGraph, a: VertexId, b: VertexId) -> Result<String, InferenceError> {
    let d = derived_implication(g, a, b)?;
    Ok(match d.witness {
        Some(w) => w.render(g),
        None => "no path".to_string(),
    })
}
