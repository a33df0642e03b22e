//! Evidence propagation and scenario conditioning.
//!
//! Propagation is monotone: a source of grade `s` lifts every reachable
//! vertex `b` to at most `s`. Scenarios add the defeasible layer on top:
//! exclusions demote targets when their condition is certain, and clamps
//! overwrite individual vertices.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::graph::{ContextGraph, GraphError, ScenarioDecl, Valuation, VertexId};
use crate::inference::widest_from;
use crate::scale::Likeliness;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UpdateError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("propagation needs Source evidence, `{0}` is a clamp")]
    NotASource(String),
    #[error("scenario `{scenario}`: conflicting evidence for `{label}`")]
    ConflictingEvidence { scenario: String, label: String },
    #[error("scenario `{scenario}`: exclusion floor {floor} for `{target}` is above 2")]
    FloorTooHigh {
        scenario: String,
        target: String,
        floor: Likeliness,
    },
    #[error("scenario `{scenario}`: `{label}` is both an exclusion condition and an exclusion target")]
    ChainedExclusion { scenario: String, label: String },
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("duplicate column name `{0}`")]
    DuplicateName(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvidenceMode {
    /// The value spreads along implication edges.
    Source,
    /// The value overrides the final grade of its vertex.
    Clamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Evidence {
    pub vertex: VertexId,
    pub value: Likeliness,
    pub mode: EvidenceMode,
}

impl Evidence {
    pub fn source(vertex: VertexId, value: Likeliness) -> Self {
        Evidence {
            vertex,
            value,
            mode: EvidenceMode::Source,
        }
    }

    pub fn clamp(vertex: VertexId, value: Likeliness) -> Self {
        Evidence {
            vertex,
            value,
            mode: EvidenceMode::Clamp,
        }
    }
}

/// Once `condition` is certain (grade 6), `target` is capped at `floor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exclusion {
    pub condition: VertexId,
    pub target: VertexId,
    pub floor: Likeliness,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Scenario {
    pub name: String,
    pub evidence: Vec<Evidence>,
    pub exclusions: Vec<Exclusion>,
}

impl Scenario {
    pub fn new(name: impl Into<String>) -> Self {
        Scenario {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn observe(mut self, vertex: VertexId, value: Likeliness) -> Self {
        self.evidence.push(Evidence::source(vertex, value));
        self
    }

    pub fn clamp(mut self, vertex: VertexId, value: Likeliness) -> Self {
        self.evidence.push(Evidence::clamp(vertex, value));
        self
    }

    pub fn exclude(mut self, condition: VertexId, target: VertexId, floor: Likeliness) -> Self {
        self.exclusions.push(Exclusion {
            condition,
            target,
            floor,
        });
        self
    }

    /// Binds a parsed scenario block to the vertices of `g`.
    pub fn resolve(decl: &ScenarioDecl, g: &ContextGraph) -> Result<Self, UpdateError> {
        let mut s = Scenario::new(decl.name.clone());
        for e in &decl.evidence {
            let v = g.require(&e.label)?;
            s.evidence.push(Evidence {
                vertex: v,
                value: e.value,
                mode: e.mode,
            });
        }
        for x in &decl.exclusions {
            s.exclusions.push(Exclusion {
                condition: g.require(&x.condition)?,
                target: g.require(&x.target)?,
                floor: x.floor,
            });
        }
        s.validate(g)?;
        Ok(s)
    }

    /// One evidence entry per vertex, floors within 0..=2, and no vertex that
    /// is both an exclusion condition and an exclusion target.
    pub fn validate(&self, g: &ContextGraph) -> Result<(), UpdateError> {
        let mut seen: HashMap<VertexId, Evidence> = HashMap::new();
        for e in &self.evidence {
            if !g.contains(e.vertex) {
                return Err(GraphError::UnknownVertex(e.vertex).into());
            }
            if let Some(prev) = seen.insert(e.vertex, *e) {
                if prev != *e {
                    return Err(UpdateError::ConflictingEvidence {
                        scenario: self.name.clone(),
                        label: g.label(e.vertex).to_string(),
                    });
                }
            }
        }
        let targets: BTreeSet<_> = self.exclusions.iter().map(|x| x.target).collect();
        for x in &self.exclusions {
            for v in [x.condition, x.target] {
                if !g.contains(v) {
                    return Err(GraphError::UnknownVertex(v).into());
                }
            }
            if x.floor.grade() > 2 {
                return Err(UpdateError::FloorTooHigh {
                    scenario: self.name.clone(),
                    target: g.label(x.target).to_string(),
                    floor: x.floor,
                });
            }
            if targets.contains(&x.condition) {
                return Err(UpdateError::ChainedExclusion {
                    scenario: self.name.clone(),
                    label: g.label(x.condition).to_string(),
                });
            }
        }
        Ok(())
    }
}

/// How evidence spreads from its source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PropagationMode {
    /// Every reachable `b` gets `max_p min(l(a), l(p))`, computed by
    /// relaxation to a fixpoint. Order-independent.
    #[default]
    Fixpoint,
    /// Discovery-frozen expansion: a vertex keeps the first value it is
    /// offered, and the frontier expands from its strongest members first.
    Wavefront,
}

impl PropagationMode {
    pub fn name(self) -> &'static str {
        match self {
            PropagationMode::Fixpoint => "fixpoint",
            PropagationMode::Wavefront => "wavefront",
        }
    }
}

/// Result of a fixpoint run, with the number of relaxation sweeps used
/// (including the final sweep that changed nothing).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixpointTrace {
    pub values: Valuation,
    pub sweeps: usize,
}

/// Fixpoint propagation sweeping vertices in `order`. Each sweep pushes every
/// assigned vertex's value along its out-edges; the loop stops after a sweep
/// with no change. `order` must be a permutation of the graph's vertices.
pub fn propagate_fixpoint_in_order(
    g: &ContextGraph,
    source: VertexId,
    value: Likeliness,
    order: &[VertexId],
) -> Result<FixpointTrace, UpdateError> {
    if !g.contains(source) {
        return Err(GraphError::UnknownVertex(source).into());
    }
    let out: Vec<Vec<(VertexId, Likeliness)>> = g.vertices().map(|v| g.out_implications(v).collect()).collect();
    let mut val: Vec<Option<Likeliness>> = vec![None; g.vertex_count()];
    val[source.index()] = Some(value);
    let mut sweeps = 0;
    loop {
        sweeps += 1;
        let mut changed = false;
        for &v in order {
            let Some(from) = val[v.index()] else { continue };
            for &(w, grade) in &out[v.index()] {
                if w == source {
                    continue;
                }
                let offer = from.min(grade);
                if val[w.index()].is_none_or(|cur| offer > cur) {
                    val[w.index()] = Some(offer);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let values = val
        .into_iter()
        .enumerate()
        .filter_map(|(i, l)| l.map(|l| (VertexId::from_index(i), l)))
        .collect();
    Ok(FixpointTrace { values, sweeps })
}

fn wavefront(g: &ContextGraph, source: VertexId, value: Likeliness) -> Valuation {
    let mut val: Vec<Option<Likeliness>> = vec![None; g.vertex_count()];
    val[source.index()] = Some(value);
    // Frontier grouped by value; each wave expands every frontier vertex of
    // the current highest value together, so the result does not depend on
    // iteration order within a wave.
    let mut frontier: BTreeMap<Likeliness, Vec<VertexId>> = BTreeMap::new();
    frontier.entry(value).or_default().push(source);
    while let Some((_, wave)) = frontier.pop_last() {
        let mut offers: BTreeMap<VertexId, Likeliness> = BTreeMap::new();
        for v in wave {
            let from = val[v.index()].expect("frontier vertices are assigned");
            for (w, grade) in g.out_implications(v) {
                if val[w.index()].is_none() {
                    let offer = from.min(grade);
                    let slot = offers.entry(w).or_insert(offer);
                    *slot = (*slot).max(offer);
                }
            }
        }
        for (w, offer) in offers {
            val[w.index()] = Some(offer);
            frontier.entry(offer).or_default().push(w);
        }
    }
    val.into_iter()
        .enumerate()
        .filter_map(|(i, l)| l.map(|l| (VertexId::from_index(i), l)))
        .collect()
}

/// Values reached from one source, without merging any prior valuation.
fn spread_source(g: &ContextGraph, source: VertexId, value: Likeliness, mode: PropagationMode) -> Result<Valuation, UpdateError> {
    if !g.contains(source) {
        return Err(GraphError::UnknownVertex(source).into());
    }
    Ok(match mode {
        PropagationMode::Fixpoint => {
            let order: Vec<_> = g.vertices().collect();
            propagate_fixpoint_in_order(g, source, value, &order)?.values
        }
        PropagationMode::Wavefront => wavefront(g, source, value),
    })
}

/// Propagates `source` through `g`. Vertices with a base valuation (`fact`)
/// keep the higher of their old and new grade.
pub fn propagate(g: &ContextGraph, source: &Evidence, mode: PropagationMode) -> Result<Valuation, UpdateError> {
    if source.mode != EvidenceMode::Source {
        return Err(UpdateError::NotASource(g.label(source.vertex).to_string()));
    }
    let reached = spread_source(g, source.vertex, source.value, mode)?;
    let mut out = g.facts().clone();
    out.merge_max(&reached);
    Ok(out)
}

/// The update rule read with `max` between the source grade and the path
/// grade, so every reachable vertex ends at least as likely as the source.
/// Kept only for comparison with the two supported modes.
pub fn propagate_literal_max(g: &ContextGraph, source: VertexId, value: Likeliness) -> Result<Valuation, UpdateError> {
    if !g.contains(source) {
        return Err(GraphError::UnknownVertex(source).into());
    }
    let mut out = g.facts().clone();
    for (i, width) in widest_from(g, source).into_iter().enumerate() {
        let v = VertexId::from_index(i);
        if let Some(width) = width {
            let grade = if v == source { value } else { value.max(width) };
            out.raise(v, grade);
        }
    }
    Ok(out)
}

/// Conditions `defaults` on a scenario: propagate each source (max-merge),
/// apply exclusions whose condition is certain, then clamps.
pub fn apply_scenario(
    g: &ContextGraph,
    defaults: &Valuation,
    s: &Scenario,
    mode: PropagationMode,
) -> Result<Valuation, UpdateError> {
    s.validate(g)?;
    let mut out = defaults.clone();
    for e in s.evidence.iter().filter(|e| e.mode == EvidenceMode::Source) {
        out.merge_max(&spread_source(g, e.vertex, e.value, mode)?);
    }
    let clamps: BTreeMap<VertexId, Likeliness> = s
        .evidence
        .iter()
        .filter(|e| e.mode == EvidenceMode::Clamp)
        .map(|e| (e.vertex, e.value))
        .collect();
    // Conditions are read before any exclusion fires, with clamps already in view.
    let certain = |v: VertexId| clamps.get(&v).copied().or_else(|| out.get(v)) == Some(Likeliness::NECESSARY);
    let firing: Vec<Exclusion> = s.exclusions.iter().copied().filter(|x| certain(x.condition)).collect();
    for x in firing {
        let capped = out.get(x.target).map_or(x.floor, |cur| cur.min(x.floor));
        out.set(x.target, capped);
    }
    for (v, value) in clamps {
        out.set(v, value);
    }
    Ok(out)
}

/// Name of the column holding the unconditioned valuation.
pub const DEFAULT_COLUMN: &str = "default";

/// Rows of vertices against columns of scenarios.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioTable {
    pub columns: Vec<String>,
    pub rows: Vec<(VertexId, Vec<Option<Likeliness>>)>,
}

impl ScenarioTable {
    /// `# columns: a b c` followed by one `label: v v v` line per row; `-`
    /// marks an unassigned vertex.
    pub fn render(&self, g: &ContextGraph) -> String {
        let mut out = format!("# columns: {}\n", self.columns.join(" "));
        for (v, values) in &self.rows {
            let cells: Vec<String> = values
                .iter()
                .map(|c| c.map_or_else(|| "-".to_string(), |l| l.to_string()))
                .collect();
            out.push_str(&format!("{}: {}\n", g.label(*v), cells.join(" ")));
        }
        out
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Keep only the named columns, in the given order.
    pub fn select(&self, names: &[&str]) -> Result<ScenarioTable, UpdateError> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| self.column(n).ok_or_else(|| UpdateError::UnknownScenario(n.to_string())))
            .collect::<Result<_, _>>()?;
        Ok(ScenarioTable {
            columns: names.iter().map(|n| n.to_string()).collect(),
            rows: self
                .rows
                .iter()
                .map(|(v, vals)| (*v, idx.iter().map(|&i| vals[i]).collect()))
                .collect(),
        })
    }
}

/// A defaults column followed by one column per scenario, for `rows`.
pub fn compare_scenarios(
    g: &ContextGraph,
    defaults: &Valuation,
    scenarios: &[Scenario],
    rows: &[VertexId],
    mode: PropagationMode,
) -> Result<ScenarioTable, UpdateError> {
    let mut names = BTreeSet::from([DEFAULT_COLUMN]);
    for s in scenarios {
        if !names.insert(s.name.as_str()) {
            return Err(UpdateError::DuplicateName(s.name.clone()));
        }
    }
    for &v in rows {
        if !g.contains(v) {
            return Err(GraphError::UnknownVertex(v).into());
        }
    }
    let mut columns = vec![defaults.clone()];
    for s in scenarios {
        columns.push(apply_scenario(g, defaults, s, mode)?);
    }
    Ok(ScenarioTable {
        columns: std::iter::once(DEFAULT_COLUMN.to_string())
            .chain(scenarios.iter().map(|s| s.name.clone()))
            .collect(),
        rows: rows
            .iter()
            .map(|&v| (v, columns.iter().map(|c| c.get(v)).collect()))
            .collect(),
    })
}
