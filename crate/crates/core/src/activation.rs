//! Spreading activation and the learning it drives.
//!
//! Activity levels: `-1` blocked, `0` inactive, `1` active, `2` spreading.
//! Steps are synchronous. At the start of a step, vertices that became active
//! in the previous step are promoted to spreading; then every spreading vertex
//! activates its inactive out-neighbours over all edge kinds. Blocked vertices
//! neither change nor receive activation, and nothing ever decays.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{ContextGraph, EdgeKind, GraphError, VertexId};
use crate::scale::Likeliness;

/// Grade given to implication edges created by learning.
pub const LEARNED_GRADE: Likeliness = Likeliness::TYPICAL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Activity {
    Blocked,
    #[default]
    Inactive,
    Active,
    Spreading,
}

impl Activity {
    pub fn level(self) -> i8 {
        match self {
            Activity::Blocked => -1,
            Activity::Inactive => 0,
            Activity::Active => 1,
            Activity::Spreading => 2,
        }
    }
}

impl TryFrom<i8> for Activity {
    type Error = ActivationError;

    fn try_from(level: i8) -> Result<Self, Self::Error> {
        Ok(match level {
            -1 => Activity::Blocked,
            0 => Activity::Inactive,
            1 => Activity::Active,
            2 => Activity::Spreading,
            other => return Err(ActivationError::InvalidLevel(other)),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActivationError {
    #[error("activity level {0} is not one of -1, 0, 1, 2")]
    InvalidLevel(i8),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("line {line}: {message}")]
    Script { line: usize, message: String },
}

/// Total map from vertices to activity; unlisted vertices are inactive.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ActivityMap {
    levels: BTreeMap<VertexId, Activity>,
}

impl ActivityMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: VertexId) -> Activity {
        self.levels.get(&v).copied().unwrap_or_default()
    }

    pub fn set(&mut self, v: VertexId, a: Activity) {
        if a == Activity::Inactive {
            self.levels.remove(&v);
        } else {
            self.levels.insert(v, a);
        }
    }

    /// Vertices at level 1 or 2.
    pub fn active(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.levels
            .iter()
            .filter(|(_, a)| **a >= Activity::Active)
            .map(|(v, _)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, Activity)> + '_ {
        self.levels.iter().map(|(v, a)| (*v, *a))
    }
}

fn step(g: &ContextGraph, act: &ActivityMap) -> ActivityMap {
    let mut next = act.clone();
    for (v, a) in act.iter() {
        if a == Activity::Active {
            next.set(v, Activity::Spreading);
        }
    }
    let spreaders: Vec<VertexId> = next
        .iter()
        .filter(|(_, a)| *a == Activity::Spreading)
        .map(|(v, _)| v)
        .collect();
    for v in spreaders {
        for w in g.out_neighbors(v) {
            if next.get(w) == Activity::Inactive {
                next.set(w, Activity::Active);
            }
        }
    }
    next
}

pub fn spread(g: &ContextGraph, act: &ActivityMap, steps: usize) -> ActivityMap {
    let mut cur = act.clone();
    for _ in 0..steps {
        let next = step(g, &cur);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

/// Adds `label` (or reuses it) with one `kind` edge towards `anchor`.
/// Implication edges created this way get [`LEARNED_GRADE`].
pub fn adjoin_vertex(
    g: &ContextGraph,
    label: &str,
    anchor: VertexId,
    kind: EdgeKind,
) -> Result<ContextGraph, ActivationError> {
    if !g.contains(anchor) {
        return Err(GraphError::UnknownVertex(anchor).into());
    }
    let mut out = g.clone();
    let v = out.add_vertex(label)?;
    match kind {
        EdgeKind::Implication => {
            if out.implication(v, anchor).is_none() {
                out.add_implication(v, anchor, LEARNED_GRADE)?;
            }
        }
        structural => {
            out.add_structural(v, anchor, structural)?;
        }
    }
    Ok(out)
}

/// Links every ordered pair of co-active vertices that has no implication
/// edge yet, at [`LEARNED_GRADE`]. Existing edges keep their grade.
pub fn learn_edges_on_coactivation(g: &ContextGraph, act: &ActivityMap) -> ContextGraph {
    let mut out = g.clone();
    let active: Vec<VertexId> = act.active().filter(|&v| g.contains(v)).collect();
    for &u in &active {
        for &v in &active {
            if u != v && out.implication(u, v).is_none() {
                out.add_implication(u, v, LEARNED_GRADE)
                    .expect("distinct existing vertices");
            }
        }
    }
    out
}

/// One line of an activation script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScriptCommand {
    /// Set a vertex to spreading, creating it if needed.
    Activate(String),
    Block(String),
    Step(usize),
    Coactivate,
    /// `adjoin <label> -> <anchor> : <kind>` with kind `0`, `1`, `2` or `edge`.
    Adjoin {
        label: String,
        anchor: String,
        kind: EdgeKind,
    },
}

fn split_words(line: &str) -> Vec<String> {
    let mut words = Vec::new();
    let mut chars = line.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '#' {
            break;
        } else if c == '"' {
            chars.next();
            let mut w = String::new();
            while let Some(c) = chars.next() {
                match c {
                    '"' => break,
                    '\\' => w.extend(chars.next()),
                    c => w.push(c),
                }
            }
            words.push(w);
        } else {
            let mut w = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() || c == '#' {
                    break;
                }
                w.push(c);
                chars.next();
            }
            words.push(w);
        }
    }
    words
}

pub fn parse_script(text: &str) -> Result<Vec<(usize, ScriptCommand)>, ActivationError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let words = split_words(raw);
        let err = |message: String| ActivationError::Script { line, message };
        let cmd = match words.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
            [] => continue,
            ["activate", label] => ScriptCommand::Activate(label.to_string()),
            ["block", label] => ScriptCommand::Block(label.to_string()),
            ["step", n] => ScriptCommand::Step(n.parse().map_err(|_| err(format!("bad step count `{n}`")))?),
            ["coactivate"] => ScriptCommand::Coactivate,
            ["adjoin", label, "->", anchor, ":", kind] => ScriptCommand::Adjoin {
                label: label.to_string(),
                anchor: anchor.to_string(),
                kind: match *kind {
                    "0" => EdgeKind::Is0,
                    "1" => EdgeKind::Subj1,
                    "2" => EdgeKind::Obj2,
                    "edge" => EdgeKind::Implication,
                    other => return Err(err(format!("unknown edge kind `{other}`"))),
                },
            },
            [cmd, ..] => return Err(err(format!("cannot parse `{cmd}` command"))),
        };
        out.push((line, cmd));
    }
    Ok(out)
}

/// Runs a script against `g`, returning the learned graph and final activity.
pub fn run_script(g: &ContextGraph, text: &str) -> Result<(ContextGraph, ActivityMap), ActivationError> {
    let mut graph = g.clone();
    let mut act = ActivityMap::new();
    for (line, cmd) in parse_script(text)? {
        let at_line = |e: ActivationError| match e {
            ActivationError::Script { .. } => e,
            other => ActivationError::Script {
                line,
                message: other.to_string(),
            },
        };
        match cmd {
            ScriptCommand::Activate(label) => {
                let v = graph.add_vertex(&label).map_err(|e| at_line(e.into()))?;
                if act.get(v) != Activity::Blocked {
                    act.set(v, Activity::Spreading);
                }
            }
            ScriptCommand::Block(label) => {
                let v = graph.add_vertex(&label).map_err(|e| at_line(e.into()))?;
                act.set(v, Activity::Blocked);
            }
            ScriptCommand::Step(n) => act = spread(&graph, &act, n),
            ScriptCommand::Coactivate => graph = learn_edges_on_coactivation(&graph, &act),
            ScriptCommand::Adjoin { label, anchor, kind } => {
                let a = graph.require(&anchor).map_err(|e| at_line(e.into()))?;
                graph = adjoin_vertex(&graph, &label, a, kind).map_err(at_line)?;
            }
        }
    }
    Ok((graph, act))
}
