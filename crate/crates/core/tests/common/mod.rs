#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use likelic::graph::{ContextGraph, EdgeKind, VertexId};
use likelic::Likeliness;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn grade(g: u8) -> Likeliness {
    Likeliness::new(g as i64).unwrap()
}

/// Implication-only graph on `n` vertices `v0..`, each ordered pair present
/// with probability `p`, grades uniform over 0..=6.
pub fn random_implications(rng: &mut impl Rng, n: usize, p: f64) -> ContextGraph {
    let mut g = ContextGraph::new();
    let ids: Vec<_> = (0..n).map(|i| g.add_vertex(&format!("v{i}")).unwrap()).collect();
    for &a in &ids {
        for &b in &ids {
            if a != b && rng.gen_bool(p) {
                g.add_implication(a, b, grade(rng.gen_range(0..=6))).unwrap();
            }
        }
    }
    g
}

/// Same edge set inserted in a shuffled order, with vertices numbered in a
/// shuffled order too.
pub fn reshuffled(rng: &mut impl Rng, g: &ContextGraph) -> ContextGraph {
    let mut labels: Vec<&str> = g.vertices().map(|v| g.label(v)).collect();
    labels.shuffle(rng);
    let mut edges: Vec<_> = g.implications().collect();
    edges.shuffle(rng);
    let mut h = ContextGraph::new();
    for l in labels {
        h.add_vertex(l).unwrap();
    }
    for (s, d, l) in edges {
        let (s2, d2) = (h.vertex(g.label(s)).unwrap(), h.vertex(g.label(d)).unwrap());
        h.add_implication(s2, d2, l).unwrap();
    }
    for (v, l) in g.facts().iter() {
        let v2 = h.vertex(g.label(v)).unwrap();
        h.set_fact(v2, l).unwrap();
    }
    h
}

/// Up to `max_n` vertices with unique lowercase labels, implication and
/// structural edges, and a sprinkling of facts.
pub fn random_context(rng: &mut impl Rng, max_n: usize) -> ContextGraph {
    let n = rng.gen_range(0..=max_n);
    let mut labels = BTreeSet::new();
    while labels.len() < n {
        let len = rng.gen_range(1..=6);
        let label: String = (0..len).map(|_| rng.gen_range(b'a'..=b'z') as char).collect();
        labels.insert(label);
    }
    let mut labels: Vec<_> = labels.into_iter().collect();
    labels.shuffle(rng);
    let mut g = ContextGraph::new();
    let ids: Vec<_> = labels.iter().map(|l| g.add_vertex(l).unwrap()).collect();
    for &a in &ids {
        for &b in &ids {
            if a == b {
                continue;
            }
            if rng.gen_bool(0.15) {
                g.add_implication(a, b, grade(rng.gen_range(0..=6))).unwrap();
            }
            if rng.gen_bool(0.05) {
                let kind = [EdgeKind::Is0, EdgeKind::Subj1, EdgeKind::Obj2][rng.gen_range(0..3)];
                g.add_structural(a, b, kind).unwrap();
            }
        }
        if rng.gen_bool(0.2) {
            g.set_fact(a, grade(rng.gen_range(0..=6))).unwrap();
        }
    }
    g
}

/// Vertices reachable from `source` over implication edges, excluding it.
pub fn reachable(g: &ContextGraph, source: VertexId) -> BTreeSet<VertexId> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for (w, _) in g.out_implications(v) {
            if w != source && seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    seen
}
