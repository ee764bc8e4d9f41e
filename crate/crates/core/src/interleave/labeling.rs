use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{NodeClass, NodeId, NormalizeMap, ReebGraph};

/// λ: {1..N} → nodes. Label `ℓ` is stored at index `ℓ - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Labeling {
    assignment: Vec<NodeId>,
}

impl Labeling {
    pub fn new(assignment: Vec<NodeId>) -> Self {
        Labeling { assignment }
    }

    /// Builds from (label, node) pairs; labels must be exactly 1..N.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, NodeId)>) -> Result<Self> {
        let mut map: HashMap<usize, NodeId> = HashMap::new();
        for (label, node) in pairs {
            if label == 0 {
                return Err(Error::Labeling("labels start at 1".into()));
            }
            if let Some(prev) = map.insert(label, node) {
                if prev != node {
                    return Err(Error::Labeling(format!("label {label} assigned twice")));
                }
            }
        }
        let n = map.len();
        let mut assignment = Vec::with_capacity(n);
        for label in 1..=n {
            match map.get(&label) {
                Some(&v) => assignment.push(v),
                None => return Err(Error::Labeling(format!("labels are not 1..{n}: {label} missing"))),
            }
        }
        Ok(Labeling { assignment })
    }

    /// Every node labeled, in node order.
    pub fn full(graph: &ReebGraph) -> Self {
        Labeling { assignment: graph.nodes().collect() }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Node of label `label` (1-based).
    pub fn node(&self, label: usize) -> NodeId {
        self.assignment[label - 1]
    }

    /// (label, node) pairs in label order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, NodeId)> + '_ {
        self.assignment.iter().enumerate().map(|(i, &v)| (i + 1, v))
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.assignment
    }

    pub fn labels_of(&self, v: NodeId) -> Vec<usize> {
        self.iter().filter(|&(_, w)| w == v).map(|(l, _)| l).collect()
    }

    pub fn labeled_nodes(&self) -> HashSet<NodeId> {
        self.assignment.iter().copied().collect()
    }

    pub fn check_nodes(&self, graph: &ReebGraph) -> Result<()> {
        match self.assignment.iter().find(|v| v.0 >= graph.node_count()) {
            Some(v) => Err(Error::Labeling(format!("label points at missing node {v}"))),
            None => Ok(()),
        }
    }

    pub fn with_label(&self, node: NodeId) -> Labeling {
        let mut assignment = self.assignment.clone();
        assignment.push(node);
        Labeling { assignment }
    }

    /// Carries labels across superposition normalization. A label on a split
    /// degenerate node goes to its maximum or minimum part when it has one,
    /// otherwise to the join-part.
    pub fn through_normalization(&self, normalized: &ReebGraph, map: &NormalizeMap) -> Labeling {
        let assignment = self
            .assignment
            .iter()
            .map(|&v| {
                let (join, split) = map.parts[v.0];
                if join == split {
                    return v;
                }
                match (normalized.classify(join), normalized.classify(split)) {
                    (_, NodeClass::Maximum) => split,
                    (NodeClass::Minimum, _) => join,
                    _ => join,
                }
            })
            .collect();
        Labeling { assignment }
    }
}

/// Why two labelings are not consistent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Inconsistency {
    pub label: usize,
    pub first: NodeClass,
    pub second: NodeClass,
}

fn direction(class: NodeClass) -> Option<i8> {
    class.smoothing_direction()
}

/// The first label whose two nodes do not move the same way under smoothing,
/// or whose node is regular or degenerate.
pub fn find_inconsistency(
    g1: &ReebGraph,
    l1: &Labeling,
    g2: &ReebGraph,
    l2: &Labeling,
) -> Result<Option<Inconsistency>> {
    if l1.len() != l2.len() {
        return Err(Error::LabelMismatch(format!("{} labels vs {} labels", l1.len(), l2.len())));
    }
    l1.check_nodes(g1)?;
    l2.check_nodes(g2)?;
    for ((label, a), (_, b)) in l1.iter().zip(l2.iter()) {
        let (ca, cb) = (g1.classify(a), g2.classify(b));
        match (direction(ca), direction(cb)) {
            (Some(x), Some(y)) if x == y => {}
            _ => return Ok(Some(Inconsistency { label, first: ca, second: cb })),
        }
    }
    Ok(None)
}

pub fn check_consistent(g1: &ReebGraph, l1: &Labeling, g2: &ReebGraph, l2: &Labeling) -> Result<bool> {
    Ok(find_inconsistency(g1, l1, g2, l2)?.is_none())
}

/// Paths between labeled nodes are compared as node sequences, so parallel
/// edges between two labeled nodes count as one path.
pub fn check_spanning(graph: &ReebGraph, labeling: &Labeling) -> bool {
    let labeled = labeling.labeled_nodes();
    if labeled.is_empty() {
        return graph.edge_count() == 0;
    }
    let n = graph.node_count();
    let mut neighbors: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for v in graph.nodes() {
        let mut list: Vec<NodeId> = graph.incident(v).iter().map(|&e| graph.other(e, v)).collect();
        list.sort_unstable();
        list.dedup();
        neighbors[v.0] = list;
    }
    let mut covered: HashSet<(NodeId, NodeId)> = HashSet::new();
    let mut paths: HashMap<(NodeId, NodeId), usize> = HashMap::new();
    let mut starts: Vec<NodeId> = labeled.iter().copied().collect();
    starts.sort_unstable();
    for &u in &starts {
        let mut on_path = vec![false; n];
        on_path[u.0] = true;
        let mut path = vec![u];
        if !walk(u, &neighbors, &labeled, &mut on_path, &mut path, &mut paths, &mut covered) {
            return false;
        }
    }
    graph.edges().iter().all(|&(a, b)| covered.contains(&(a.min(b), a.max(b))))
}

fn walk(
    at: NodeId,
    neighbors: &[Vec<NodeId>],
    labeled: &HashSet<NodeId>,
    on_path: &mut [bool],
    path: &mut Vec<NodeId>,
    paths: &mut HashMap<(NodeId, NodeId), usize>,
    covered: &mut HashSet<(NodeId, NodeId)>,
) -> bool {
    for &w in &neighbors[at.0] {
        if on_path[w.0] {
            continue;
        }
        if labeled.contains(&w) {
            let u = path[0];
            // each path is found once from each end
            if u < w {
                let count = paths.entry((u, w)).or_insert(0);
                *count += 1;
                if *count > 1 {
                    return false;
                }
            }
            for pair in path.windows(2) {
                covered.insert((pair[0].min(pair[1]), pair[0].max(pair[1])));
            }
            covered.insert((at.min(w), at.max(w)));
            continue;
        }
        on_path[w.0] = true;
        path.push(w);
        let ok = walk(w, neighbors, labeled, on_path, path, paths, covered);
        path.pop();
        on_path[w.0] = false;
        if !ok {
            return false;
        }
    }
    true
}
