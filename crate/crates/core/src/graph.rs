//! The Reeb graph data model: nodes with exact values, undirected edges whose
//! orientation is derived from the values, and superposition pairs that stand
//! in for degenerate nodes.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

/// Index of a node inside one [`ReebGraph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub usize);

/// Index of an edge inside one [`ReebGraph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeClass {
    Minimum,
    Maximum,
    Join,
    Split,
    Regular,
    Degenerate,
}

impl NodeClass {
    /// Pure function of (up-degree, down-degree).
    pub fn from_degrees(up: usize, down: usize) -> NodeClass {
        match (up, down) {
            (0, 1) => NodeClass::Maximum,
            (1, 0) => NodeClass::Minimum,
            (1, 1) => NodeClass::Regular,
            (u, 1) if u > 1 => NodeClass::Split,
            (1, d) if d > 1 => NodeClass::Join,
            _ => NodeClass::Degenerate,
        }
    }

    /// +1 for classes that move up under smoothing, -1 for those that move down.
    pub fn smoothing_direction(self) -> Option<i8> {
        match self {
            NodeClass::Maximum | NodeClass::Split => Some(1),
            NodeClass::Minimum | NodeClass::Join => Some(-1),
            _ => None,
        }
    }

    pub fn is_critical(self) -> bool {
        !matches!(self, NodeClass::Regular)
    }
}

impl fmt::Display for NodeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NodeClass::Minimum => "minimum",
            NodeClass::Maximum => "maximum",
            NodeClass::Join => "join",
            NodeClass::Split => "split",
            NodeClass::Regular => "regular",
            NodeClass::Degenerate => "degenerate",
        };
        f.write_str(s)
    }
}

/// A point of the geometric realization: a node, or a point strictly inside an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphPoint {
    Node(NodeId),
    Interior { edge: EdgeId, value: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph is invalid: {0}")]
    Invalid(ValidationReport),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("unknown edge {0}")]
    UnknownEdge(usize),
    #[error("point is not on the graph: {0}")]
    BadPoint(String),
    #[error("operation requires a tree")]
    NotATree,
}

/// An unvalidated graph as read from a document.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawGraph {
    pub nodes: Vec<(String, Rational)>,
    pub edges: Vec<(String, String)>,
    pub superpositions: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Empty,
    DuplicateNode { id: String },
    UnknownEndpoint { edge: usize, id: String },
    SelfLoop { edge: usize, id: String },
    Disconnected { components: usize, example: Vec<String> },
    ValueCollision { a: String, b: String, value: Rational },
    FlatEdge { edge: usize, a: String, b: String },
    BadSuperposition { join: String, split: String, reason: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "graph has no nodes"),
            Violation::DuplicateNode { id } => write!(f, "duplicate node id `{id}`"),
            Violation::UnknownEndpoint { edge, id } => {
                write!(f, "edge #{edge} references unknown node `{id}`")
            }
            Violation::SelfLoop { edge, id } => write!(f, "edge #{edge} is a self-loop at `{id}`"),
            Violation::Disconnected { components, example } => write!(
                f,
                "graph has {components} connected components (one per: {})",
                example.join(", ")
            ),
            Violation::ValueCollision { a, b, value } => {
                write!(f, "nodes `{a}` and `{b}` share value {value} outside a superposition")
            }
            Violation::FlatEdge { edge, a, b } => write!(
                f,
                "edge #{edge} between `{a}` and `{b}` has equal endpoint values but is not a superposition"
            ),
            Violation::BadSuperposition { join, split, reason } => {
                write!(f, "superposition (`{join}`, `{split}`): {reason}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Valid apart from value collisions between unrelated nodes.
    pub fn is_structurally_valid(&self) -> bool {
        self.violations
            .iter()
            .all(|v| matches!(v, Violation::ValueCollision { .. }))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every Reeb graph invariant of a raw graph.
pub fn validate(raw: &RawGraph) -> ValidationReport {
    let mut violations = Vec::new();
    if raw.nodes.is_empty() {
        violations.push(Violation::Empty);
        return ValidationReport { violations };
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, (name, _)) in raw.nodes.iter().enumerate() {
        if index.insert(name.as_str(), i).is_some() {
            violations.push(Violation::DuplicateNode { id: name.clone() });
        }
    }
    let mut pair_of: HashMap<usize, usize> = HashMap::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (j, s) in &raw.superpositions {
        match (index.get(j.as_str()), index.get(s.as_str())) {
            (Some(&a), Some(&b)) => {
                if a == b {
                    violations.push(Violation::BadSuperposition {
                        join: j.clone(),
                        split: s.clone(),
                        reason: "members must be distinct".into(),
                    });
                } else if pair_of.contains_key(&a) || pair_of.contains_key(&b) {
                    violations.push(Violation::BadSuperposition {
                        join: j.clone(),
                        split: s.clone(),
                        reason: "a node belongs to more than one superposition".into(),
                    });
                } else if raw.nodes[a].1 != raw.nodes[b].1 {
                    violations.push(Violation::BadSuperposition {
                        join: j.clone(),
                        split: s.clone(),
                        reason: "members must share their value".into(),
                    });
                } else {
                    pair_of.insert(a, b);
                    pair_of.insert(b, a);
                    pairs.push((a, b));
                }
            }
            _ => violations.push(Violation::BadSuperposition {
                join: j.clone(),
                split: s.clone(),
                reason: "unknown member".into(),
            }),
        }
    }

    let mut resolved: Vec<(usize, usize)> = Vec::new();
    let mut pair_edge_count: HashMap<(usize, usize), usize> = HashMap::new();
    for (k, (a, b)) in raw.edges.iter().enumerate() {
        let (ia, ib) = match (index.get(a.as_str()), index.get(b.as_str())) {
            (Some(&x), Some(&y)) => (x, y),
            (x, _) => {
                let id = if x.is_none() { a } else { b };
                violations.push(Violation::UnknownEndpoint { edge: k, id: id.clone() });
                continue;
            }
        };
        if ia == ib {
            violations.push(Violation::SelfLoop { edge: k, id: a.clone() });
            continue;
        }
        if raw.nodes[ia].1 == raw.nodes[ib].1 {
            if pair_of.get(&ia) == Some(&ib) {
                *pair_edge_count.entry((ia.min(ib), ia.max(ib))).or_default() += 1;
            } else {
                violations.push(Violation::FlatEdge { edge: k, a: a.clone(), b: b.clone() });
            }
        }
        resolved.push((ia, ib));
    }
    for &(j, s) in &pairs {
        let c = pair_edge_count.get(&(j.min(s), j.max(s))).copied().unwrap_or(0);
        let jn = &raw.nodes[j].0;
        let sn = &raw.nodes[s].0;
        if c != 1 {
            violations.push(Violation::BadSuperposition {
                join: jn.clone(),
                split: sn.clone(),
                reason: format!("members must be joined by exactly one edge, found {c}"),
            });
            continue;
        }
        // join-part: nothing above except the split-part; split-part: nothing below except the join-part
        let value = raw.nodes[j].1;
        let j_up = resolved
            .iter()
            .filter(|&&(x, y)| (x == j || y == j) && raw.nodes[if x == j { y } else { x }].1 > value)
            .count();
        let s_down = resolved
            .iter()
            .filter(|&&(x, y)| (x == s || y == s) && raw.nodes[if x == s { y } else { x }].1 < value)
            .count();
        if j_up > 0 || s_down > 0 {
            violations.push(Violation::BadSuperposition {
                join: jn.clone(),
                split: sn.clone(),
                reason: "join-part may only have edges below, split-part only edges above".into(),
            });
        }
    }

    // connectivity
    let n = raw.nodes.len();
    let mut uf = UnionFind::new(n);
    for &(a, b) in &resolved {
        uf.union(a, b);
    }
    let mut roots: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..n {
        roots.entry(uf.find(i)).or_insert(i);
    }
    if roots.len() > 1 {
        violations.push(Violation::Disconnected {
            components: roots.len(),
            example: roots.values().map(|&i| raw.nodes[i].0.clone()).collect(),
        });
    }

    // injectivity outside superposition pairs
    let mut by_value: BTreeMap<Rational, Vec<usize>> = BTreeMap::new();
    for (i, (_, v)) in raw.nodes.iter().enumerate() {
        by_value.entry(*v).or_default().push(i);
    }
    for (value, members) in by_value {
        for x in 0..members.len() {
            for y in x + 1..members.len() {
                let (a, b) = (members[x], members[y]);
                if pair_of.get(&a) != Some(&b) {
                    violations.push(Violation::ValueCollision {
                        a: raw.nodes[a].0.clone(),
                        b: raw.nodes[b].0.clone(),
                        value,
                    });
                }
            }
        }
    }
    ValidationReport { violations }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// A validated Reeb graph. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReebGraph {
    names: Vec<String>,
    values: Vec<Rational>,
    edges: Vec<(NodeId, NodeId)>,
    superpositions: Vec<(NodeId, NodeId)>,
    adjacency: Vec<Vec<EdgeId>>,
    partner: Vec<Option<NodeId>>,
}

/// How strictly [`ReebGraph::from_raw`] treats value collisions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Injectivity {
    /// Reject any two nodes sharing a value outside a superposition pair.
    Strict,
    /// Allow collisions between unrelated nodes (used for constructed graphs).
    Relaxed,
}

impl ReebGraph {
    pub fn from_raw(raw: &RawGraph, injectivity: Injectivity) -> Result<Self, GraphError> {
        let report = validate(raw);
        let ok = match injectivity {
            Injectivity::Strict => report.is_valid(),
            Injectivity::Relaxed => report.is_structurally_valid(),
        };
        if !ok {
            return Err(GraphError::Invalid(report));
        }
        let index: HashMap<&str, usize> =
            raw.nodes.iter().enumerate().map(|(i, (n, _))| (n.as_str(), i)).collect();
        let names = raw.nodes.iter().map(|(n, _)| n.clone()).collect();
        let values = raw.nodes.iter().map(|(_, v)| *v).collect();
        let edges = raw
            .edges
            .iter()
            .map(|(a, b)| (NodeId(index[a.as_str()]), NodeId(index[b.as_str()])))
            .collect();
        let sup = raw
            .superpositions
            .iter()
            .map(|(j, s)| (NodeId(index[j.as_str()]), NodeId(index[s.as_str()])))
            .collect();
        Ok(Self::assemble(names, values, edges, sup))
    }

    /// Builds from indices, validating structure (collisions allowed).
    pub fn from_parts(
        names: Vec<String>,
        values: Vec<Rational>,
        edges: Vec<(NodeId, NodeId)>,
        superpositions: Vec<(NodeId, NodeId)>,
    ) -> Result<Self, GraphError> {
        let raw = RawGraph {
            nodes: names.iter().cloned().zip(values.iter().copied()).collect(),
            edges: edges
                .iter()
                .map(|(a, b)| (names[a.0].clone(), names[b.0].clone()))
                .collect(),
            superpositions: superpositions
                .iter()
                .map(|(a, b)| (names[a.0].clone(), names[b.0].clone()))
                .collect(),
        };
        let report = validate(&raw);
        if !report.is_structurally_valid() {
            return Err(GraphError::Invalid(report));
        }
        Ok(Self::assemble(names, values, edges, superpositions))
    }

    fn assemble(
        names: Vec<String>,
        values: Vec<Rational>,
        edges: Vec<(NodeId, NodeId)>,
        superpositions: Vec<(NodeId, NodeId)>,
    ) -> Self {
        let n = values.len();
        let mut adjacency = vec![Vec::new(); n];
        for (k, &(a, b)) in edges.iter().enumerate() {
            adjacency[a.0].push(EdgeId(k));
            adjacency[b.0].push(EdgeId(k));
        }
        let mut partner = vec![None; n];
        for &(j, s) in &superpositions {
            partner[j.0] = Some(s);
            partner[s.0] = Some(j);
        }
        ReebGraph { names, values, edges, superpositions, adjacency, partner }
    }

    pub fn to_raw(&self) -> RawGraph {
        RawGraph {
            nodes: self.names.iter().cloned().zip(self.values.iter().copied()).collect(),
            edges: self
                .edges
                .iter()
                .map(|(a, b)| (self.names[a.0].clone(), self.names[b.0].clone()))
                .collect(),
            superpositions: self
                .superpositions
                .iter()
                .map(|(a, b)| (self.names[a.0].clone(), self.names[b.0].clone()))
                .collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.values.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.values.len()).map(NodeId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn name(&self, v: NodeId) -> &str {
        &self.names[v.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.names.iter().position(|n| n == name).map(NodeId)
    }

    pub fn value(&self, v: NodeId) -> Rational {
        self.values[v.0]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn edge(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.edges[e.0]
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn superpositions(&self) -> &[(NodeId, NodeId)] {
        &self.superpositions
    }

    pub fn partner(&self, v: NodeId) -> Option<NodeId> {
        self.partner[v.0]
    }

    pub fn is_join_part(&self, v: NodeId) -> bool {
        self.superpositions.iter().any(|&(j, _)| j == v)
    }

    pub fn incident(&self, v: NodeId) -> &[EdgeId] {
        &self.adjacency[v.0]
    }

    pub fn other(&self, e: EdgeId, v: NodeId) -> NodeId {
        let (a, b) = self.edges[e.0];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Whether `e` is the zero-length edge of a superposition pair.
    pub fn is_zero_length(&self, e: EdgeId) -> bool {
        let (a, b) = self.edges[e.0];
        self.values[a.0] == self.values[b.0]
    }

    /// Endpoints ordered (lower, upper); zero-length edges put the join-part first.
    pub fn oriented(&self, e: EdgeId) -> (NodeId, NodeId) {
        let (a, b) = self.edges[e.0];
        match self.values[a.0].cmp(&self.values[b.0]) {
            std::cmp::Ordering::Less => (a, b),
            std::cmp::Ordering::Greater => (b, a),
            std::cmp::Ordering::Equal => {
                if self.is_join_part(a) {
                    (a, b)
                } else {
                    (b, a)
                }
            }
        }
    }

    pub fn edge_range(&self, e: EdgeId) -> (Rational, Rational) {
        let (lo, hi) = self.oriented(e);
        (self.values[lo.0], self.values[hi.0])
    }

    /// Whether the other end of `e` lies above `v`.
    pub fn goes_up(&self, e: EdgeId, v: NodeId) -> bool {
        self.oriented(e).0 == v
    }

    pub fn up_edges(&self, v: NodeId) -> impl Iterator<Item = EdgeId> + '_ {
        self.adjacency[v.0].iter().copied().filter(move |&e| self.goes_up(e, v))
    }

    pub fn down_edges(&self, v: NodeId) -> impl Iterator<Item = EdgeId> + '_ {
        self.adjacency[v.0].iter().copied().filter(move |&e| !self.goes_up(e, v))
    }

    pub fn up_degree(&self, v: NodeId) -> usize {
        self.up_edges(v).count()
    }

    pub fn down_degree(&self, v: NodeId) -> usize {
        self.down_edges(v).count()
    }

    pub fn classify(&self, v: NodeId) -> NodeClass {
        NodeClass::from_degrees(self.up_degree(v), self.down_degree(v))
    }

    pub fn min_value(&self) -> Rational {
        self.values.iter().copied().min().unwrap_or(Rational::ZERO)
    }

    pub fn max_value(&self) -> Rational {
        self.values.iter().copied().max().unwrap_or(Rational::ZERO)
    }

    /// First Betti number of the (connected) graph.
    pub fn betti_one(&self) -> usize {
        (self.edges.len() + 1).saturating_sub(self.values.len())
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.values.len()
    }

    pub fn leaves(&self) -> Vec<NodeId> {
        self.nodes().filter(|&v| self.adjacency[v.0].len() == 1).collect()
    }

    pub fn point_value(&self, p: &GraphPoint) -> Rational {
        match p {
            GraphPoint::Node(v) => self.values[v.0],
            GraphPoint::Interior { value, .. } => *value,
        }
    }

    /// Checks that a point lies on this graph.
    pub fn check_point(&self, p: &GraphPoint) -> Result<(), GraphError> {
        match *p {
            GraphPoint::Node(v) if v.0 < self.values.len() => Ok(()),
            GraphPoint::Node(v) => Err(GraphError::BadPoint(format!("node {v}"))),
            GraphPoint::Interior { edge, value } => {
                if edge.0 >= self.edges.len() {
                    return Err(GraphError::UnknownEdge(edge.0));
                }
                let (lo, hi) = self.edge_range(edge);
                if lo < value && value < hi {
                    Ok(())
                } else {
                    Err(GraphError::BadPoint(format!(
                        "value {value} not strictly inside edge {edge} = [{lo}, {hi}]"
                    )))
                }
            }
        }
    }

    /// Identifies the two members of a superposition pair (they are one point).
    pub fn canonical(&self, p: GraphPoint) -> GraphPoint {
        match p {
            GraphPoint::Node(v) => match self.partner[v.0] {
                Some(w) if !self.is_join_part(v) => GraphPoint::Node(w),
                _ => GraphPoint::Node(v),
            },
            other => other,
        }
    }

    /// The point of edge `e` at `value` (an endpoint if the value hits one).
    pub fn point_on_edge(&self, e: EdgeId, value: Rational) -> Option<GraphPoint> {
        let (lo, hi) = self.oriented(e);
        let (a, b) = (self.values[lo.0], self.values[hi.0]);
        if value == a {
            Some(GraphPoint::Node(lo))
        } else if value == b {
            Some(GraphPoint::Node(hi))
        } else if a < value && value < b {
            Some(GraphPoint::Interior { edge: e, value })
        } else {
            None
        }
    }

    /// All points at a given level, canonicalized and deduplicated.
    pub fn points_at_level(&self, level: Rational) -> Vec<GraphPoint> {
        let mut out: Vec<GraphPoint> = Vec::new();
        let mut seen = HashSet::new();
        for v in self.nodes() {
            if self.values[v.0] == level {
                let p = self.canonical(GraphPoint::Node(v));
                if seen.insert(p) {
                    out.push(p);
                }
            }
        }
        for e in self.edge_ids() {
            let (a, b) = self.edge_range(e);
            if a < level && level < b {
                out.push(GraphPoint::Interior { edge: e, value: level });
            }
        }
        out
    }

    /// Replaces every degenerate node by a superposition pair.
    pub fn normalize_superpositions(&self) -> (ReebGraph, NormalizeMap) {
        let n = self.values.len();
        let mut names = self.names.clone();
        let mut values = self.values.clone();
        let mut edges = self.edges.clone();
        let mut sup = self.superpositions.clone();
        let mut map = NormalizeMap { parts: (0..n).map(|i| (NodeId(i), NodeId(i))).collect() };
        let taken: HashSet<&str> = self.names.iter().map(String::as_str).collect();
        for v in self.nodes() {
            let (up, down) = (self.up_degree(v), self.down_degree(v));
            let degenerate = (up >= 2 && down >= 2) || (up == 0 && down >= 2) || (down == 0 && up >= 2);
            if !degenerate || self.partner[v.0].is_some() {
                continue;
            }
            let split = NodeId(names.len());
            let mut split_name = format!("{}^s", self.names[v.0]);
            while taken.contains(split_name.as_str()) {
                split_name.push('\'');
            }
            names.push(split_name);
            values.push(self.values[v.0]);
            for e in self.up_edges(v).collect::<Vec<_>>() {
                let (a, b) = edges[e.0];
                edges[e.0] = if a == v { (split, b) } else { (a, split) };
            }
            edges.push((v, split));
            sup.push((v, split));
            map.parts[v.0] = (v, split);
        }
        let g = ReebGraph::assemble(names, values, edges, sup);
        (g, map)
    }

    /// True when no node classifies as degenerate.
    pub fn is_normalized(&self) -> bool {
        self.nodes().all(|v| self.classify(v) != NodeClass::Degenerate || self.node_count() == 1)
    }

    /// Merges superposition pairs and contracts regular nodes, giving the
    /// combinatorial shape of the geometric realization.
    pub fn geometric_form(&self) -> GeometricForm {
        let n = self.values.len();
        let mut rep: Vec<usize> = (0..n).collect();
        for &(j, s) in &self.superpositions {
            rep[s.0] = j.0;
        }
        // multigraph over representatives, dropping zero-length edges
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut ends: Vec<(usize, usize)> = Vec::new();
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            if self.is_zero_length(EdgeId(k)) {
                continue;
            }
            let (x, y) = (rep[a.0], rep[b.0]);
            adj[x].push(ends.len());
            adj[y].push(ends.len());
            ends.push((x, y));
        }
        let mut alive_edge = vec![true; ends.len()];
        let mut alive_node: Vec<bool> = (0..n).map(|i| rep[i] == i).collect();
        for v in 0..n {
            if !alive_node[v] {
                continue;
            }
            let live: Vec<usize> = adj[v].iter().copied().filter(|&e| alive_edge[e]).collect();
            if live.len() != 2 {
                continue;
            }
            let other = |e: usize| if ends[e].0 == v { ends[e].1 } else { ends[e].0 };
            let (p, q) = (other(live[0]), other(live[1]));
            let (fp, fq, fv) = (self.values[p], self.values[q], self.values[v]);
            let regular = (fp < fv && fv < fq) || (fq < fv && fv < fp);
            if !regular {
                continue;
            }
            alive_edge[live[0]] = false;
            alive_edge[live[1]] = false;
            alive_node[v] = false;
            let id = ends.len();
            ends.push((p, q));
            alive_edge.push(true);
            adj.push(Vec::new());
            adj[p].push(id);
            adj[q].push(id);
        }
        let kept: Vec<usize> = (0..n).filter(|&i| alive_node[i]).collect();
        let pos: HashMap<usize, usize> = kept.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let values = kept.iter().map(|&v| self.values[v]).collect();
        let mut edges: Vec<(usize, usize)> = ends
            .iter()
            .enumerate()
            .filter(|(k, _)| alive_edge[*k])
            .map(|(_, &(a, b))| {
                let (x, y) = (pos[&a], pos[&b]);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort();
        GeometricForm { values, edges }
    }
}

/// Where each input node went during normalization: (join-part, split-part).
/// Non-degenerate nodes map to themselves twice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizeMap {
    pub parts: Vec<(NodeId, NodeId)>,
}

impl NormalizeMap {
    pub fn was_split(&self, v: NodeId) -> bool {
        let (a, b) = self.parts[v.0];
        a != b
    }
}

/// Reduced combinatorial shape used for isomorphism testing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeometricForm {
    pub values: Vec<Rational>,
    pub edges: Vec<(usize, usize)>,
}

/// Convenience builder used by constructions and tests.
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    names: Vec<String>,
    values: Vec<Rational>,
    edges: Vec<(NodeId, NodeId)>,
    superpositions: Vec<(NodeId, NodeId)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(&mut self, name: impl Into<String>, value: impl Into<Rational>) -> NodeId {
        self.names.push(name.into());
        self.values.push(value.into());
        NodeId(self.values.len() - 1)
    }

    pub fn edge(&mut self, a: NodeId, b: NodeId) -> &mut Self {
        self.edges.push((a, b));
        self
    }

    pub fn superposition(&mut self, join: NodeId, split: NodeId) -> &mut Self {
        self.superpositions.push((join, split));
        self
    }

    pub fn build(&self) -> Result<ReebGraph, GraphError> {
        ReebGraph::from_parts(
            self.names.clone(),
            self.values.clone(),
            self.edges.clone(),
            self.superpositions.clone(),
        )
    }
}
