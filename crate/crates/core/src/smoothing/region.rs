use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, GraphError, GraphPoint, NodeId, ReebGraph};
use crate::rational::Rational;
use crate::tree::Segment;

use super::SmoothedReeb;

/// The monotone path π({x} × [−ε, ε]) in R^ε.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathNeighborhood {
    pub center: GraphPoint,
    pub low: Rational,
    pub high: Rational,
    /// Images at the bottom, the center, each critical height crossed, and the top.
    pub points: Vec<GraphPoint>,
    pub segments: Vec<Segment>,
}

impl SmoothedReeb {
    pub fn path_neighborhood(&self, x: GraphPoint) -> Result<PathNeighborhood> {
        self.source().check_point(&x)?;
        let fx = self.source().point_value(&x);
        let eps = self.epsilon();
        let (low, high) = (fx - eps, fx + eps);
        let center = self.project_unchecked(x, Rational::ZERO);
        if eps.is_zero() {
            return Ok(PathNeighborhood { center, low, high, points: vec![center], segments: vec![] });
        }
        let mut breaks = vec![low];
        breaks.extend(self.critical_heights().iter().copied().filter(|&c| low < c && c < high));
        breaks.push(fx);
        breaks.push(high);
        breaks.sort_unstable();
        breaks.dedup();
        let points = breaks.iter().map(|&h| self.project_unchecked(x, h - fx)).collect();
        let segments = breaks
            .windows(2)
            .map(|w| {
                let mid = self.project_unchecked(x, w[0].midpoint(w[1]) - fx);
                let GraphPoint::Interior { edge, .. } = mid else {
                    unreachable!("gap heights map into edge interiors")
                };
                Segment { edge, from: w[0], to: w[1] }
            })
            .collect();
        Ok(PathNeighborhood { center, low, high, points, segments })
    }

    /// Whether `y` (a point of R^ε) lies on the path neighborhood of `x`.
    pub fn on_path_neighborhood(&self, x: GraphPoint, y: GraphPoint) -> Result<bool> {
        self.graph().check_point(&y)?;
        let t = self.graph().point_value(&y) - self.source().point_value(&x);
        if t.abs() > self.epsilon() {
            return Ok(false);
        }
        Ok(self.projection(x, t)? == self.graph().canonical(y))
    }
}

/// A finite union of nodes and closed edge pieces.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Region {
    pub nodes: Vec<NodeId>,
    pub pieces: Vec<(EdgeId, Rational, Rational)>,
}

impl Region {
    pub fn contains(&self, graph: &ReebGraph, p: &GraphPoint) -> bool {
        match *p {
            GraphPoint::Node(_) => {
                let c = graph.canonical(*p);
                self.nodes.iter().any(|&w| graph.canonical(GraphPoint::Node(w)) == c)
            }
            GraphPoint::Interior { edge, value } => self
                .pieces
                .iter()
                .any(|&(e, a, b)| e == edge && a <= value && value <= b),
        }
    }

    /// Nodes, piece endpoints, and `k - 1` evenly spaced interior points per piece.
    pub fn sample_points(&self, graph: &ReebGraph, k: i128) -> Vec<GraphPoint> {
        let mut out: Vec<GraphPoint> = self.nodes.iter().map(|&v| GraphPoint::Node(v)).collect();
        let mut seen: HashSet<GraphPoint> = out.iter().copied().collect();
        for &(e, a, b) in &self.pieces {
            for i in 0..=k.max(1) {
                let h = a + (b - a) * Rational::new(i, k.max(1));
                if let Some(p) = graph.point_on_edge(e, h) {
                    if seen.insert(p) {
                        out.push(p);
                    }
                }
            }
        }
        out
    }
}

/// N_ε(u): points joined to u by a path of height at most ε that stays
/// entirely above or entirely below f(u).
pub fn n_eps_region(graph: &ReebGraph, u: NodeId, epsilon: Rational) -> Result<Region> {
    if u.0 >= graph.node_count() {
        return Err(GraphError::UnknownNode(u.to_string()).into());
    }
    if epsilon.is_negative() {
        return Err(Error::NegativeEpsilon(epsilon));
    }
    let fu = graph.value(u);
    let mut nodes = BTreeMap::new();
    let mut pieces: Vec<(EdgeId, Rational, Rational)> = Vec::new();
    for (a, b) in [(fu, fu + epsilon), (fu - epsilon, fu)] {
        let mut seen = HashSet::new();
        let mut done_edges = HashSet::new();
        let mut stack = vec![u];
        seen.insert(u);
        while let Some(v) = stack.pop() {
            nodes.insert(v, ());
            for &e in graph.incident(v) {
                if !done_edges.insert(e) {
                    continue;
                }
                let (lo, hi) = graph.edge_range(e);
                let piece = (e, lo.max(a), hi.min(b));
                if (piece.1 < piece.2 || graph.is_zero_length(e)) && !pieces.contains(&piece) {
                    pieces.push(piece);
                }
                let w = graph.other(e, v);
                let fw = graph.value(w);
                if a <= fw && fw <= b && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
    }
    pieces.sort();
    Ok(Region { nodes: nodes.into_keys().collect(), pieces })
}
