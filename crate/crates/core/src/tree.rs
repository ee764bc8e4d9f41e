//! Unique paths in trees between arbitrary points of the geometric realization.

use crate::graph::{EdgeId, GraphError, GraphPoint, NodeId, ReebGraph};
use crate::rational::Rational;

/// A piece of an edge traversed from value `from` to value `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Segment {
    pub edge: EdgeId,
    pub from: Rational,
    pub to: Rational,
}

impl Segment {
    pub fn low(&self) -> Rational {
        self.from.min(self.to)
    }

    pub fn high(&self) -> Rational {
        self.from.max(self.to)
    }
}

/// Rooted view of a tree for path queries.
#[derive(Clone, Debug)]
pub struct TreeIndex<'g> {
    graph: &'g ReebGraph,
    parent: Vec<Option<EdgeId>>,
    depth: Vec<usize>,
}

impl<'g> TreeIndex<'g> {
    pub fn new(graph: &'g ReebGraph) -> Result<Self, GraphError> {
        if !graph.is_tree() {
            return Err(GraphError::NotATree);
        }
        let n = graph.node_count();
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        let mut stack = vec![NodeId(0)];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &e in graph.incident(v) {
                let w = graph.other(e, v);
                if !seen[w.0] {
                    seen[w.0] = true;
                    parent[w.0] = Some(e);
                    depth[w.0] = depth[v.0] + 1;
                    stack.push(w);
                }
            }
        }
        Ok(TreeIndex { graph, parent, depth })
    }

    pub fn graph(&self) -> &'g ReebGraph {
        self.graph
    }

    /// Edges from `u` to `w` as (edge, from-node, to-node) steps.
    pub fn node_path(&self, u: NodeId, w: NodeId) -> Vec<(EdgeId, NodeId, NodeId)> {
        let g = self.graph;
        let mut front = Vec::new();
        let mut back = Vec::new();
        let (mut a, mut b) = (u, w);
        while self.depth[a.0] > self.depth[b.0] {
            let e = self.parent[a.0].unwrap();
            let p = g.other(e, a);
            front.push((e, a, p));
            a = p;
        }
        while self.depth[b.0] > self.depth[a.0] {
            let e = self.parent[b.0].unwrap();
            let p = g.other(e, b);
            back.push((e, p, b));
            b = p;
        }
        while a != b {
            let ea = self.parent[a.0].unwrap();
            let pa = g.other(ea, a);
            front.push((ea, a, pa));
            a = pa;
            let eb = self.parent[b.0].unwrap();
            let pb = g.other(eb, b);
            back.push((eb, pb, b));
            b = pb;
        }
        back.reverse();
        front.extend(back);
        front
    }

    /// The unique path from `p` to `q` as edge segments.
    pub fn path(&self, p: GraphPoint, q: GraphPoint) -> Vec<Segment> {
        let g = self.graph;
        let fv = |v: NodeId| g.value(v);
        if let (
            GraphPoint::Interior { edge: ep, value: vp },
            GraphPoint::Interior { edge: eq, value: vq },
        ) = (p, q)
        {
            if ep == eq {
                return if vp == vq {
                    Vec::new()
                } else {
                    vec![Segment { edge: ep, from: vp, to: vq }]
                };
            }
        }
        let anchor = |x: GraphPoint| match x {
            GraphPoint::Node(v) => v,
            GraphPoint::Interior { edge, .. } => g.edge(edge).0,
        };
        let (u, w) = (anchor(p), anchor(q));
        let mut steps: Vec<Segment> = self
            .node_path(u, w)
            .into_iter()
            .map(|(e, a, b)| Segment { edge: e, from: fv(a), to: fv(b) })
            .collect();
        if let GraphPoint::Interior { edge, value } = p {
            if steps.first().map(|s| s.edge) == Some(edge) {
                steps[0].from = value;
            } else {
                steps.insert(0, Segment { edge, from: value, to: fv(u) });
            }
        }
        if let GraphPoint::Interior { edge, value } = q {
            if steps.last().map(|s| s.edge) == Some(edge) {
                steps.last_mut().unwrap().to = value;
            } else {
                steps.push(Segment { edge, from: fv(w), to: value });
            }
        }
        steps
    }
}

/// Whether every non-flat segment moves in one direction.
pub fn is_monotone(path: &[Segment]) -> bool {
    let mut dir = 0i8;
    for s in path {
        let d = match s.from.cmp(&s.to) {
            std::cmp::Ordering::Less => 1,
            std::cmp::Ordering::Greater => -1,
            std::cmp::Ordering::Equal => continue,
        };
        if dir != 0 && d != dir {
            return false;
        }
        dir = d;
    }
    true
}

/// The point at `level` on a monotone path that starts at `start`.
pub fn level_point(
    graph: &ReebGraph,
    start: GraphPoint,
    path: &[Segment],
    level: Rational,
) -> Option<GraphPoint> {
    if graph.point_value(&start) == level {
        return Some(graph.canonical(start));
    }
    path.iter()
        .find(|s| s.low() <= level && level <= s.high())
        .and_then(|s| graph.point_on_edge(s.edge, level))
        .map(|p| graph.canonical(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    fn y_tree() -> (ReebGraph, [NodeId; 4]) {
        let mut b = GraphBuilder::new();
        let lo = b.node("lo", 0);
        let s = b.node("s", 2);
        let p = b.node("p", 5);
        let q = b.node("q", 6);
        b.edge(lo, s).edge(s, p).edge(s, q);
        (b.build().unwrap(), [lo, s, p, q])
    }

    #[test]
    fn path_between_leaves_turns_at_split() {
        let (g, [_, _, p, q]) = y_tree();
        let t = TreeIndex::new(&g).unwrap();
        let path = t.path(GraphPoint::Node(p), GraphPoint::Node(q));
        assert_eq!(path.len(), 2);
        assert!(!is_monotone(&path));
    }

    #[test]
    fn interior_points_trim_their_edges() {
        let (g, [lo, _, p, _]) = y_tree();
        let t = TreeIndex::new(&g).unwrap();
        let e0 = g.incident(lo)[0];
        let e1 = g.incident(p)[0];
        let a = GraphPoint::Interior { edge: e0, value: Rational::from(1) };
        let b = GraphPoint::Interior { edge: e1, value: Rational::from(4) };
        let path = t.path(a, b);
        assert!(is_monotone(&path));
        assert_eq!(path.first().unwrap().from, Rational::from(1));
        assert_eq!(path.last().unwrap().to, Rational::from(4));
        let mid = level_point(&g, a, &path, Rational::from(3)).unwrap();
        assert_eq!(mid, GraphPoint::Interior { edge: e1, value: Rational::from(3) });
        assert_eq!(level_point(&g, a, &path, Rational::from(2)), Some(GraphPoint::Node(NodeId(1))));
    }

    #[test]
    fn same_edge_path_is_one_segment() {
        let (g, [lo, ..]) = y_tree();
        let t = TreeIndex::new(&g).unwrap();
        let e0 = g.incident(lo)[0];
        let a = GraphPoint::Interior { edge: e0, value: Rational::new(1, 2) };
        let b = GraphPoint::Interior { edge: e0, value: Rational::new(3, 2) };
        assert_eq!(t.path(a, b).len(), 1);
        assert!(t.path(a, a).is_empty());
    }
}
