use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{GraphError, NodeClass, NodeId, ReebGraph, UnionFind};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Essential {
    Essential,
    /// `short_loop`: two branches meet again at a join (split, for a join
    /// node) within 4ε. `one_branch`: at most one outgoing branch rises 2ε.
    Inessential { short_loop: bool, one_branch: bool },
    /// Regular and degenerate nodes.
    NotApplicable,
}

impl Essential {
    pub fn is_essential(self) -> bool {
        self == Essential::Essential
    }
}

/// ε-essential classification of a node. Joins are handled as splits of −f.
pub fn classify_essential(graph: &ReebGraph, v: NodeId, epsilon: Rational) -> Result<Essential> {
    if v.0 >= graph.node_count() {
        return Err(GraphError::UnknownNode(v.to_string()).into());
    }
    if epsilon.is_negative() {
        return Err(Error::NegativeEpsilon(epsilon));
    }
    let (sign, partner) = match graph.classify(v) {
        NodeClass::Maximum | NodeClass::Minimum => return Ok(Essential::Essential),
        NodeClass::Split => (Rational::ONE, NodeClass::Join),
        NodeClass::Join => (-Rational::ONE, NodeClass::Split),
        _ => return Ok(Essential::NotApplicable),
    };
    let g = |x: NodeId| graph.value(x) * sign;
    let base = g(v);
    let outgoing: Vec<(crate::graph::EdgeId, NodeId)> = graph
        .incident(v)
        .iter()
        .map(|&e| (e, graph.other(e, v)))
        .filter(|&(e, w)| g(w) > base || (g(w) == base && leaves_upward(graph, e, v, sign)))
        .collect();

    // components of the part strictly away from v, restricted to a window
    let components = |top: Option<Rational>| {
        let inside = move |x: NodeId| x != v && g(x) >= base && top.is_none_or(|t| g(x) <= t);
        let mut uf = UnionFind::new(graph.node_count());
        for &(a, b) in graph.edges() {
            if inside(a) && inside(b) {
                uf.union(a.0, b.0);
            }
        }
        (uf, inside)
    };

    let slab = base + Rational::from(4) * epsilon;
    let (mut uf, inside) = components(Some(slab));
    let mut short_loop = false;
    for (i, &(_, a)) in outgoing.iter().enumerate() {
        for &(_, b) in &outgoing[i + 1..] {
            if !inside(a) || !inside(b) || uf.find(a.0) != uf.find(b.0) {
                continue;
            }
            let root = uf.find(a.0);
            if graph.nodes().any(|w| inside(w) && uf.find(w.0) == root && graph.classify(w) == partner) {
                short_loop = true;
            }
        }
    }

    let (mut uf, inside) = components(None);
    let mut reach = vec![None::<Rational>; graph.node_count()];
    for w in graph.nodes().filter(|&w| inside(w)) {
        let r = uf.find(w.0);
        reach[r] = Some(reach[r].map_or(g(w), |m: Rational| m.max(g(w))));
    }
    let high = base + Rational::from(2) * epsilon;
    let rising = outgoing
        .iter()
        .filter(|&&(_, w)| {
            let top = if inside(w) { reach[uf.find(w.0)].unwrap() } else { g(w) };
            top >= high
        })
        .count();
    let one_branch = rising <= 1;

    Ok(if short_loop || one_branch {
        Essential::Inessential { short_loop, one_branch }
    } else {
        Essential::Essential
    })
}

/// A zero-length edge joins the two parts of a superposed node. It counts as
/// outgoing only when it points up in the order given by `sign`.
fn leaves_upward(graph: &ReebGraph, e: crate::graph::EdgeId, v: NodeId, sign: Rational) -> bool {
    graph.goes_up(e, v) == sign.is_positive()
}
