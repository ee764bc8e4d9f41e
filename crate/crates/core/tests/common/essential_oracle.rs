//! Brute-force ε-essential classification by enumerating simple paths.

use reebli::graph::{EdgeId, NodeClass, NodeId, ReebGraph};
use reebli::interleave::Essential;
use reebli::Rational;

/// Calls `visit(first_edge, path_nodes)` for every simple path leaving `v`
/// whose nodes all satisfy `keep`. Edges are monotone, so a path stays in a
/// value window exactly when its nodes do.
fn simple_paths(
    g: &ReebGraph,
    v: NodeId,
    keep: &dyn Fn(NodeId) -> bool,
    visit: &mut dyn FnMut(EdgeId, &[NodeId]),
) {
    fn go(
        g: &ReebGraph,
        first: EdgeId,
        path: &mut Vec<NodeId>,
        keep: &dyn Fn(NodeId) -> bool,
        visit: &mut dyn FnMut(EdgeId, &[NodeId]),
    ) {
        visit(first, path);
        let at = *path.last().unwrap();
        for &e in g.incident(at) {
            let w = g.other(e, at);
            if keep(w) && !path.contains(&w) {
                path.push(w);
                go(g, first, path, keep, visit);
                path.pop();
            }
        }
    }
    for &e in g.incident(v) {
        let w = g.other(e, v);
        if keep(w) && w != v {
            let mut path = vec![v, w];
            go(g, e, &mut path, keep, visit);
        }
    }
}

/// Mirrors the definition directly, with joins handled by negating f.
pub fn classify(g: &ReebGraph, v: NodeId, eps: Rational) -> Essential {
    let (sign, partner) = match g.classify(v) {
        NodeClass::Maximum | NodeClass::Minimum => return Essential::Essential,
        NodeClass::Split => (Rational::ONE, NodeClass::Join),
        NodeClass::Join => (-Rational::ONE, NodeClass::Split),
        _ => return Essential::NotApplicable,
    };
    let h = |x: NodeId| g.value(x) * sign;
    let base = h(v);
    // a zero-length edge leaving a split-part upward stays at f(v); in the
    // mirrored order it has to lead the right way to count
    let leaves_right = |e: EdgeId| !g.is_zero_length(e) || g.goes_up(e, v) == sign.is_positive();

    let top = base + Rational::from(4) * eps;
    let in_slab = |x: NodeId| h(x) >= base && h(x) <= top;
    let mut reach_partner: Vec<(NodeId, EdgeId)> = Vec::new();
    simple_paths(g, v, &in_slab, &mut |first, path| {
        let end = *path.last().unwrap();
        if leaves_right(first) && g.classify(end) == partner {
            reach_partner.push((end, first));
        }
    });
    let short_loop = reach_partner
        .iter()
        .any(|&(w, e)| reach_partner.iter().any(|&(w2, e2)| w2 == w && e2 != e));

    let high = base + Rational::from(2) * eps;
    let above = |x: NodeId| h(x) >= base;
    let mut firsts: Vec<EdgeId> = Vec::new();
    simple_paths(g, v, &above, &mut |first, path| {
        if leaves_right(first) && path.iter().any(|&x| h(x) >= high) && !firsts.contains(&first) {
            firsts.push(first);
        }
    });
    let one_branch = firsts.len() <= 1;

    if short_loop || one_branch {
        Essential::Inessential { short_loop, one_branch }
    } else {
        Essential::Essential
    }
}
