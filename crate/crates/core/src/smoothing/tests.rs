use std::collections::HashMap;

use super::*;
use crate::graph::{GraphBuilder, NodeClass, UnionFind};
use crate::iso::function_preserving_isomorphic;

fn r(n: i64) -> Rational {
    Rational::from(n)
}

fn segment(lo: i64, hi: i64) -> ReebGraph {
    let mut b = GraphBuilder::new();
    let a = b.node("a", lo);
    let c = b.node("b", hi);
    b.edge(a, c);
    b.build().unwrap()
}

fn loop_graph(lo: i64, hi: i64) -> ReebGraph {
    let mut b = GraphBuilder::new();
    let s = b.node("s", lo);
    let j = b.node("j", hi);
    b.edge(s, j).edge(s, j);
    b.build().unwrap()
}

fn y_graph() -> ReebGraph {
    let mut b = GraphBuilder::new();
    let lo = b.node("lo", 0);
    let s = b.node("s", 2);
    let p = b.node("p", 5);
    let q = b.node("q", 5);
    b.edge(lo, s).edge(s, p).edge(s, q);
    b.build().unwrap()
}

/// Counts level-set components of F(x, t) = f(x) + t on a triangulated copy of
/// G × [−ε, ε], each edge cut into `k` pieces and the interval into `k` rows.
fn mesh_level_components(g: &ReebGraph, eps: Rational, k: i64, h: Rational) -> usize {
    // columns: one per node, plus k - 1 per edge
    let mut column_value: Vec<Rational> = g.values().to_vec();
    let mut strips: Vec<Vec<usize>> = Vec::new();
    for e in g.edge_ids() {
        let (lo, hi) = g.oriented(e);
        let (a, b) = (g.value(lo), g.value(hi));
        let mut strip = vec![lo.0];
        for i in 1..k {
            column_value.push(a + (b - a) * Rational::new(i as i128, k as i128));
            strip.push(column_value.len() - 1);
        }
        strip.push(hi.0);
        strips.push(strip);
    }
    let rows = (0..=k).map(|j| -eps + eps * Rational::new(2 * j as i128, k as i128)).collect::<Vec<_>>();
    let vertex = |c: usize, j: usize| c * rows.len() + j;
    let value = |c: usize, j: usize| column_value[c] + rows[j];
    // each triangle crossed by the level contributes a pair of crossing mesh edges
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for strip in &strips {
        for w in strip.windows(2) {
            let (c0, c1) = (w[0], w[1]);
            for j in 0..k as usize {
                for tri in [[(c0, j), (c1, j), (c1, j + 1)], [(c0, j), (c1, j + 1), (c0, j + 1)]] {
                    let mut hits = Vec::new();
                    for (x, y) in [(0, 1), (1, 2), (0, 2)] {
                        let (a, b) = (tri[x], tri[y]);
                        if (value(a.0, a.1) < h) != (value(b.0, b.1) < h) {
                            let (va, vb) = (vertex(a.0, a.1), vertex(b.0, b.1));
                            let next = ids.len();
                            hits.push(*ids.entry((va.min(vb), va.max(vb))).or_insert(next));
                        }
                    }
                    if let [p, q] = hits[..] {
                        pairs.push((p, q));
                    }
                }
            }
        }
    }
    let mut uf = UnionFind::new(ids.len());
    for (p, q) in pairs {
        uf.union(p, q);
    }
    let mut roots: Vec<usize> = (0..ids.len()).map(|i| uf.find(i)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

fn assert_matches_mesh(g: &ReebGraph, eps: Rational) {
    let sm = smooth(g, eps).unwrap();
    let (lo, hi) = (g.min_value() - eps, g.max_value() + eps);
    let steps = 40;
    for i in 1..steps {
        // an offset with a large prime denominator keeps heights off mesh vertices
        let h = lo + (hi - lo) * Rational::new(i, steps) + Rational::new(1, 997);
        if h >= hi {
            continue;
        }
        let expected = mesh_level_components(g, eps, 8, h);
        assert_eq!(sm.graph().points_at_level(h).len(), expected, "level {h}");
    }
}

#[test]
fn segment_grows_by_epsilon() {
    let sm = smooth(&segment(0, 4), r(1)).unwrap();
    assert!(function_preserving_isomorphic(sm.graph(), &segment(-1, 5)).unwrap());
    assert_matches_mesh(&segment(0, 4), r(1));
}

#[test]
fn loop_shrinks_then_collapses() {
    let sm = smooth(&loop_graph(0, 4), r(1)).unwrap();
    let mut b = GraphBuilder::new();
    let lo = b.node("lo", -1);
    let s = b.node("s", 1);
    let j = b.node("j", 3);
    let hi = b.node("hi", 5);
    b.edge(lo, s).edge(s, j).edge(s, j).edge(j, hi);
    assert!(function_preserving_isomorphic(sm.graph(), &b.build().unwrap()).unwrap());
    assert_matches_mesh(&loop_graph(0, 4), r(1));

    let sm = smooth(&loop_graph(0, 4), r(2)).unwrap();
    assert!(function_preserving_isomorphic(sm.graph(), &segment(-2, 6)).unwrap());
    assert_matches_mesh(&loop_graph(0, 4), r(2));
}

#[test]
fn y_graph_matches_mesh_oracle() {
    for eps in [Rational::new(1, 2), r(1), r(2)] {
        assert_matches_mesh(&y_graph(), eps);
    }
}

#[test]
fn zero_epsilon_is_identity() {
    let g = loop_graph(0, 4);
    let sm = smooth(&g, Rational::ZERO).unwrap();
    assert_eq!(sm.graph(), &g);
    let p = GraphPoint::Interior { edge: EdgeId(1), value: r(2) };
    assert_eq!(sm.shift_eta(p).unwrap(), p);
    assert!(smooth(&g, r(-1)).is_err());
}

#[test]
fn correspondence_moves_critical_nodes() {
    let g = y_graph();
    let sm = smooth(&g, r(1)).unwrap();
    for v in g.nodes() {
        let moved = sm.graph().point_value(&sm.correspondence(v)) - g.value(v);
        let expected = match g.classify(v) {
            NodeClass::Maximum | NodeClass::Split => r(1),
            _ => r(-1),
        };
        assert_eq!(moved, expected, "node {}", g.name(v));
    }
}

#[test]
fn eta_of_loop_bottom_lies_below_new_split() {
    let g = loop_graph(0, 4);
    let sm = smooth(&g, r(1)).unwrap();
    let y = sm.shift_eta(GraphPoint::Node(NodeId(0))).unwrap();
    let GraphPoint::Interior { edge, value } = y else { panic!("expected an interior point") };
    assert_eq!(value, r(0));
    let (a, b) = sm.graph().edge_range(edge);
    assert_eq!((a, b), (r(-1), r(1)));
    // the stem above -1 ends at the split
    let (_, top) = sm.graph().oriented(edge);
    assert_eq!(sm.graph().classify(top), NodeClass::Split);
}

#[test]
fn path_neighborhood_has_exact_range() {
    let g = loop_graph(0, 4);
    let sm = smooth(&g, r(1)).unwrap();
    let pn = sm.path_neighborhood(GraphPoint::Node(NodeId(0))).unwrap();
    assert_eq!((pn.low, pn.high), (r(-1), r(1)));
    assert_eq!(sm.graph().point_value(pn.points.last().unwrap()), r(1));
    assert!(crate::tree::is_monotone(&pn.segments));
    assert!(pn.points.contains(&pn.center));

    let seg = segment(0, 4);
    let sm = smooth(&seg, r(1)).unwrap();
    let x = GraphPoint::Interior { edge: EdgeId(0), value: r(2) };
    let pn = sm.path_neighborhood(x).unwrap();
    assert_eq!((pn.low, pn.high), (r(1), r(3)));
    let sm0 = smooth(&seg, Rational::ZERO).unwrap();
    assert_eq!(sm0.path_neighborhood(x).unwrap().points, vec![x]);
}

#[test]
fn n_eps_region_on_y() {
    let g = y_graph();
    let s = g.node_by_name("s").unwrap();
    let region = n_eps_region(&g, s, r(1)).unwrap();
    assert_eq!(region.nodes, vec![s]);
    let mut ranges: Vec<(Rational, Rational)> = region.pieces.iter().map(|&(_, a, b)| (a, b)).collect();
    ranges.sort();
    assert_eq!(ranges, vec![(r(1), r(2)), (r(2), r(3)), (r(2), r(3))]);
    let single = n_eps_region(&g, s, Rational::ZERO).unwrap();
    assert_eq!(single.nodes, vec![s]);
    assert!(single.pieces.is_empty());
}

#[test]
fn region_maps_into_path_neighborhood() {
    let g = y_graph();
    for eps in [Rational::new(1, 2), r(1), r(3)] {
        let sm = smooth(&g, eps).unwrap();
        for u in g.nodes() {
            let region = n_eps_region(&g, u, eps).unwrap();
            for p in region.sample_points(&g, 4) {
                let y = sm.shift_eta(p).unwrap();
                assert!(sm.on_path_neighborhood(GraphPoint::Node(u), y).unwrap());
            }
        }
    }
}

#[test]
fn smoothing_twice_equals_smoothing_once() {
    for g in [loop_graph(0, 6), y_graph()] {
        let once = smooth(&g, r(2)).unwrap();
        let half = smooth(&g, r(1)).unwrap();
        let twice = smooth(half.graph(), r(1)).unwrap();
        assert!(function_preserving_isomorphic(once.graph(), twice.graph()).unwrap());
    }
}

#[test]
fn representatives_project_back() {
    let g = loop_graph(0, 4);
    let sm = smooth(&g, r(1)).unwrap();
    for e in sm.graph().edge_ids() {
        let (a, b) = sm.graph().edge_range(e);
        if a == b {
            continue;
        }
        let y = GraphPoint::Interior { edge: e, value: a.midpoint(b) };
        for (x, t) in sm.representatives(y).unwrap() {
            assert_eq!(sm.projection(x, t).unwrap(), y);
        }
    }
    for v in sm.graph().nodes() {
        let y = GraphPoint::Node(v);
        let (x, t) = sm.representative(y).unwrap();
        assert_eq!(sm.projection(x, t).unwrap(), sm.graph().canonical(y));
    }
}

#[test]
fn lifting_the_shift_gives_the_next_shift() {
    let g = std::sync::Arc::new(y_graph());
    let sm = smooth(&g, r(1)).unwrap();
    let eta = shift_morphism(&sm).unwrap();
    let sm_next = smooth(sm.graph(), r(1)).unwrap();
    let lifted = lift_morphism(&eta, &sm, &sm_next).unwrap();
    assert!(lifted.agrees_with(&shift_morphism(&sm_next).unwrap()));

    let id = Morphism::identity(g.clone());
    let sm0 = smooth(&g, Rational::ZERO).unwrap();
    assert!(lift_morphism(&id, &sm0, &sm0).unwrap().agrees_with(&id));
    let lifted_id = lift_morphism(&id, &sm, &sm).unwrap();
    assert!(lifted_id.agrees_with(&Morphism::identity(std::sync::Arc::new(sm.graph().clone()))));
}
