//! Loop heights, join-split spreads, and the midpoint obstructions showing
//! that the interleaving distance is not intrinsic.

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, GraphBuilder, GraphError, NodeClass, NodeId, ReebGraph};
use crate::rational::Rational;
use crate::smoothing::smooth;

pub const DEFAULT_CYCLE_BOUND: usize = 6;
pub const CYCLE_BOUND_ENV: &str = "REEBLI_CYCLE_BOUND";

/// The β1 cap, overridable through the environment.
pub fn cycle_bound() -> usize {
    std::env::var(CYCLE_BOUND_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CYCLE_BOUND)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cycle {
    pub edges: Vec<EdgeId>,
    pub top: NodeId,
    pub bottom: NodeId,
    pub height: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopReport {
    pub cycles: Vec<Cycle>,
}

impl LoopReport {
    pub fn max_height(&self) -> Rational {
        self.cycles.iter().map(|c| c.height).fold(Rational::ZERO, Rational::max)
    }
}

/// Every simple cycle, found as the combinations of fundamental cycles
/// whose edge sets form a single cycle.
pub fn simple_cycles(graph: &ReebGraph, bound: usize) -> Result<LoopReport> {
    let beta = graph.betti_one();
    if beta > bound || beta >= usize::BITS as usize {
        return Err(Error::SizeLimit { what: "first Betti number", actual: beta, limit: bound });
    }
    let m = graph.edge_count();
    let n = graph.node_count();
    // BFS spanning tree
    let mut parent: Vec<Option<EdgeId>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut in_tree = vec![false; m];
    let mut queue = VecDeque::from([NodeId(0)]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &e in graph.incident(v) {
            let w = graph.other(e, v);
            if !seen[w.0] {
                seen[w.0] = true;
                parent[w.0] = Some(e);
                in_tree[e.0] = true;
                queue.push_back(w);
            }
        }
    }
    let root_path = |mut v: NodeId| {
        let mut out = Vec::new();
        while let Some(e) = parent[v.0] {
            out.push(e);
            v = graph.other(e, v);
        }
        out
    };
    let basis: Vec<Vec<bool>> = graph
        .edge_ids()
        .filter(|e| !in_tree[e.0])
        .map(|e| {
            let (a, b) = graph.edge(e);
            let mut set = vec![false; m];
            set[e.0] = true;
            for t in root_path(a).into_iter().chain(root_path(b)) {
                set[t.0] ^= true;
            }
            set
        })
        .collect();
    let mut cycles = Vec::new();
    for mask in 1usize..(1 << beta) {
        let mut set = vec![false; m];
        for (i, b) in basis.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for (s, &x) in set.iter_mut().zip(b) {
                    *s ^= x;
                }
            }
        }
        let edges: Vec<EdgeId> = (0..m).filter(|&i| set[i]).map(EdgeId).collect();
        if is_single_cycle(graph, &edges) {
            cycles.push(cycle_of(graph, edges));
        }
    }
    Ok(LoopReport { cycles })
}

fn is_single_cycle(graph: &ReebGraph, edges: &[EdgeId]) -> bool {
    let mut degree = vec![0usize; graph.node_count()];
    for &e in edges {
        let (a, b) = graph.edge(e);
        degree[a.0] += 1;
        degree[b.0] += 1;
    }
    if degree.iter().any(|&d| d != 0 && d != 2) {
        return false;
    }
    let mut uf = crate::graph::UnionFind::new(graph.node_count());
    for &e in edges {
        let (a, b) = graph.edge(e);
        uf.union(a.0, b.0);
    }
    let mut roots: Vec<usize> = (0..graph.node_count()).filter(|&v| degree[v] > 0).map(|v| uf.find(v)).collect();
    roots.dedup();
    roots.sort_unstable();
    roots.dedup();
    roots.len() == 1
}

fn cycle_of(graph: &ReebGraph, edges: Vec<EdgeId>) -> Cycle {
    let mut nodes: Vec<NodeId> = edges.iter().flat_map(|&e| [graph.edge(e).0, graph.edge(e).1]).collect();
    nodes.sort_unstable();
    nodes.dedup();
    let top = *nodes.iter().max_by_key(|v| graph.value(**v)).unwrap();
    let bottom = *nodes.iter().min_by_key(|v| graph.value(**v)).unwrap();
    let height = graph.value(top) - graph.value(bottom);
    Cycle { edges, top, bottom, height }
}

/// Maximum height over simple cycles; zero for trees.
pub fn max_loop_height(graph: &ReebGraph) -> Result<Rational> {
    Ok(simple_cycles(graph, cycle_bound())?.max_height())
}

/// Whether a loop surviving ε-smoothing was at least 2ε taller before it.
pub fn verify_loop_contraction(graph: &ReebGraph, epsilon: Rational) -> Result<bool> {
    let smoothed = smooth(graph, epsilon)?;
    let after = simple_cycles(smoothed.graph(), cycle_bound())?;
    if after.cycles.is_empty() {
        return Ok(true);
    }
    let before = max_loop_height(graph)?;
    Ok(before >= after.max_height() + epsilon + epsilon)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JsStructure {
    pub join: NodeId,
    pub split: NodeId,
    pub join_value: Rational,
    pub split_value: Rational,
    /// f(split) − f(join); negative when the split is lower.
    pub spread: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JsReport {
    pub structures: Vec<JsStructure>,
}

impl JsReport {
    pub fn min_spread(&self) -> Option<Rational> {
        self.structures.iter().map(|s| s.spread).min()
    }
}

/// Join-split pairs joined by an arc with no critical node inside.
pub fn js_spreads(tree: &ReebGraph) -> Result<JsReport> {
    if !tree.is_tree() {
        return Err(GraphError::NotATree.into());
    }
    let tree = if tree.is_normalized() { tree.clone() } else { tree.normalize_superpositions().0 };
    let mut structures = Vec::new();
    for v in tree.nodes() {
        let class = tree.classify(v);
        if class != NodeClass::Join && class != NodeClass::Split {
            continue;
        }
        // walk every upward arc to the next critical node
        for e in tree.up_edges(v).collect::<Vec<_>>() {
            let mut at = tree.other(e, v);
            while tree.classify(at) == NodeClass::Regular {
                at = tree.other(tree.up_edges(at).next().unwrap(), at);
            }
            let end = tree.classify(at);
            let structure = |join: NodeId, split: NodeId| JsStructure {
                join,
                split,
                join_value: tree.value(join),
                split_value: tree.value(split),
                spread: tree.value(split) - tree.value(join),
            };
            match (class, end) {
                (NodeClass::Join, NodeClass::Split) => structures.push(structure(v, at)),
                (NodeClass::Split, NodeClass::Join) => structures.push(structure(at, v)),
                _ => {}
            }
        }
    }
    structures.sort_by_key(|s| (s.join, s.split));
    Ok(JsReport { structures })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Contradiction,
    NoContradiction,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Contradiction => "contradiction: cannot be a midpoint",
            Verdict::NoContradiction => "no contradiction",
        })
    }
}

/// Result of testing a candidate midpoint against the necessary conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub alpha: Rational,
    pub candidate: String,
    /// What the conditions from one side demand.
    pub required: Rational,
    /// The most the candidate can offer while meeting the other side's
    /// condition; `None` when it has no feature of the needed kind.
    pub capacity: Option<Rational>,
    pub measured: Option<Rational>,
    pub condition_a: bool,
    pub condition_b: bool,
    pub verdict: Verdict,
    pub trace: Vec<String>,
}

fn verdict(required: Rational, capacity: Option<Rational>) -> Verdict {
    match capacity {
        Some(c) if c >= required => Verdict::NoContradiction,
        _ => Verdict::Contradiction,
    }
}

fn positive_alpha(alpha: Rational) -> Result<()> {
    if alpha.is_positive() {
        Ok(())
    } else {
        Err(Error::Invalid(format!("alpha must be positive, got {alpha}")))
    }
}

fn summary(graph: &ReebGraph) -> String {
    format!(
        "{} nodes, {} edges, first Betti number {}, range [{}, {}]",
        graph.node_count(),
        graph.edge_count(),
        graph.betti_one(),
        graph.min_value(),
        graph.max_value()
    )
}

/// A midpoint M between the segment and the loop of height α, each at
/// distance α/8, needs (A) a loop of height ≥ 3α/4 and (B) no loop taller
/// than α/2.
pub fn reeb_midpoint_obstruction(alpha: Rational, candidate: &ReebGraph) -> Result<ObstructionReport> {
    positive_alpha(alpha)?;
    let h = max_loop_height(candidate)?;
    let eps = alpha / Rational::from(8);
    let required = alpha * Rational::new(3, 4);
    let cap = alpha / Rational::from(2);
    let condition_a = h >= required;
    let condition_b = h <= cap;
    let capacity = Some(h.min(cap));
    let trace = vec![
        format!("epsilon = alpha/8 = {eps}"),
        format!("loop of height {alpha} smoothed by 2 epsilon keeps height {}", alpha - eps * Rational::from(4)),
        format!("so M smoothed by epsilon has a loop of height >= {}", alpha - eps * Rational::from(4)),
        format!("(A) M needs a loop of height >= {required}; its tallest loop is {h}: {}", ok(condition_a)),
        format!(
            "(B) a loop of height h puts M at distance >= h/4 from the segment; h <= {cap} is needed: {}",
            ok(condition_b)
        ),
    ];
    Ok(ObstructionReport {
        alpha,
        candidate: summary(candidate),
        required,
        capacity,
        measured: Some(h),
        condition_a,
        condition_b,
        verdict: verdict(required, capacity),
        trace,
    })
}

/// A midpoint M between the X-shaped tree and the segment, each at distance
/// α/8, needs (A) a join-split structure of spread ≤ α/4 and (B) spread ≥ α/2
/// on that structure.
pub fn contour_midpoint_obstruction(alpha: Rational, candidate: &ReebGraph) -> Result<ObstructionReport> {
    positive_alpha(alpha)?;
    let report = js_spreads(candidate)?;
    let quarter = alpha / Rational::from(4);
    let required = alpha / Rational::from(2);
    let measured = report.min_spread();
    let condition_a = measured.is_some_and(|s| s <= quarter);
    let condition_b = measured.is_some_and(|s| s >= required);
    let capacity = measured.map(|s| s.min(quarter));
    let mut trace = vec![
        format!("epsilon = alpha/8 = {}", alpha / Rational::from(8)),
        format!("{} join-split structures in M", report.structures.len()),
    ];
    if let Some(s) = report.structures.iter().min_by_key(|s| s.spread) {
        trace.push(format!(
            "tightest structure: join at {}, split at {}, spread {}",
            s.join_value, s.split_value, s.spread
        ));
    }
    trace.push(format!("(A) the X side needs a structure of spread <= {quarter}: {}", ok(condition_a)));
    trace.push(format!("(B) the segment side forces spread >= {required}: {}", ok(condition_b)));
    Ok(ObstructionReport {
        alpha,
        candidate: summary(candidate),
        required,
        capacity,
        measured,
        condition_a,
        condition_b,
        verdict: if condition_a && condition_b { Verdict::NoContradiction } else { Verdict::Contradiction },
        trace,
    })
}

fn ok(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "fails"
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CounterexampleKind {
    Segment,
    Loop,
    XTree,
}

/// The canonical graphs of the counterexamples. `delta` separates the
/// X-tree's join (below) from its split (above).
pub fn build_counterexample(kind: CounterexampleKind, alpha: Rational, delta: Rational) -> Result<ReebGraph> {
    positive_alpha(alpha)?;
    if delta.is_negative() || delta >= alpha {
        return Err(Error::Invalid(format!("delta must lie in [0, alpha), got {delta}")));
    }
    let mut b = GraphBuilder::new();
    match kind {
        CounterexampleKind::Segment => {
            let lo = b.node("min", Rational::ZERO);
            let hi = b.node("max", alpha);
            b.edge(lo, hi);
        }
        CounterexampleKind::Loop => {
            let s = b.node("split", Rational::ZERO);
            let j = b.node("join", alpha);
            b.edge(s, j).edge(s, j);
        }
        CounterexampleKind::XTree => {
            let half = Rational::from(2);
            let l1 = b.node("l1", Rational::ZERO);
            let l2 = b.node("l2", Rational::ZERO);
            let j = b.node("join", (alpha - delta) / half);
            let s = b.node("split", (alpha + delta) / half);
            let u1 = b.node("u1", alpha);
            let u2 = b.node("u2", alpha);
            b.edge(l1, j).edge(l2, j).edge(j, s).edge(s, u1).edge(s, u2);
            if delta.is_zero() {
                b.superposition(j, s);
            }
        }
    }
    Ok(b.build()?)
}

/// A tree with one join-split structure of the given spread, centred at
/// α/2, with minima at −α and maxima at 2α.
pub fn js_tree(alpha: Rational, spread: Rational) -> Result<ReebGraph> {
    positive_alpha(alpha)?;
    if spread.abs() > alpha {
        return Err(Error::Invalid(format!("spread must lie in [-alpha, alpha], got {spread}")));
    }
    let two = Rational::from(2);
    let (jv, sv) = (alpha / two - spread / two, alpha / two + spread / two);
    let (lo, hi) = (-alpha, alpha * two);
    let mut b = GraphBuilder::new();
    let l1 = b.node("l1", lo);
    let l2 = b.node("l2", lo - Rational::ONE);
    let j = b.node("join", jv);
    let s = b.node("split", sv);
    let u1 = b.node("u1", hi);
    let u2 = b.node("u2", hi + Rational::ONE);
    if spread.is_negative() {
        // the split sits below the join and the arc runs up from it
        b.edge(l1, s).edge(s, u1).edge(s, j).edge(l2, j).edge(j, u2);
    } else {
        b.edge(l1, j).edge(l2, j).edge(j, s).edge(s, u1).edge(s, u2);
        if spread.is_zero() {
            b.superposition(j, s);
        }
    }
    Ok(b.build()?)
}

/// Segments of lengths α/2, α, 2α and loops of height k/2 for k = 1..4α,
/// all starting at 0.
pub fn reeb_candidate_family(alpha: Rational) -> Result<Vec<ReebGraph>> {
    positive_alpha(alpha)?;
    let two = Rational::from(2);
    let mut out = Vec::new();
    for len in [alpha / two, alpha, alpha * two] {
        out.push(build_counterexample(CounterexampleKind::Segment, len, Rational::ZERO)?);
    }
    let mut h = Rational::new(1, 2);
    while h <= alpha * two {
        out.push(build_counterexample(CounterexampleKind::Loop, h, Rational::ZERO)?);
        h += Rational::new(1, 2);
    }
    Ok(out)
}

/// Join-split trees with spreads −α..α in steps of 1/2.
pub fn contour_candidate_family(alpha: Rational) -> Result<Vec<ReebGraph>> {
    positive_alpha(alpha)?;
    let mut out = Vec::new();
    let mut s = -alpha;
    while s <= alpha {
        out.push(js_tree(alpha, s)?);
        s += Rational::new(1, 2);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from(n)
    }

    fn theta() -> ReebGraph {
        // split 0 and join 6 with two arcs, plus a chord from 1 to 4 on one arc
        let mut b = GraphBuilder::new();
        let s = b.node("s", 0);
        let a = b.node("a", 1);
        let c = b.node("c", 4);
        let j = b.node("j", 6);
        b.edge(s, a).edge(a, c).edge(c, j).edge(s, j).edge(a, c);
        b.build().unwrap()
    }

    #[test]
    fn loop_heights() {
        let lp = build_counterexample(CounterexampleKind::Loop, r(4), r(0)).unwrap();
        assert_eq!(max_loop_height(&lp).unwrap(), r(4));
        let seg = build_counterexample(CounterexampleKind::Segment, r(4), r(0)).unwrap();
        assert_eq!(max_loop_height(&seg).unwrap(), r(0));
        let report = simple_cycles(&theta(), 6).unwrap();
        let mut heights: Vec<Rational> = report.cycles.iter().map(|c| c.height).collect();
        heights.sort();
        assert_eq!(heights, vec![r(3), r(6), r(6)]);
        assert!(simple_cycles(&theta(), 1).unwrap_err().is_size_limit());
    }

    #[test]
    fn loop_contraction_examples() {
        let lp = build_counterexample(CounterexampleKind::Loop, r(6), r(0)).unwrap();
        let sm = smooth(&lp, r(1)).unwrap();
        assert_eq!(max_loop_height(sm.graph()).unwrap(), r(4));
        assert!(verify_loop_contraction(&lp, r(1)).unwrap());
        let lp = build_counterexample(CounterexampleKind::Loop, r(4), r(0)).unwrap();
        assert!(verify_loop_contraction(&lp, r(2)).unwrap());
        assert!(verify_loop_contraction(&lp, r(0)).unwrap());
    }

    #[test]
    fn x_tree_spreads() {
        let x = build_counterexample(CounterexampleKind::XTree, r(8), r(0)).unwrap();
        let report = js_spreads(&x).unwrap();
        assert_eq!(report.structures.len(), 1);
        assert_eq!(report.structures[0].spread, r(0));
        let sm = smooth(&x, r(2)).unwrap();
        assert_eq!(js_spreads(sm.graph()).unwrap().min_spread(), Some(r(4)));
        let seg = build_counterexample(CounterexampleKind::Segment, r(8), r(0)).unwrap();
        assert!(js_spreads(&seg).unwrap().structures.is_empty());
        assert_eq!(js_spreads(&js_tree(r(8), r(-3)).unwrap()).unwrap().min_spread(), Some(r(-3)));
    }

    #[test]
    fn reeb_obstruction_examples() {
        let a = r(8);
        let loop5 = build_counterexample(CounterexampleKind::Loop, r(5), r(0)).unwrap();
        let rep = reeb_midpoint_obstruction(a, &loop5).unwrap();
        assert!(!rep.condition_a);
        assert_eq!(rep.verdict, Verdict::Contradiction);
        let loop6 = build_counterexample(CounterexampleKind::Loop, r(6), r(0)).unwrap();
        let rep = reeb_midpoint_obstruction(a, &loop6).unwrap();
        assert!(rep.condition_a && !rep.condition_b);
        assert_eq!(rep.verdict, Verdict::Contradiction);
        let seg = build_counterexample(CounterexampleKind::Segment, r(8), r(0)).unwrap();
        assert!(!reeb_midpoint_obstruction(a, &seg).unwrap().condition_a);
    }

    #[test]
    fn contour_obstruction_examples() {
        let a = r(8);
        let x = build_counterexample(CounterexampleKind::XTree, a, r(0)).unwrap();
        let rep = contour_midpoint_obstruction(a, &x).unwrap();
        assert!(rep.condition_a && !rep.condition_b);
        assert_eq!(rep.verdict, Verdict::Contradiction);
        let seg = build_counterexample(CounterexampleKind::Segment, a, r(0)).unwrap();
        assert!(!contour_midpoint_obstruction(a, &seg).unwrap().condition_a);
        let js = js_tree(a, r(2)).unwrap();
        assert_eq!(contour_midpoint_obstruction(a, &js).unwrap().verdict, Verdict::Contradiction);
    }

    #[test]
    fn counterexample_shapes() {
        let x = build_counterexample(CounterexampleKind::XTree, r(8), r(0)).unwrap();
        let mut vals: Vec<Rational> = x.values().to_vec();
        vals.sort();
        assert_eq!(vals, vec![r(0), r(0), r(4), r(4), r(8), r(8)]);
        assert_eq!(x.superpositions().len(), 1);
        let x = build_counterexample(CounterexampleKind::XTree, r(8), r(2)).unwrap();
        assert_eq!(js_spreads(&x).unwrap().min_spread(), Some(r(2)));
        assert!(build_counterexample(CounterexampleKind::XTree, r(8), r(8)).is_err());
    }
}
