//! Seeded random graphs shared by the integration tests.
#![allow(dead_code)]

pub mod essential_oracle;

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use reebli::graph::{Injectivity, NodeClass, NodeId, RawGraph, ReebGraph};
use reebli::interleave::Labeling;
use reebli::merge::MergeTree;
use reebli::Rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn r(n: i64) -> Rational {
    Rational::from(n)
}

/// `n` distinct multiples of 1/2 drawn from [0, n·spread/2).
pub fn distinct_values(rng: &mut ChaCha8Rng, n: usize, spread: usize) -> Vec<Rational> {
    let mut pool: Vec<i64> = (0..(n * spread.max(1)) as i64).collect();
    pool.shuffle(rng);
    pool.truncate(n);
    pool.into_iter().map(|k| Rational::new(k as i128, 2)).collect()
}

fn build(values: &[Rational], edges: &[(usize, usize)]) -> ReebGraph {
    let raw = RawGraph {
        nodes: values.iter().enumerate().map(|(i, &v)| (format!("n{i}"), v)).collect(),
        edges: edges.iter().map(|&(a, b)| (format!("n{a}"), format!("n{b}"))).collect(),
        superpositions: Vec::new(),
    };
    ReebGraph::from_raw(&raw, Injectivity::Strict).expect("generated graph is valid")
}

/// A random tree on `n ≥ 2` nodes with distinct values.
pub fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> ReebGraph {
    let values = distinct_values(rng, n, 3);
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    build(&values, &edges)
}

fn plain(g: &ReebGraph) -> bool {
    g.nodes().all(|v| !matches!(g.classify(v), NodeClass::Regular | NodeClass::Degenerate))
}

/// A random tree with no regular or degenerate nodes.
pub fn random_contour_tree(rng: &mut ChaCha8Rng, n: usize) -> ReebGraph {
    loop {
        let g = random_tree(rng, n);
        if plain(&g) {
            return g;
        }
        if let Some(g) = strip_regular(&g).filter(plain) {
            return g;
        }
    }
}

/// Removes regular nodes by merging their two edges.
pub fn strip_regular(g: &ReebGraph) -> Option<ReebGraph> {
    let n = g.node_count();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in g.edges() {
        adj[a.0].push(b.0);
        adj[b.0].push(a.0);
    }
    let mut alive = vec![true; n];
    for v in 0..n {
        if g.classify(NodeId(v)) != NodeClass::Regular || adj[v].len() != 2 {
            continue;
        }
        let (a, b) = (adj[v][0], adj[v][1]);
        if a == b {
            continue;
        }
        adj[a].retain(|&x| x != v);
        adj[b].retain(|&x| x != v);
        adj[a].push(b);
        adj[b].push(a);
        adj[v].clear();
        alive[v] = false;
    }
    let keep: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    if keep.len() < 2 {
        return None;
    }
    let index: std::collections::HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let values: Vec<Rational> = keep.iter().map(|&v| g.value(NodeId(v))).collect();
    let mut edges = Vec::new();
    for &v in &keep {
        for &w in &adj[v] {
            if v < w {
                edges.push((index[&v], index[&w]));
            }
        }
    }
    let out = build(&values, &edges);
    let clean = out.nodes().all(|v| out.classify(v) != NodeClass::Regular);
    clean.then_some(out)
}

/// A random connected graph: a random tree plus up to `extra` chords.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> ReebGraph {
    let values = distinct_values(rng, n, 3);
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            edges.push((a, b));
        }
    }
    build(&values, &edges)
}

/// The same tree with every value moved by a multiple of 1/4 in
/// [−amount, amount], keeping values distinct and every node's class.
pub fn perturb(rng: &mut ChaCha8Rng, g: &ReebGraph, amount: i64) -> ReebGraph {
    loop {
        let values: Vec<Rational> =
            g.values().iter().map(|&v| v + Rational::new(rng.gen_range(-4 * amount..=4 * amount) as i128, 4)).collect();
        let distinct: HashSet<Rational> = values.iter().copied().collect();
        if distinct.len() != values.len() {
            continue;
        }
        let edges: Vec<(usize, usize)> = g.edges().iter().map(|&(a, b)| (a.0, b.0)).collect();
        let h = build(&values, &edges);
        if g.nodes().all(|v| g.classify(v) == h.classify(v)) {
            return h;
        }
    }
}

/// Labels the leaves in node order.
pub fn leaf_labels(g: &ReebGraph) -> Labeling {
    Labeling::new(g.leaves())
}

/// Leaves with minima first, each group in node order.
pub fn sorted_leaf_labels(g: &ReebGraph) -> Labeling {
    let mut leaves = g.leaves();
    leaves.sort_by_key(|&v| (g.classify(v) != NodeClass::Minimum, v));
    Labeling::new(leaves)
}

pub fn leaf_signature(g: &ReebGraph) -> (usize, usize) {
    let mins = g.leaves().iter().filter(|&&v| g.classify(v) == NodeClass::Minimum).count();
    (mins, g.leaves().len() - mins)
}

/// A random merge tree with `leaves` leaves, labeled 1..leaves in leaf
/// order, returned with that labeling. The root sits one above the top join.
pub fn random_merge_tree(rng: &mut ChaCha8Rng, leaves: usize) -> (MergeTree, Labeling) {
    let total = 2 * leaves;
    let mut used: HashSet<i64> = HashSet::new();
    let mut fresh = |rng: &mut ChaCha8Rng, lo: i64| {
        let mut v = lo + rng.gen_range(1..=6);
        while !used.insert(v) {
            v += 1;
        }
        v
    };
    let mut values: Vec<i64> = Vec::with_capacity(total);
    for _ in 0..leaves {
        let lo = rng.gen_range(0..(4 * leaves as i64));
        let v = fresh(rng, lo);
        values.push(v);
    }
    let mut comps: Vec<(usize, i64)> = (0..leaves).map(|i| (i, values[i])).collect();
    let mut edges = Vec::new();
    while comps.len() > 1 {
        let i = rng.gen_range(0..comps.len());
        let a = comps.swap_remove(i);
        let j = rng.gen_range(0..comps.len());
        let b = comps.swap_remove(j);
        let v = fresh(rng, a.1.max(b.1));
        let id = values.len();
        values.push(v);
        edges.push((a.0, id));
        edges.push((b.0, id));
        comps.push((id, v));
    }
    let top = comps[0];
    let root = values.len();
    values.push(*used.iter().max().unwrap() + 1);
    edges.push((top.0, root));
    let vals: Vec<Rational> = values.iter().map(|&v| r(v)).collect();
    let g = build(&vals, &edges);
    let labels = Labeling::new((0..leaves).map(NodeId).collect());
    (MergeTree::new(g).expect("generated merge tree"), labels)
}

/// A contour tree with `internal` joins and splits, built top-down from a
/// minimum leaf so no node is degenerate. Adjacent values differ by at least 4.
pub fn random_binary_contour_tree(rng: &mut ChaCha8Rng, internal: usize) -> ReebGraph {
    let mut values: Vec<i64> = vec![0];
    let mut used: HashSet<i64> = HashSet::from([0]);
    let mut edges = Vec::new();
    let mut fresh = |rng: &mut ChaCha8Rng, from: i64, up: bool| loop {
        let step = rng.gen_range(4..=1000);
        let v = if up { from + step } else { from - step };
        if used.insert(v) {
            return v;
        }
    };
    // (node, whether its parent lies below it)
    let mut open: Vec<(usize, bool)> = Vec::new();
    let first = fresh(rng, 0, true);
    values.push(first);
    edges.push((0, 1));
    open.push((1, true));
    let mut made = 0;
    while made < internal && !open.is_empty() {
        let i = rng.gen_range(0..open.len());
        let (v, parent_below) = open.swap_remove(i);
        // one child in each direction, or both away from the parent
        let dirs = match rng.gen_range(0..3) {
            0 => [true, false],
            1 => [false, true],
            _ => [parent_below, parent_below],
        };
        for up in dirs {
            let w = values.len();
            let value = fresh(rng, values[v], up);
            values.push(value);
            edges.push((v, w));
            open.push((w, up));
        }
        made += 1;
    }
    let vals: Vec<Rational> = values.iter().map(|&v| r(v)).collect();
    build(&vals, &edges)
}
