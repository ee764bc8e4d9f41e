//! Labeled merge trees: LCA queries, induced matrices, and the matrix form of
//! the labeled interleaving distance.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{GraphError, NodeClass, NodeId, ReebGraph};
use crate::interleave::Labeling;
use crate::rational::Rational;

/// Default leaf cap for [`min_over_labelings`].
pub const DEFAULT_MAX_LEAVES: usize = 7;

/// A rooted tree whose every non-root node has exactly one upward edge. The
/// root carries a finite sentinel in place of ∞.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeTree {
    graph: Arc<ReebGraph>,
    root: NodeId,
    parent: Vec<Option<NodeId>>,
    depth: Vec<usize>,
}

impl MergeTree {
    pub fn new(graph: ReebGraph) -> Result<Self> {
        if !graph.is_tree() {
            return Err(Error::NotAMergeTree("graph is not a tree".into()));
        }
        let top = graph.max_value();
        let tops: Vec<NodeId> = graph.nodes().filter(|&v| graph.value(v) == top).collect();
        if tops.len() != 1 {
            return Err(Error::NotAMergeTree("maximum value is not unique".into()));
        }
        let root = tops[0];
        let n = graph.node_count();
        let mut parent = vec![None; n];
        for v in graph.nodes() {
            if v == root {
                if graph.up_degree(v) != 0 {
                    return Err(Error::NotAMergeTree("root has an upward edge".into()));
                }
                continue;
            }
            let ups: Vec<_> = graph.up_edges(v).collect();
            if ups.len() != 1 {
                return Err(Error::NotAMergeTree(format!(
                    "node {} has up-degree {}",
                    graph.name(v),
                    ups.len()
                )));
            }
            parent[v.0] = Some(graph.other(ups[0], v));
        }
        let mut depth = vec![usize::MAX; n];
        depth[root.0] = 0;
        fn fill(v: NodeId, parent: &[Option<NodeId>], depth: &mut [usize]) -> usize {
            if depth[v.0] == usize::MAX {
                let p = parent[v.0].expect("non-root has a parent");
                depth[v.0] = fill(p, parent, depth) + 1;
            }
            depth[v.0]
        }
        for v in 0..n {
            fill(NodeId(v), &parent, &mut depth);
        }
        Ok(MergeTree { graph: Arc::new(graph), root, parent, depth })
    }

    pub fn graph(&self) -> &ReebGraph {
        &self.graph
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v.0]
    }

    /// Leaves other than the root.
    pub fn leaves(&self) -> Vec<NodeId> {
        self.graph.nodes().filter(|&v| v != self.root && self.graph.down_degree(v) == 0).collect()
    }

    pub fn lca(&self, u: NodeId, v: NodeId) -> Result<NodeId> {
        let n = self.graph.node_count();
        for w in [u, v] {
            if w.0 >= n {
                return Err(GraphError::UnknownNode(w.to_string()).into());
            }
        }
        let (mut a, mut b) = (u, v);
        while self.depth[a.0] > self.depth[b.0] {
            a = self.parent[a.0].unwrap();
        }
        while self.depth[b.0] > self.depth[a.0] {
            b = self.parent[b.0].unwrap();
        }
        while a != b {
            a = self.parent[a.0].unwrap();
            b = self.parent[b.0].unwrap();
        }
        Ok(a)
    }

    /// The same tree with the root moved to `value`.
    pub fn with_root_value(&self, value: Rational) -> Result<MergeTree> {
        let mut raw = self.graph.to_raw();
        raw.nodes[self.root.0].1 = value;
        let g = ReebGraph::from_raw(&raw, crate::graph::Injectivity::Relaxed)?;
        MergeTree::new(g)
    }

    /// Largest and smallest non-root values.
    fn finite_range(&self) -> (Rational, Rational) {
        let vals: Vec<Rational> =
            self.graph.nodes().filter(|&v| v != self.root).map(|v| self.graph.value(v)).collect();
        let lo = vals.iter().copied().min().unwrap_or(self.graph.value(self.root));
        let hi = vals.iter().copied().max().unwrap_or(self.graph.value(self.root));
        (lo, hi)
    }
}

/// Sentinel shared by two trees: global max + global spread + 1.
pub fn common_sentinel(t1: &MergeTree, t2: &MergeTree) -> Rational {
    let (a_lo, a_hi) = t1.finite_range();
    let (b_lo, b_hi) = t2.finite_range();
    let (lo, hi) = (a_lo.min(b_lo), a_hi.max(b_hi));
    hi + (hi - lo) + Rational::ONE
}

/// Both trees with their roots moved to the common sentinel.
pub fn with_common_sentinel(t1: &MergeTree, t2: &MergeTree) -> Result<(MergeTree, MergeTree)> {
    let s = common_sentinel(t1, t2);
    Ok((t1.with_root_value(s)?, t2.with_root_value(s)?))
}

/// M[i][j] = f(LCA(λ(i), λ(j))), indexed by label − 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedMatrix {
    n: usize,
    entries: Vec<Rational>,
}

impl InducedMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.entries.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    /// Entrywise max |a − b|.
    pub fn max_norm_distance(&self, other: &InducedMatrix) -> Result<Rational> {
        if self.n != other.n {
            return Err(Error::LabelMismatch(format!("{} labels vs {} labels", self.n, other.n)));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| (a - b).abs())
            .max()
            .unwrap_or(Rational::ZERO))
    }
}

pub fn induced_matrix(tree: &MergeTree, labeling: &Labeling) -> Result<InducedMatrix> {
    labeling.check_nodes(tree.graph())?;
    let labeled = labeling.labeled_nodes();
    if let Some(leaf) = tree.leaves().into_iter().find(|v| !labeled.contains(v)) {
        return Err(Error::Labeling(format!("leaf {} carries no label", tree.graph().name(leaf))));
    }
    let n = labeling.len();
    let mut entries = vec![Rational::ZERO; n * n];
    let nodes = labeling.nodes();
    for i in 0..n {
        for j in i..n {
            let v = tree.graph().value(tree.lca(nodes[i], nodes[j])?);
            entries[i * n + j] = v;
            entries[j * n + i] = v;
        }
    }
    Ok(InducedMatrix { n, entries })
}

/// ‖M(T1, λ1) − M(T2, λ2)‖_max. Roots are first moved to a common sentinel so
/// root entries never bind.
pub fn merge_labeled_distance(
    t1: &MergeTree,
    l1: &Labeling,
    t2: &MergeTree,
    l2: &Labeling,
) -> Result<Rational> {
    if l1.len() != l2.len() {
        return Err(Error::LabelMismatch(format!("{} labels vs {} labels", l1.len(), l2.len())));
    }
    let (a, b) = with_common_sentinel(t1, t2)?;
    induced_matrix(&a, l1)?.max_norm_distance(&induced_matrix(&b, l2)?)
}

/// Minimum of [`merge_labeled_distance`] over every common labeling that is
/// surjective on the leaves of both trees.
///
/// Extra labels only add matrix entries, so it suffices to search minimal
/// covers: one partner for every leaf of `t1`, and one partner for every leaf
/// of `t2` that no leaf of `t1` picked. Branch and bound over those.
pub fn min_over_labelings(t1: &MergeTree, t2: &MergeTree, max_leaves: usize) -> Result<Rational> {
    for t in [t1, t2] {
        let k = t.leaves().len();
        if k > max_leaves {
            return Err(Error::SizeLimit { what: "leaf count", actual: k, limit: max_leaves });
        }
    }
    let (a, b) = with_common_sentinel(t1, t2)?;
    let search = Search::new(&a, &b);
    Ok(search.run())
}

struct Search<'t> {
    a: &'t MergeTree,
    b: &'t MergeTree,
    leaves_a: Vec<NodeId>,
    leaves_b: Vec<NodeId>,
    lca_a: Vec<Vec<Rational>>,
    lca_b: Vec<Vec<Rational>>,
}

impl<'t> Search<'t> {
    fn new(a: &'t MergeTree, b: &'t MergeTree) -> Self {
        let table = |t: &MergeTree| {
            let n = t.graph().node_count();
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| t.graph().value(t.lca(NodeId(i), NodeId(j)).unwrap()))
                        .collect()
                })
                .collect()
        };
        Search {
            a,
            b,
            leaves_a: a.leaves(),
            leaves_b: b.leaves(),
            lca_a: table(a),
            lca_b: table(b),
        }
    }

    fn cost_with(&self, pairs: &[(NodeId, NodeId)], next: (NodeId, NodeId)) -> Rational {
        let mut worst = (self.lca_a[next.0 .0][next.0 .0] - self.lca_b[next.1 .0][next.1 .0]).abs();
        for &(x, y) in pairs {
            let d = (self.lca_a[x.0][next.0 .0] - self.lca_b[y.0][next.1 .0]).abs();
            worst = worst.max(d);
        }
        worst
    }

    fn run(&self) -> Rational {
        // upper bound from pairing every leaf with the other root
        let mut pairs: Vec<(NodeId, NodeId)> = Vec::new();
        let mut bound = Rational::ZERO;
        for &x in &self.leaves_a {
            bound = bound.max(self.cost_with(&pairs, (x, self.b.root())));
            pairs.push((x, self.b.root()));
        }
        for &y in &self.leaves_b {
            bound = bound.max(self.cost_with(&pairs, (self.a.root(), y)));
            pairs.push((self.a.root(), y));
        }
        let mut best = bound;
        let mut chosen = Vec::new();
        self.descend(0, &mut chosen, Rational::ZERO, &mut best);
        best
    }

    fn descend(
        &self,
        step: usize,
        pairs: &mut Vec<(NodeId, NodeId)>,
        current: Rational,
        best: &mut Rational,
    ) {
        let ka = self.leaves_a.len();
        let steps = ka + self.leaves_b.len();
        if step == steps {
            if current < *best {
                *best = current;
            }
            return;
        }
        let candidates: Vec<(NodeId, NodeId)> = if step < ka {
            let x = self.leaves_a[step];
            self.b.graph().nodes().map(|y| (x, y)).collect()
        } else {
            let y = self.leaves_b[step - ka];
            if pairs.iter().any(|&(_, w)| w == y) {
                self.descend(step + 1, pairs, current, best);
                return;
            }
            self.a.graph().nodes().map(|x| (x, y)).collect()
        };
        let mut scored: Vec<(Rational, (NodeId, NodeId))> = candidates
            .into_iter()
            .map(|p| (current.max(self.cost_with(pairs, p)), p))
            .filter(|(c, _)| c < best)
            .collect();
        scored.sort();
        for (cost, p) in scored {
            if cost >= *best {
                break;
            }
            pairs.push(p);
            self.descend(step + 1, pairs, cost, best);
            pairs.pop();
        }
    }
}

/// Whether the node classes of a merge tree are as expected for sublevel sets.
pub fn is_sublevel_shaped(tree: &MergeTree) -> bool {
    tree.graph().nodes().all(|v| {
        v == tree.root()
            || matches!(
                tree.graph().classify(v),
                NodeClass::Minimum | NodeClass::Join | NodeClass::Regular
            )
    })
}
