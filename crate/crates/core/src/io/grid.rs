use std::collections::BTreeSet;
use std::io::Read;

use crate::error::{Error, Result};
use crate::graph::{RawGraph, ReebGraph, UnionFind};
use crate::merge::MergeTree;
use crate::rational::Rational;

use super::document::perturb_ties;

/// Samples on a 1-D chain (one row) or a 2-D row-major grid with
/// 4-neighbour adjacency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarGrid {
    rows: usize,
    cols: usize,
    values: Vec<Rational>,
}

impl ScalarGrid {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Invalid("grid rows differ in length".into()));
        }
        let values: Vec<Rational> = rows.into_iter().flatten().collect();
        if values.is_empty() {
            return Err(Error::Invalid("grid is empty".into()));
        }
        Ok(ScalarGrid { rows: values.len() / cols, cols, values })
    }

    pub fn chain(values: Vec<Rational>) -> Result<Self> {
        Self::new(vec![values])
    }

    /// Reads CSV rows of `p/q` values, or decimals when allowed.
    pub fn read_csv(reader: impl Read, allow_decimal: bool) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
        let mut rows = Vec::new();
        for record in csv.records() {
            let record = record.map_err(|e| Error::Document(e.to_string()))?;
            let row = record
                .iter()
                .map(|s| Rational::parse_with(s, allow_decimal).map_err(|e| Error::Document(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::new(rows)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn value(&self, i: usize) -> Rational {
        self.values[i]
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let (r, c) = (i / self.cols, i % self.cols);
        let up = (r > 0).then(|| i - self.cols);
        let down = (r + 1 < self.rows).then(|| i + self.cols);
        let left = (c > 0).then(|| i - 1);
        let right = (c + 1 < self.cols).then(|| i + 1);
        [up, down, left, right].into_iter().flatten()
    }

    /// Sample indices in sweep order: by value, ties by index.
    fn order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by_key(|&i| (self.values[i], i));
        idx
    }

    fn name(i: usize) -> String {
        format!("v{i}")
    }
}

/// Sublevel-set merge tree: one leaf per component birth, one join per
/// merge, and a root sentinel one above the largest value.
pub fn ingest_merge_tree(grid: &ScalarGrid) -> Result<MergeTree> {
    let order = grid.order();
    let mut rank = vec![usize::MAX; grid.len()];
    let mut uf = UnionFind::new(grid.len());
    // current top tree node of each component, keyed by union-find root
    let mut top: Vec<usize> = vec![usize::MAX; grid.len()];
    let mut raw = RawGraph::default();
    for (k, &i) in order.iter().enumerate() {
        rank[i] = k;
        let mut comps: Vec<usize> = grid.neighbors(i).filter(|&j| rank[j] < k).map(|j| uf.find(j)).collect();
        comps.sort_unstable();
        comps.dedup();
        let node = match comps.len() {
            0 => Some(raw.nodes.len()),
            1 => None,
            _ => Some(raw.nodes.len()),
        };
        if let Some(node) = node {
            raw.nodes.push((ScalarGrid::name(i), grid.value(i)));
            for &c in &comps {
                raw.edges.push((raw.nodes[top[c]].0.clone(), raw.nodes[node].0.clone()));
            }
        }
        let keep = comps.first().map(|&c| top[c]);
        for &c in &comps {
            uf.union(c, i);
        }
        top[uf.find(i)] = node.or(keep).unwrap();
    }
    let last = top[uf.find(order[0])];
    let mut raw = untie(raw);
    let top_value = raw.nodes.iter().map(|(_, v)| *v).chain(grid.values.iter().copied()).max().unwrap();
    let sentinel = top_value + Rational::ONE;
    raw.edges.push((raw.nodes[last].0.clone(), "root".into()));
    raw.nodes.push(("root".into(), sentinel));
    MergeTree::new(ReebGraph::from_raw(&raw, crate::graph::Injectivity::Relaxed)?)
}

fn untie(raw: RawGraph) -> RawGraph {
    if crate::graph::validate(&raw).is_valid() {
        raw
    } else {
        perturb_ties(&raw)
    }
}

/// Level-set contour tree from the join and split trees of the sweep.
pub fn ingest_contour_tree(grid: &ScalarGrid) -> Result<ReebGraph> {
    let n = grid.len();
    let order = grid.order();
    let mut rank = vec![0usize; n];
    for (k, &i) in order.iter().enumerate() {
        rank[i] = k;
    }
    // join tree: each sample's parent is above it; split tree: below
    let join = sweep_tree(grid, &order, &rank);
    let reversed: Vec<usize> = order.iter().rev().copied().collect();
    let mut rev_rank = vec![0usize; n];
    for (k, &i) in reversed.iter().enumerate() {
        rev_rank[i] = k;
    }
    let split = sweep_tree(grid, &reversed, &rev_rank);

    let arcs = combine(n, join, split);
    let mut adjacency: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for &(a, b) in &arcs {
        adjacency[a].insert(b);
        adjacency[b].insert(a);
    }
    // drop regular samples (one neighbour below, one above)
    let mut alive = vec![true; n];
    for &i in &order {
        let below = adjacency[i].iter().filter(|&&j| rank[j] < rank[i]).count();
        let above = adjacency[i].len() - below;
        if below == 1 && above == 1 {
            let ends: Vec<usize> = adjacency[i].iter().copied().collect();
            let (a, b) = (ends[0], ends[1]);
            adjacency[a].remove(&i);
            adjacency[b].remove(&i);
            adjacency[a].insert(b);
            adjacency[b].insert(a);
            adjacency[i].clear();
            alive[i] = false;
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
    let mut raw = RawGraph {
        nodes: kept.iter().map(|&i| (ScalarGrid::name(i), grid.value(i))).collect(),
        ..RawGraph::default()
    };
    for &i in &kept {
        for &j in &adjacency[i] {
            if rank[i] < rank[j] {
                raw.edges.push((ScalarGrid::name(i), ScalarGrid::name(j)));
            }
        }
    }
    let raw = untie(raw);
    Ok(ReebGraph::from_raw(&raw, crate::graph::Injectivity::Strict)?)
}

/// Augmented sweep tree over all samples in `order`: `parent[i]` is the
/// sample at which the component of `i` next grows.
fn sweep_tree(grid: &ScalarGrid, order: &[usize], rank: &[usize]) -> Vec<Option<usize>> {
    let n = grid.len();
    let mut uf = UnionFind::new(n);
    let mut last = vec![usize::MAX; n];
    let mut parent = vec![None; n];
    for &i in order {
        let mut comps: Vec<usize> =
            grid.neighbors(i).filter(|&j| rank[j] < rank[i]).map(|j| uf.find(j)).collect();
        comps.sort_unstable();
        comps.dedup();
        for &c in &comps {
            parent[last[c]] = Some(i);
            uf.union(c, i);
        }
        last[uf.find(i)] = i;
    }
    parent
}

/// Merges the join tree (parents above) and split tree (parents below) by
/// repeatedly peeling leaves.
fn combine(n: usize, join_parent: Vec<Option<usize>>, split_parent: Vec<Option<usize>>) -> Vec<(usize, usize)> {
    struct Tree {
        parent: Vec<Option<usize>>,
        children: Vec<BTreeSet<usize>>,
    }
    impl Tree {
        fn new(parent: Vec<Option<usize>>) -> Self {
            let mut children = vec![BTreeSet::new(); parent.len()];
            for (i, p) in parent.iter().enumerate() {
                if let Some(p) = p {
                    children[*p].insert(i);
                }
            }
            Tree { parent, children }
        }
        /// Removes a node with at most one child, reconnecting around it.
        fn splice(&mut self, x: usize) {
            let child = self.children[x].iter().next().copied();
            let parent = self.parent[x];
            if let Some(p) = parent {
                self.children[p].remove(&x);
            }
            if let Some(c) = child {
                self.parent[c] = parent;
                if let Some(p) = parent {
                    self.children[p].insert(c);
                }
            }
            self.children[x].clear();
            self.parent[x] = None;
        }
    }
    let mut jt = Tree::new(join_parent);
    let mut st = Tree::new(split_parent);
    let mut removed = vec![false; n];
    let mut remaining = n;
    let mut arcs = Vec::with_capacity(n.saturating_sub(1));
    let is_upper = |jt: &Tree, st: &Tree, x: usize| st.children[x].is_empty() && jt.children[x].len() == 1;
    let is_lower = |jt: &Tree, st: &Tree, x: usize| jt.children[x].is_empty() && st.children[x].len() == 1;
    let mut queue: Vec<usize> = (0..n).filter(|&x| is_upper(&jt, &st, x) || is_lower(&jt, &st, x)).collect();
    while remaining > 1 {
        let Some(x) = queue.pop() else { break };
        if removed[x] {
            continue;
        }
        let (next, upper) = if is_upper(&jt, &st, x) {
            (st.parent[x], true)
        } else if is_lower(&jt, &st, x) {
            (jt.parent[x], false)
        } else {
            continue;
        };
        let Some(y) = next else { continue };
        arcs.push((x, y));
        if upper {
            st.children[y].remove(&x);
            st.parent[x] = None;
            jt.splice(x);
        } else {
            jt.children[y].remove(&x);
            jt.parent[x] = None;
            st.splice(x);
        }
        removed[x] = true;
        remaining -= 1;
        if is_upper(&jt, &st, y) || is_lower(&jt, &st, y) {
            queue.push(y);
        }
        // splicing can expose the spliced node's neighbours as leaves
        for z in [jt.parent[y], st.parent[y]].into_iter().flatten() {
            if !removed[z] && (is_upper(&jt, &st, z) || is_lower(&jt, &st, z)) {
                queue.push(z);
            }
        }
    }
    arcs
}
