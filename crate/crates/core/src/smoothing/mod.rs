//! ε-smoothing by a level sweep over the thickening G × [−ε, ε].
//!
//! The level set of F(x, t) = f(x) + t at height h is homeomorphic to the
//! window f⁻¹[h − ε, h + ε], so a point of the smoothed graph at height h is a
//! connected component of that window. Components only change at the critical
//! heights {f(v) ± ε}; between two of them the structure is constant. The sweep
//! therefore runs union-find over the active cells (nodes inside the window and
//! edges meeting it) once per critical height and once per open gap, and links
//! each gap component to the components it limits to on either side.

mod morphism;
mod region;

pub use morphism::{lift_morphism, shift_morphism, Morphism, Route};
pub use region::{n_eps_region, PathNeighborhood, Region};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, GraphError, GraphPoint, NodeId, ReebGraph, UnionFind};
use crate::par::{self, Mode};
use crate::rational::Rational;

/// What a raw sweep item became in the output graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Target {
    Node(NodeId),
    Edge(EdgeId),
}

#[derive(Clone, Debug)]
struct Slice {
    value: Rational,
    /// (source element, local component), sorted by element. Nodes are
    /// elements `0..n`, edges `n..n + m`.
    table: Vec<(u32, u32)>,
    reps: Vec<u32>,
    offset: usize,
}

impl Slice {
    fn component(&self, element: u32) -> Option<usize> {
        self.table
            .binary_search_by_key(&element, |&(e, _)| e)
            .ok()
            .map(|i| self.offset + self.table[i].1 as usize)
    }
}

/// The smoothed graph R^ε together with the data needed to evaluate the
/// projection π, the shift η and the node correspondence s.
#[derive(Clone, Debug)]
pub struct SmoothedReeb {
    graph: ReebGraph,
    epsilon: Rational,
    source: ReebGraph,
    slices: Vec<Slice>,
    /// Critical heights; slice `2i` sits at `levels[i]`.
    levels: Vec<Rational>,
    targets: Vec<Target>,
    /// Raw items along each output edge, bottom to top.
    chains: Vec<Vec<usize>>,
    /// Raw node behind each output node (split-parts share their join-part's).
    node_raw: Vec<usize>,
    correspondence: Vec<GraphPoint>,
}

/// Smooths `graph` by `epsilon`.
pub fn smooth(graph: &ReebGraph, epsilon: Rational) -> Result<SmoothedReeb> {
    smooth_with(graph, epsilon, Mode::default())
}

pub fn smooth_with(graph: &ReebGraph, epsilon: Rational, mode: Mode) -> Result<SmoothedReeb> {
    if epsilon.is_negative() {
        return Err(Error::NegativeEpsilon(epsilon));
    }
    if epsilon.is_zero() {
        return Ok(identity(graph));
    }
    Sweep::new(graph, epsilon).run(mode)
}

fn identity(graph: &ReebGraph) -> SmoothedReeb {
    SmoothedReeb {
        graph: graph.clone(),
        epsilon: Rational::ZERO,
        source: graph.clone(),
        slices: Vec::new(),
        levels: Vec::new(),
        targets: Vec::new(),
        chains: Vec::new(),
        node_raw: Vec::new(),
        correspondence: graph.nodes().map(|v| graph.canonical(GraphPoint::Node(v))).collect(),
    }
}

struct Sweep<'g> {
    g: &'g ReebGraph,
    eps: Rational,
    /// nodes sorted by value
    by_value: Vec<NodeId>,
    /// edges sorted by lower value, with (lo, hi, lo value, hi value)
    by_low: Vec<(EdgeId, NodeId, NodeId, Rational, Rational)>,
}

impl<'g> Sweep<'g> {
    fn new(g: &'g ReebGraph, eps: Rational) -> Self {
        let mut by_value: Vec<NodeId> = g.nodes().collect();
        by_value.sort_by_key(|&v| (g.value(v), v));
        let mut by_low: Vec<_> = g
            .edge_ids()
            .map(|e| {
                let (lo, hi) = g.oriented(e);
                (e, lo, hi, g.value(lo), g.value(hi))
            })
            .collect();
        by_low.sort_by_key(|t| (t.3, t.0));
        Sweep { g, eps, by_value, by_low }
    }

    fn slice_at(&self, h: Rational) -> Slice {
        let n = self.g.node_count() as u32;
        let (lo_w, hi_w) = (h - self.eps, h + self.eps);
        let start = self.by_value.partition_point(|&v| self.g.value(v) < lo_w);
        let end = self.by_value.partition_point(|&v| self.g.value(v) <= hi_w);
        let mut elements: Vec<u32> = self.by_value[start..end].iter().map(|v| v.0 as u32).collect();
        let prefix = self.by_low.partition_point(|t| t.3 <= hi_w);
        let mut links: Vec<(u32, u32)> = Vec::new();
        for &(e, lo, hi, flo, fhi) in &self.by_low[..prefix] {
            if fhi < lo_w {
                continue;
            }
            let id = n + e.0 as u32;
            elements.push(id);
            if flo >= lo_w {
                links.push((id, lo.0 as u32));
            }
            if fhi <= hi_w {
                links.push((id, hi.0 as u32));
            }
        }
        elements.sort_unstable();
        let index = |x: u32| elements.binary_search(&x).expect("linked node must be active");
        let mut uf = UnionFind::new(elements.len());
        for &(a, b) in &links {
            uf.union(index(a), index(b));
        }
        let mut local = vec![u32::MAX; elements.len()];
        let mut reps = Vec::new();
        let mut table = Vec::with_capacity(elements.len());
        for (i, &x) in elements.iter().enumerate() {
            let r = uf.find(i);
            if local[r] == u32::MAX {
                local[r] = reps.len() as u32;
                reps.push(x);
            }
            table.push((x, local[r]));
        }
        Slice { value: h, table, reps, offset: 0 }
    }

    fn run(self, mode: Mode) -> Result<SmoothedReeb> {
        let g = self.g;
        let mut levels: Vec<Rational> = g
            .values()
            .iter()
            .flat_map(|&v| [v - self.eps, v + self.eps])
            .collect();
        levels.sort_unstable();
        levels.dedup();
        let mut heights = Vec::with_capacity(2 * levels.len());
        for (i, &c) in levels.iter().enumerate() {
            heights.push(c);
            if let Some(&next) = levels.get(i + 1) {
                heights.push(c.midpoint(next));
            }
        }
        let mut slices = par::map(mode, &heights, |&h| self.slice_at(h));
        let mut offset = 0;
        for s in &mut slices {
            s.offset = offset;
            offset += s.reps.len();
        }
        let raw_count = offset;
        let mut raw_slice = vec![0usize; raw_count];
        for (k, s) in slices.iter().enumerate() {
            for c in 0..s.reps.len() {
                raw_slice[s.offset + c] = k;
            }
        }

        // raw edges (odd slices) link to raw nodes (even slices) below and above
        let mut below = vec![usize::MAX; raw_count];
        let mut above = vec![usize::MAX; raw_count];
        let mut ups: Vec<Vec<usize>> = vec![Vec::new(); raw_count];
        let mut downs: Vec<Vec<usize>> = vec![Vec::new(); raw_count];
        for k in (1..slices.len()).step_by(2) {
            let s = &slices[k];
            for (c, &rep) in s.reps.iter().enumerate() {
                let id = s.offset + c;
                let b = slices[k - 1].component(rep).expect("gap cell active below");
                let a = slices[k + 1].component(rep).expect("gap cell active above");
                below[id] = b;
                above[id] = a;
                ups[b].push(id);
                downs[a].push(id);
            }
        }

        // keep raw nodes that are not regular, contract the rest into chains
        let is_node = |id: usize| raw_slice[id] % 2 == 0;
        let regular = |id: usize| ups[id].len() == 1 && downs[id].len() == 1;
        let mut targets = vec![Target::Node(NodeId(usize::MAX)); raw_count];
        let mut names = Vec::new();
        let mut values = Vec::new();
        let mut node_raw = Vec::new();
        for id in 0..raw_count {
            if is_node(id) && !regular(id) {
                targets[id] = Target::Node(NodeId(values.len()));
                names.push(format!("v{}", values.len()));
                values.push(slices[raw_slice[id]].value);
                node_raw.push(id);
            }
        }
        let mut edges = Vec::new();
        let mut chains = Vec::new();
        for &start in &node_raw {
            let Target::Node(from) = targets[start] else { unreachable!() };
            for &first in &ups[start] {
                let e = EdgeId(edges.len());
                let mut chain = vec![first];
                targets[first] = Target::Edge(e);
                let mut top = above[first];
                while regular(top) {
                    targets[top] = Target::Edge(e);
                    chain.push(top);
                    let next = ups[top][0];
                    targets[next] = Target::Edge(e);
                    chain.push(next);
                    top = above[next];
                }
                let Target::Node(to) = targets[top] else { unreachable!() };
                edges.push((from, to));
                chains.push(chain);
            }
        }
        let raw_graph = ReebGraph::from_parts(names, values, edges, Vec::new())
            .map_err(|e| match e {
                GraphError::Invalid(r) => Error::Invalid(format!("smoothing produced {r}")),
                other => Error::Graph(other),
            })?;
        let (graph, map) = raw_graph.normalize_superpositions();
        for (i, &(_, split)) in map.parts.iter().enumerate() {
            if split.0 >= node_raw.len() {
                debug_assert_eq!(split.0, node_raw.len());
                node_raw.push(node_raw[i]);
            }
        }
        chains.resize(graph.edge_count(), Vec::new());

        let mut sm = SmoothedReeb {
            graph,
            epsilon: self.eps,
            source: g.clone(),
            slices,
            levels,
            targets,
            chains,
            node_raw,
            correspondence: Vec::new(),
        };
        sm.correspondence = g
            .nodes()
            .map(|v| {
                let t = match g.classify(v).smoothing_direction() {
                    Some(1) => self.eps,
                    Some(_) => -self.eps,
                    None => Rational::ZERO,
                };
                sm.project_unchecked(GraphPoint::Node(v), t)
            })
            .collect();
        Ok(sm)
    }
}

impl SmoothedReeb {
    /// The smoothed graph R^ε.
    pub fn graph(&self) -> &ReebGraph {
        &self.graph
    }

    pub fn epsilon(&self) -> Rational {
        self.epsilon
    }

    pub fn source(&self) -> &ReebGraph {
        &self.source
    }

    /// The node correspondence s: maxima and splits are sent to the class of
    /// (v, ε), minima and joins to (v, −ε), other nodes to η(v).
    pub fn correspondence(&self, v: NodeId) -> GraphPoint {
        self.correspondence[v.0]
    }

    /// π(x, t), the class of (x, t) in the smoothed graph.
    pub fn projection(&self, x: GraphPoint, t: Rational) -> Result<GraphPoint> {
        self.source.check_point(&x)?;
        if t.abs() > self.epsilon {
            return Err(Error::Invalid(format!("offset {t} outside [-{0}, {0}]", self.epsilon)));
        }
        Ok(self.project_unchecked(x, t))
    }

    /// η(x) = π(x, 0).
    pub fn shift_eta(&self, x: GraphPoint) -> Result<GraphPoint> {
        self.projection(x, Rational::ZERO)
    }

    pub(crate) fn project_unchecked(&self, x: GraphPoint, t: Rational) -> GraphPoint {
        if self.epsilon.is_zero() {
            return self.source.canonical(x);
        }
        let h = self.source.point_value(&x) + t;
        let element = match x {
            GraphPoint::Node(v) => v.0 as u32,
            GraphPoint::Interior { edge, .. } => (self.source.node_count() + edge.0) as u32,
        };
        let k = self.slice_index(h);
        let raw = self.slices[k].component(element).expect("projected cell is active");
        match self.targets[raw] {
            Target::Node(v) => self.graph.canonical(GraphPoint::Node(v)),
            Target::Edge(e) => self
                .graph
                .point_on_edge(e, h)
                .map(|p| self.graph.canonical(p))
                .expect("chain value lies on its edge"),
        }
    }

    fn slice_index(&self, h: Rational) -> usize {
        let i = self.levels.partition_point(|&c| c < h);
        if i < self.levels.len() && self.levels[i] == h {
            2 * i
        } else {
            debug_assert!(i > 0 && i < self.levels.len(), "height {h} outside the smoothed range");
            2 * i - 1
        }
    }

    /// A thickening representative (x, t) with π(x, t) = y. Nodes of the
    /// source are preferred over edge interiors.
    pub fn representative(&self, y: GraphPoint) -> Result<(GraphPoint, Rational)> {
        let reps = self.representatives(y)?;
        Ok(reps
            .iter()
            .copied()
            .find(|(x, _)| matches!(x, GraphPoint::Node(_)))
            .unwrap_or(reps[0]))
    }

    /// One representative (x, t) per source cell of the component behind `y`.
    pub fn representatives(&self, y: GraphPoint) -> Result<Vec<(GraphPoint, Rational)>> {
        self.graph.check_point(&y)?;
        if self.epsilon.is_zero() {
            let mut out = vec![(y, Rational::ZERO)];
            if let GraphPoint::Node(v) = y {
                if let Some(w) = self.graph.partner(v) {
                    out.push((GraphPoint::Node(w), Rational::ZERO));
                }
            }
            return Ok(out);
        }
        let h = self.graph.point_value(&y);
        let raw = match y {
            GraphPoint::Node(v) => self.node_raw[v.0],
            GraphPoint::Interior { edge, value } => {
                let k = self.slice_index(value);
                let chain = &self.chains[edge.0];
                let pos = chain.partition_point(|&r| self.raw_slice(r) < k);
                match chain.get(pos) {
                    Some(&r) if self.raw_slice(r) == k => r,
                    _ => {
                        return Err(Error::Invalid(format!(
                            "no sweep record for {value} on edge {edge}"
                        )))
                    }
                }
            }
        };
        let slice = &self.slices[self.raw_slice(raw)];
        let comp = (raw - slice.offset) as u32;
        let n = self.source.node_count();
        Ok(slice
            .table
            .iter()
            .filter(|&&(_, c)| c == comp)
            .map(|&(element, _)| {
                let x = if (element as usize) < n {
                    GraphPoint::Node(NodeId(element as usize))
                } else {
                    let e = EdgeId(element as usize - n);
                    let (lo, hi) = self.source.edge_range(e);
                    self.source
                        .point_on_edge(e, h.max(lo).min(hi))
                        .expect("clamped value lies on edge")
                };
                (x, h - self.source.point_value(&x))
            })
            .collect())
    }

    fn raw_slice(&self, raw: usize) -> usize {
        self.slices.partition_point(|s| s.offset <= raw) - 1
    }

    /// Critical heights of the sweep, in increasing order.
    pub fn critical_heights(&self) -> &[Rational] {
        &self.levels
    }
}

#[cfg(test)]
mod tests;
