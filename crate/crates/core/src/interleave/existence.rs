use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, GraphPoint, NodeId, ReebGraph};
use crate::par::{self, Mode};
use crate::rational::Rational;
use crate::smoothing::{smooth_with, Morphism, SmoothedReeb};
use crate::tree::{is_monotone, level_point, TreeIndex};

use super::commute;
use super::labeling::{find_inconsistency, Inconsistency, Labeling};

/// Upper bound on the number of anchor combinations tried per map.
pub const MAX_CHOICES: usize = 4096;

/// Which of the two interleaving maps a statement is about: `Forward` is
/// φ: T1 → T2^ε, `Backward` is ψ: T2 → T1^ε.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Forward,
    Backward,
}

impl Side {
    fn domain(self) -> usize {
        match self {
            Side::Forward => 0,
            Side::Backward => 1,
        }
    }

    fn codomain(self) -> usize {
        1 - self.domain()
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Forward => "phi",
            Side::Backward => "psi",
        })
    }
}

/// The first constraint found violated at a fixed ε.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Inconsistent(Inconsistency),
    /// The smoothed partner positions of a label are more than ε apart.
    NodeConstraint { side: Side, label: usize, gap: Rational },
    /// No point has its fiber ending at the forced image.
    NoCandidate { side: Side, label: usize },
    /// The unique tree path required for a node or edge is not monotone.
    PathExtension { side: Side, node: NodeId, edge: Option<EdgeId> },
    /// The lifted composition differs from the 2ε shift at a node.
    Commutativity { side: Side, node: NodeId },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Inconsistent(i) => write!(
                f,
                "label {} joins a {} to a {}; they move in different directions",
                i.label, i.first, i.second
            ),
            Witness::NodeConstraint { side, label, gap } => {
                write!(f, "{side}: label {label} partners are {gap} apart after smoothing")
            }
            Witness::NoCandidate { side, label } => {
                write!(f, "{side}: no admissible image for label {label}")
            }
            Witness::PathExtension { side, node, edge: Some(e) } => {
                write!(f, "{side}: edge {e} at node {node} has no monotone image")
            }
            Witness::PathExtension { side, node, edge: None } => {
                write!(f, "{side}: node {node} lies on no monotone image path")
            }
            Witness::Commutativity { side, node } => {
                write!(f, "{side}: lifted composition misses the 2ε shift at node {node}")
            }
        }
    }
}

/// C(v): the admissible images of labeled node `node` in the codomain's ε-smoothing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSet {
    pub node: NodeId,
    pub epsilon: Rational,
    pub candidates: Vec<GraphPoint>,
}

/// Outcome of the fixed-ε decision.
#[derive(Clone, Debug)]
pub struct FeasibilityVerdict {
    pub epsilon: Rational,
    pub feasible: bool,
    /// (φ, ψ) when feasible.
    pub maps: Option<(Morphism, Morphism)>,
    pub witness: Option<Witness>,
}

fn direction(graph: &ReebGraph, v: NodeId) -> Result<i8> {
    graph.classify(v).smoothing_direction().ok_or_else(|| {
        Error::Labeling(format!("node {} is {} and has no smoothing direction", graph.name(v), graph.classify(v)))
    })
}

fn signed(eps: Rational, dir: i8) -> Rational {
    if dir > 0 {
        eps
    } else {
        -eps
    }
}

/// φ^ε(s(v)) in R2^{2ε}: the point of P^ε(s(v′)) at height f1^ε(s(v)), or
/// `None` when the two heights are more than ε apart.
///
/// `sm2` smooths the codomain tree by ε and `sm22` smooths `sm2`'s graph by ε.
pub fn node_image_forced(
    domain: &ReebGraph,
    v: NodeId,
    sm2: &SmoothedReeb,
    sm22: &SmoothedReeb,
    partner: NodeId,
) -> Result<Option<GraphPoint>> {
    let eps = sm2.epsilon();
    let h1 = domain.value(v) + signed(eps, direction(domain, v)?);
    let s = sm2.correspondence(partner);
    let h2 = sm2.graph().point_value(&s);
    if (h1 - h2).abs() > eps {
        return Ok(None);
    }
    Ok(Some(sm22.projection(s, h1 - h2)?))
}

/// Points x of R2^ε at `level` whose fiber x × [−ε, ε] reaches `forced` at
/// its upper end (`dir` = +1) or lower end (`dir` = −1).
pub fn candidate_points(
    sm2: &SmoothedReeb,
    sm22: &SmoothedReeb,
    level: Rational,
    dir: i8,
    forced: GraphPoint,
) -> Vec<GraphPoint> {
    let t = signed(sm22.epsilon(), dir);
    let forced = sm22.graph().canonical(forced);
    sm2.graph()
        .points_at_level(level)
        .into_iter()
        .filter(|&x| sm22.project_unchecked(x, t) == forced)
        .collect()
}

/// One ε-probe: both trees, their labelings, and the four smoothings.
pub struct Probe {
    epsilon: Rational,
    mode: Mode,
    trees: [Arc<ReebGraph>; 2],
    labels: [Labeling; 2],
    once: [SmoothedReeb; 2],
    twice: [SmoothedReeb; 2],
    once_graphs: [Arc<ReebGraph>; 2],
}

impl Probe {
    /// Both trees must be normalized; labels must have equal length.
    pub fn new(
        t1: Arc<ReebGraph>,
        l1: Labeling,
        t2: Arc<ReebGraph>,
        l2: Labeling,
        epsilon: Rational,
        mode: Mode,
    ) -> Result<Self> {
        for t in [&t1, &t2] {
            if !t.is_tree() {
                return Err(crate::graph::GraphError::NotATree.into());
            }
            if !t.is_normalized() {
                return Err(Error::Invalid("trees must be superposition-normalized".into()));
            }
        }
        if l1.len() != l2.len() {
            return Err(Error::LabelMismatch(format!("{} labels vs {} labels", l1.len(), l2.len())));
        }
        l1.check_nodes(&t1)?;
        l2.check_nodes(&t2)?;
        let trees = [t1, t2];
        let once = pair(mode, |i| smooth_with(&trees[i], epsilon, mode))?;
        let twice = pair(mode, |i| smooth_with(once[i].graph(), epsilon, mode))?;
        let once_graphs = [Arc::new(once[0].graph().clone()), Arc::new(once[1].graph().clone())];
        Ok(Probe { epsilon, mode, trees, labels: [l1, l2], once, twice, once_graphs })
    }

    pub fn epsilon(&self) -> Rational {
        self.epsilon
    }

    pub fn tree(&self, i: usize) -> &Arc<ReebGraph> {
        &self.trees[i]
    }

    pub fn labeling(&self, i: usize) -> &Labeling {
        &self.labels[i]
    }

    /// Tree `i` smoothed by ε.
    pub fn once(&self, i: usize) -> &SmoothedReeb {
        &self.once[i]
    }

    /// Tree `i` smoothed by ε, then by ε again.
    pub fn twice(&self, i: usize) -> &SmoothedReeb {
        &self.twice[i]
    }

    pub(crate) fn mode(&self) -> Mode {
        self.mode
    }

    pub fn forced(&self, side: Side, label: usize) -> Result<Option<GraphPoint>> {
        let (d, c) = (side.domain(), side.codomain());
        node_image_forced(
            &self.trees[d],
            self.labels[d].node(label),
            &self.once[c],
            &self.twice[c],
            self.labels[c].node(label),
        )
    }

    pub fn candidate_set(&self, side: Side, label: usize, forced: GraphPoint) -> Result<CandidateSet> {
        let (d, c) = (side.domain(), side.codomain());
        let v = self.labels[d].node(label);
        let dir = direction(&self.trees[d], v)?;
        let candidates =
            candidate_points(&self.once[c], &self.twice[c], self.trees[d].value(v), dir, forced);
        Ok(CandidateSet { node: v, epsilon: self.epsilon, candidates })
    }

    /// Admissible images for each labeled domain node, intersected over its
    /// labels. Unlabeled nodes get `None`.
    fn anchors(&self, side: Side) -> Result<std::result::Result<Vec<Option<Vec<GraphPoint>>>, Witness>> {
        let d = side.domain();
        let labels: Vec<usize> = (1..=self.labels[d].len()).collect();
        let sets = par::map(self.mode, &labels, |&label| -> Result<_> {
            match self.forced(side, label)? {
                None => Ok(Err(label)),
                Some(y) => Ok(Ok(self.candidate_set(side, label, y)?)),
            }
        });
        let mut out: Vec<Option<Vec<GraphPoint>>> = vec![None; self.trees[d].node_count()];
        for (label, set) in labels.iter().zip(sets) {
            match set? {
                Err(label) => {
                    let c = side.codomain();
                    let v = self.labels[d].node(label);
                    let h1 = self.trees[d].value(v) + signed(self.epsilon, direction(&self.trees[d], v)?);
                    let s = self.once[c].correspondence(self.labels[c].node(label));
                    let gap = (h1 - self.once[c].graph().point_value(&s)).abs();
                    return Ok(Err(Witness::NodeConstraint { side, label, gap }));
                }
                Ok(set) => {
                    let slot = &mut out[set.node.0];
                    let next = match slot.take() {
                        None => set.candidates,
                        Some(prev) => prev.into_iter().filter(|p| set.candidates.contains(p)).collect(),
                    };
                    if next.is_empty() {
                        return Ok(Err(Witness::NoCandidate { side, label: *label }));
                    }
                    *slot = Some(next);
                }
            }
        }
        Ok(Ok(out))
    }

    /// Every morphism for `side` that respects the label constraints,
    /// or the first obstruction when there is none.
    pub fn extensions(&self, side: Side) -> Result<std::result::Result<Vec<Morphism>, Witness>> {
        let (d, c) = (side.domain(), side.codomain());
        let mut anchors = match self.anchors(side)? {
            Ok(a) => a,
            Err(w) => return Ok(Err(w)),
        };
        let dom = &self.trees[d];
        let cod = &self.once_graphs[c];
        let index = TreeIndex::new(cod)?;
        if anchors.iter().flatten().any(|set| set.len() > 1) {
            if let Some(v) = prune(dom, &index, &mut anchors) {
                let label = self.labels[d].labels_of(v)[0];
                return Ok(Err(Witness::NoCandidate { side, label }));
            }
        }
        let choices: Vec<NodeId> =
            dom.nodes().filter(|v| anchors[v.0].as_ref().is_some_and(|s| s.len() > 1)).collect();
        let total = choices.iter().try_fold(1usize, |acc, v| acc.checked_mul(anchors[v.0].as_ref().unwrap().len()));
        match total {
            Some(t) if t <= MAX_CHOICES => {}
            _ => {
                return Err(Error::SizeLimit {
                    what: "anchor combinations",
                    actual: total.unwrap_or(usize::MAX),
                    limit: MAX_CHOICES,
                })
            }
        }
        let mut picks: Vec<usize> = vec![0; choices.len()];
        let mut found = Vec::new();
        let mut first_failure = None;
        loop {
            let mut images: Vec<Option<GraphPoint>> =
                anchors.iter().map(|s| s.as_ref().map(|s| s[0])).collect();
            for (k, v) in choices.iter().enumerate() {
                images[v.0] = Some(anchors[v.0].as_ref().unwrap()[picks[k]]);
            }
            match extend_unique_tree(dom, cod, &index, &images, 0)? {
                Ok(m) => found.push(m),
                Err((node, edge)) => {
                    first_failure.get_or_insert(Witness::PathExtension { side, node, edge });
                }
            }
            if !advance(&mut picks, &choices, &anchors) {
                break;
            }
        }
        if found.is_empty() {
            return Ok(Err(first_failure.expect("at least one combination was tried")));
        }
        Ok(Ok(found))
    }

    /// Decides whether a labeled ε-interleaving exists.
    pub fn decide(&self) -> Result<FeasibilityVerdict> {
        let verdict = |witness: Witness| FeasibilityVerdict {
            epsilon: self.epsilon,
            feasible: false,
            maps: None,
            witness: Some(witness),
        };
        if let Some(bad) = find_inconsistency(&self.trees[0], &self.labels[0], &self.trees[1], &self.labels[1])? {
            return Ok(verdict(Witness::Inconsistent(bad)));
        }
        let phis = match self.extensions(Side::Forward)? {
            Ok(m) => m,
            Err(w) => return Ok(verdict(w)),
        };
        let psis = match self.extensions(Side::Backward)? {
            Ok(m) => m,
            Err(w) => return Ok(verdict(w)),
        };
        let mut failure = None;
        for phi in &phis {
            for psi in &psis {
                match commute::failure(self, phi, psi)? {
                    None => {
                        return Ok(FeasibilityVerdict {
                            epsilon: self.epsilon,
                            feasible: true,
                            maps: Some((phi.clone(), psi.clone())),
                            witness: None,
                        })
                    }
                    Some(w) => {
                        failure.get_or_insert(w);
                    }
                }
            }
        }
        Ok(verdict(failure.expect("at least one pair was tried")))
    }
}

fn pair<F>(mode: Mode, f: F) -> Result<[SmoothedReeb; 2]>
where
    F: Fn(usize) -> Result<SmoothedReeb> + Sync + Send,
{
    let mut out = par::map_range(mode, 2, f).into_iter();
    let a = out.next().unwrap()?;
    let b = out.next().unwrap()?;
    Ok([a, b])
}

fn advance(picks: &mut [usize], choices: &[NodeId], anchors: &[Option<Vec<GraphPoint>>]) -> bool {
    for k in 0..picks.len() {
        picks[k] += 1;
        if picks[k] < anchors[choices[k].0].as_ref().unwrap().len() {
            return true;
        }
        picks[k] = 0;
    }
    false
}

/// Labeled nodes reachable from `v` by a monotone path with unlabeled
/// interior, going up (`up`) or down.
fn monotone_neighbors(dom: &ReebGraph, labeled: &[bool], v: NodeId, up: bool) -> Vec<NodeId> {
    let mut out = Vec::new();
    let mut stack = vec![v];
    let mut seen = HashSet::new();
    while let Some(x) = stack.pop() {
        let next: Vec<EdgeId> = if up { dom.up_edges(x).collect() } else { dom.down_edges(x).collect() };
        for e in next {
            let w = dom.other(e, x);
            if !seen.insert(w) {
                continue;
            }
            if labeled[w.0] {
                out.push(w);
            } else {
                stack.push(w);
            }
        }
    }
    out
}

/// Drops anchor candidates that cannot reach any candidate of a labeled
/// node joined to them by a monotone path. Returns a node left without
/// candidates, if any.
fn prune(dom: &ReebGraph, index: &TreeIndex<'_>, anchors: &mut [Option<Vec<GraphPoint>>]) -> Option<NodeId> {
    let labeled: Vec<bool> = anchors.iter().map(Option::is_some).collect();
    let neighbors: Vec<Vec<NodeId>> = dom
        .nodes()
        .map(|v| {
            if labeled[v.0] {
                let mut n = monotone_neighbors(dom, &labeled, v, true);
                n.extend(monotone_neighbors(dom, &labeled, v, false));
                n
            } else {
                Vec::new()
            }
        })
        .collect();
    loop {
        let mut changed = false;
        for v in dom.nodes() {
            let Some(set) = anchors[v.0].clone() else { continue };
            if set.len() < 2 && neighbors[v.0].iter().all(|w| anchors[w.0].as_ref().unwrap().len() < 2) {
                continue;
            }
            let kept: Vec<GraphPoint> = set
                .iter()
                .copied()
                .filter(|&c| {
                    neighbors[v.0].iter().all(|w| {
                        anchors[w.0].as_ref().unwrap().iter().any(|&d| is_monotone(&index.path(c, d)))
                    })
                })
                .collect();
            if kept.is_empty() {
                return Some(v);
            }
            if kept.len() != set.len() {
                changed = true;
                anchors[v.0] = Some(kept);
            }
        }
        if !changed {
            return None;
        }
    }
}

fn walk_to_anchor(
    dom: &ReebGraph,
    images: &[Option<GraphPoint>],
    start: NodeId,
    up: bool,
    rotate: usize,
) -> Option<NodeId> {
    let mut at = start;
    loop {
        let edges: Vec<EdgeId> = if up { dom.up_edges(at).collect() } else { dom.down_edges(at).collect() };
        if edges.is_empty() {
            return None;
        }
        at = dom.other(edges[rotate % edges.len()], at);
        if images[at.0].is_some() {
            return Some(at);
        }
    }
}

/// Extends anchor images over the domain tree. Every unlabeled node lies on
/// a monotone path between two anchors, and its image is the point at its
/// height on the unique codomain path between their images. Each edge is
/// then routed along the unique codomain path between its endpoint images.
///
/// `rotate` picks which up or down edge the anchor search follows; the
/// result does not depend on it. Failure returns the blocking node and edge.
pub fn extend_unique_tree(
    dom: &Arc<ReebGraph>,
    cod: &Arc<ReebGraph>,
    index: &TreeIndex<'_>,
    anchors: &[Option<GraphPoint>],
    rotate: usize,
) -> Result<std::result::Result<Morphism, (NodeId, Option<EdgeId>)>> {
    let mut images: Vec<Option<GraphPoint>> = anchors.iter().map(|p| p.map(|p| cod.canonical(p))).collect();
    for u in dom.nodes() {
        if images[u.0].is_some() {
            continue;
        }
        let below = walk_to_anchor(dom, anchors, u, false, rotate);
        let above = walk_to_anchor(dom, anchors, u, true, rotate);
        let (Some(a), Some(b)) = (below, above) else {
            return Err(Error::Labeling(format!("node {} is not between two labeled nodes", dom.name(u))));
        };
        let start = images[a.0].unwrap();
        let path = index.path(start, images[b.0].unwrap());
        if !is_monotone(&path) {
            return Ok(Err((u, None)));
        }
        match level_point(cod, start, &path, dom.value(u)) {
            Some(p) => images[u.0] = Some(p),
            None => return Ok(Err((u, None))),
        }
    }
    let images: Vec<GraphPoint> = images.into_iter().map(Option::unwrap).collect();
    let mut routes = Vec::with_capacity(dom.edge_count());
    for e in dom.edge_ids() {
        let (lo, hi) = dom.oriented(e);
        let path = index.path(images[lo.0], images[hi.0]);
        if !is_monotone(&path) {
            return Ok(Err((lo, Some(e))));
        }
        routes.push(path.into_iter().filter(|s| s.from != s.to).collect());
    }
    match Morphism::new(dom.clone(), cod.clone(), images, routes) {
        Ok(m) => Ok(Ok(m)),
        Err(Error::Morphism(_)) => Ok(Err((NodeId(0), None))),
        Err(e) => Err(e),
    }
}
