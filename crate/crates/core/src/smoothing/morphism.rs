use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, GraphPoint, NodeId, ReebGraph};
use crate::rational::Rational;
use crate::tree::{is_monotone, level_point, Segment, TreeIndex};

use super::SmoothedReeb;

/// The codomain path an edge's interior follows, bottom to top.
pub type Route = Vec<Segment>;

/// A function-preserving map between Reeb graphs, given by node images and
/// the route taken by each edge.
#[derive(Clone, Debug)]
pub struct Morphism {
    domain: Arc<ReebGraph>,
    codomain: Arc<ReebGraph>,
    node_images: Vec<GraphPoint>,
    routes: Vec<Route>,
}

impl Morphism {
    /// Checks that every image preserves f and every route is a continuous
    /// upward path between the images of its edge's endpoints.
    pub fn new(
        domain: Arc<ReebGraph>,
        codomain: Arc<ReebGraph>,
        node_images: Vec<GraphPoint>,
        routes: Vec<Route>,
    ) -> Result<Self> {
        if node_images.len() != domain.node_count() || routes.len() != domain.edge_count() {
            return Err(Error::Morphism("image table sizes do not match the domain".into()));
        }
        let node_images: Vec<GraphPoint> =
            node_images.into_iter().map(|p| codomain.canonical(p)).collect();
        for v in domain.nodes() {
            let p = node_images[v.0];
            codomain.check_point(&p)?;
            if codomain.point_value(&p) != domain.value(v) {
                return Err(Error::Morphism(format!(
                    "node {} has value {} but its image has value {}",
                    domain.name(v),
                    domain.value(v),
                    codomain.point_value(&p)
                )));
            }
        }
        let m = Morphism { domain, codomain, node_images, routes };
        for e in m.domain.edge_ids() {
            m.check_route(e)?;
        }
        Ok(m)
    }

    fn check_route(&self, e: EdgeId) -> Result<()> {
        let (lo, hi) = self.domain.oriented(e);
        let route = &self.routes[e.0];
        let fail = |why: &str| Err(Error::Morphism(format!("route of edge {e}: {why}")));
        let cod = &self.codomain;
        let start = self.node_images[lo.0];
        let end = self.node_images[hi.0];
        if route.is_empty() {
            return if start == end && self.domain.value(lo) == self.domain.value(hi) {
                Ok(())
            } else {
                fail("empty route between distinct images")
            };
        }
        let point = |s: &Segment, h: Rational| cod.point_on_edge(s.edge, h).map(|p| cod.canonical(p));
        let mut at = start;
        let mut level = self.domain.value(lo);
        for s in route {
            if s.from != level || s.to < s.from {
                return fail("segments are not an upward parameterization");
            }
            if point(s, s.from) != Some(at) {
                return fail("segments are not connected");
            }
            at = match point(s, s.to) {
                Some(p) => p,
                None => return fail("segment leaves its edge"),
            };
            level = s.to;
        }
        if at != end || level != self.domain.value(hi) {
            return fail("route does not end at the image of the upper endpoint");
        }
        Ok(())
    }

    pub fn identity(graph: Arc<ReebGraph>) -> Self {
        let node_images = graph.nodes().map(|v| graph.canonical(GraphPoint::Node(v))).collect();
        let routes = graph
            .edge_ids()
            .map(|e| {
                let (a, b) = graph.edge_range(e);
                if a == b {
                    Vec::new()
                } else {
                    vec![Segment { edge: e, from: a, to: b }]
                }
            })
            .collect();
        Morphism { domain: graph.clone(), codomain: graph, node_images, routes }
    }

    /// Builds the map with the given node images on trees, routing each edge
    /// along the unique codomain path. Fails if a path is not monotone.
    pub fn from_tree_images(
        domain: Arc<ReebGraph>,
        codomain: Arc<ReebGraph>,
        node_images: Vec<GraphPoint>,
    ) -> Result<Self> {
        let index = TreeIndex::new(&codomain)?;
        let mut routes = Vec::with_capacity(domain.edge_count());
        for e in domain.edge_ids() {
            let (lo, hi) = domain.oriented(e);
            let path = index.path(node_images[lo.0], node_images[hi.0]);
            if !is_monotone(&path) {
                return Err(Error::Morphism(format!("edge {e} maps onto a non-monotone path")));
            }
            routes.push(path.into_iter().filter(|s| s.from != s.to).collect());
        }
        drop(index);
        Morphism::new(domain, codomain, node_images, routes)
    }

    /// Samples `eval` at every codomain node height crossed by each domain
    /// edge and at the midpoints between them.
    pub fn from_evaluator<F>(
        domain: Arc<ReebGraph>,
        codomain: Arc<ReebGraph>,
        eval: F,
    ) -> Result<Self>
    where
        F: Fn(GraphPoint) -> Result<GraphPoint>,
    {
        let mut heights: Vec<Rational> = codomain.values().to_vec();
        heights.sort_unstable();
        heights.dedup();
        let node_images = domain.nodes().map(|v| eval(GraphPoint::Node(v))).collect::<Result<Vec<_>>>()?;
        let mut routes = Vec::with_capacity(domain.edge_count());
        for e in domain.edge_ids() {
            let (a, b) = domain.edge_range(e);
            if a == b {
                routes.push(Vec::new());
                continue;
            }
            let mut breaks = vec![a];
            breaks.extend(heights.iter().copied().filter(|&h| a < h && h < b));
            breaks.push(b);
            let mut route = Vec::with_capacity(breaks.len() - 1);
            for w in breaks.windows(2) {
                let mid = domain.point_on_edge(e, w[0].midpoint(w[1])).expect("midpoint is interior");
                match eval(mid)? {
                    GraphPoint::Interior { edge, .. } => {
                        route.push(Segment { edge, from: w[0], to: w[1] })
                    }
                    GraphPoint::Node(_) => {
                        return Err(Error::Morphism(format!(
                            "edge {e} meets a codomain node between consecutive node heights"
                        )))
                    }
                }
            }
            routes.push(route);
        }
        Morphism::new(domain, codomain, node_images, routes)
    }

    pub fn domain(&self) -> &Arc<ReebGraph> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<ReebGraph> {
        &self.codomain
    }

    pub fn node_image(&self, v: NodeId) -> GraphPoint {
        self.node_images[v.0]
    }

    pub fn node_images(&self) -> &[GraphPoint] {
        &self.node_images
    }

    pub fn route(&self, e: EdgeId) -> &Route {
        &self.routes[e.0]
    }

    /// Image of any domain point.
    pub fn eval(&self, p: GraphPoint) -> GraphPoint {
        match p {
            GraphPoint::Node(v) => self.node_images[v.0],
            GraphPoint::Interior { edge, value } => {
                let (lo, _) = self.domain.oriented(edge);
                level_point(&self.codomain, self.node_images[lo.0], &self.routes[edge.0], value)
                    .expect("route covers the edge's range")
            }
        }
    }

    /// ψ ∘ φ, with `self` as φ.
    pub fn compose(&self, psi: &Morphism) -> Result<Morphism> {
        if self.codomain.as_ref() != psi.domain.as_ref() {
            return Err(Error::Morphism("composition of non-matching graphs".into()));
        }
        let node_images = self.node_images.iter().map(|&p| psi.eval(p)).collect();
        let routes = self
            .routes
            .iter()
            .map(|route| {
                let mut out = Vec::new();
                for s in route {
                    for t in &psi.routes[s.edge.0] {
                        let (from, to) = (t.from.max(s.from), t.to.min(s.to));
                        if from < to {
                            out.push(Segment { edge: t.edge, from, to });
                        }
                    }
                }
                out
            })
            .collect();
        Morphism::new(self.domain.clone(), psi.codomain.clone(), node_images, routes)
    }

    /// Pointwise equality, decided at nodes and at every route breakpoint and
    /// midpoint of either map.
    pub fn agrees_with(&self, other: &Morphism) -> bool {
        if self.domain.as_ref() != other.domain.as_ref()
            || self.codomain.as_ref() != other.codomain.as_ref()
        {
            return false;
        }
        if self.node_images != other.node_images {
            return false;
        }
        self.domain.edge_ids().all(|e| {
            let (a, b) = self.domain.edge_range(e);
            let mut hs: Vec<Rational> = self.routes[e.0]
                .iter()
                .chain(&other.routes[e.0])
                .flat_map(|s| [s.from, s.to])
                .filter(|&h| a < h && h < b)
                .collect();
            hs.push(a);
            hs.push(b);
            hs.sort_unstable();
            hs.dedup();
            let mut probes = hs.clone();
            probes.extend(hs.windows(2).map(|w| w[0].midpoint(w[1])));
            probes.into_iter().filter(|&h| a < h && h < b).all(|h| {
                let p = GraphPoint::Interior { edge: e, value: h };
                self.eval(p) == other.eval(p)
            })
        })
    }
}

/// The shift η: R → R^ε as a morphism.
pub fn shift_morphism(sm: &SmoothedReeb) -> Result<Morphism> {
    let domain = Arc::new(sm.source().clone());
    let codomain = Arc::new(sm.graph().clone());
    Morphism::from_evaluator(domain, codomain, |p| sm.shift_eta(p))
}

/// φ^δ: A^δ → B^δ induced by (x, t) ↦ (φ(x), t).
///
/// `sm_a` and `sm_b` must smooth φ's domain and codomain by the same δ. Every
/// thickening representative of each sampled point is checked to give the
/// same image.
pub fn lift_morphism(phi: &Morphism, sm_a: &SmoothedReeb, sm_b: &SmoothedReeb) -> Result<Morphism> {
    if sm_a.epsilon() != sm_b.epsilon() {
        return Err(Error::Morphism("lift needs both sides smoothed by the same delta".into()));
    }
    if sm_a.source() != phi.domain.as_ref() || sm_b.source() != phi.codomain.as_ref() {
        return Err(Error::Morphism("smoothings do not match the morphism".into()));
    }
    if sm_a.epsilon().is_zero() {
        return Ok(phi.clone());
    }
    let eval = |y: GraphPoint| -> Result<GraphPoint> {
        let mut image = None;
        for (x, t) in sm_a.representatives(y)? {
            let z = sm_b.projection(phi.eval(x), t)?;
            match image {
                None => image = Some(z),
                Some(prev) if prev != z => {
                    return Err(Error::Morphism(format!(
                        "lifted image depends on the representative at height {}",
                        sm_a.graph().point_value(&y)
                    )))
                }
                _ => {}
            }
        }
        image.ok_or_else(|| Error::Morphism("point without representative".into()))
    };
    Morphism::from_evaluator(Arc::new(sm_a.graph().clone()), Arc::new(sm_b.graph().clone()), eval)
}
