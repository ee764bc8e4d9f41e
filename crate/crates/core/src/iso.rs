//! Function-preserving isomorphism of small Reeb graphs by backtracking.
//!
//! Both graphs are first reduced to their [`GeometricForm`], so two graphs that
//! differ only by regular subdivision nodes or superposition bookkeeping compare
//! equal.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{GeometricForm, ReebGraph};

/// Default cap on reduced node count.
pub const DEFAULT_ISO_LIMIT: usize = 64;

pub fn function_preserving_isomorphic(g1: &ReebGraph, g2: &ReebGraph) -> Result<bool> {
    isomorphic_with_limit(g1, g2, DEFAULT_ISO_LIMIT)
}

pub fn isomorphic_with_limit(g1: &ReebGraph, g2: &ReebGraph, limit: usize) -> Result<bool> {
    let a = g1.geometric_form();
    let b = g2.geometric_form();
    for form in [&a, &b] {
        if form.values.len() > limit {
            return Err(Error::SizeLimit {
                what: "reduced node count",
                actual: form.values.len(),
                limit,
            });
        }
    }
    Ok(forms_isomorphic(&a, &b))
}

struct Indexed<'a> {
    form: &'a GeometricForm,
    multiplicity: HashMap<(usize, usize), usize>,
    neighbors: Vec<Vec<usize>>,
    signature: Vec<(usize, usize)>,
}

impl<'a> Indexed<'a> {
    fn new(form: &'a GeometricForm) -> Self {
        let n = form.values.len();
        let mut multiplicity = HashMap::new();
        let mut neighbors = vec![Vec::new(); n];
        let mut signature = vec![(0, 0); n];
        for &(a, b) in &form.edges {
            *multiplicity.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            neighbors[a].push(b);
            neighbors[b].push(a);
            let (lo, hi) = if form.values[a] < form.values[b] { (a, b) } else { (b, a) };
            signature[lo].0 += 1;
            signature[hi].1 += 1;
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Indexed { form, multiplicity, neighbors, signature }
    }

    fn mult(&self, a: usize, b: usize) -> usize {
        self.multiplicity.get(&(a.min(b), a.max(b))).copied().unwrap_or(0)
    }
}

fn forms_isomorphic(a: &GeometricForm, b: &GeometricForm) -> bool {
    if a.values.len() != b.values.len() || a.edges.len() != b.edges.len() {
        return false;
    }
    let mut va = a.values.clone();
    let mut vb = b.values.clone();
    va.sort();
    vb.sort();
    if va != vb {
        return false;
    }
    let ia = Indexed::new(a);
    let ib = Indexed::new(b);
    let mut sa = ia.signature.iter().zip(&a.values).collect::<Vec<_>>();
    let mut sb = ib.signature.iter().zip(&b.values).collect::<Vec<_>>();
    sa.sort();
    sb.sort();
    if sa != sb {
        return false;
    }
    // assign nodes in an order that keeps each next node adjacent to assigned ones
    let n = a.values.len();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while order.len() < n {
        let start = (0..n).find(|&i| !placed[i]).unwrap();
        let mut stack = vec![start];
        placed[start] = true;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &w in &ia.neighbors[v] {
                if !placed[w] {
                    placed[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    backtrack(&ia, &ib, &order, 0, &mut image, &mut used)
}

fn backtrack(
    a: &Indexed<'_>,
    b: &Indexed<'_>,
    order: &[usize],
    depth: usize,
    image: &mut [usize],
    used: &mut [bool],
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    let value = a.form.values[v];
    for w in 0..b.form.values.len() {
        if used[w] || b.form.values[w] != value || b.signature[w] != a.signature[v] {
            continue;
        }
        let consistent = a.neighbors[v].iter().all(|&u| {
            let iu = image[u];
            iu == usize::MAX || a.mult(v, u) == b.mult(w, iu)
        }) && b.neighbors[w].iter().all(|&x| {
            // an assigned codomain neighbor must be the image of a domain neighbor
            match image.iter().position(|&y| y == x) {
                Some(u) => a.mult(v, u) == b.mult(w, x),
                None => true,
            }
        });
        if !consistent {
            continue;
        }
        image[v] = w;
        used[w] = true;
        if backtrack(a, b, order, depth + 1, image, used) {
            return true;
        }
        image[v] = usize::MAX;
        used[w] = false;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    fn loop_graph(names: [&str; 2], lo: i64, hi: i64) -> ReebGraph {
        let mut b = GraphBuilder::new();
        let s = b.node(names[0], lo);
        let j = b.node(names[1], hi);
        b.edge(s, j).edge(j, s);
        b.build().unwrap()
    }

    fn segment(lo: i64, hi: i64) -> ReebGraph {
        let mut b = GraphBuilder::new();
        let x = b.node("a", lo);
        let y = b.node("b", hi);
        b.edge(x, y);
        b.build().unwrap()
    }

    #[test]
    fn reflexive_and_value_sensitive() {
        let g = segment(0, 4);
        assert!(function_preserving_isomorphic(&g, &g).unwrap());
        assert!(!function_preserving_isomorphic(&g, &segment(0, 5)).unwrap());
    }

    #[test]
    fn renaming_invariant() {
        let a = loop_graph(["s", "j"], 0, 4);
        let b = loop_graph(["bottom", "top"], 0, 4);
        assert!(function_preserving_isomorphic(&a, &b).unwrap());
        assert!(!function_preserving_isomorphic(&a, &segment(0, 4)).unwrap());
    }

    #[test]
    fn subdivision_is_invisible() {
        let mut b = GraphBuilder::new();
        let x = b.node("a", 0);
        let m = b.node("m", 1);
        let y = b.node("b", 4);
        b.edge(x, m).edge(m, y);
        assert!(function_preserving_isomorphic(&b.build().unwrap(), &segment(0, 4)).unwrap());
    }

    #[test]
    fn distinguishes_branch_attachment() {
        // two Y shapes with the same values but the branch hanging off different maxima
        let build = |swap: bool| {
            let mut b = GraphBuilder::new();
            let lo = b.node("lo", 0);
            let s1 = b.node("s1", 1);
            let s2 = b.node("s2", 2);
            let m3 = b.node("m3", 3);
            let m4 = b.node("m4", 4);
            let m5 = b.node("m5", 5);
            b.edge(lo, s1).edge(s1, s2);
            if swap {
                b.edge(s1, m3).edge(s2, m4).edge(s2, m5);
            } else {
                b.edge(s1, m4).edge(s2, m3).edge(s2, m5);
            }
            b.build().unwrap()
        };
        assert!(!function_preserving_isomorphic(&build(true), &build(false)).unwrap());
        assert!(function_preserving_isomorphic(&build(true), &build(true)).unwrap());
    }

    #[test]
    fn size_limit_is_reported() {
        let g = segment(0, 1);
        assert!(isomorphic_with_limit(&g, &g, 1).unwrap_err().is_size_limit());
    }
}
