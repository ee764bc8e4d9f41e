use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{validate, Injectivity, NodeId, RawGraph, ReebGraph, ValidationReport};
use crate::interleave::Labeling;
use crate::rational::Rational;

pub const FORMAT_VERSION: u32 = 1;

/// Node ids may be written as strings or non-negative integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeKey {
    Int(u64),
    Text(String),
}

impl fmt::Display for NodeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeKey::Int(i) => write!(f, "{i}"),
            NodeKey::Text(s) => f.write_str(s),
        }
    }
}

/// A function value: `[numerator, denominator]`, an integer, or a literal
/// that is parsed exactly (decimals only when the reader allows them).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValueField {
    Pair(i64, i64),
    Text(String),
    Number(serde_json::Number),
}

impl ValueField {
    pub fn exact(v: Rational) -> Self {
        match (i64::try_from(v.numer()), i64::try_from(v.denom())) {
            (Ok(n), Ok(d)) => ValueField::Pair(n, d),
            _ => ValueField::Text(v.to_string()),
        }
    }

    fn resolve(&self, allow_decimal: bool) -> Result<Rational> {
        let bad = |e: crate::rational::ParseRationalError| Error::Document(e.to_string());
        match self {
            ValueField::Pair(n, d) => Rational::checked_new(*n as i128, *d as i128)
                .ok_or_else(|| Error::Document(format!("zero denominator in [{n}, {d}]"))),
            ValueField::Text(s) => Rational::parse_with(s, allow_decimal).map_err(bad),
            ValueField::Number(x) => Rational::parse_with(&x.to_string(), allow_decimal).map_err(bad),
        }
    }
}

impl Serialize for ValueField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ValueField::Pair(n, d) => [n, d].serialize(s),
            ValueField::Text(t) => t.serialize(s),
            ValueField::Number(x) => x.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for ValueField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        use serde_json::Value;
        match Value::deserialize(d)? {
            Value::Array(items) => match items.as_slice() {
                [Value::Number(n), Value::Number(q)] => match (n.as_i64(), q.as_i64()) {
                    (Some(n), Some(q)) => Ok(ValueField::Pair(n, q)),
                    _ => Err(D::Error::custom("value pair must hold two integers")),
                },
                _ => Err(D::Error::custom("value pair must be [numerator, denominator]")),
            },
            Value::String(t) => Ok(ValueField::Text(t)),
            Value::Number(x) => Ok(ValueField::Number(x)),
            other => Err(D::Error::custom(format!("unexpected value {other}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeEntry {
    pub id: NodeKey,
    pub f: ValueField,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<usize>,
}

/// The on-disk form of one graph and its labeling.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub version: u32,
    pub nodes: Vec<NodeEntry>,
    pub edges: Vec<[NodeKey; 2]>,
    #[serde(default)]
    pub superpositions: Vec<[NodeKey; 2]>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReadOptions {
    pub allow_decimal: bool,
    /// Accept value collisions between unrelated nodes.
    pub relaxed: bool,
}

impl GraphDocument {
    pub fn from_graph(graph: &ReebGraph, labeling: Option<&Labeling>) -> Self {
        let nodes = graph
            .nodes()
            .map(|v| {
                NodeEntry {
                    id: NodeKey::Text(graph.name(v).to_string()),
                    f: ValueField::exact(graph.value(v)),
                    labels: labeling.map(|l| l.labels_of(v)).unwrap_or_default(),
                }
            })
            .collect();
        let key = |v: NodeId| NodeKey::Text(graph.name(v).to_string());
        GraphDocument {
            version: FORMAT_VERSION,
            nodes,
            edges: graph.edges().iter().map(|&(a, b)| [key(a), key(b)]).collect(),
            superpositions: graph.superpositions().iter().map(|&(j, s)| [key(j), key(s)]).collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: GraphDocument = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        if doc.version != FORMAT_VERSION {
            return Err(Error::Document(format!("unsupported format version {}", doc.version)));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn to_raw(&self, allow_decimal: bool) -> Result<RawGraph> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| Ok((n.id.to_string(), n.f.resolve(allow_decimal)?)))
            .collect::<Result<Vec<_>>>()?;
        let pair = |[a, b]: &[NodeKey; 2]| (a.to_string(), b.to_string());
        Ok(RawGraph {
            nodes,
            edges: self.edges.iter().map(pair).collect(),
            superpositions: self.superpositions.iter().map(pair).collect(),
        })
    }

    /// The validation report for the document's graph.
    pub fn validate(&self, allow_decimal: bool) -> Result<ValidationReport> {
        Ok(validate(&self.to_raw(allow_decimal)?))
    }

    pub fn labeling(&self) -> Result<Labeling> {
        let pairs = self
            .nodes
            .iter()
            .enumerate()
            .flat_map(|(i, n)| n.labels.iter().map(move |&l| (l, NodeId(i))));
        Labeling::from_pairs(pairs)
    }

    pub fn to_graph(&self, options: ReadOptions) -> Result<(ReebGraph, Labeling)> {
        let raw = self.to_raw(options.allow_decimal)?;
        let injectivity = if options.relaxed { Injectivity::Relaxed } else { Injectivity::Strict };
        let graph = ReebGraph::from_raw(&raw, injectivity)?;
        Ok((graph, self.labeling()?))
    }
}

/// Replaces each group of equal node values outside superposition pairs by
/// an increasing run in node order, shifted by less than any gap between
/// distinct values.
pub fn perturb_ties(raw: &RawGraph) -> RawGraph {
    let n = raw.nodes.len();
    let mut distinct: Vec<Rational> = raw.nodes.iter().map(|(_, v)| *v).collect();
    distinct.sort();
    distinct.dedup();
    let gap = distinct.windows(2).map(|w| w[1] - w[0]).min().unwrap_or(Rational::ONE).min(Rational::ONE);
    let step = gap / Rational::from_int(n as i128 + 1);
    let index: HashMap<&str, usize> = raw.nodes.iter().enumerate().map(|(i, (s, _))| (s.as_str(), i)).collect();
    // superposition partners move together with their join-part
    let mut anchor: Vec<usize> = (0..n).collect();
    for (j, s) in &raw.superpositions {
        if let (Some(&a), Some(&b)) = (index.get(j.as_str()), index.get(s.as_str())) {
            anchor[b] = a;
        }
    }
    let mut rank = vec![0i128; n];
    let mut seen: HashMap<Rational, i128> = HashMap::new();
    for i in 0..n {
        if anchor[i] == i {
            let count = seen.entry(raw.nodes[i].1).or_insert(0);
            rank[i] = *count;
            *count += 1;
        }
    }
    let mut out = raw.clone();
    for i in 0..n {
        out.nodes[i].1 = raw.nodes[i].1 + step * Rational::from_int(rank[anchor[i]]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    #[test]
    fn round_trip_keeps_structure_and_labels() {
        let mut b = GraphBuilder::new();
        let s = b.node("s", 0);
        let j = b.node("j", Rational::new(7, 3));
        let t = b.node("t", 5);
        b.edge(s, j).edge(s, j).edge(j, t);
        let g = b.build().unwrap();
        let l = Labeling::new(vec![t, s]);
        let doc = GraphDocument::from_graph(&g, Some(&l));
        let back = GraphDocument::parse(&doc.to_json()).unwrap();
        let (g2, l2) = back.to_graph(ReadOptions::default()).unwrap();
        assert_eq!(g2, g);
        assert_eq!(l2, l);
    }

    #[test]
    fn decimals_need_the_flag() {
        let text = r#"{"version":1,"nodes":[{"id":0,"f":0.25},{"id":1,"f":"3/2"}],"edges":[[0,1]]}"#;
        let doc = GraphDocument::parse(text).unwrap();
        assert!(doc.to_graph(ReadOptions::default()).is_err());
        let opts = ReadOptions { allow_decimal: true, relaxed: false };
        let (g, _) = doc.to_graph(opts).unwrap();
        assert_eq!(g.value(NodeId(0)), Rational::new(1, 4));
    }

    #[test]
    fn ties_are_rejected_then_perturbed() {
        let text = r#"{"version":1,"nodes":[{"id":"a","f":[0,1]},{"id":"b","f":[0,1]},{"id":"c","f":[1,1]}],
            "edges":[["a","c"],["b","c"]]}"#;
        let doc = GraphDocument::parse(text).unwrap();
        assert!(doc.to_graph(ReadOptions::default()).is_err());
        let raw = perturb_ties(&doc.to_raw(false).unwrap());
        assert!(validate(&raw).is_valid());
        assert!(raw.nodes[0].1 < raw.nodes[1].1 && raw.nodes[1].1 < raw.nodes[2].1);
    }
}
