use super::{Hypergraph, Vertex};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Serialize, Deserialize)]
struct JsonHypergraph {
    n: usize,
    #[serde(default)]
    uniformity: Option<usize>,
    edges: Vec<Vec<Vertex>>,
}

impl Hypergraph {
    /// Canonical text form: `hg1 <N> <M> <r|0>` followed by one edge per line.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(16 + self.vertices.len() * 6);
        let _ = writeln!(
            out,
            "hg1 {} {} {}",
            self.n,
            self.edge_count(),
            self.uniformity.unwrap_or(0)
        );
        for e in self.edges() {
            for (j, v) in e.iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::input("empty hypergraph file"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "hg1" {
            return Err(Error::input(format!("bad hypergraph header: {header:?}")));
        }
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::input(format!("bad integer {s:?} in header")))
        };
        let (n, m, r) = (parse(fields[1])?, parse(fields[2])?, parse(fields[3])?);
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            let edge = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<Vertex>()
                        .map_err(|_| Error::input(format!("bad vertex id {tok:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if edge.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::input(format!(
                    "edge line {line:?} is not strictly increasing"
                )));
            }
            edges.push(edge);
        }
        if edges.len() != m {
            return Err(Error::input(format!(
                "header declares {m} edges but {} were read",
                edges.len()
            )));
        }
        let declared = (r != 0).then_some(r);
        Hypergraph::build(n, declared, edges)
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = JsonHypergraph {
            n: self.n,
            uniformity: self.uniformity,
            edges: self.edges().map(<[Vertex]>::to_vec).collect(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let doc: JsonHypergraph = serde_json::from_str(text)?;
        Hypergraph::build(doc.n, doc.uniformity, doc.edges)
    }

    /// Accepts either the text form or the JSON mirror.
    pub fn parse_any(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_text(text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn text_layout_is_exact() {
        let h = Hypergraph::new(4, [vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        assert_eq!(h.to_text(), "hg1 4 2 3\n0 1 2\n1 2 3\n");
        let mixed = Hypergraph::new(3, [vec![0, 1], vec![0, 1, 2]]).unwrap();
        assert_eq!(mixed.to_text(), "hg1 3 2 0\n0 1\n0 1 2\n");
    }

    #[test]
    fn rejects_malformed_text() {
        assert!(Hypergraph::parse_text("hg2 3 0 0").is_err());
        assert!(Hypergraph::parse_text("hg1 3 2 2\n0 1\n").is_err());
        assert!(Hypergraph::parse_text("hg1 3 1 2\n1 0\n").is_err());
        assert!(Hypergraph::parse_text("hg1 3 1 3\n0 1\n").is_err());
        assert!(Hypergraph::parse_text("").is_err());
    }

    #[test]
    fn json_mirror() {
        let h = Hypergraph::parse_any(r#"{"n": 5, "uniformity": 2, "edges": [[0, 4], [1, 3]]}"#)
            .unwrap();
        assert_eq!(h.edge_count(), 2);
        let back = Hypergraph::parse_json(&h.to_json().unwrap()).unwrap();
        assert_eq!(back.to_text(), h.to_text());
    }

    proptest! {
        #[test]
        fn text_round_trip(n in 3usize..12, raw in proptest::collection::btree_set(proptest::collection::btree_set(0u32..12, 2..5), 0..15)) {
            let edges: Vec<Vec<u32>> = raw
                .into_iter()
                .map(|e| e.into_iter().filter(|&v| (v as usize) < n).collect::<Vec<_>>())
                .filter(|e| e.len() >= 2)
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
            let h = Hypergraph::new(n, &edges).unwrap();
            let text = h.to_text();
            let back = Hypergraph::parse_text(&text).unwrap();
            prop_assert_eq!(back.to_text(), text);
        }
    }
}
