use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, Vertex};
use itertools::Itertools;
use serde::Serialize;
use std::collections::BTreeSet;

/// A small `k`-uniform pattern hypergraph (a graph when `k = 2`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Template {
    pub name: String,
    pub vertex_count: usize,
    pub k: usize,
    pub edges: Vec<Vec<u32>>,
}

impl Template {
    pub fn new(name: impl Into<String>, vertex_count: usize, k: usize, edges: Vec<Vec<u32>>) -> Result<Self> {
        if k < 2 {
            return Err(Error::input("template edges need at least 2 vertices"));
        }
        let mut canon = BTreeSet::new();
        for e in edges {
            let set: BTreeSet<u32> = e.iter().copied().collect();
            if set.len() != k || e.len() != k {
                return Err(Error::input(format!("template edge {e:?} is not a {k}-set")));
            }
            if set.iter().any(|&v| v as usize >= vertex_count) {
                return Err(Error::input(format!("template edge {e:?} leaves [0, {vertex_count})")));
            }
            if !canon.insert(set.into_iter().collect::<Vec<_>>()) {
                return Err(Error::input(format!("template edge {e:?} repeated")));
            }
        }
        Ok(Self {
            name: name.into(),
            vertex_count,
            k,
            edges: canon.into_iter().collect(),
        })
    }

    fn graph(name: &str, v: usize, edges: &[(u32, u32)]) -> Self {
        Self::new(name, v, 2, edges.iter().map(|&(a, b)| vec![a, b]).collect())
            .expect("built-in template")
    }

    pub fn triangle() -> Self {
        Self::complete(3)
    }

    pub fn complete(v: usize) -> Self {
        let edges = (0..v as u32).tuple_combinations().collect::<Vec<_>>();
        Self::graph(&format!("K{v}"), v, &edges)
    }

    pub fn cycle(len: usize) -> Self {
        let edges = (0..len as u32)
            .map(|i| (i, (i + 1) % len as u32))
            .collect::<Vec<_>>();
        Self::graph(&format!("C{len}"), len, &edges)
    }

    /// `K_4` minus one edge.
    pub fn diamond() -> Self {
        Self::graph("diamond", 4, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)])
    }

    /// Two edges sharing a vertex.
    pub fn cherry() -> Self {
        Self::graph("cherry", 3, &[(0, 1), (0, 2)])
    }

    /// Complete `k`-uniform hypergraph on `v` vertices.
    pub fn complete_uniform(v: usize, k: usize) -> Self {
        let edges = (0..v as u32).combinations(k).collect();
        Self::new(format!("K{v}^({k})"), v, k, edges).expect("built-in template")
    }

    /// Complete `k`-partite `k`-uniform hypergraph with the given part sizes.
    pub fn complete_partite(parts: &[usize]) -> Self {
        let mut offset = 0u32;
        let ranges: Vec<Vec<u32>> = parts
            .iter()
            .map(|&s| {
                let r = (offset..offset + s as u32).collect();
                offset += s as u32;
                r
            })
            .collect();
        let edges = ranges.iter().multi_cartesian_product().map(|e| e.into_iter().copied().collect()).collect();
        let name = format!("K({})", parts.iter().join(","));
        Self::new(name, offset as usize, parts.len(), edges).expect("built-in template")
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Built-in templates by name: `triangle`, `diamond`, `cherry`, `K<v>`,
    /// `C<len>`, `K<v>^<k>` (complete `k`-uniform) and `K<a>,<b>,...` (complete partite).
    pub fn by_name(name: &str) -> Result<Self> {
        let bad = || Error::input(format!("unknown template {name:?}"));
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
        match name {
            "triangle" => return Ok(Self::triangle()),
            "diamond" => return Ok(Self::diamond()),
            "cherry" => return Ok(Self::cherry()),
            _ => {}
        }
        if let Some(rest) = name.strip_prefix('C') {
            let len = num(rest)?;
            return if len >= 3 { Ok(Self::cycle(len)) } else { Err(bad()) };
        }
        let rest = name.strip_prefix('K').ok_or_else(bad)?;
        if rest.contains(',') {
            let parts = rest.split(',').map(num).collect::<Result<Vec<_>>>()?;
            return if parts.len() >= 2 && parts.iter().all(|&p| p > 0) {
                Ok(Self::complete_partite(&parts))
            } else {
                Err(bad())
            };
        }
        match rest.split_once('^') {
            Some((v, k)) => {
                let (v, k) = (num(v)?, num(k)?);
                if k < 2 || v < k {
                    return Err(bad());
                }
                Ok(Self::complete_uniform(v, k))
            }
            None => {
                let v = num(rest)?;
                if v < 2 {
                    return Err(bad());
                }
                Ok(Self::complete(v))
            }
        }
    }

    /// Parses `tmpl <v> <e> <k>` followed by `e` lines of `k` vertex ids.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::input("empty template file"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "tmpl" {
            return Err(Error::input(format!("bad template header {header:?}")));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| Error::input(format!("bad integer {s:?}")));
        let (v, e, k) = (num(fields[1])?, num(fields[2])?, num(fields[3])?);
        let edges = lines
            .map(|l| {
                l.split_whitespace()
                    .map(|t| t.parse::<u32>().map_err(|_| Error::input(format!("bad vertex {t:?}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if edges.len() != e {
            return Err(Error::input(format!("template declares {e} edges, found {}", edges.len())));
        }
        Self::new("file", v, k, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("tmpl {} {} {}\n", self.vertex_count, self.edges.len(), self.k);
        for e in &self.edges {
            out.push_str(&e.iter().join(" "));
            out.push('\n');
        }
        out
    }

    /// Vertex-induced sub-template on the sorted vertex list `w` (edge count only).
    pub fn induced_edge_count(&self, w: &[u32]) -> usize {
        self.edges
            .iter()
            .filter(|e| e.iter().all(|v| w.binary_search(v).is_ok()))
            .count()
    }
}

/// Colexicographic rank of a strictly increasing set.
pub fn colex_rank(set: &[u32]) -> u32 {
    set.iter()
        .enumerate()
        .map(|(i, &c)| crate::scalar::binomial_u64(c as u64, i as u64 + 1) as u32)
        .sum()
}

/// Vertex id of the pair `{a, b}` in the hypergraph returned by [`template_copies`] for graphs.
pub fn pair_index(a: u32, b: u32) -> Vertex {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    colex_rank(&[lo, hi])
}

/// The hypergraph whose vertices are the `k`-subsets of `[n]` (in colex order)
/// and whose edges are the edge sets of all copies of `template`.
pub fn template_copies(template: &Template, n: usize) -> Result<Hypergraph> {
    let r = template.edge_count();
    if r < 2 {
        return Err(Error::input("template needs at least 2 edges"));
    }
    if n < template.vertex_count {
        return Err(Error::input(format!(
            "n = {n} is smaller than the template's {} vertices",
            template.vertex_count
        )));
    }
    // isolated template vertices do not change the copies
    let used: Vec<u32> = template.edges.iter().flatten().copied().sorted().dedup().collect();
    let relabel = |v: u32| used.binary_search(&v).expect("used vertex") as u32;
    let edges: Vec<Vec<u32>> = template
        .edges
        .iter()
        .map(|e| e.iter().map(|&v| relabel(v)).collect())
        .collect();
    let span = used.len();

    // distinct placements of the pattern on the positions 0..span
    let mut patterns: BTreeSet<Vec<Vec<u32>>> = BTreeSet::new();
    for perm in (0..span as u32).permutations(span) {
        let mut image: Vec<Vec<u32>> = edges
            .iter()
            .map(|e| e.iter().map(|&v| perm[v as usize]).sorted().collect())
            .collect();
        image.sort();
        patterns.insert(image);
    }

    let k = template.k;
    let vertex_count = crate::scalar::binomial_u64(n as u64, k as u64);
    if vertex_count > u32::MAX as u64 {
        return Err(Error::input("too many k-subsets for 32-bit vertex ids"));
    }
    let mut offsets = vec![0u32];
    let mut flat: Vec<Vertex> = Vec::new();
    let mut image = Vec::with_capacity(r);
    for support in (0..n as u32).combinations(span) {
        for pattern in &patterns {
            image.clear();
            image.extend(pattern.iter().map(|e| {
                let mapped: Vec<u32> = e.iter().map(|&p| support[p as usize]).collect();
                colex_rank(&mapped)
            }));
            image.sort_unstable();
            flat.extend_from_slice(&image);
            offsets.push(flat.len() as u32);
        }
    }
    Hypergraph::from_flat(vertex_count as usize, Some(r), offsets, flat)
}
