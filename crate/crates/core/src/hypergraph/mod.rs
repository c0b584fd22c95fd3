//! Static hypergraph storage with exact degree, set-degree and codegree queries.
//!
//! Edges are stored in compressed rows (one flat vertex array plus offsets)
//! and every vertex carries an ascending list of the edge ids containing it.
//! The layout keeps instances with tens of millions of edges in memory.

mod conditions;
mod io;
mod queries;

pub use conditions::{check_main_conditions, ConditionReport};
pub use queries::shadow;
pub(crate) use queries::family_max_subset_degree;

use crate::error::{Error, Result};
use std::cmp::Ordering;

pub type Vertex = u32;
pub type EdgeId = u32;

/// Read-only view shared by [`Hypergraph`] and the label-counted families.
pub trait EdgeFamily {
    fn vertex_count(&self) -> usize;

    /// Number of edges, counted with labels where the family carries them.
    fn family_len(&self) -> usize;

    fn edge_at(&self, idx: usize) -> &[Vertex];

    /// Whether edges carry labels (and so may repeat as sets).
    fn is_labeled(&self) -> bool {
        false
    }

    fn label_at(&self, _idx: usize) -> &[u32] {
        &[]
    }

    fn edge_sets(&self) -> impl Iterator<Item = &[Vertex]> + '_
    where
        Self: Sized,
    {
        (0..self.family_len()).map(move |i| self.edge_at(i))
    }

    /// Common edge size, if every edge has the same size.
    fn common_size(&self) -> Option<usize>
    where
        Self: Sized,
    {
        let mut sizes = self.edge_sets().map(<[Vertex]>::len);
        let first = sizes.next()?;
        sizes.all(|s| s == first).then_some(first)
    }
}

#[derive(Clone, Debug)]
pub struct Hypergraph {
    n: usize,
    uniformity: Option<usize>,
    offsets: Vec<u32>,
    vertices: Vec<Vertex>,
    inc_offsets: Vec<usize>,
    incidence: Vec<EdgeId>,
}

impl Hypergraph {
    /// Builds a hypergraph from arbitrary vertex lists. Each list is sorted;
    /// repeated vertices, out-of-range ids, edges of size below 2 and
    /// duplicate edge sets are rejected.
    pub fn new<I, E>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[Vertex]>,
    {
        Self::build(n, None, edges)
    }

    /// Like [`Hypergraph::new`], additionally requiring every edge to have `r` vertices.
    pub fn with_uniformity<I, E>(n: usize, r: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[Vertex]>,
    {
        Self::build(n, Some(r), edges)
    }

    pub fn empty(n: usize) -> Self {
        Self::from_flat(n, None, vec![0], Vec::new()).expect("edgeless hypergraph is valid")
    }

    fn build<I, E>(n: usize, declared: Option<usize>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[Vertex]>,
    {
        let mut offsets = vec![0u32];
        let mut vertices = Vec::new();
        for e in edges {
            let start = vertices.len();
            vertices.extend_from_slice(e.as_ref());
            vertices[start..].sort_unstable();
            let end = u32::try_from(vertices.len())
                .map_err(|_| Error::input("too many incidences for 32-bit offsets"))?;
            offsets.push(end);
        }
        Self::from_flat(n, declared, offsets, vertices)
    }

    /// Builds from compressed rows whose vertex lists are already sorted.
    pub(crate) fn from_flat(
        n: usize,
        declared: Option<usize>,
        offsets: Vec<u32>,
        vertices: Vec<Vertex>,
    ) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(Error::input("vertex count exceeds 32-bit ids"));
        }
        let m = offsets.len() - 1;
        if m > u32::MAX as usize {
            return Err(Error::input("edge count exceeds 32-bit ids"));
        }
        let mut sizes_seen: Option<usize> = None;
        let mut uniform = true;
        for idx in 0..m {
            let e = &vertices[offsets[idx] as usize..offsets[idx + 1] as usize];
            if e.len() < 2 {
                return Err(Error::input(format!("edge {idx} has fewer than 2 vertices")));
            }
            if let Some(&last) = e.last() {
                if last as usize >= n {
                    return Err(Error::input(format!(
                        "edge {idx} uses vertex {last} outside [0, {n})"
                    )));
                }
            }
            if e.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::input(format!("edge {idx} repeats a vertex")));
            }
            if let Some(r) = declared {
                if e.len() != r {
                    return Err(Error::input(format!(
                        "edge {idx} has {} vertices but uniformity {r} was declared",
                        e.len()
                    )));
                }
            }
            match sizes_seen {
                None => sizes_seen = Some(e.len()),
                Some(s) if s != e.len() => uniform = false,
                _ => {}
            }
        }
        let uniformity = declared.or(if uniform { sizes_seen } else { None });
        let mut hg = Hypergraph {
            n,
            uniformity,
            offsets,
            vertices,
            inc_offsets: Vec::new(),
            incidence: Vec::new(),
        };
        hg.reject_duplicates()?;
        hg.index_incidence();
        Ok(hg)
    }

    fn reject_duplicates(&self) -> Result<()> {
        let m = self.edge_count();
        let lexicographic = (1..m).all(|i| self.edge(i as EdgeId - 1) <= self.edge(i as EdgeId));
        let dup = if lexicographic {
            (1..m).find(|&i| self.edge(i as EdgeId - 1) == self.edge(i as EdgeId))
        } else {
            let mut order: Vec<EdgeId> = (0..m as EdgeId).collect();
            order.sort_unstable_by(|&a, &b| self.edge(a).cmp(self.edge(b)));
            order
                .windows(2)
                .find(|w| self.edge(w[0]).cmp(self.edge(w[1])) == Ordering::Equal)
                .map(|w| w[1] as usize)
        };
        match dup {
            Some(i) => Err(Error::input(format!(
                "duplicate edge {:?}",
                self.edge(i as EdgeId)
            ))),
            None => Ok(()),
        }
    }

    fn index_incidence(&mut self) {
        let mut counts = vec![0usize; self.n + 1];
        for &v in &self.vertices {
            counts[v as usize + 1] += 1;
        }
        for v in 0..self.n {
            counts[v + 1] += counts[v];
        }
        let mut fill = counts.clone();
        let mut incidence = vec![0 as EdgeId; self.vertices.len()];
        for idx in 0..self.edge_count() {
            let (a, b) = (self.offsets[idx] as usize, self.offsets[idx + 1] as usize);
            for &v in &self.vertices[a..b] {
                incidence[fill[v as usize]] = idx as EdgeId;
                fill[v as usize] += 1;
            }
        }
        self.inc_offsets = counts;
        self.incidence = incidence;
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Common edge size: declared, or inferred when all edges agree.
    pub fn uniformity(&self) -> Option<usize> {
        self.uniformity
    }

    pub fn max_edge_size(&self) -> usize {
        (0..self.edge_count())
            .map(|i| self.edge(i as EdgeId).len())
            .max()
            .unwrap_or(0)
    }

    #[inline]
    pub fn edge(&self, id: EdgeId) -> &[Vertex] {
        let i = id as usize;
        &self.vertices[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    pub fn edges(&self) -> impl Iterator<Item = &[Vertex]> + '_ {
        (0..self.edge_count()).map(move |i| self.edge(i as EdgeId))
    }

    /// Ascending ids of the edges containing `v`.
    #[inline]
    pub fn incident(&self, v: Vertex) -> &[EdgeId] {
        let v = v as usize;
        &self.incidence[self.inc_offsets[v]..self.inc_offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        let v = v as usize;
        self.inc_offsets[v + 1] - self.inc_offsets[v]
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).map(move |v| self.degree(v as Vertex))
    }

    /// Id of the edge with exactly this (sorted) vertex set.
    pub fn find_edge(&self, set: &[Vertex]) -> Option<EdgeId> {
        let &first = set.first()?;
        if first as usize >= self.n {
            return None;
        }
        self.incident(first)
            .iter()
            .copied()
            .find(|&e| self.edge(e) == set)
    }

    /// True when `set` contains some edge of the hypergraph.
    pub fn contains_some_edge(&self, set: &[Vertex]) -> bool {
        set.iter().any(|&v| {
            (v as usize) < self.n
                && self
                    .incident(v)
                    .iter()
                    .any(|&e| is_sorted_subset(self.edge(e), set))
        })
    }

    pub(crate) fn check_vertex(&self, v: Vertex) -> Result<()> {
        if (v as usize) < self.n {
            Ok(())
        } else {
            Err(Error::input(format!(
                "vertex {v} outside [0, {})",
                self.n
            )))
        }
    }

    pub(crate) fn require_uniform(&self) -> Result<usize> {
        self.uniformity
            .ok_or_else(|| Error::input("operation requires a uniform hypergraph"))
    }
}

impl EdgeFamily for Hypergraph {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn family_len(&self) -> usize {
        self.edge_count()
    }

    fn edge_at(&self, idx: usize) -> &[Vertex] {
        self.edge(idx as EdgeId)
    }
}

/// `small ⊆ big` for strictly increasing slices.
pub fn is_sorted_subset(small: &[Vertex], big: &[Vertex]) -> bool {
    if small.len() > big.len() {
        return false;
    }
    let mut it = big.iter();
    'outer: for &x in small {
        for &y in it.by_ref() {
            match y.cmp(&x) {
                Ordering::Less => continue,
                Ordering::Equal => continue 'outer,
                Ordering::Greater => return false,
            }
        }
        return false;
    }
    true
}

/// Size of the intersection of two strictly increasing slices.
pub fn sorted_intersection_len(a: &[Vertex], b: &[Vertex]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_incidence() {
        let h = Hypergraph::new(4, [vec![2, 0, 1], vec![1, 2, 3]]).unwrap();
        assert_eq!(h.edge(0), &[0, 1, 2]);
        assert_eq!(h.incident(1), &[0, 1]);
        assert_eq!(h.incident(3), &[1]);
        assert_eq!(h.uniformity(), Some(3));
        assert_eq!(h.degrees().collect::<Vec<_>>(), vec![1, 2, 2, 1]);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Hypergraph::new(3, [vec![0, 0, 1]]).is_err());
        assert!(Hypergraph::new(3, [vec![0, 3]]).is_err());
        assert!(Hypergraph::new(3, [vec![1]]).is_err());
        assert!(Hypergraph::new(4, [vec![0, 1], vec![1, 0]]).is_err());
        assert!(Hypergraph::new(4, [vec![2, 3], vec![0, 1], vec![3, 2]]).is_err());
        assert!(Hypergraph::with_uniformity(4, 3, [vec![0, 1]]).is_err());
    }

    #[test]
    fn mixed_sizes_are_not_uniform() {
        let h = Hypergraph::new(4, [vec![0, 1], vec![1, 2, 3]]).unwrap();
        assert_eq!(h.uniformity(), None);
        assert_eq!(h.max_edge_size(), 3);
        assert!(h.contains_some_edge(&[0, 1, 3]));
        assert!(!h.contains_some_edge(&[0, 2, 3]));
        assert_eq!(h.find_edge(&[1, 2, 3]), Some(1));
    }

    #[test]
    fn subset_helpers() {
        assert!(is_sorted_subset(&[1, 3], &[0, 1, 2, 3]));
        assert!(!is_sorted_subset(&[1, 4], &[0, 1, 2, 3]));
        assert!(is_sorted_subset(&[], &[0]));
        assert_eq!(sorted_intersection_len(&[0, 2, 4, 6], &[1, 2, 3, 6]), 2);
    }
}
