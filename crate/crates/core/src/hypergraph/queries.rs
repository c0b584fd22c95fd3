use super::{is_sorted_subset, sorted_intersection_len, EdgeFamily, EdgeId, Hypergraph, Vertex};
use crate::error::{Error, Result};
use crate::generators::LabeledFamily;
use itertools::Itertools;
use std::collections::BTreeMap;

/// Cap on buffered vertex pairs per pass of the codegree scan.
const PAIR_CHUNK: usize = 1 << 23;

impl Hypergraph {
    /// Number of edges of size `b` containing every vertex of `set`.
    pub fn set_degree(&self, set: &[Vertex], b: usize) -> Result<usize> {
        if set.is_empty() {
            return Err(Error::input("set degree needs a nonempty vertex set"));
        }
        for &v in set {
            self.check_vertex(v)?;
        }
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if b < sorted.len() {
            return Ok(0);
        }
        let pivot = *sorted
            .iter()
            .min_by_key(|&&v| self.degree(v))
            .expect("nonempty");
        Ok(self
            .incident(pivot)
            .iter()
            .filter(|&&e| {
                let edge = self.edge(e);
                edge.len() == b && is_sorted_subset(&sorted, edge)
            })
            .count())
    }

    /// Maximum over `a`-sets of the number of edges containing them.
    ///
    /// Only sets lying inside some edge can have positive degree, so the scan
    /// walks each vertex `s` and groups the `a`-subsets of its edges whose
    /// smallest element is `s`.
    pub fn max_set_degree(&self, a: usize) -> Result<usize> {
        let r = self.require_uniform()?;
        if a < 2 || a + 1 > r {
            return Err(Error::input(format!(
                "set size {a} outside [2, {}] for a {r}-uniform hypergraph",
                r.saturating_sub(1)
            )));
        }
        let stride = a - 1;
        let mut keys: Vec<Vertex> = Vec::new();
        let mut best = 0usize;
        for s in 0..self.n as Vertex {
            keys.clear();
            for &e in self.incident(s) {
                let edge = self.edge(e);
                let pos = edge.binary_search(&s).expect("incidence is consistent");
                if stride == 1 {
                    keys.extend_from_slice(&edge[pos + 1..]);
                    continue;
                }
                for rest in edge[pos + 1..].iter().combinations(stride) {
                    keys.extend(rest.into_iter().copied());
                }
            }
            best = best.max(longest_run(&keys, stride));
        }
        Ok(best)
    }

    /// Ordered pairs `(e, e')` with `v ∈ e \ e'`, `v2 ∈ e' \ e`, `|e| = a`,
    /// `|e'| = a2` and `|e ∩ e'| = k`.
    pub fn codegree(
        &self,
        v: Vertex,
        v2: Vertex,
        a: usize,
        a2: usize,
        k: usize,
    ) -> Result<usize> {
        self.check_vertex(v)?;
        self.check_vertex(v2)?;
        if v == v2 {
            return Err(Error::input("codegree needs two distinct vertices"));
        }
        if a < 2 || a2 < 2 || k < 1 || k >= a.min(a2) {
            return Err(Error::input(format!(
                "codegree indices (a={a}, a'={a2}, k={k}) out of range"
            )));
        }
        let first: Vec<&[Vertex]> = self
            .incident(v)
            .iter()
            .map(|&e| self.edge(e))
            .filter(|e| e.len() == a && e.binary_search(&v2).is_err())
            .collect();
        let mut count = 0;
        for &e2 in self.incident(v2) {
            let second = self.edge(e2);
            if second.len() != a2 || second.binary_search(&v).is_ok() {
                continue;
            }
            count += first
                .iter()
                .filter(|e| sorted_intersection_len(e, second) == k)
                .count();
        }
        Ok(count)
    }

    /// Maximum `(r-1)`-codegree over pairs of distinct vertices.
    ///
    /// Two distinct `r`-edges sharing `r - 1` vertices are `S ∪ {v}` and
    /// `S ∪ {v'}`, so the codegree of `(v, v')` is the number of `(r-1)`-sets
    /// `S` completed by both. Edges are grouped by `S` and the completing
    /// pairs are tallied in bounded chunks.
    pub fn max_r1_codegree(&self) -> Result<usize> {
        let r = self.require_uniform()?;
        if r < 3 {
            return Err(Error::input(
                "the (r-1)-codegree is only defined here for r >= 3",
            ));
        }
        let total = self.completion_pairs(&mut |_| {});
        let chunks = total / PAIR_CHUNK + 1;
        let mut best = 0;
        let mut buf: Vec<u64> = Vec::new();
        for chunk in 0..chunks {
            buf.clear();
            self.completion_pairs(&mut |pair| {
                if (pair >> 32) as usize % chunks == chunk {
                    buf.push(pair);
                }
            });
            buf.sort_unstable();
            best = best.max(longest_run(&buf, 1));
        }
        Ok(best)
    }

    /// Emits `lo << 32 | hi` for every `(r-1)`-set completed by both `lo` and `hi`.
    fn completion_pairs(&self, emit: &mut dyn FnMut(u64)) -> usize {
        let r = self.uniformity.unwrap_or(0);
        // (r-1)-sets packed into a u128 when they fit, else compared as slices
        let packed = r <= 5;
        let stride = r - 1;
        let mut keys: Vec<Vertex> = Vec::new();
        let mut tagged: Vec<(u128, Vertex)> = Vec::new();
        let mut completions: Vec<Vertex> = Vec::new();
        let mut order: Vec<usize> = Vec::new();
        let mut emitted = 0;
        let mut emit_group = |len: usize, member: &dyn Fn(usize) -> Vertex, emitted: &mut usize| {
            for i in 0..len {
                for j in i + 1..len {
                    let (x, y) = (member(i), member(j));
                    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
                    emit((lo as u64) << 32 | hi as u64);
                }
            }
            *emitted += len * (len - 1) / 2;
        };
        for s in 0..self.n as Vertex {
            keys.clear();
            tagged.clear();
            completions.clear();
            for &e in self.incident(s) {
                let edge = self.edge(e);
                for (j, &w) in edge.iter().enumerate() {
                    if w == s {
                        continue;
                    }
                    let min_rest = if j == 0 { edge[1] } else { edge[0] };
                    if min_rest != s {
                        continue;
                    }
                    let rest = edge.iter().copied().filter(|&x| x != w);
                    if packed {
                        tagged.push((rest.fold(0u128, |acc, x| acc << 32 | x as u128), w));
                    } else {
                        keys.extend(rest);
                        completions.push(w);
                    }
                }
            }
            if packed {
                tagged.sort_unstable();
                for group in tagged.chunk_by(|x, y| x.0 == y.0).filter(|g| g.len() > 1) {
                    emit_group(group.len(), &|i| group[i].1, &mut emitted);
                }
                continue;
            }
            order.clear();
            order.extend(0..completions.len());
            let key = |i: usize| &keys[i * stride..(i + 1) * stride];
            order.sort_unstable_by(|&x, &y| key(x).cmp(key(y)));
            for group in order.chunk_by(|&x, &y| key(x) == key(y)).filter(|g| g.len() > 1) {
                emit_group(group.len(), &|i| completions[group[i]], &mut emitted);
            }
        }
        emitted
    }

    /// Ids of the edges containing every vertex of `set` (sorted, nonempty).
    pub fn edges_containing(&self, set: &[Vertex]) -> Vec<EdgeId> {
        let Some(&pivot) = set.iter().min_by_key(|&&v| self.degree(v)) else {
            return Vec::new();
        };
        self.incident(pivot)
            .iter()
            .copied()
            .filter(|&e| is_sorted_subset(set, self.edge(e)))
            .collect()
    }
}

/// Maximum number of labeled edges containing a common `a`-set, for `a >= 1`.
pub(crate) fn family_max_subset_degree<F: EdgeFamily>(family: &F, a: usize) -> usize {
    if a == 0 {
        return family.family_len();
    }
    let mut keys: Vec<Vertex> = Vec::new();
    for e in family.edge_sets() {
        for sub in e.iter().combinations(a) {
            keys.extend(sub.into_iter().copied());
        }
    }
    longest_run(&keys, a)
}

/// Longest run of equal `stride`-wide keys after sorting (keys is consumed logically).
fn longest_run<T: Ord + Copy>(keys: &[T], stride: usize) -> usize {
    let count = keys.len() / stride;
    if count == 0 {
        return 0;
    }
    if stride == 1 {
        let mut sorted = keys.to_vec();
        sorted.sort_unstable();
        return sorted.chunk_by(|x, y| x == y).map(<[T]>::len).max().unwrap_or(0);
    }
    let key = |i: usize| &keys[i * stride..(i + 1) * stride];
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_unstable_by(|&x, &y| key(x).cmp(key(y)));
    let mut best = 1;
    let mut run = 1;
    for w in order.windows(2) {
        if key(w[0]) == key(w[1]) {
            run += 1;
            best = best.max(run);
        } else {
            run = 1;
        }
    }
    best
}

/// All `x`-subsets of the edges of `family`.
///
/// A labeled family yields one labeled edge per (parent label, subset); the
/// label is the parent label followed by the subset. An unlabeled family
/// yields each distinct subset once, labeled by itself.
pub fn shadow<F: EdgeFamily>(family: &F, x: usize) -> Result<LabeledFamily> {
    if x == 0 {
        return Err(Error::input("shadow level must be at least 1"));
    }
    let mut out = LabeledFamily::new(family.vertex_count());
    if family.is_labeled() {
        for idx in 0..family.family_len() {
            for sub in family.edge_at(idx).iter().copied().combinations(x) {
                let mut label = family.label_at(idx).to_vec();
                label.extend_from_slice(&sub);
                out.push(label, &sub)?;
            }
        }
    } else {
        let mut seen: BTreeMap<Vec<Vertex>, ()> = BTreeMap::new();
        for e in family.edge_sets() {
            for sub in e.iter().copied().combinations(x) {
                seen.insert(sub, ());
            }
        }
        for sub in seen.into_keys() {
            out.push(sub.clone(), &sub)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{d_cube, k_ap, random_uniform, template_copies, Template};
    use proptest::prelude::*;

    fn brute_max_set_degree(h: &Hypergraph, a: usize) -> usize {
        (0..h.vertex_count() as Vertex)
            .combinations(a)
            .map(|set| h.edges().filter(|e| is_sorted_subset(&set, e)).count())
            .max()
            .unwrap_or(0)
    }

    fn brute_max_r1_codegree(h: &Hypergraph) -> usize {
        let r = h.uniformity().unwrap();
        let mut best = 0;
        for v in 0..h.vertex_count() as Vertex {
            for w in 0..h.vertex_count() as Vertex {
                if v != w {
                    best = best.max(h.codegree(v, w, r, r, r - 1).unwrap());
                }
            }
        }
        best
    }

    fn k3_on_k5() -> Hypergraph {
        template_copies(&Template::triangle(), 5).unwrap()
    }

    #[test]
    fn set_degree_examples() {
        let h = k3_on_k5();
        // K_5 edges {0,1} and {0,2} lie in exactly one triangle.
        let e01 = crate::generators::pair_index(0, 1);
        let e02 = crate::generators::pair_index(0, 2);
        assert_eq!(h.set_degree(&[e01, e02], 3).unwrap(), 1);
        let brute = h
            .edges()
            .filter(|e| e.contains(&e01) && e.contains(&e02))
            .count();
        assert_eq!(brute, 1);
        let e = h.edge(4).to_vec();
        assert!(h.set_degree(&e, 3).unwrap() >= 1);
        assert_eq!(h.set_degree(&[e01], 2).unwrap(), 0);
        assert_eq!(h.set_degree(&[e01, e02], 1).unwrap(), 0);
        assert!(h.set_degree(&[99], 3).is_err());
        assert!(h.set_degree(&[], 3).is_err());
        assert_eq!(Hypergraph::empty(4).set_degree(&[0, 1], 3).unwrap(), 0);
    }

    #[test]
    fn max_set_degree_examples() {
        assert_eq!(k3_on_k5().max_set_degree(2).unwrap(), 1);
        let diamond = template_copies(&Template::diamond(), 10).unwrap();
        assert_eq!(diamond.max_set_degree(3).unwrap(), 21);
        let single = Hypergraph::new(3, [[0u32, 1, 2]]).unwrap();
        assert_eq!(single.max_set_degree(2).unwrap(), 1);
        assert!(single.max_set_degree(3).is_err());
        assert!(single.max_set_degree(1).is_err());
    }

    #[test]
    fn codegree_examples() {
        let h = k3_on_k5();
        let e01 = crate::generators::pair_index(0, 1);
        let e23 = crate::generators::pair_index(2, 3);
        assert_eq!(h.codegree(e01, e23, 3, 3, 2).unwrap(), 0);
        let two = Hypergraph::new(4, [[0u32, 1, 2], [1, 2, 3]]).unwrap();
        assert_eq!(two.codegree(0, 3, 3, 3, 2).unwrap(), 1);
        assert_eq!(two.codegree(3, 0, 3, 3, 2).unwrap(), 1);
        assert!(two.codegree(0, 0, 3, 3, 2).is_err());
        let single = Hypergraph::new(4, [[0u32, 1, 2]]).unwrap();
        assert_eq!(single.codegree(0, 3, 3, 3, 2).unwrap(), 0);
    }

    #[test]
    fn max_r1_codegree_examples() {
        assert_eq!(k3_on_k5().max_r1_codegree().unwrap(), 0);
        let two = Hypergraph::new(4, [[0u32, 1, 2], [1, 2, 3]]).unwrap();
        assert_eq!(two.max_r1_codegree().unwrap(), 1);
        let ap = k_ap(7, 3).unwrap();
        let gamma = ap.max_r1_codegree().unwrap();
        assert_eq!(gamma, brute_max_r1_codegree(&ap));
        assert!(gamma <= 729);
        let graph = Hypergraph::new(3, [[0u32, 1], [1, 2]]).unwrap();
        assert!(graph.max_r1_codegree().is_err());
    }

    #[test]
    fn shadow_examples() {
        let h = Hypergraph::new(3, [[0u32, 1, 2]]).unwrap();
        let s2 = shadow(&h, 2).unwrap();
        let sets: Vec<_> = s2.iter().map(|(_, e)| e.to_vec()).collect();
        assert_eq!(sets, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        let s3 = shadow(&h, 3).unwrap();
        assert_eq!(s3.len(), 1);
        assert_eq!(s3.edge(0), &[0, 1, 2]);
        assert!(shadow(&h, 0).is_err());
        let cubes = d_cube(11, 1).unwrap();
        assert_eq!(cubes.len(), 110);
        assert_eq!(shadow(&cubes, 1).unwrap().len(), 220);
    }

    #[test]
    fn family_subset_degree_matches_hypergraph_query() {
        let ap = k_ap(11, 3).unwrap();
        assert_eq!(
            family_max_subset_degree(&ap, 2),
            ap.max_set_degree(2).unwrap()
        );
        assert_eq!(family_max_subset_degree(&ap, 1), 15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn max_set_degree_matches_brute_force(n in 6usize..=12, r in 3usize..=5, m in 1usize..30, seed in any::<u64>()) {
            let cap = crate::scalar::binomial_u64(n as u64, r as u64) as usize;
            let h = random_uniform(n, r, m.min(cap), seed).unwrap();
            for a in 2..r {
                prop_assert_eq!(h.max_set_degree(a).unwrap(), brute_max_set_degree(&h, a));
            }
            prop_assert_eq!(h.max_r1_codegree().unwrap(), brute_max_r1_codegree(&h));
        }

        #[test]
        fn handshake_identity(n in 5usize..=12, r in 2usize..=4, m in 0usize..25, seed in any::<u64>()) {
            let cap = crate::scalar::binomial_u64(n as u64, r as u64) as usize;
            let h = random_uniform(n, r, m.min(cap), seed).unwrap();
            let total: usize = (0..n as Vertex).map(|v| h.set_degree(&[v], r).unwrap()).sum();
            prop_assert_eq!(total, r * h.edge_count());
        }

        #[test]
        fn codegree_swap_symmetry(seed in any::<u64>(), v in 0u32..10, w in 0u32..10, k in 1usize..3) {
            prop_assume!(v != w);
            let h = Hypergraph::new(10, random_mixed_edges(seed)).unwrap();
            for a in 2..=4 {
                for a2 in 2..=4 {
                    if k < a.min(a2) {
                        prop_assert_eq!(h.codegree(v, w, a, a2, k).unwrap(), h.codegree(w, v, a2, a, k).unwrap());
                    }
                }
            }
        }

        #[test]
        fn shadow_at_full_level_is_identity(n in 5usize..=10, r in 2usize..=4, m in 0usize..20, seed in any::<u64>()) {
            let cap = crate::scalar::binomial_u64(n as u64, r as u64) as usize;
            let h = random_uniform(n, r, m.min(cap), seed).unwrap();
            let s = shadow(&h, r).unwrap();
            let mut got: Vec<Vec<Vertex>> = s.iter().map(|(_, e)| e.to_vec()).collect();
            let mut want: Vec<Vec<Vertex>> = h.edges().map(<[Vertex]>::to_vec).collect();
            got.sort();
            want.sort();
            prop_assert_eq!(got, want);
        }
    }

    fn random_mixed_edges(seed: u64) -> Vec<Vec<Vertex>> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut set = std::collections::BTreeSet::new();
        for _ in 0..25 {
            let size = rng.random_range(2..=4);
            let e: std::collections::BTreeSet<Vertex> =
                (0..size).map(|_| rng.random_range(0..10)).collect();
            if e.len() >= 2 {
                set.insert(e.into_iter().collect::<Vec<_>>());
            }
        }
        set.into_iter().collect()
    }
}
