use crate::error::{Error, Result};
use crate::hypergraph::{family_max_subset_degree, EdgeFamily, Hypergraph, Vertex};
use crate::process::ProcessState;
use crate::scalar::{binomial, binomial_u64};
use rayon::prelude::*;
use serde::Serialize;

/// Membership mask of `set` in `[0, n)`, with duplicates collapsed.
pub(crate) fn membership(set: &[Vertex], n: usize) -> Result<(Vec<bool>, usize)> {
    let mut mask = vec![false; n];
    let mut size = 0;
    for &v in set {
        let slot = mask
            .get_mut(v as usize)
            .ok_or_else(|| Error::input(format!("vertex {v} outside [0, {n})")))?;
        if !*slot {
            *slot = true;
            size += 1;
        }
    }
    Ok((mask, size))
}

/// Edges of a family bucketed by `x = |e ∩ I|`.
#[derive(Clone, Debug, Serialize)]
pub struct IntersectionProfile {
    pub family_size: usize,
    /// `|I| / N`.
    pub p: f64,
    /// Labeled edges with exactly `x` vertices in `I`.
    pub histogram: Vec<u64>,
    /// Pairs `(e, X)` with `X ⊆ e ∩ I` and `|X| = x`, i.e. `Σ_e C(|e ∩ I|, x)`.
    pub subset_pairs: Vec<u64>,
    /// `Σ_e C(|e|, x) p^x`; equals `|F| C(s, x) p^x` for an `s`-uniform family.
    pub prediction: Vec<f64>,
    /// `Σ_e C(|e|, x) p^x (1-p)^{|e|-x}`, the binomial law of the histogram.
    pub binomial_prediction: Vec<f64>,
}

impl IntersectionProfile {
    pub fn histogram_ratio(&self, x: usize) -> Option<f64> {
        ratio(self.histogram.get(x).copied()?, *self.binomial_prediction.get(x)?)
    }

    pub fn subset_pair_ratio(&self, x: usize) -> Option<f64> {
        ratio(self.subset_pairs.get(x).copied()?, *self.prediction.get(x)?)
    }
}

fn ratio(observed: u64, predicted: f64) -> Option<f64> {
    (predicted > 0.0).then(|| observed as f64 / predicted)
}

pub fn intersection_profile<F: EdgeFamily>(family: &F, set: &[Vertex]) -> Result<IntersectionProfile> {
    let n = family.vertex_count();
    let (mask, size) = membership(set, n)?;
    let p = if n == 0 { 0.0 } else { size as f64 / n as f64 };
    let width = family.edge_sets().map(<[Vertex]>::len).max().unwrap_or(0) + 1;
    let mut histogram = vec![0u64; width];
    let mut subset_pairs = vec![0u64; width];
    let mut prediction = vec![0.0; width];
    let mut binomial_prediction = vec![0.0; width];
    for e in family.edge_sets() {
        let hit = e.iter().filter(|&&v| mask[v as usize]).count();
        histogram[hit] += 1;
        for (x, slot) in subset_pairs.iter_mut().enumerate().take(hit + 1) {
            *slot += binomial_u64(hit as u64, x as u64);
        }
        for x in 0..=e.len() {
            let c = binomial::<f64>(e.len(), x) * p.powi(x as i32);
            prediction[x] += c;
            binomial_prediction[x] += c * (1.0 - p).powi((e.len() - x) as i32);
        }
    }
    Ok(IntersectionProfile {
        family_size: family.family_len(),
        p,
        histogram,
        subset_pairs,
        prediction,
        binomial_prediction,
    })
}

/// `Δ_a(G)` against its scale `p^a |G|`.
#[derive(Clone, Debug, Serialize)]
pub struct DeltaRatio {
    pub a: usize,
    pub delta: usize,
    pub scale: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContainedCount {
    /// `X_G`: labeled edges of `G` inside `I`.
    pub count: u64,
    pub family_size: usize,
    pub s: usize,
    pub p: f64,
    /// `|G| p^s`.
    pub prediction: f64,
    pub ratio: Option<f64>,
    /// Proxy for `|G| p^s → ∞`: the prediction reaches `min_expected`.
    pub expected_large: bool,
    /// `Δ_a(G)` for `a = 1..s-1`, proxies for `Δ_a(G) = o(p^a |G|)`.
    pub deltas: Vec<DeltaRatio>,
}

impl ContainedCount {
    pub fn max_delta_ratio(&self) -> f64 {
        self.deltas.iter().map(|d| d.ratio).fold(0.0, f64::max)
    }
}

/// Number of edges of `G` with every vertex in `I`.
pub fn contained_count<F: EdgeFamily>(family: &F, mask: &[bool]) -> u64 {
    family
        .edge_sets()
        .filter(|e| e.iter().all(|&v| mask[v as usize]))
        .count() as u64
}

/// `X_G` for the set `I` with the prediction `|G| p^s`, where `p` is supplied
/// by the caller (typically `i / N`).
pub fn count_contained<F: EdgeFamily>(family: &F, set: &[Vertex], p: f64, min_expected: f64) -> Result<ContainedCount> {
    let s = family
        .common_size()
        .ok_or_else(|| Error::input("counting family must be uniform and nonempty"))?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::input(format!("density p = {p} outside [0, 1]")));
    }
    let (mask, _) = membership(set, family.vertex_count())?;
    let count = contained_count(family, &mask);
    let size = family.family_len();
    let prediction = size as f64 * p.powi(s as i32);
    let deltas = (1..s)
        .map(|a| {
            let delta = family_max_subset_degree(family, a);
            let scale = p.powi(a as i32) * size as f64;
            DeltaRatio { a, delta, scale, ratio: delta as f64 / scale }
        })
        .collect();
    Ok(ContainedCount {
        count,
        family_size: size,
        s,
        p,
        prediction,
        ratio: (prediction > 0.0).then(|| count as f64 / prediction),
        expected_large: prediction >= min_expected,
        deltas,
    })
}

/// Edges of `G` that contain an edge of `H`; Theorem-style counting needs none.
pub fn families_conflict<F: EdgeFamily>(h: &Hypergraph, family: &F) -> Option<Vec<Vertex>> {
    family.edge_sets().find(|e| h.contains_some_edge(e)).map(<[Vertex]>::to_vec)
}

#[derive(Clone, Debug, Serialize)]
pub struct ContainmentEstimate {
    pub hits: usize,
    pub runs: usize,
    pub frequency: f64,
    /// `sqrt(f (1 - f) / runs)`.
    pub std_err: f64,
    /// `(j / N)^{|S|}`.
    pub prediction: f64,
}

/// Fraction of runs, seeded `seed + idx`, whose first `j` chosen vertices
/// contain `S`. Runs that end before step `j` keep the set they reached.
pub fn containment_frequency(h: &Hypergraph, set: &[Vertex], j: usize, runs: usize, seed: u64) -> Result<ContainmentEstimate> {
    let n = h.vertex_count();
    let (mask, size) = membership(set, n)?;
    if j > n {
        return Err(Error::input(format!("step {j} exceeds N = {n}")));
    }
    if runs == 0 {
        return Err(Error::input("runs must be at least 1"));
    }
    let s: Vec<Vertex> = (0..n as Vertex).filter(|&v| mask[v as usize]).collect();
    if h.contains_some_edge(&s) {
        return Err(Error::input(format!("the set {s:?} contains an edge")));
    }
    let outcomes: Vec<bool> = (0..runs)
        .into_par_iter()
        .map(|idx| -> Result<bool> {
            if size == 0 {
                return Ok(true);
            }
            let mut st = ProcessState::new(h, seed.wrapping_add(idx as u64))?;
            let mut inside = 0;
            while st.step_index() < j && !st.is_complete() {
                st.step()?;
                let v = *st.independent_set().last().expect("one chosen vertex per step");
                if mask[v as usize] {
                    inside += 1;
                }
            }
            Ok(inside == size)
        })
        .collect::<Result<_>>()?;
    let hits = outcomes.iter().filter(|&&b| b).count();
    let frequency = hits as f64 / runs as f64;
    Ok(ContainmentEstimate {
        hits,
        runs,
        frequency,
        std_err: (frequency * (1.0 - frequency) / runs as f64).sqrt(),
        prediction: (j as f64 / n as f64).powi(size as i32),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{d_cube, template_copies, LabeledFamily, Template};
    use itertools::Itertools;

    #[test]
    fn profile_mass_and_extremes() {
        let f = d_cube(31, 1).unwrap();
        let set: Vec<Vertex> = (0..10).collect();
        let prof = intersection_profile(&f, &set).unwrap();
        assert_eq!(prof.histogram.iter().sum::<u64>(), 930);
        assert_eq!(prof.family_size, 930);
        let empty = intersection_profile(&f, &[]).unwrap();
        assert_eq!(empty.histogram[0], 930);
        let all: Vec<Vertex> = (0..31).collect();
        let full = intersection_profile(&f, &all).unwrap();
        assert_eq!(full.histogram[2], 930);
        assert!((full.prediction[2] - 930.0).abs() < 1e-9);
    }

    #[test]
    fn subset_pairs_expand_the_histogram() {
        let f = d_cube(13, 2).unwrap();
        let set = [0u32, 3, 4, 9];
        let prof = intersection_profile(&f, &set).unwrap();
        for x in 0..prof.histogram.len() {
            let want: u64 = (x..prof.histogram.len())
                .map(|y| prof.histogram[y] * binomial::<f64>(y, x).round() as u64)
                .sum();
            assert_eq!(prof.subset_pairs[x], want);
        }
        assert_eq!(prof.subset_pairs[0], f.len() as u64);
        let total: f64 = prof.binomial_prediction.iter().sum();
        assert!((total - f.len() as f64).abs() < 1e-6);
    }

    #[test]
    fn count_examples() {
        let g = Hypergraph::new(4, (0..4u32).tuple_combinations().map(|(a, b)| vec![a, b])).unwrap();
        let c = count_contained(&g, &[0, 1, 2], 0.75, 1.0).unwrap();
        assert_eq!(c.count, 3);
        assert!((c.prediction - 6.0 * 0.5625).abs() < 1e-12);
        assert_eq!(count_contained(&g, &[], 0.0, 1.0).unwrap().count, 0);
        let cherries = template_copies(&Template::cherry(), 40).unwrap();
        assert_eq!(cherries.edge_count(), 40 * 39 * 38 / 2);
        let mixed = Hypergraph::new(4, vec![vec![0, 1], vec![1, 2, 3]]).unwrap();
        assert!(matches!(count_contained(&mixed, &[0], 0.5, 1.0), Err(Error::Input(_))));
    }

    #[test]
    fn count_matches_top_bucket() {
        let f = d_cube(13, 2).unwrap();
        let set = [1u32, 2, 5, 7, 8, 11];
        let prof = intersection_profile(&f, &set).unwrap();
        let c = count_contained(&f, &set, 6.0 / 13.0, 1.0).unwrap();
        assert_eq!(c.count, prof.histogram[4]);
    }

    #[test]
    fn delta_ratios() {
        let mut f = LabeledFamily::new(5);
        f.push(vec![0], &[0, 1]).unwrap();
        f.push(vec![1], &[0, 2]).unwrap();
        f.push(vec![2], &[3, 4]).unwrap();
        let c = count_contained(&f, &[0, 1, 2], 0.5, 1.0).unwrap();
        assert_eq!(c.deltas.len(), 1);
        assert_eq!(c.deltas[0].delta, 2);
        assert!((c.deltas[0].ratio - 2.0 / 1.5).abs() < 1e-12);
        assert!(c.expected_large == (0.75 >= 1.0));
    }

    #[test]
    fn conflict_detection() {
        let h = template_copies(&Template::triangle(), 6).unwrap();
        let cherries = template_copies(&Template::cherry(), 6).unwrap();
        assert!(families_conflict(&h, &cherries).is_none());
        let k4 = template_copies(&Template::complete(4), 6).unwrap();
        assert!(families_conflict(&h, &k4).is_some());
    }

    #[test]
    fn containment_edge_cases() {
        let h = Hypergraph::new(5, vec![vec![0, 1, 2]]).unwrap();
        let e = containment_frequency(&h, &[], 3, 20, 1).unwrap();
        assert_eq!(e.frequency, 1.0);
        let z = containment_frequency(&h, &[0], 0, 20, 1).unwrap();
        assert_eq!(z.frequency, 0.0);
        assert!(matches!(containment_frequency(&h, &[0, 1, 2], 3, 5, 1), Err(Error::Input(_))));
        assert!(containment_frequency(&h, &[0], 6, 5, 1).is_err());
    }

    #[test]
    fn containment_pair_probability() {
        let h = Hypergraph::new(5, vec![vec![0, 1, 2]]).unwrap();
        let e = containment_frequency(&h, &[0, 1], 2, 4_000, 77).unwrap();
        assert!((e.frequency - 0.1).abs() <= 3.0 * (0.1 * 0.9 / 4_000f64).sqrt());
        assert!((e.prediction - 0.16).abs() < 1e-12);
    }
}
