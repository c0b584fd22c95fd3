use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, Vertex};
use crate::scalar::binomial_u64;
use itertools::Itertools;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Below this many candidate sets the sampler enumerates them all.
const ENUMERATE_LIMIT: u64 = 1 << 18;

/// `m` distinct uniformly random `r`-subsets of `[n]`, sorted lexicographically.
pub fn random_uniform(n: usize, r: usize, m: usize, seed: u64) -> Result<Hypergraph> {
    if r < 2 {
        return Err(Error::input("edges need at least 2 vertices"));
    }
    let total = binomial_u64(n as u64, r as u64);
    if m as u64 > total {
        return Err(Error::input(format!(
            "cannot draw {m} distinct {r}-sets from {n} vertices ({total} available)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<Vec<Vertex>> = if total <= ENUMERATE_LIMIT || m as u64 * 4 > total {
        let all: Vec<Vec<Vertex>> = (0..n as Vertex).combinations(r).collect();
        let mut picked = index::sample(&mut rng, all.len(), m).into_vec();
        picked.sort_unstable();
        picked.into_iter().map(|i| all[i].clone()).collect()
    } else {
        let mut chosen = BTreeSet::new();
        while chosen.len() < m {
            let mut e: Vec<Vertex> = index::sample(&mut rng, n, r)
                .into_iter()
                .map(|v| v as Vertex)
                .collect();
            e.sort_unstable();
            chosen.insert(e);
        }
        chosen.into_iter().collect()
    };
    Hypergraph::with_uniformity(n, r, edges)
}
