use super::LabeledFamily;
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, Vertex};
use itertools::Itertools;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    (2..).take_while(|p| p * p <= n).all(|p| !n.is_multiple_of(p))
}

fn check_kap_args(n: usize, k: usize) -> Result<()> {
    if k < 3 {
        return Err(Error::input(format!("progression length k = {k} must be at least 3")));
    }
    if !is_prime(n as u64) {
        return Err(Error::input(format!("modulus {n} is not prime")));
    }
    if n <= k {
        return Err(Error::input(format!("modulus {n} must exceed k = {k}")));
    }
    Ok(())
}

fn progression(n: usize, k: usize, a: usize, d: usize, out: &mut Vec<Vertex>) {
    out.clear();
    out.extend((0..k).map(|j| ((a + j * d) % n) as Vertex));
    out.sort_unstable();
}

/// All `k`-term arithmetic progressions of `Z_N`, one edge per vertex set.
///
/// A progression and its reversal (`d` and `-d`) give the same set, and for
/// `N` prime no other coincidence occurs, so every vertex has degree `k(N-1)/2`.
pub fn k_ap(n: usize, k: usize) -> Result<Hypergraph> {
    check_kap_args(n, k)?;
    let mut buf = Vec::with_capacity(k);
    let mut flat: Vec<Vertex>;
    let mut offsets: Vec<u32>;
    if k <= 4 {
        // pack into u128 keys so the dedupe sort is a plain integer sort
        let mut keys: Vec<u128> = Vec::with_capacity(n * (n - 1) / 2);
        for d in 1..=(n - 1) / 2 {
            for a in 0..n {
                progression(n, k, a, d, &mut buf);
                keys.push(buf.iter().fold(0u128, |acc, &v| acc << 32 | v as u128));
            }
        }
        keys.sort_unstable();
        keys.dedup();
        flat = Vec::with_capacity(keys.len() * k);
        offsets = Vec::with_capacity(keys.len() + 1);
        offsets.push(0);
        for key in keys {
            for j in (0..k).rev() {
                flat.push((key >> (32 * j)) as Vertex);
            }
            offsets.push(flat.len() as u32);
        }
    } else {
        let mut sets: Vec<Vec<Vertex>> = Vec::new();
        for d in 1..=(n - 1) / 2 {
            for a in 0..n {
                progression(n, k, a, d, &mut buf);
                sets.push(buf.clone());
            }
        }
        sets.sort_unstable();
        sets.dedup();
        offsets = vec![0];
        flat = Vec::with_capacity(sets.len() * k);
        for s in sets {
            flat.extend_from_slice(&s);
            offsets.push(flat.len() as u32);
        }
    }
    Hypergraph::from_flat(n, Some(k), offsets, flat)
}

/// Progressions counted by parameterization: one labeled edge `[a, d]` per
/// `a ∈ Z_N`, `d ≠ 0`, giving degree `k(N-1)`.
pub fn k_ap_labeled(n: usize, k: usize) -> Result<LabeledFamily> {
    check_kap_args(n, k)?;
    let mut family = LabeledFamily::new(n);
    let mut buf = Vec::with_capacity(k);
    for a in 0..n {
        for d in 1..n {
            progression(n, k, a, d, &mut buf);
            family.push(vec![a as u32, d as u32], &buf)?;
        }
    }
    Ok(family)
}

/// Triples `{a, b, c}` of distinct residues mod `n` with `a + b ≡ c` in some order.
pub fn sum_free(n: usize) -> Result<Hypergraph> {
    if n < 5 {
        return Err(Error::input(format!("sum-free hypergraph needs n >= 5, got {n}")));
    }
    let mut triples = Vec::new();
    for (a, b) in (0..n).tuple_combinations() {
        let c = (a + b) % n;
        if c != a && c != b {
            let mut t = [a as Vertex, b as Vertex, c as Vertex];
            t.sort_unstable();
            triples.push(t);
        }
    }
    triples.sort_unstable();
    triples.dedup();
    Hypergraph::with_uniformity(n, 3, triples)
}

/// Labeled `d`-cubes `e_{x,h} = {x + ω·h : ω ∈ {0,1}^d}` over `Z_N`, for
/// every `x` and every `h` without coincidences. Labels are `[x, h_1, .., h_d]`.
pub fn d_cube(n: usize, d: usize) -> Result<LabeledFamily> {
    if !is_prime(n as u64) {
        return Err(Error::input(format!("modulus {n} is not prime")));
    }
    if d == 0 {
        return Err(Error::input("cube dimension must be at least 1"));
    }
    let three_d = 3usize
        .checked_pow(d as u32)
        .filter(|&c| c <= n)
        .ok_or_else(|| {
            Error::input(format!(
                "3^{d} exceeds N = {n}: no h has 3^d distinct values ω·h, so the family is empty"
            ))
        })?;
    let mut family = LabeledFamily::new(n);
    let mut dots = vec![0usize; three_d];
    let mut seen = vec![false; n];
    let mut cube = vec![0 as Vertex; 1 << d];
    for h in (0..d).map(|_| 0..n).multi_cartesian_product() {
        // ω·h for ω ∈ {-1,0,1}^d, indexed in base 3
        for (idx, slot) in dots.iter_mut().enumerate() {
            let mut rest = idx;
            let mut acc = 0usize;
            for &hj in &h {
                acc = match rest % 3 {
                    0 => acc,
                    1 => acc + hj,
                    _ => acc + n - hj,
                };
                rest /= 3;
            }
            *slot = acc % n;
        }
        seen.iter_mut().for_each(|s| *s = false);
        let distinct = dots.iter().all(|&v| !std::mem::replace(&mut seen[v], true));
        if !distinct {
            continue;
        }
        let offsets: Vec<usize> = (0..1usize << d)
            .map(|mask| (0..d).filter(|j| mask >> j & 1 == 1).map(|j| h[j]).sum::<usize>() % n)
            .collect();
        for x in 0..n {
            for (slot, off) in cube.iter_mut().zip(&offsets) {
                *slot = ((x + off) % n) as Vertex;
            }
            let mut label = Vec::with_capacity(d + 1);
            label.push(x as u32);
            label.extend(h.iter().map(|&v| v as u32));
            family.push(label, &cube)?;
        }
    }
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn brute_ap_sets(n: usize, k: usize) -> BTreeSet<Vec<Vertex>> {
        let mut sets = BTreeSet::new();
        for a in 0..n {
            for d in 1..n {
                let mut s: Vec<Vertex> = (0..k).map(|j| ((a + j * d) % n) as Vertex).collect();
                s.sort();
                sets.insert(s);
            }
        }
        sets
    }

    #[test]
    fn ap_counts() {
        let h = k_ap(7, 3).unwrap();
        assert_eq!(h.edge_count(), 21);
        assert!(h.degrees().all(|d| d == 9));
        let h = k_ap(11, 3).unwrap();
        assert_eq!(h.edge_count(), 55);
        assert!(h.degrees().all(|d| d == 15));
        assert_eq!(k_ap(5, 3).unwrap().edge_count(), 10);
    }

    #[test]
    fn ap_matches_brute_force_and_is_regular() {
        for (n, k) in [(7, 3), (11, 3), (11, 4), (13, 5), (13, 6)] {
            let h = k_ap(n, k).unwrap();
            let got: BTreeSet<Vec<Vertex>> = h.edges().map(<[Vertex]>::to_vec).collect();
            assert_eq!(got, brute_ap_sets(n, k), "N={n} k={k}");
            assert!(h.degrees().all(|d| d == k * (n - 1) / 2), "N={n} k={k}");
        }
    }

    #[test]
    fn ap_rejects_bad_arguments() {
        assert!(k_ap(9, 3).is_err());
        assert!(k_ap(3, 3).is_err());
        assert!(k_ap(7, 2).is_err());
    }

    #[test]
    fn labeled_aps_double_the_degree() {
        let f = k_ap_labeled(11, 3).unwrap();
        assert_eq!(f.len(), 110);
        let mut deg = [0usize; 11];
        for (_, e) in f.iter() {
            for &v in e {
                deg[v as usize] += 1;
            }
        }
        assert!(deg.iter().all(|&d| d == 30));
    }

    #[test]
    fn sum_free_small() {
        let h = sum_free(5).unwrap();
        let brute: BTreeSet<Vec<Vertex>> = (0..5u32)
            .combinations(3)
            .filter(|t| {
                t.iter().permutations(3).any(|p| (p[0] + p[1]) % 5 == *p[2])
            })
            .collect();
        let got: BTreeSet<Vec<Vertex>> = h.edges().map(<[Vertex]>::to_vec).collect();
        assert_eq!(got, brute);
        assert!(got.contains(&vec![1, 2, 3]));
        assert!(got.contains(&vec![1, 3, 4]));
        assert!(sum_free(4).is_err());
    }

    #[test]
    fn sum_free_fails_codegree_condition() {
        let h = sum_free(101).unwrap();
        let rep = crate::hypergraph::check_main_conditions(&h, 0.1).unwrap();
        assert!(!rep.gamma_satisfied);
        let gamma = rep.gamma.unwrap() as f64;
        assert!(gamma > rep.d / 10.0);
    }

    #[test]
    fn cube_counts() {
        assert_eq!(d_cube(11, 1).unwrap().len(), 110);
        assert!(d_cube(7, 2).is_err());
        assert!(d_cube(12, 1).is_err());
        let f = d_cube(11, 2).unwrap();
        let idx = f.iter().position(|(l, _)| l == [0, 1, 3]).expect("h = (1,3) has no coincidences");
        assert_eq!(f.edge(idx), &[0, 1, 3, 4]);
        assert!(f.iter().all(|(_, e)| e.len() == 4));
    }

    #[test]
    fn cube_family_size_approaches_n_to_the_d_plus_one() {
        // h_1 != 0, and h_2 avoids {0, ±h_1, ±2h_1, ±h_1/2}
        for n in [11usize, 31, 61] {
            assert_eq!(d_cube(n, 1).unwrap().len(), n * (n - 1));
            assert_eq!(d_cube(n, 2).unwrap().len(), n * (n - 1) * (n - 7));
        }
        for d in [1usize, 2] {
            let mut last = 0.0;
            for n in [11usize, 31, 61] {
                let ratio = d_cube(n, d).unwrap().len() as f64 / (n as f64).powi(d as i32 + 1);
                assert!(ratio > last && ratio <= 1.0, "N={n} d={d} ratio={ratio}");
                if n >= 31 {
                    assert!(ratio >= 0.5);
                }
                last = ratio;
            }
        }
    }

    #[test]
    fn two_cubes_contain_no_three_ap() {
        let f = d_cube(31, 2).unwrap();
        let aps = k_ap(31, 3).unwrap();
        for (_, e) in f.iter() {
            for t in e.iter().copied().combinations(3) {
                assert!(aps.find_edge(&t).is_none(), "cube {e:?} contains AP {t:?}");
            }
        }
    }

    #[test]
    fn cube_subset_degrees_follow_the_rank_bound() {
        // a vertices of a 2-cube pin h to a coset of dimension d - ceil(log2 a),
        // and there are at most (2^d)^a ways to place them
        for n in [31usize, 61] {
            let f = d_cube(n, 2).unwrap();
            let want = [4 * (n - 1) * (n - 7), 12 * (n - 7), 24, 8];
            for a in 1..=4usize {
                let delta = crate::hypergraph::family_max_subset_degree(&f, a);
                assert_eq!(delta, want[a - 1], "N={n} a={a}");
                let scale = n.pow(2 - a.next_power_of_two().trailing_zeros());
                assert!(delta <= 4usize.pow(a as u32) * scale);
            }
        }
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(4999));
    }
}
