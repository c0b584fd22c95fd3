use crate::error::{Error, Result};
use crate::hypergraph::Vertex;
use crate::scalar::{CompensatedSum, Real};
use rayon::prelude::*;

/// Default cap on `N^{d+1} · 2^d` elementary operations.
pub const DEFAULT_BUDGET: u64 = 8_000_000_000;

/// `‖ν_I − 1‖_{U^d}` over `Z_N`, where `ν_I = (N/|I|) 1_I`.
///
/// The defining average over `(x, h) ∈ Z_N^{d+1}` is summed directly. With
/// `g = |I|(ν_I − 1)`, which takes the integer values `N − |I|` and `−|I|`,
/// every cube product is an integer, so the sum is exact in `i128` whenever
/// it provably fits; otherwise it falls back to compensated floating sums.
/// Per-`x` partial sums are combined in index order, so the result does not
/// depend on the thread count.
pub fn gowers_norm<T: Real>(set: &[Vertex], n: usize, d: usize, budget: u64) -> Result<T> {
    if d == 0 {
        return Err(Error::input("Gowers norm needs d >= 1"));
    }
    if n == 0 {
        return Err(Error::input("modulus must be positive"));
    }
    let mut member = vec![false; n];
    for &v in set {
        if v as usize >= n {
            return Err(Error::input(format!("element {v} outside Z_{n}")));
        }
        member[v as usize] = true;
    }
    let size = member.iter().filter(|&&b| b).count();
    if size == 0 {
        return Err(Error::input("the set must be nonempty"));
    }
    let ops = (n as u128).pow(d as u32 + 1) * (1u128 << d);
    if ops > budget as u128 {
        return Err(Error::Resource(format!(
            "N^(d+1)·2^d = {ops} operations exceeds the budget of {budget}"
        )));
    }
    let g: Vec<i64> = member
        .iter()
        .map(|&b| if b { (n - size) as i64 } else { -(size as i64) })
        .collect();
    // doubled table so base + h < 2N needs no reduction
    let g2: Vec<i64> = g.iter().chain(g.iter()).copied().collect();

    let cubes = (n as f64).powi(d as i32 + 1);
    let scale = T::from_f64(cubes).expect("finite") * T::from_count(size).powi(1 << d);
    let bits_needed = ((d + 1) as f64 + (1u32 << d) as f64) * (n as f64).log2();
    let total: T = if bits_needed < 125.0 {
        let parts: Vec<i128> = (0..n).into_par_iter().map(|x| cube_sum_exact(&g2, n, d, x)).collect();
        let s: i128 = parts.iter().sum();
        T::from_i128(s).expect("finite") / scale
    } else {
        let gf: Vec<T> = g2.iter().map(|&v| T::from_i64(v).expect("small")).collect();
        let parts: Vec<T> = (0..n)
            .into_par_iter()
            .map(|x| cube_sum_float(&gf, n, d, x))
            .collect();
        let acc: CompensatedSum<T> = parts.into_iter().collect();
        acc.value() / scale
    };
    Ok(total.abs().powf(T::one() / T::from_count(1 << d)))
}

/// Visits `(base, weight)` for every `h' ∈ Z_N^{d-1}`, where `base[m]` is
/// `x + Σ_{j ∈ m} h'_j mod N` for the `2^{d-1}` masks `m`, updated as subset sums.
fn for_each_face(n: usize, d: usize, x: usize, mut visit: impl FnMut(&[usize])) {
    let outer = d - 1;
    let faces = 1usize << outer;
    let mut h = vec![0usize; outer];
    let mut base = vec![x; faces];
    loop {
        for m in 1..faces {
            let low = m.trailing_zeros() as usize;
            let v = base[m & (m - 1)] + h[low];
            base[m] = if v >= n { v - n } else { v };
        }
        visit(&base);
        // odometer over h'
        let mut j = 0;
        loop {
            if j == outer {
                return;
            }
            h[j] += 1;
            if h[j] < n {
                break;
            }
            h[j] = 0;
            j += 1;
        }
    }
}

fn cube_sum_exact(g2: &[i64], n: usize, d: usize, x: usize) -> i128 {
    let mut acc: i128 = 0;
    for_each_face(n, d, x, |base| {
        let fixed: i128 = base.iter().map(|&b| g2[b] as i128).product();
        if fixed == 0 {
            return;
        }
        let mut inner: i128 = 0;
        for hd in 0..n {
            let moved: i128 = base.iter().map(|&b| g2[b + hd] as i128).product();
            inner += moved;
        }
        acc += fixed * inner;
    });
    acc
}

fn cube_sum_float<T: Real>(g2: &[T], n: usize, d: usize, x: usize) -> T {
    let mut acc = CompensatedSum::new();
    for_each_face(n, d, x, |base| {
        let fixed = base.iter().fold(T::one(), |a, &b| a * g2[b]);
        for hd in 0..n {
            let moved = base.iter().fold(T::one(), |a, &b| a * g2[b + hd]);
            acc.add(fixed * moved);
        }
    });
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct loops over `(x, h)` with `ν − 1` in floating point.
    fn naive(set: &[Vertex], n: usize, d: usize) -> f64 {
        let p = set.len() as f64 / n as f64;
        let f = |y: usize| if set.contains(&(y as Vertex)) { 1.0 / p - 1.0 } else { -1.0 };
        let mut total = 0.0;
        let count = n.pow(d as u32 + 1);
        for idx in 0..count {
            let mut rest = idx;
            let x = rest % n;
            rest /= n;
            let h: Vec<usize> = (0..d).map(|_| { let v = rest % n; rest /= n; v }).collect();
            let mut prod = 1.0;
            for w in 0..1usize << d {
                let y = x + (0..d).filter(|j| w >> j & 1 == 1).map(|j| h[j]).sum::<usize>();
                prod *= f(y % n);
            }
            total += prod;
        }
        (total / count as f64).abs().powf(1.0 / (1 << d) as f64)
    }

    #[test]
    fn full_set_has_zero_norm() {
        let all: Vec<Vertex> = (0..11).collect();
        assert_eq!(gowers_norm::<f64>(&all, 11, 2, DEFAULT_BUDGET).unwrap(), 0.0);
    }

    #[test]
    fn u1_vanishes() {
        for set in [vec![0u32], vec![1, 4, 5, 9], vec![2, 3]] {
            assert_eq!(gowers_norm::<f64>(&set, 11, 1, DEFAULT_BUDGET).unwrap(), 0.0);
        }
    }

    #[test]
    fn matches_naive_loops() {
        let v: f64 = gowers_norm(&[0], 5, 2, DEFAULT_BUDGET).unwrap();
        assert!((v - naive(&[0], 5, 2)).abs() < 1e-10);
        let set = [1u32, 2, 6, 10, 11];
        for d in 2..=3 {
            let v: f64 = gowers_norm(&set, 13, d, DEFAULT_BUDGET).unwrap();
            assert!((v - naive(&set, 13, d)).abs() < 1e-9, "d={d}");
        }
    }

    #[test]
    fn float_fallback_agrees() {
        let set = [1u32, 2, 6, 10, 11];
        let g: Vec<i64> = (0..13).map(|y| if set.contains(&y) { 8 } else { -5 }).collect();
        let g2: Vec<i64> = g.iter().chain(g.iter()).copied().collect();
        let gf: Vec<f64> = g2.iter().map(|&v| v as f64).collect();
        for x in 0..13 {
            let exact = cube_sum_exact(&g2, 13, 3, x) as f64;
            let float = cube_sum_float(&gf, 13, 3, x);
            assert!((exact - float).abs() <= 1e-9 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(gowers_norm::<f64>(&[], 11, 2, DEFAULT_BUDGET), Err(Error::Input(_))));
        assert!(matches!(gowers_norm::<f64>(&[1], 11, 2, 100), Err(Error::Resource(_))));
        assert!(gowers_norm::<f64>(&[11], 11, 2, DEFAULT_BUDGET).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn translation_and_dilation_invariant(
            bits in proptest::collection::vec(proptest::bool::ANY, 31),
            c in 0u32..31,
            u in 1u32..31,
        ) {
            let set: Vec<Vertex> = (0..31).filter(|&v| bits[v as usize]).collect();
            proptest::prop_assume!(!set.is_empty());
            let base: f64 = gowers_norm(&set, 31, 2, DEFAULT_BUDGET).unwrap();
            let moved: Vec<Vertex> = set.iter().map(|&v| (v + c) % 31).collect();
            let scaled: Vec<Vertex> = set.iter().map(|&v| v * u % 31).collect();
            let a: f64 = gowers_norm(&moved, 31, 2, DEFAULT_BUDGET).unwrap();
            let b: f64 = gowers_norm(&scaled, 31, 2, DEFAULT_BUDGET).unwrap();
            proptest::prop_assert!((a - base).abs() < 1e-10);
            proptest::prop_assert!((b - base).abs() < 1e-10);
        }
    }

    #[test]
    fn single_precision() {
        let v: f32 = gowers_norm(&[0], 5, 2, DEFAULT_BUDGET).unwrap();
        assert!((v as f64 - naive(&[0], 5, 2)).abs() < 1e-5);
    }
}
