use super::{resolve_params, thread_pool, ParamOverrides, SampleStats};
use crate::analysis::{contained_count, count_contained, families_conflict, gowers_norm, DeltaRatio};
use crate::error::{Error, Result};
use crate::generators::{is_prime, k_ap};
use crate::hypergraph::{EdgeFamily, Hypergraph};
use crate::process::ProcessState;
use crate::trajectory::TrajectoryParams;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GowersExperiment {
    pub ns: Vec<usize>,
    pub k: usize,
    pub d: usize,
    pub runs: usize,
    pub seed_base: u64,
    /// Overrides for the trajectory constants; `ζ` sets the stopping step `i_max`.
    pub params: ParamOverrides,
    pub budget: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GowersRow {
    pub n: usize,
    pub params: TrajectoryParams<f64>,
    pub i_max: usize,
    pub set_size: SampleStats,
    pub norm: SampleStats,
    /// Largest `U^1` norm over the produced sets.
    pub u1_max: f64,
    pub norms: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GowersReport {
    pub version: String,
    pub k: usize,
    pub d: usize,
    pub runs: usize,
    pub warnings: Vec<String>,
    pub rows: Vec<GowersRow>,
    /// Medians do not increase with `N`.
    pub nonincreasing: bool,
}

/// Runs the `k`-AP process to `i_max` for each `N` and measures
/// `‖ν_I - 1‖_{U^d}` of the resulting sets; requires `2^{d-1} = k - 1`.
pub fn cmd_gowers_experiment(exp: &GowersExperiment) -> Result<GowersReport> {
    let (k, d) = (exp.k, exp.d);
    if d == 0 || d > 16 || 1usize << (d - 1) != k - 1 {
        return Err(Error::input(format!(
            "the uniformity result for k-AP-free sets needs 2^(d-1) = k-1; got k = {k}, d = {d}"
        )));
    }
    if exp.runs == 0 || exp.ns.is_empty() {
        return Err(Error::input("need at least one run and one modulus"));
    }
    for &n in &exp.ns {
        if !is_prime(n as u64) {
            return Err(Error::input(format!("modulus {n} is not prime")));
        }
        let ops = (n as u128).pow(d as u32 + 1) * (1u128 << d);
        if ops > exp.budget as u128 {
            return Err(Error::Resource(format!(
                "N = {n}: N^(d+1)·2^d = {ops} operations exceeds the budget of {}",
                exp.budget
            )));
        }
    }
    let pool = thread_pool()?;
    let mut warnings = Vec::new();
    let mut rows = Vec::new();
    for &n in &exp.ns {
        let h = k_ap(n, k)?;
        let resolved = resolve_params(&h, &exp.params)?;
        warnings.extend(resolved.warnings.into_iter().map(|w| format!("N = {n}: {w}")));
        let params = resolved.params;
        let i_max = params.i_max();
        let results: Vec<(usize, f64, f64)> = pool.install(|| {
            (0..exp.runs)
                .into_par_iter()
                .map(|idx| -> Result<(usize, f64, f64)> {
                    let mut st = ProcessState::new(&h, exp.seed_base.wrapping_add(idx as u64))?;
                    while st.step_index() < i_max && !st.is_complete() {
                        st.step()?;
                    }
                    let set = st.independent_set();
                    let ud: f64 = gowers_norm(set, n, d, exp.budget)?;
                    let u1: f64 = gowers_norm(set, n, 1, exp.budget)?;
                    Ok((set.len(), ud, u1))
                })
                .collect::<Result<_>>()
        })?;
        let sizes: Vec<f64> = results.iter().map(|r| r.0 as f64).collect();
        let norms: Vec<f64> = results.iter().map(|r| r.1).collect();
        rows.push(GowersRow {
            n,
            params,
            i_max,
            set_size: SampleStats::of(&sizes).expect("nonempty"),
            norm: SampleStats::of(&norms).expect("nonempty"),
            u1_max: results.iter().map(|r| r.2).fold(0.0, f64::max),
            norms,
        });
    }
    let mut sorted: Vec<&GowersRow> = rows.iter().collect();
    sorted.sort_by_key(|r| r.n);
    let nonincreasing = sorted.windows(2).all(|w| w[1].norm.median <= w[0].norm.median);
    Ok(GowersReport {
        version: crate::VERSION.to_string(),
        k,
        d,
        runs: exp.runs,
        warnings,
        rows,
        nonincreasing,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CountExperiment {
    /// Step at which `X_G(i)` is read.
    pub i: usize,
    pub runs: usize,
    pub seed_base: u64,
    /// Refuse when `i` is not below this bound.
    pub i_max: Option<usize>,
    /// Threshold for the `|G| p^s → ∞` proxy.
    pub min_expected: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountReport {
    pub version: String,
    pub i: usize,
    pub runs: usize,
    pub family_size: usize,
    pub s: usize,
    /// `i / N`.
    pub p: f64,
    /// `|G| p^s`.
    pub prediction: f64,
    pub counts: SampleStats,
    /// Mean `X_G(i)` over the prediction.
    pub ratio: Option<f64>,
    pub std_err: f64,
    pub expected_large: bool,
    pub deltas: Vec<DeltaRatio>,
}

/// Ensemble statistics of `X_G(i)`, the number of edges of `G` inside `I(i)`.
/// Refuses when an edge of `G` contains an edge of `H` or `i` is too late.
pub fn cmd_count_experiment<F: EdgeFamily + Sync>(h: &Hypergraph, g: &F, exp: &CountExperiment) -> Result<CountReport> {
    let n = h.vertex_count();
    if g.vertex_count() != n {
        return Err(Error::input(format!(
            "counting family lives on {} vertices, the instance on {n}",
            g.vertex_count()
        )));
    }
    if exp.runs == 0 {
        return Err(Error::input("runs must be at least 1"));
    }
    if exp.i > n {
        return Err(Error::input(format!("step {} exceeds N = {n}", exp.i)));
    }
    if let Some(e) = families_conflict(h, g) {
        return Err(Error::Precondition(format!(
            "counting needs no edge of G to contain an edge of H; {e:?} does"
        )));
    }
    if let Some(limit) = exp.i_max {
        if exp.i >= limit {
            return Err(Error::Precondition(format!("step {} is not below i_max = {limit}", exp.i)));
        }
    }
    let p = exp.i as f64 / n as f64;
    let base = count_contained(g, &[], p, exp.min_expected)?;
    let pool = thread_pool()?;
    let counts: Vec<f64> = pool.install(|| {
        (0..exp.runs)
            .into_par_iter()
            .map(|idx| -> Result<f64> {
                let mut st = ProcessState::new(h, exp.seed_base.wrapping_add(idx as u64))?;
                while st.step_index() < exp.i && !st.is_complete() {
                    st.step()?;
                }
                let mut mask = vec![false; n];
                for &v in st.independent_set() {
                    mask[v as usize] = true;
                }
                Ok(contained_count(g, &mask) as f64)
            })
            .collect::<Result<_>>()
    })?;
    let stats = SampleStats::of(&counts).expect("nonempty");
    Ok(CountReport {
        version: crate::VERSION.to_string(),
        i: exp.i,
        runs: exp.runs,
        family_size: base.family_size,
        s: base.s,
        p,
        prediction: base.prediction,
        ratio: (base.prediction > 0.0).then(|| stats.mean / base.prediction),
        std_err: stats.sd / (exp.runs as f64).sqrt(),
        counts: stats,
        expected_large: base.expected_large,
        deltas: base.deltas,
    })
}
