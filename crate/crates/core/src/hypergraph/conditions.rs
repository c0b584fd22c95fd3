use super::Hypergraph;
use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;

/// Degree and codegree hypotheses of the lower-bound theorem, evaluated on one instance.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub r: usize,
    pub n: usize,
    pub edges: usize,
    /// Mean vertex degree; equals the common degree when `near_regular` is false.
    pub d: f64,
    pub near_regular: bool,
    pub min_degree: usize,
    pub max_degree: usize,
    pub epsilon: f64,
    /// `ℓ ↦ Δ_ℓ(H)` for `ℓ = 2..r-1`.
    pub delta_values: BTreeMap<usize, usize>,
    pub degcond_satisfied: BTreeMap<usize, bool>,
    /// Maximum `(r-1)`-codegree; absent for graphs.
    pub gamma: Option<usize>,
    pub gamma_satisfied: bool,
    /// `N >= D^{1/(r-1) + ε}`.
    pub density_ok: bool,
    /// `D > N^ε`.
    pub degree_ok: bool,
}

impl ConditionReport {
    pub fn all_satisfied(&self) -> bool {
        self.degcond_satisfied.values().all(|&b| b)
            && self.gamma_satisfied
            && self.density_ok
            && self.degree_ok
    }

    /// Supremum of the `ε` for which every hypothesis holds, if positive.
    pub fn supremum_epsilon(&self) -> Option<f64> {
        if self.d <= 1.0 || self.n < 2 {
            return None;
        }
        let r = self.r as f64;
        let ln_d = self.d.ln();
        let ln_n = (self.n as f64).ln();
        let mut sup = ln_d / ln_n;
        sup = sup.min(ln_n / ln_d - 1.0 / (r - 1.0));
        for (&l, &delta) in &self.delta_values {
            if delta > 0 {
                sup = sup.min((r - l as f64) / (r - 1.0) - (delta as f64).ln() / ln_d);
            }
        }
        if let Some(g) = self.gamma.filter(|&g| g > 0) {
            sup = sup.min(1.0 - (g as f64).ln() / ln_d);
        }
        (sup > 0.0).then_some(sup)
    }
}

/// Evaluates the theorem's hypotheses at `epsilon`.
///
/// Exact regularity is not required: the mean degree stands in for `D` and
/// `near_regular` records that degrees differ.
pub fn check_main_conditions(h: &Hypergraph, epsilon: f64) -> Result<ConditionReport> {
    let r = h
        .uniformity()
        .ok_or_else(|| Error::input("condition check needs a uniform hypergraph"))?;
    if !(epsilon > 0.0) {
        return Err(Error::input("epsilon must be positive"));
    }
    let n = h.vertex_count();
    let (min_degree, max_degree) = h
        .degrees()
        .fold((usize::MAX, 0), |(lo, hi), d| (lo.min(d), hi.max(d)));
    let min_degree = if n == 0 { 0 } else { min_degree };
    let d = if n == 0 {
        0.0
    } else {
        (r * h.edge_count()) as f64 / n as f64
    };
    let rf = r as f64;
    let mut delta_values = BTreeMap::new();
    let mut degcond_satisfied = BTreeMap::new();
    for l in 2..r {
        let delta = h.max_set_degree(l)?;
        let bound = d.powf((rf - l as f64) / (rf - 1.0) - epsilon);
        delta_values.insert(l, delta);
        degcond_satisfied.insert(l, (delta as f64) < bound);
    }
    let gamma = if r >= 3 {
        Some(h.max_r1_codegree()?)
    } else {
        None
    };
    let gamma_satisfied = gamma.is_none_or(|g| (g as f64) < d.powf(1.0 - epsilon));
    let density_ok = n as f64 >= d.powf(1.0 / (rf - 1.0) + epsilon);
    let degree_ok = d > (n as f64).powf(epsilon);
    Ok(ConditionReport {
        r,
        n,
        edges: h.edge_count(),
        d,
        near_regular: min_degree != max_degree,
        min_degree,
        max_degree,
        epsilon,
        delta_values,
        degcond_satisfied,
        gamma,
        gamma_satisfied,
        density_ok,
        degree_ok,
    })
}
