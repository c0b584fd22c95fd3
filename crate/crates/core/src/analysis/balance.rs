use crate::error::{Error, Result};
use crate::generators::Template;
use crate::scalar::Exponent;
use itertools::Itertools;
use serde::Serialize;

/// Largest template handled by the exhaustive subset scans.
const MAX_TEMPLATE_VERTICES: usize = 20;

#[derive(Clone, Debug, Serialize)]
pub struct BalanceVerdict {
    pub template: String,
    pub k: usize,
    pub v_h: usize,
    pub e_h: usize,
    pub strictly_balanced: bool,
    /// A proper `W` with `|W| > k` and `(e_W - 1)/(|W| - k) >= (e_H - 1)/(v_H - k)`.
    pub witness: Option<Vec<u32>>,
    /// `(e_H - 1)/(v_H - k)` as `"num/den"`.
    pub density_ratio: String,
}

fn ratio_text(r: Exponent) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn check_size(t: &Template) -> Result<()> {
    if t.vertex_count > MAX_TEMPLATE_VERTICES {
        return Err(Error::Resource(format!(
            "template with {} vertices exceeds the exhaustive limit of {MAX_TEMPLATE_VERTICES}",
            t.vertex_count
        )));
    }
    Ok(())
}

/// Strict `k`-balance: `(e_{H[W]} - 1)/(|W| - k) < (e_H - 1)/(v_H - k)` for every
/// proper `W ⊂ V_H` with `|W| > k`, decided exactly over all such `W`.
pub fn balance_check(t: &Template) -> Result<BalanceVerdict> {
    check_size(t)?;
    let (v, k, e) = (t.vertex_count, t.k, t.edge_count());
    if v <= k {
        return Err(Error::input(format!("template needs more than k = {k} vertices")));
    }
    if e < 2 {
        return Err(Error::input("template needs at least two edges"));
    }
    let (ev, vk) = ((e - 1) as i64, (v - k) as i64);
    let mut witness = None;
    'sizes: for size in k + 1..v {
        for w in (0..v as u32).combinations(size) {
            let ew = t.induced_edge_count(&w) as i64;
            // (ew - 1)/(size - k) < ev/vk, cross-multiplied over positive denominators
            if (ew - 1) * vk >= ev * (size - k) as i64 {
                witness = Some(w);
                break 'sizes;
            }
        }
    }
    Ok(BalanceVerdict {
        template: t.name.clone(),
        k,
        v_h: v,
        e_h: e,
        strictly_balanced: witness.is_none(),
        witness,
        density_ratio: ratio_text(Exponent::new(ev, vk)),
    })
}

/// `v_a`: fewest vertices spanned by `a` edges of the template.
pub fn min_span(t: &Template, a: usize) -> Result<usize> {
    check_size(t)?;
    let e = t.edge_count();
    if a < 2 || a > e {
        return Err(Error::input(format!("a = {a} outside [2, {e}]")));
    }
    let span = t
        .edges
        .iter()
        .combinations(a)
        .map(|pick| {
            let mask = pick.iter().flat_map(|e| e.iter()).fold(0u64, |m, &x| m | 1 << x);
            mask.count_ones() as usize
        })
        .min()
        .expect("at least one a-subset");
    Ok(span)
}

/// Exponents `(k - (v_H - k)/(e_H - 1), 1/(e_H - 1))` of the lower bound
/// `n^{power} (log n)^{log_power}` on the Turán number.
pub fn turan_exponent(t: &Template, check: bool) -> Result<(Exponent, Exponent)> {
    let (v, k, e) = (t.vertex_count, t.k, t.edge_count());
    if e < 2 || v <= k {
        return Err(Error::input("template needs at least two edges and more than k vertices"));
    }
    if check {
        let verdict = balance_check(t)?;
        if !verdict.strictly_balanced {
            return Err(Error::Precondition(format!(
                "the Turán lower bound needs a strictly {k}-balanced template; {} fails on W = {:?}",
                t.name,
                verdict.witness.unwrap_or_default()
            )));
        }
    }
    let em1 = (e - 1) as i64;
    let power = Exponent::from_integer(k as i64) - Exponent::new((v - k) as i64, em1);
    Ok((power, Exponent::new(1, em1)))
}

/// One row of the degree-condition prediction for the copy hypergraph of a template.
#[derive(Clone, Debug, Serialize)]
pub struct DegcondRow {
    pub a: usize,
    pub v_a: usize,
    /// Exponent in `n` of `Δ_a(H_H) = Θ(n^{v_H - v_a})`.
    pub delta_exponent: String,
    /// Exponent in `n` of `D^{(e_H - a)/(e_H - 1)}` with `D = Θ(n^{v_H - k})`.
    pub bound_exponent: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegcondPrediction {
    pub template: String,
    pub rows: Vec<DegcondRow>,
    pub holds: bool,
}

/// Compares `Δ_a(H_H)` with `D^{(e_H - a)/(e_H - 1)}` on the exponent of `n`
/// for `a = 2..e_H-1`, which reduces to `(v_a - k)/(v_H - k) > (a - 1)/(e_H - 1)`.
pub fn degcond_predictor(t: &Template) -> Result<DegcondPrediction> {
    let (v, k, e) = (t.vertex_count, t.k, t.edge_count());
    if e < 2 || v <= k {
        return Err(Error::input("template needs at least two edges and more than k vertices"));
    }
    let mut rows = Vec::new();
    for a in 2..e {
        let va = min_span(t, a)?;
        let lhs = Exponent::from_integer((v - va) as i64);
        let rhs = Exponent::new(((v - k) * (e - a)) as i64, (e - 1) as i64);
        rows.push(DegcondRow {
            a,
            v_a: va,
            delta_exponent: ratio_text(lhs),
            bound_exponent: ratio_text(rhs),
            holds: lhs < rhs,
        });
    }
    let holds = rows.iter().all(|r| r.holds);
    Ok(DegcondPrediction {
        template: t.name.clone(),
        rows,
        holds,
    })
}

/// Templates used to cross-check [`balance_check`] against [`degcond_predictor`].
pub fn template_corpus() -> Vec<Template> {
    vec![
        Template::triangle(),
        Template::cycle(4),
        Template::cycle(5),
        Template::cycle(6),
        Template::complete(4),
        Template::complete(5),
        Template::diamond(),
        Template::cherry(),
        Template::complete_partite(&[2, 2]),
        Template::complete_partite(&[2, 3]),
        Template::complete_partite(&[2, 2, 2]),
        Template::complete_uniform(4, 3),
        Template::complete_uniform(5, 3),
    ]
}
