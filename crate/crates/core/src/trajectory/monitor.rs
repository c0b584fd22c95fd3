use super::{Sign, TrajectoryParams};
use crate::error::{Error, Result};
use crate::hypergraph::Vertex;
use crate::process::{ProcessState, VertexState};
use crate::scalar::Real;
use itertools::Itertools;
use serde::Serialize;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// The four condition families of the stopping time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StopFamily {
    Points,
    VertexDegree,
    SetDegree,
    Codegree,
}

impl StopFamily {
    pub const ALL: [StopFamily; 4] = [
        StopFamily::Points,
        StopFamily::VertexDegree,
        StopFamily::SetDegree,
        StopFamily::Codegree,
    ];
}

impl fmt::Display for StopFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopFamily::Points => "points",
            StopFamily::VertexDegree => "vertexdegree",
            StopFamily::SetDegree => "setdegree",
            StopFamily::Codegree => "codegree",
        })
    }
}

impl FromStr for StopFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StopFamily::ALL
            .into_iter()
            .find(|f| f.to_string() == s)
            .ok_or_else(|| Error::input(format!("unknown stop condition family {s:?}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyVerdict {
    pub family: StopFamily,
    pub ok: bool,
    /// Smallest `(bound - observed) / bound`; nonnegative when the family holds.
    pub worst_slack: f64,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StopReport {
    pub step: usize,
    pub t: f64,
    pub verdicts: Vec<FamilyVerdict>,
}

impl StopReport {
    pub fn ok(&self) -> bool {
        self.verdicts.iter().all(|v| v.ok)
    }

    pub fn verdict(&self, family: StopFamily) -> Option<&FamilyVerdict> {
        self.verdicts.iter().find(|v| v.family == family)
    }
}

struct Worst {
    slack: f64,
    witness: Option<String>,
}

impl Worst {
    fn new() -> Self {
        Worst { slack: f64::INFINITY, witness: None }
    }

    fn offer(&mut self, slack: f64, witness: impl FnOnce() -> String) {
        if slack < self.slack {
            self.slack = slack;
            self.witness = Some(witness());
        }
    }

    fn finish(self, family: StopFamily) -> FamilyVerdict {
        let ok = !(self.slack < 0.0);
        FamilyVerdict {
            family,
            ok,
            worst_slack: if self.slack.is_finite() { self.slack } else { 1.0 },
            witness: if ok { None } else { self.witness },
        }
    }
}

fn check_params<T: Real>(p: &TrajectoryParams<T>, state: &ProcessState<'_>) -> Result<()> {
    let h = state.hypergraph();
    if h.vertex_count() != p.n {
        return Err(Error::Config(format!(
            "params have N = {} but the state has {} vertices",
            p.n,
            h.vertex_count()
        )));
    }
    if state.rank() != p.r {
        return Err(Error::Config(format!(
            "params have r = {} but the largest edge has {} vertices",
            p.r,
            state.rank()
        )));
    }
    Ok(())
}

fn f64_of<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Evaluates the selected condition families at the current step.
pub fn stop_check<T: Real>(
    p: &TrajectoryParams<T>,
    state: &ProcessState<'_>,
    families: &[StopFamily],
) -> Result<StopReport> {
    check_params(p, state)?;
    let i = state.step_index();
    let t = p.scaled_time(i);
    let verdicts = families
        .iter()
        .sorted()
        .dedup()
        .map(|&family| match family {
            StopFamily::Points => points(p, state, t),
            StopFamily::VertexDegree => vertex_degrees(p, state, t),
            StopFamily::SetDegree => set_degrees(p, state),
            StopFamily::Codegree => codegrees(p, state),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StopReport { step: i, t: f64_of(t), verdicts })
}

/// Evaluates the points family against an externally supplied open count.
pub fn points_verdict<T: Real>(p: &TrajectoryParams<T>, i: usize, open: usize) -> FamilyVerdict {
    let t = p.scaled_time(i);
    let nq = f64_of(T::from_count(p.n) * p.q(t));
    let band = f64_of(p.points_band(t));
    let mut w = Worst::new();
    let dev = (open as f64 - nq).abs();
    w.offer((band - dev) / band, || {
        format!("|V({i})| = {open} outside {nq:.3} ± {band:.3}")
    });
    w.finish(StopFamily::Points)
}

fn points<T: Real>(p: &TrajectoryParams<T>, state: &ProcessState<'_>, _t: T) -> Result<FamilyVerdict> {
    Ok(points_verdict(p, state.step_index(), state.open_count()))
}

fn vertex_degrees<T: Real>(p: &TrajectoryParams<T>, state: &ProcessState<'_>, t: T) -> Result<FamilyVerdict> {
    let mut w = Worst::new();
    for l in 2..=p.r {
        let band = f64_of(p.degree_band(l, t));
        for sign in [Sign::Plus, Sign::Minus] {
            if sign == Sign::Plus && l == p.r {
                continue;
            }
            let s = f64_of(p.s_pm(l, t, sign)?);
            for &v in state.open_vertices() {
                let d = match sign {
                    Sign::Plus => state.created(v, l),
                    Sign::Minus => state.destroyed(v, l),
                } as f64;
                w.offer((band - (d - s).abs()) / band, || {
                    let tag = if sign == Sign::Plus { '+' } else { '-' };
                    format!("d_{l}^{tag}({v}) = {d} outside {s:.3} ± {band:.3}")
                });
            }
        }
    }
    Ok(w.finish(StopFamily::VertexDegree))
}

fn set_degrees<T: Real>(p: &TrajectoryParams<T>, state: &ProcessState<'_>) -> Result<FamilyVerdict> {
    let r = p.r;
    let mut w = Worst::new();
    // (a, b) -> flat list of a-subsets of live b-edges
    let mut keys: BTreeMap<(usize, usize), Vec<Vertex>> = BTreeMap::new();
    state.for_each_live_edge(|_, res| {
        let b = res.len();
        for a in 2..b {
            let slot = keys.entry((a, b)).or_default();
            for sub in res.iter().combinations(a) {
                slot.extend(sub.into_iter().copied());
            }
        }
    });
    for a in 2..r {
        for b in a + 1..=r {
            let bound = f64_of(p.set_degree_bound(a, b)?);
            let (count, set) = keys.get(&(a, b)).map_or((0, Vec::new()), |k| heaviest(k, a));
            w.offer((bound - count as f64) / bound, || {
                format!("d_{{{set:?}↑{b}}} = {count} exceeds D_{{{a}↑{b}}} = {bound:.3}")
            });
        }
    }
    Ok(w.finish(StopFamily::SetDegree))
}

fn heaviest(keys: &[Vertex], stride: usize) -> (usize, Vec<Vertex>) {
    let count = keys.len() / stride;
    let key = |i: usize| &keys[i * stride..(i + 1) * stride];
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_unstable_by(|&x, &y| key(x).cmp(key(y)));
    let mut best = (0, Vec::new());
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && key(order[end]) == key(order[start]) {
            end += 1;
        }
        if end - start > best.0 {
            best = (end - start, key(order[start]).to_vec());
        }
        start = end;
    }
    best
}

fn codegrees<T: Real>(p: &TrajectoryParams<T>, state: &ProcessState<'_>) -> Result<FamilyVerdict> {
    let h = state.hypergraph();
    let r = p.r;
    let n = h.vertex_count();
    // live residuals in a flat buffer, addressed by edge id
    let mut offset = vec![u32::MAX; h.edge_count()];
    let mut flat: Vec<Vertex> = Vec::new();
    let mut starts: Vec<u32> = vec![0];
    state.for_each_live_edge(|id, res| {
        offset[id as usize] = (starts.len() - 1) as u32;
        flat.extend_from_slice(res);
        starts.push(flat.len() as u32);
    });
    let residual = |id: u32| -> Option<&[Vertex]> {
        let j = offset[id as usize];
        (j != u32::MAX).then(|| &flat[starts[j as usize] as usize..starts[j as usize + 1] as usize])
    };
    // (a, a', k) flattened with sizes in 2..=r and k in 1..r
    let w = r - 1;
    let combos = w * w * w;
    let combo = |a: usize, a2: usize, k: usize| ((a - 2) * w + (a2 - 2)) * w + (k - 1);
    let mut bounds = vec![f64::NAN; combos];
    for a in 2..=r {
        for a2 in 2..=r {
            for k in 1..a.min(a2) {
                bounds[combo(a, a2, k)] = f64_of(p.codegree_bound(a, a2, k)?);
            }
        }
    }
    // for each anchor v, tally ordered pairs (e ∋ v, e') by (v', a, a', k)
    let per_anchor: Vec<Option<(f64, Vertex, usize, u32)>> = (0..n as Vertex)
        .into_par_iter()
        .map_init(
            || (vec![0u32; n * combos], Vec::<usize>::new()),
            |(counts, touched), v| {
                if state.vertex_state(v) != VertexState::Open {
                    return None;
                }
                for &e in h.incident(v) {
                    let Some(re) = residual(e) else { continue };
                    for &x in re {
                        if x == v {
                            continue;
                        }
                        for &e2 in h.incident(x) {
                            let Some(re2) = residual(e2) else { continue };
                            if e2 == e || re2.binary_search(&v).is_ok() {
                                continue;
                            }
                            // visit each pair once, from its smallest shared vertex
                            let mut shared = re.iter().filter(|y| re2.binary_search(y).is_ok());
                            if shared.next() != Some(&x) {
                                continue;
                            }
                            let k = 1 + shared.count();
                            let c = combo(re.len(), re2.len(), k);
                            for &v2 in re2.iter().filter(|y| re.binary_search(y).is_err()) {
                                let slot = v2 as usize * combos + c;
                                if counts[slot] == 0 {
                                    touched.push(slot);
                                }
                                counts[slot] += 1;
                            }
                        }
                    }
                }
                touched.sort_unstable();
                let mut best: Option<(f64, Vertex, usize, u32)> = None;
                for &slot in touched.iter() {
                    let c = counts[slot];
                    counts[slot] = 0;
                    let bound = bounds[slot % combos];
                    let slack = (bound - c as f64) / bound;
                    if best.is_none_or(|b| slack < b.0) {
                        best = Some((slack, v, slot, c));
                    }
                }
                touched.clear();
                best
            },
        )
        .collect();
    let mut worst = Worst::new();
    for (slack, v, slot, c) in per_anchor.into_iter().flatten() {
        worst.offer(slack, || {
            let (v2, cm) = (slot / combos, slot % combos);
            let (a, a2, k) = (cm / (w * w) + 2, cm / w % w + 2, cm % w + 1);
            format!("c_{{{a},{a2}→{k}}}({v},{v2}) = {c} exceeds {:.3}", bounds[cm])
        });
    }
    Ok(worst.finish(StopFamily::Codegree))
}

/// `Z_V` and, per edge size, the maximum of `Z_ℓ^±(v)` over open vertices.
#[derive(Clone, Debug, Serialize)]
pub struct ZDiagnostics {
    pub step: usize,
    pub z_v: f64,
    pub z_plus: BTreeMap<usize, f64>,
    pub z_minus: BTreeMap<usize, f64>,
}

pub fn z_diagnostics<T: Real>(p: &TrajectoryParams<T>, state: &ProcessState<'_>) -> Result<ZDiagnostics> {
    check_params(p, state)?;
    let i = state.step_index();
    let t = p.scaled_time(i);
    let n = T::from_count(p.n);
    let z_v = T::from_count(state.open_count()) - n * p.q(t) - p.points_band(t);
    let mut z_plus = BTreeMap::new();
    let mut z_minus = BTreeMap::new();
    for l in 2..=p.r {
        let band = p.degree_band(l, t);
        for sign in [Sign::Plus, Sign::Minus] {
            if sign == Sign::Plus && l == p.r {
                continue;
            }
            let s = p.s_pm(l, t, sign)?;
            let max = state
                .open_vertices()
                .iter()
                .map(|&v| match sign {
                    Sign::Plus => state.created(v, l),
                    Sign::Minus => state.destroyed(v, l),
                })
                .max();
            if let Some(d) = max {
                let z = f64_of(T::from_u32(d).expect("count") - s - band);
                match sign {
                    Sign::Plus => z_plus.insert(l, z),
                    Sign::Minus => z_minus.insert(l, z),
                };
            }
        }
    }
    Ok(ZDiagnostics { step: i, z_v: f64_of(z_v), z_plus, z_minus })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{k_ap, template_copies, Template};
    use crate::hypergraph::Hypergraph;

    fn params_for(h: &Hypergraph) -> TrajectoryParams<f64> {
        let r = h.uniformity().unwrap();
        let d = (r * h.edge_count()) as f64 / h.vertex_count() as f64;
        TrajectoryParams::new(r, h.vertex_count(), d, 0.3, 0.03, 0.003, 12.0, 4.0).unwrap()
    }

    #[test]
    fn everything_holds_at_step_zero() {
        for h in [k_ap(101, 3).unwrap(), template_copies(&Template::triangle(), 9).unwrap()] {
            let rep = crate::hypergraph::check_main_conditions(&h, 0.01).unwrap();
            let p = TrajectoryParams::<f64>::from_conditions(&rep).unwrap();
            let st = ProcessState::new(&h, 3).unwrap();
            let rep = stop_check(&p, &st, &StopFamily::ALL).unwrap();
            assert!(rep.ok(), "{rep:?}");
            assert_eq!(rep.verdicts.len(), 4);
        }
    }

    #[test]
    fn z_at_step_zero() {
        let h = k_ap(101, 3).unwrap();
        let p = params_for(&h);
        let st = ProcessState::new(&h, 3).unwrap();
        let z = z_diagnostics(&p, &st).unwrap();
        let want = -(p.n as f64) * p.d.powf(-p.delta);
        assert!((z.z_v - want).abs() < 1e-9 * want.abs());
        let want_plus = -p.d.powf(0.5 - p.delta);
        assert!((z.z_plus[&2] - want_plus).abs() < 1e-12);
    }

    #[test]
    fn passing_check_means_negative_z() {
        let h = k_ap(101, 3).unwrap();
        let p = params_for(&h);
        let mut st = ProcessState::new(&h, 5).unwrap();
        for _ in 0..5 {
            st.step().unwrap();
        }
        let rep = stop_check(&p, &st, &[StopFamily::Points, StopFamily::VertexDegree]).unwrap();
        if rep.ok() {
            let z = z_diagnostics(&p, &st).unwrap();
            assert!(z.z_v < 0.0);
            assert!(z.z_plus.values().chain(z.z_minus.values()).all(|&x| x < 0.0));
        }
    }

    #[test]
    fn forced_points_violation() {
        let h = k_ap(101, 3).unwrap();
        let mut p = params_for(&h);
        p.alpha = 0.0;
        p.beta = 0.0;
        let v = points_verdict(&p, 1, 0);
        assert!(!v.ok);
        assert!(v.witness.unwrap().contains("|V(1)| = 0"));
    }

    #[test]
    fn mismatched_params() {
        let h = k_ap(101, 3).unwrap();
        let mut p = params_for(&h);
        p.n = 100;
        let st = ProcessState::new(&h, 0).unwrap();
        assert!(matches!(stop_check(&p, &st, &[StopFamily::Points]), Err(Error::Config(_))));
    }

    #[test]
    fn codegree_family_counts_pairs() {
        let h = Hypergraph::with_uniformity(4, 3, [[0u32, 1, 2], [1, 2, 3]]).unwrap();
        let p = TrajectoryParams::new(3, 4, 1.5, 0.3, 0.03, 0.003, 12.0, 4.0).unwrap();
        let st = ProcessState::new(&h, 0).unwrap();
        let rep = stop_check(&p, &st, &[StopFamily::Codegree]).unwrap();
        let v = rep.verdict(StopFamily::Codegree).unwrap();
        // one pair with c = 1 against 8 · 1.5^{0.7}
        let bound = 8.0 * 1.5f64.powf(0.7);
        assert!((v.worst_slack - (bound - 1.0) / bound).abs() < 1e-12);
    }

    #[test]
    fn codegree_family_matches_pair_enumeration() {
        let h = crate::generators::random_uniform(12, 3, 60, 7).unwrap();
        let p = TrajectoryParams::new(3, 12, 15.0, 0.3, 0.03, 0.003, 12.0, 4.0).unwrap();
        let mut st = ProcessState::new(&h, 2).unwrap();
        for _ in 0..3 {
            let live = st.live_edge_sets();
            let mut counts: BTreeMap<(Vertex, Vertex, usize, usize, usize), u32> = BTreeMap::new();
            for (x, e) in live.iter().enumerate() {
                for (y, e2) in live.iter().enumerate() {
                    let k = e.iter().filter(|u| e2.contains(u)).count();
                    if x == y || k == 0 {
                        continue;
                    }
                    for &v in e.iter().filter(|u| !e2.contains(u)) {
                        for &v2 in e2.iter().filter(|u| !e.contains(u)) {
                            *counts.entry((v, v2, e.len(), e2.len(), k)).or_default() += 1;
                        }
                    }
                }
            }
            let want = counts
                .iter()
                .map(|(&(_, _, a, a2, k), &c)| {
                    let b = p.codegree_bound(a, a2, k).unwrap();
                    (b - c as f64) / b
                })
                .fold(f64::INFINITY, f64::min);
            let got = stop_check(&p, &st, &[StopFamily::Codegree]).unwrap();
            let slack = got.verdict(StopFamily::Codegree).unwrap().worst_slack;
            assert!((slack - if want.is_finite() { want } else { 1.0 }).abs() < 1e-12);
            st.step().unwrap();
        }
    }

    #[test]
    fn family_names_round_trip() {
        for f in StopFamily::ALL {
            assert_eq!(f.to_string().parse::<StopFamily>().unwrap(), f);
        }
        assert!("nope".parse::<StopFamily>().is_err());
    }
}
