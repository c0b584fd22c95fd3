use super::{ErrorFn, TrajectoryParams};
use crate::scalar::{binomial, Real};
use serde::Serialize;

/// Smallest slack `lhs - rhs` of one inequality over the grid (and over `ℓ`).
#[derive(Clone, Debug, Serialize)]
pub struct VareqMargin<T> {
    /// Index 0..=5 of the variation equation.
    pub equation: usize,
    pub min_slack: T,
    /// Edge size and time at which the minimum occurs.
    pub size: Option<usize>,
    pub at: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct VareqReport<T> {
    pub margins: Vec<VareqMargin<T>>,
    pub passed: bool,
}

impl<T: Real> VareqReport<T> {
    pub fn margin(&self, equation: usize) -> Option<&VareqMargin<T>> {
        self.margins.iter().find(|m| m.equation == equation)
    }
}

/// `points` evenly spaced times in `[0, t_max]`, endpoints included.
pub fn uniform_grid<T: Real>(t_max: T, points: usize) -> Vec<T> {
    let steps = points.max(2) - 1;
    (0..=steps)
        .map(|j| t_max * T::from_count(j) / T::from_count(steps))
        .collect()
}

/// Visits `(equation, ℓ, f', rhs, f)` for every inequality at time `t`, where
/// `f` is the error function whose derivative forms the left side.
fn visit<T: Real>(p: &TrajectoryParams<T>, t: T, mut emit: impl FnMut(usize, Option<usize>, T, T, T)) {
    let r = p.r;
    let c = T::from_count;
    let q = p.q(t);
    let (fv, dfv) = p.f(ErrorFn::Vertex, t);
    let f: Vec<(T, T)> = (0..=r + 1)
        .map(|l| if (2..=r).contains(&l) { p.f(ErrorFn::Size(l), t) } else { (T::zero(), T::zero()) })
        .collect();
    let f2 = f[2].0;
    emit(0, None, dfv, T::lit(3.0) * f2, fv);
    for l in 2..=r {
        let (fl, dfl) = f[l];
        let lf = c(l);
        let qpow = q.powi(l as i32 - 2);
        if l < r {
            emit(1, Some(l), dfl, T::lit(5.0) * lf * f[l + 1].0 / q, fl);
            let rhs = T::lit(2.0) * lf * binomial::<T>(r - 1, l) * t.powi((r - l - 1) as i32) * qpow * fv;
            emit(2, Some(l), dfl, rhs, fl);
        }
        let lm1 = c(l - 1);
        let choose = binomial::<T>(r - 1, l - 1);
        let rm1 = c(r - 1);
        emit(3, Some(l), dfl, T::lit(7.0) * lm1 * choose * t.powi((r - l) as i32) * qpow * f2, fl);
        emit(4, Some(l), dfl, T::lit(6.0) * lm1 * rm1 * t.powi(r as i32 - 2) * fl, fl);
        let rhs5 = T::lit(3.0) * lm1 * rm1 * choose * t.powi((2 * r - l - 2) as i32) * qpow * fv;
        emit(5, Some(l), dfl, rhs5, fl);
    }
}

/// Evaluates all six families of variation inequalities over `grid`.
pub fn check_variation_equations<T: Real>(p: &TrajectoryParams<T>, grid: &[T]) -> VareqReport<T> {
    let mut margins: Vec<VareqMargin<T>> = (0..6)
        .map(|equation| VareqMargin {
            equation,
            min_slack: T::infinity(),
            size: None,
            at: T::zero(),
        })
        .collect();
    for &t in grid {
        visit(p, t, |eq, size, lhs, rhs, _| {
            let slack = lhs - rhs;
            let m = &mut margins[eq];
            // NaN slack counts as a failure
            if !(slack >= m.min_slack) {
                *m = VareqMargin { equation: eq, min_slack: slack, size, at: t };
            }
        });
    }
    margins.retain(|m| m.min_slack.is_finite() || m.min_slack.is_nan());
    let passed = !margins.is_empty() && margins.iter().all(|m| m.min_slack > T::zero());
    VareqReport { margins, passed }
}

/// Smallest integers `(α, β)`, scanning `β` upwards and taking the least
/// passing `α` for each, such that every inequality holds on `grid`.
///
/// All terms share the factor `e^{αt}`, and the left sides grow by `α f`,
/// so the least passing `α` for a given `β` is read off from an `α = 0`
/// evaluation and then confirmed by a full check.
pub fn search_alpha_beta<T: Real>(
    p: &TrajectoryParams<T>,
    grid: &[T],
    alpha_cap: u32,
    beta_cap: u32,
) -> Option<(u32, u32)> {
    for beta in 0..=beta_cap {
        let mut trial = *p;
        trial.alpha = T::zero();
        trial.beta = T::from_u32(beta)?;
        let mut need = T::neg_infinity();
        for &t in grid {
            visit(&trial, t, |_, _, lhs, rhs, f| {
                need = need.max((rhs - lhs) / f);
            });
        }
        if !need.is_finite() && need > T::zero() {
            continue;
        }
        let start = if need < T::zero() { 0 } else { need.floor().to_u32()?.saturating_add(1) };
        for alpha in start..=alpha_cap.min(start.saturating_add(2)) {
            trial.alpha = T::from_u32(alpha)?;
            if check_variation_equations(&trial, grid).passed {
                return Some((alpha, beta));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(r: usize, alpha: f64, beta: f64) -> TrajectoryParams<f64> {
        TrajectoryParams::new(r, 1_000_000, 1e4, 0.3, 0.03, 0.05, alpha, beta).unwrap()
    }

    #[test]
    fn zero_constants_fail_at_the_origin() {
        let p = params(3, 0.0, 0.0);
        let rep = check_variation_equations(&p, &uniform_grid(2.0, 200));
        assert!(!rep.passed);
        let m0 = rep.margin(0).unwrap();
        assert!(m0.min_slack < 0.0);
        // f_v'(0) - 3 f_2(0) = 0 - 3
        let at_zero = check_variation_equations(&p, &[0.0]);
        assert_eq!(at_zero.margin(0).unwrap().min_slack, -3.0);
    }

    #[test]
    fn vareq4_at_origin_needs_only_positive_alpha() {
        let p = params(3, 0.5, 0.0);
        let rep = check_variation_equations(&p, &[0.0]);
        assert!(rep.margin(4).unwrap().min_slack > 0.0);
        let p = params(3, 0.0, 0.0);
        let rep = check_variation_equations(&p, &[0.0]);
        assert!(rep.margin(4).unwrap().min_slack <= 0.0);
    }

    #[test]
    fn search_finds_constants_up_to_t2() {
        let p = params(3, 0.0, 0.0);
        let grid = uniform_grid(2.0, 2_000);
        let (alpha, beta) = search_alpha_beta(&p, &grid, 256, 64).expect("constants exist");
        let mut found = p;
        found.alpha = alpha as f64;
        found.beta = beta as f64;
        assert!(check_variation_equations(&found, &grid).passed);
        if alpha > 0 {
            found.alpha = (alpha - 1) as f64;
            assert!(!check_variation_equations(&found, &grid).passed);
        }
    }

    #[test]
    fn grid_endpoints() {
        let g = uniform_grid(1.5f64, 4);
        assert_eq!(g, vec![0.0, 0.5, 1.0, 1.5]);
    }
}
