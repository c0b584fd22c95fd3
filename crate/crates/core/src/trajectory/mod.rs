//! Predicted trajectories of the process and the machinery around them:
//! time scaling, `q`, `s_ℓ`, `s_ℓ^±`, error functions, crude-bound
//! thresholds, the variation equations, and the stopping-time monitor.
//!
//! Everything numeric is generic over [`Real`]; logarithms are natural.

mod monitor;
mod quad;
mod thresholds;
mod vareq;

pub use monitor::{points_verdict, stop_check, z_diagnostics, FamilyVerdict, StopFamily, StopReport, ZDiagnostics};
pub use quad::{adaptive_simpson, trapezoid};
pub use thresholds::{codegree_exponent, set_degree_exponent, AffineExponent};
pub use vareq::{check_variation_equations, search_alpha_beta, uniform_grid, VareqMargin, VareqReport};

use crate::error::{Error, Result};
use crate::hypergraph::ConditionReport;
use crate::scalar::{binomial, Real};
use serde::{Deserialize, Serialize};

/// Relative tolerance of the `s_ℓ^±` quadrature.
pub const QUAD_TOL: f64 = 1e-14;

/// Default number of grid points for the variation-equation check.
pub const DEFAULT_GRID: usize = 10_000;

/// Search caps for integer `α` and `β`.
pub const ALPHA_CAP: u32 = 256;
pub const BETA_CAP: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// Which error function: `f_v` or `f_ℓ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorFn {
    Vertex,
    Size(usize),
}

/// `(r, N, D, ε, δ, ζ, α, β)`; serializes to the params JSON block.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryParams<T> {
    pub r: usize,
    pub n: usize,
    pub d: T,
    pub epsilon: T,
    pub delta: T,
    pub zeta: T,
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> TrajectoryParams<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(r: usize, n: usize, d: T, epsilon: T, delta: T, zeta: T, alpha: T, beta: T) -> Result<Self> {
        let p = Self { r, n, d, epsilon, delta, zeta, alpha, beta };
        p.validate_ranges()?;
        Ok(p)
    }

    fn validate_ranges(&self) -> Result<()> {
        if self.r < 2 {
            return Err(Error::Config(format!("uniformity r = {} must be at least 2", self.r)));
        }
        if self.n < 2 {
            return Err(Error::Config("N must be at least 2".into()));
        }
        let positive = [("D", self.d), ("epsilon", self.epsilon), ("delta", self.delta), ("zeta", self.zeta)];
        for (name, x) in positive {
            if !(x > T::zero()) || !x.is_finite() {
                return Err(Error::Config(format!("{name} must be positive and finite, got {x}")));
            }
        }
        Ok(())
    }

    /// `ζ ≤ δ/10 ≤ ε/100`.
    pub fn ordering_ok(&self) -> bool {
        let ten = T::lit(10.0);
        self.zeta <= self.delta / ten && self.delta / ten <= self.epsilon / T::lit(100.0)
    }

    /// Checks ranges and the constant ordering. With `allow_loose`, a broken
    /// ordering is returned as a warning instead of an error.
    pub fn validate(&self, allow_loose: bool) -> Result<Option<String>> {
        self.validate_ranges()?;
        if self.ordering_ok() {
            return Ok(None);
        }
        let msg = format!(
            "constants violate zeta <= delta/10 <= epsilon/100 (zeta={}, delta={}, epsilon={})",
            self.zeta, self.delta, self.epsilon
        );
        if allow_loose {
            Ok(Some(msg))
        } else {
            Err(Error::Config(msg))
        }
    }

    /// Defaults from a condition report: `ε` is the supremum allowed by the
    /// hypotheses minus 0.01, `δ = ε/10`, `ζ = δ/10`, and `(α, β)` come from
    /// the variation-equation search over `[0, t_max]`.
    pub fn from_conditions(report: &ConditionReport) -> Result<Self> {
        let sup = report.supremum_epsilon().ok_or_else(|| {
            Error::Precondition("no positive epsilon satisfies the degree and codegree hypotheses".into())
        })?;
        let eps = sup - 0.01;
        if eps <= 0.0 {
            return Err(Error::Precondition(format!(
                "largest admissible epsilon {sup:.4} leaves no room for the 0.01 safety margin"
            )));
        }
        let epsilon = T::lit(eps);
        let delta = epsilon / T::lit(10.0);
        let zeta = delta / T::lit(10.0);
        let mut p = Self::new(report.r, report.n, T::lit(report.d), epsilon, delta, zeta, T::zero(), T::zero())?;
        p.fit_alpha_beta()?;
        Ok(p)
    }

    /// Replaces `(α, β)` by the search result on the default grid over `[0, t_max]`.
    pub fn fit_alpha_beta(&mut self) -> Result<()> {
        let grid = uniform_grid(self.t_max(), DEFAULT_GRID);
        let (alpha, beta) = search_alpha_beta(self, &grid, ALPHA_CAP, BETA_CAP).ok_or_else(|| {
            Error::Precondition(format!(
                "no integer alpha <= {ALPHA_CAP}, beta <= {BETA_CAP} satisfies the variation equations"
            ))
        })?;
        self.alpha = T::from_u32(alpha).expect("small integer");
        self.beta = T::from_u32(beta).expect("small integer");
        Ok(())
    }

    fn rm1(&self) -> T {
        T::from_count(self.r - 1)
    }

    /// `λ = ε / (4r)`.
    pub fn lambda(&self) -> T {
        self.epsilon / (T::lit(4.0) * T::from_count(self.r))
    }

    /// `D^{1/(r-1)} / N`.
    pub fn time_scale(&self) -> T {
        self.d.powf(self.rm1().recip()) / T::from_count(self.n)
    }

    pub fn scaled_time(&self, i: usize) -> T {
        T::from_count(i) * self.time_scale()
    }

    /// `ζ (ln N)^{1/(r-1)}`.
    pub fn t_max(&self) -> T {
        self.zeta * T::from_count(self.n).ln().powf(self.rm1().recip())
    }

    /// `⌊ζ N D^{-1/(r-1)} (ln N)^{1/(r-1)}⌋`.
    pub fn i_max(&self) -> usize {
        (self.t_max() / self.time_scale())
            .floor()
            .to_usize()
            .unwrap_or(usize::MAX)
    }

    /// `e^{-t^{r-1}}`.
    pub fn q(&self, t: T) -> T {
        (-t.powi(self.r as i32 - 1)).exp()
    }

    fn check_size(&self, l: usize, lo: usize, hi: usize) -> Result<()> {
        if l < lo || l > hi {
            return Err(Error::input(format!("edge size {l} outside [{lo}, {hi}]")));
        }
        Ok(())
    }

    /// `s_ℓ(t) = C(r-1, ℓ-1) D^{(ℓ-1)/(r-1)} t^{r-ℓ} q^{ℓ-1}`.
    pub fn s(&self, l: usize, t: T) -> Result<T> {
        self.check_size(l, 2, self.r)?;
        Ok(self.s_raw(l, t))
    }

    fn s_raw(&self, l: usize, t: T) -> T {
        let r = self.r;
        binomial::<T>(r - 1, l - 1)
            * self.d.powf(T::from_count(l - 1) / self.rm1())
            * t.powi((r - l) as i32)
            * self.q(t).powi(l as i32 - 1)
    }

    /// `s_ℓ^+` (`2 ≤ ℓ ≤ r-1`) or `s_ℓ^-` (`2 ≤ ℓ ≤ r`) by adaptive quadrature.
    pub fn s_pm(&self, l: usize, t: T, sign: Sign) -> Result<T> {
        match sign {
            Sign::Plus => self.check_size(l, 2, self.r - 1)?,
            Sign::Minus => self.check_size(l, 2, self.r)?,
        }
        if t <= T::zero() {
            return Ok(T::zero());
        }
        let scale = self.d.powf(-self.rm1().recip());
        let lf = T::from_count(l);
        let integral = match sign {
            Sign::Plus => adaptive_simpson(|x| lf * self.s_raw(l + 1, x) / self.q(x), T::zero(), t, T::lit(QUAD_TOL)),
            Sign::Minus => adaptive_simpson(
                |x| (lf - T::one()) * self.s_raw(l, x) * self.s_raw(2, x) / self.q(x),
                T::zero(),
                t,
                T::lit(QUAD_TOL),
            ),
        };
        Ok(scale * integral)
    }

    /// Right side of `s_ℓ' = D^{-1/(r-1)} (ℓ s_{ℓ+1} - (ℓ-1) s_ℓ s_2) / q`, with `s_{r+1} = 0`.
    pub fn s_derivative_rhs(&self, l: usize, t: T) -> Result<T> {
        self.check_size(l, 2, self.r)?;
        let lf = T::from_count(l);
        let up = if l < self.r { lf * self.s_raw(l + 1, t) } else { T::zero() };
        let down = (lf - T::one()) * self.s_raw(l, t) * self.s_raw(2, t);
        Ok(self.d.powf(-self.rm1().recip()) * (up - down) / self.q(t))
    }

    /// Error function value and exact derivative.
    ///
    /// `f_ℓ = (1 + t^{r-ℓ+2}) e^{αt + βt^{r-1}} q^ℓ` and
    /// `f_v = (1 + t^2) e^{αt + βt^{r-1}} q^2`.
    pub fn f(&self, which: ErrorFn, t: T) -> (T, T) {
        let (power, ql) = match which {
            ErrorFn::Vertex => (2usize, 2usize),
            ErrorFn::Size(l) => (self.r + 2 - l, l),
        };
        let rm1 = self.rm1();
        let shifted = self.beta - T::from_count(ql);
        let poly = T::one() + t.powi(power as i32);
        let dpoly = T::from_count(power) * t.powi(power as i32 - 1);
        let expo = (self.alpha * t + shifted * t.powi(self.r as i32 - 1)).exp();
        let dexpo = self.alpha + shifted * rm1 * t.powi(self.r as i32 - 2);
        (poly * expo, (dpoly + poly * dexpo) * expo)
    }

    pub fn f_value(&self, which: ErrorFn, t: T) -> T {
        self.f(which, t).0
    }

    /// Half-width `N D^{-δ} f_v` of the band around `Nq`.
    pub fn points_band(&self, t: T) -> T {
        T::from_count(self.n) * self.d.powf(-self.delta) * self.f_value(ErrorFn::Vertex, t)
    }

    /// Half-width `D^{(ℓ-1)/(r-1) - δ} f_ℓ` of the band around `s_ℓ^±`.
    pub fn degree_band(&self, l: usize, t: T) -> T {
        self.d.powf(T::from_count(l - 1) / self.rm1() - self.delta) * self.f_value(ErrorFn::Size(l), t)
    }

    /// `D_{a↑b} = D^{(b-a)/(r-1) - ε + 2(r-b)λ}`.
    pub fn set_degree_bound(&self, a: usize, b: usize) -> Result<T> {
        let e = set_degree_exponent(self.r, a, b)?;
        Ok(self.d.powf(e.eval(self.epsilon)))
    }

    /// `C_{a,a'→k} = 2^r D^{(a+a'-k-2)/(r-1) - ε + (2r-2k-2)λ}`.
    pub fn codegree_bound(&self, a: usize, a2: usize, k: usize) -> Result<T> {
        let e = codegree_exponent(self.r, a, a2, k)?;
        Ok(T::lit(2.0).powi(self.r as i32) * self.d.powf(e.eval(self.epsilon)))
    }

    pub fn to_f64(&self) -> TrajectoryParams<f64> {
        let c = |x: T| x.to_f64().expect("finite");
        TrajectoryParams {
            r: self.r,
            n: self.n,
            d: c(self.d),
            epsilon: c(self.epsilon),
            delta: c(self.delta),
            zeta: c(self.zeta),
            alpha: c(self.alpha),
            beta: c(self.beta),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(r: usize, n: usize, d: f64) -> TrajectoryParams<f64> {
        TrajectoryParams::new(r, n, d, 0.3, 0.03, 0.003, 12.0, 4.0).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn scaled_time_examples() {
        let p = params(3, 10_000, 100.0);
        assert_eq!(p.scaled_time(0), 0.0);
        assert!(rel(p.scaled_time(303), 0.303) < 1e-12);
        let i = p.i_max();
        assert!(p.scaled_time(i) <= p.t_max());
        assert!(p.t_max() - p.scaled_time(i) <= p.time_scale());
    }

    #[test]
    fn q_examples() {
        let p = params(3, 10_000, 100.0);
        assert_eq!(p.q(0.0), 1.0);
        assert!(rel(p.q(1.0), (-1f64).exp()) < 1e-12);
        let want = (p.n as f64).powf(-p.zeta.powi(2));
        assert!(rel(p.q(p.t_max()), want) < 1e-9);
    }

    #[test]
    fn s_examples() {
        let p = params(3, 10_000, 100.0);
        assert_eq!(p.s(3, 0.0).unwrap(), 100.0);
        assert_eq!(p.s(2, 0.0).unwrap(), 0.0);
        assert!((p.s(2, 0.5).unwrap() - 2.0 * 10.0 * 0.5 * (-0.25f64).exp()).abs() < 1e-12);
        assert!((p.s(2, 0.5).unwrap() - 7.788).abs() < 1e-3);
        assert!(p.s(1, 0.5).is_err());
        assert!(p.s(4, 0.5).is_err());
    }

    #[test]
    fn s_pm_identity_and_ranges() {
        for r in 3..=5 {
            let p = params(r, 10_000, 1e4);
            for l in 2..r {
                assert_eq!(p.s_pm(l, 0.0, Sign::Plus).unwrap(), 0.0);
                for t in [0.2, 0.7, 1.3] {
                    let diff = p.s_pm(l, t, Sign::Plus).unwrap() - p.s_pm(l, t, Sign::Minus).unwrap();
                    assert!(rel(diff, p.s(l, t).unwrap()) < 1e-7, "r={r} l={l} t={t}");
                }
            }
            assert!(p.s_pm(r, 0.5, Sign::Plus).is_err());
            assert!(p.s_pm(1, 0.5, Sign::Minus).is_err());
            // s_r^- = D (1 - q^{r-1}) in closed form
            let t = 0.9;
            let want = p.d * (1.0 - p.q(t).powi(r as i32 - 1));
            assert!(rel(p.s_pm(r, t, Sign::Minus).unwrap(), want) < 1e-8);
        }
    }

    #[test]
    fn s_minus_against_trapezoid() {
        let p = params(3, 10_000, 100.0);
        let t = 1.1;
        let fine = trapezoid(|x| p.s_raw(2, x) * 2.0 * x, 0.0, t, 40_000);
        let quad = p.s_pm(2, t, Sign::Minus).unwrap();
        assert!(rel(quad, fine) < 1e-7);
    }

    #[test]
    fn differential_equation_holds() {
        let p = params(4, 10_000, 1e4);
        for l in 2..=4 {
            for j in 0..=14 {
                let t = 0.1 + 0.1 * j as f64;
                let h = 1e-5;
                let fd = (p.s(l, t + h).unwrap() - p.s(l, t - h).unwrap()) / (2.0 * h);
                let rhs = p.s_derivative_rhs(l, t).unwrap();
                assert!((fd - rhs).abs() <= 1e-5 * rhs.abs().max(1.0), "l={l} t={t}");
            }
        }
    }

    #[test]
    fn error_functions() {
        let p = params(3, 10_000, 100.0);
        for which in [ErrorFn::Vertex, ErrorFn::Size(2), ErrorFn::Size(3)] {
            assert_eq!(p.f(which, 0.0).0, 1.0);
            for t in [0.1, 1.0, 2.0] {
                let h = 1e-5;
                let fd = (p.f_value(which, t + h) - p.f_value(which, t - h)) / (2.0 * h);
                assert!(rel(p.f(which, t).1, fd) < 1e-6, "{which:?} t={t}");
            }
        }
        let flat = TrajectoryParams::new(3, 100, 10.0, 0.3, 0.03, 0.003, 0.0, 0.0).unwrap();
        assert_eq!(flat.f(ErrorFn::Vertex, 0.0).1, 0.0);
    }

    #[test]
    fn threshold_examples() {
        let p = TrajectoryParams::new(3, 1_000_000, 1e4, 0.3, 0.03, 0.003, 0.0, 0.0).unwrap();
        assert!(rel(p.lambda(), 0.025) < 1e-12);
        assert!(rel(p.set_degree_bound(2, 3).unwrap(), 10f64.powf(0.8)) < 1e-12);
        assert!(rel(p.codegree_bound(3, 3, 2).unwrap(), 8.0 * 10f64.powf(2.8)) < 1e-12);
        assert!(p.set_degree_bound(3, 3).is_err());
        assert!(p.codegree_bound(3, 3, 3).is_err());
    }

    #[test]
    fn ordering_and_defaults() {
        let p = params(3, 100, 10.0);
        assert!(p.ordering_ok());
        let mut loose = p;
        loose.zeta = 0.5;
        assert!(loose.validate(false).is_err());
        assert!(loose.validate(true).unwrap().is_some());
        assert!(TrajectoryParams::new(3, 100, 10.0, -0.1, 0.01, 0.001, 0.0, 0.0).is_err());
    }

    #[test]
    fn params_json_block() {
        let p = params(3, 100, 10.0);
        let json = serde_json::to_value(p).unwrap();
        let keys: Vec<&str> = json.as_object().unwrap().keys().map(String::as_str).collect();
        for k in ["r", "n", "d", "epsilon", "delta", "zeta", "alpha", "beta"] {
            assert!(keys.contains(&k));
        }
        let back: TrajectoryParams<f64> = serde_json::from_value(json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn single_precision_curves() {
        let p = TrajectoryParams::<f32>::new(3, 10_000, 100.0, 0.3, 0.03, 0.003, 12.0, 4.0).unwrap();
        let diff = p.s_pm(2, 0.7, Sign::Plus).unwrap() - p.s_pm(2, 0.7, Sign::Minus).unwrap();
        assert!((diff - p.s(2, 0.7).unwrap()).abs() / p.s(2, 0.7).unwrap() < 1e-3);
    }
}
