use crate::scalar::Real;

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson quadrature of `f` over `[a, b]` to relative tolerance `rel_tol`.
pub fn adaptive_simpson<T: Real>(f: impl Fn(T) -> T, a: T, b: T, rel_tol: T) -> T {
    if a == b {
        return T::zero();
    }
    let two = T::lit(2.0);
    let m = (a + b) / two;
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    // floor the tolerance at what the scalar type can resolve
    let rel = rel_tol.max(T::epsilon() * T::lit(64.0));
    let tol = (rel * whole.abs()).max(T::min_positive_value());
    recurse(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<T: Real>(f: &impl Fn(T) -> T, a: T, b: T, fa: T, fm: T, fb: T, whole: T, tol: T, depth: u32) -> T {
    let two = T::lit(2.0);
    let m = (a + b) / two;
    let (lm, rm) = ((a + m) / two, (m + b) / two);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= T::lit(15.0) * tol {
        return left + right + delta / T::lit(15.0);
    }
    recurse(f, a, m, fa, flm, fm, left, tol / two, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, tol / two, depth - 1)
}

/// Composite trapezoid rule with `steps` panels.
pub fn trapezoid<T: Real>(f: impl Fn(T) -> T, a: T, b: T, steps: usize) -> T {
    let h = (b - a) / T::from_count(steps);
    let mut acc = (f(a) + f(b)) / T::lit(2.0);
    for j in 1..steps {
        acc = acc + f(a + h * T::from_count(j));
    }
    acc * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_functions() {
        let v: f64 = adaptive_simpson(|x: f64| x.exp(), 0.0, 1.0, 1e-12);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-11);
        let g: f64 = adaptive_simpson(|x: f64| (-x * x).exp(), 0.0, 3.0, 1e-10);
        assert!((g - 0.886_207_348_259_521_4).abs() < 1e-9);
        assert_eq!(adaptive_simpson(|x: f64| x, 2.0, 2.0, 1e-9), 0.0);
    }

    #[test]
    fn single_precision() {
        let v: f32 = adaptive_simpson(|x: f32| x * x, 0.0, 3.0, 1e-9);
        assert!((v - 9.0).abs() < 1e-4);
    }

    #[test]
    fn trapezoid_converges() {
        let t: f64 = trapezoid(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 2000);
        assert!((t - 2.0).abs() < 1e-6);
    }
}
