use crate::error::{Error, Result};
use crate::scalar::{Exponent, Real};
use serde::Serialize;

/// An exponent of `D` of the form `constant + eps_coeff · ε`, held exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AffineExponent {
    #[serde(serialize_with = "ser_ratio")]
    pub constant: Exponent,
    #[serde(serialize_with = "ser_ratio")]
    pub eps_coeff: Exponent,
}

fn ser_ratio<S: serde::Serializer>(x: &Exponent, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl AffineExponent {
    pub fn eval<T: Real>(&self, epsilon: T) -> T {
        let c = |x: Exponent| T::lit(*x.numer() as f64) / T::lit(*x.denom() as f64);
        c(self.constant) + c(self.eps_coeff) * epsilon
    }

    /// True when the exponent is at most `constant - ε/2` for every `ε > 0`.
    pub fn within_half_epsilon(&self) -> bool {
        self.eps_coeff <= Exponent::new(-1, 2)
    }
}

fn r_i64(x: usize) -> i64 {
    x as i64
}

/// Exponent of `D_{a↑b}`: `(b-a)/(r-1) - ε + 2(r-b)·ε/(4r)`.
pub fn set_degree_exponent(r: usize, a: usize, b: usize) -> Result<AffineExponent> {
    if !(2 <= a && a < b && b <= r) {
        return Err(Error::input(format!("need 2 <= a < b <= r, got a={a}, b={b}, r={r}")));
    }
    let (r, a, b) = (r_i64(r), r_i64(a), r_i64(b));
    Ok(AffineExponent {
        constant: Exponent::new(b - a, r - 1),
        eps_coeff: Exponent::from_integer(-1) + Exponent::new(2 * (r - b), 4 * r),
    })
}

/// Exponent of `C_{a,a'→k}` without the `2^r` factor:
/// `(a+a'-k-2)/(r-1) - ε + (2r-2k-2)·ε/(4r)`.
pub fn codegree_exponent(r: usize, a: usize, a2: usize, k: usize) -> Result<AffineExponent> {
    if !(2 <= a && a <= r && 2 <= a2 && a2 <= r && 1 <= k && k < a.min(a2)) {
        return Err(Error::input(format!(
            "need 2 <= a, a' <= r and 1 <= k < min(a, a'), got a={a}, a'={a2}, k={k}, r={r}"
        )));
    }
    let (r, a, a2, k) = (r_i64(r), r_i64(a), r_i64(a2), r_i64(k));
    Ok(AffineExponent {
        constant: Exponent::new(a + a2 - k - 2, r - 1),
        eps_coeff: Exponent::from_integer(-1) + Exponent::new(2 * r - 2 * k - 2, 4 * r),
    })
}
