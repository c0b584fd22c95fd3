//! Scalar abstraction for the numeric parts of the crate.
//!
//! Trajectories, error functions, quadrature and the Gowers sum are written
//! against [`Real`], so they run in `f32` or `f64`. Exponent bookkeeping that
//! must be exact uses [`Exponent`], a rational over `i64`.

use num_rational::Ratio;
use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display};

/// floating point: f32 or f64
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Convert from `f64`, panicking only for values that cannot be represented at all.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("representable constant")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("representable count")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Exact rational exponent.
pub type Exponent = Ratio<i64>;

/// Neumaier compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

impl<T: Real> std::iter::FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Binomial coefficient as a float; exact for the small arguments used here.
pub fn binomial<T: Real>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = T::one();
    for j in 0..k {
        acc = acc * T::from_count(n - j) / T::from_count(j + 1);
    }
    acc
}

/// Integer binomial coefficient, saturating at `u64::MAX`.
pub fn binomial_u64(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}
