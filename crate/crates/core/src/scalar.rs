//! Scalar abstraction shared by every numerical module.
//!
//! All of the analytic machinery is written against [`Real`], which is
//! implemented for `f32` and `f64`. The tolerances used throughout the crate
//! are tuned for `f64`; the `f32` instantiation compiles and runs but will
//! not meet them.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar usable by the library (f32 or f64).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Never fails for the supported types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count or index.
    #[inline]
    fn count(k: usize) -> Self {
        Self::from_usize(k).expect("count representable")
    }

    /// Lossy conversion used at output boundaries.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type Cx<T> = Complex<T>;

#[inline]
pub(crate) fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn real<T: Real>(re: T) -> Cx<T> {
    Complex::new(re, T::zero())
}

/// `exp(i·theta)`.
#[inline]
pub(crate) fn cis<T: Real>(theta: T) -> Cx<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Integer power of a complex number by repeated squaring.
pub(crate) fn cpowi<T: Real>(z: Cx<T>, mut e: u32) -> Cx<T> {
    let mut acc = real(T::one());
    let mut base = z;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

pub(crate) fn factorial<T: Real>(k: u32) -> T {
    (1..=k).fold(T::one(), |acc, m| acc * T::count(m as usize))
}

pub(crate) fn binomial<T: Real>(n: u32, k: u32) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(T::one(), |acc, m| {
        acc * T::count((n - m) as usize) / T::count((m + 1) as usize)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_combinatorics() {
        assert_eq!(factorial::<f64>(5), 120.0);
        assert_eq!(binomial::<f64>(6, 2), 15.0);
        assert_eq!(binomial::<f64>(6, 7), 0.0);
        let z = cx(0.3_f64, -1.2);
        let direct = z * z * z * z * z;
        assert!((cpowi(z, 5) - direct).norm() < 1e-14);
    }
}
