//! Points of the Riemann sphere `C ∪ {∞}`.

use std::fmt;

use crate::scalar::{Cx, Real};

/// Distance below which an argument is considered to sit exactly on a pole.
pub const POLE_EPS: f64 = 1e-300;

/// A point of the Riemann sphere: either a finite complex number or `∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint<T> {
    Finite(Cx<T>),
    Infinity,
}

impl<T: Real> SpherePoint<T> {
    pub fn finite(z: Cx<T>) -> Self {
        SpherePoint::Finite(z)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    /// The finite value, if any.
    pub fn value(&self) -> Option<Cx<T>> {
        match *self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    /// Unwraps a finite value; panics on `∞`.
    pub fn expect_finite(&self, what: &str) -> Cx<T> {
        self.value()
            .unwrap_or_else(|| panic!("{what}: expected a finite value, got infinity"))
    }

    /// `1/z` on the sphere.
    pub fn recip(self) -> Self {
        match self {
            SpherePoint::Infinity => SpherePoint::Finite(Cx::new(T::zero(), T::zero())),
            SpherePoint::Finite(z) if z.norm() < T::lit(POLE_EPS) => SpherePoint::Infinity,
            SpherePoint::Finite(z) => SpherePoint::Finite(z.inv()),
        }
    }

    /// Chordal distance on the unit sphere, in `[0, 2]`.
    pub fn chordal(&self, other: &Self) -> T {
        let two = T::lit(2.0);
        match (self, other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => T::zero(),
            (SpherePoint::Finite(z), SpherePoint::Infinity)
            | (SpherePoint::Infinity, SpherePoint::Finite(z)) => {
                two / (T::one() + z.norm_sqr()).sqrt()
            }
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => {
                two * (*a - *b).norm()
                    / ((T::one() + a.norm_sqr()).sqrt() * (T::one() + b.norm_sqr()).sqrt())
            }
        }
    }
}

impl<T: Real> From<Cx<T>> for SpherePoint<T> {
    fn from(z: Cx<T>) -> Self {
        SpherePoint::Finite(z)
    }
}

impl<T: Real> fmt::Display for SpherePoint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Infinity => write!(f, "inf"),
            SpherePoint::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}
