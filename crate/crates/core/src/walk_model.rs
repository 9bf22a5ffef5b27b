//! The zero-drift walk with jumps (±1, 0) and ±(1, −1) killed on the axes.

use crate::error::{Error, Result};
use crate::scalar::{real, Cx, Real};
use crate::sphere::SpherePoint;

/// Walk parametrized by the half-order `n` of its dihedral group.
///
/// `p10 = p(-1,0) = sin(π/n)²/2` and `p1m1 = p(-1,1) = cos(π/n)²/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkModel<T> {
    pub n: u32,
    pub p10: T,
    pub p1m1: T,
}

/// A lattice state of the quarter plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    pub i: usize,
    pub j: usize,
}

impl State {
    /// Rejects states with a negative coordinate.
    pub fn new(i: i64, j: i64) -> Result<Self> {
        if i < 0 || j < 0 {
            return Err(Error::NegativeState { i, j });
        }
        Ok(State {
            i: i as usize,
            j: j as usize,
        })
    }

    pub fn is_interior(&self) -> bool {
        self.i >= 1 && self.j >= 1
    }

    /// Interior-or-error, used by operations whose start or target must be interior.
    pub fn interior(i: i64, j: i64) -> Result<Self> {
        let s = State::new(i, j)?;
        if !s.is_interior() {
            return Err(Error::NotInterior { i: s.i, j: s.j });
        }
        Ok(s)
    }
}

/// Which variable the kernel is viewed as a quadratic polynomial in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// `Q = a(x) y² + b(x) y + c(x)`.
    InY,
    /// `Q = ã(y) x² + b̃(y) x + c̃(y)`.
    InX,
}

/// Real polynomial with ascending coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T>(pub Vec<T>);

impl<T: Real> Poly<T> {
    pub fn eval(&self, x: Cx<T>) -> Cx<T> {
        self.0
            .iter()
            .rev()
            .fold(real(T::zero()), |acc, &c| acc * x + real(c))
    }

    pub fn eval_real(&self, x: T) -> T {
        self.0.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
    }
}

/// The triple `(a, b, c)` of a quadratic decomposition of the kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticCoeffs<T> {
    pub axis: Axis,
    pub a: Poly<T>,
    pub b: Poly<T>,
    pub c: Poly<T>,
}

impl<T: Real> QuadraticCoeffs<T> {
    /// `a(s)·t² + b(s)·t + c(s)`, where `s` is the coefficient variable.
    pub fn eval(&self, s: Cx<T>, t: Cx<T>) -> Cx<T> {
        self.a.eval(s) * t * t + self.b.eval(s) * t + self.c.eval(s)
    }

    /// `b(s)² − 4·a(s)·c(s)`.
    pub fn discriminant(&self, s: Cx<T>) -> Cx<T> {
        let b = self.b.eval(s);
        b * b - self.a.eval(s) * self.c.eval(s) * T::lit(4.0)
    }
}

/// Branch points of the two coverings of the kernel curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchPoints<T> {
    pub x1: T,
    pub x4: T,
    pub y1: SpherePoint<T>,
    pub y4: SpherePoint<T>,
}

/// Builds the walk for a given `n ≥ 3`.
pub fn make_model<T: Real>(n: i64) -> Result<WalkModel<T>> {
    if n < 3 {
        return Err(Error::InvalidOrder(n));
    }
    let t = T::PI() / T::count(n as usize);
    let half = T::lit(0.5);
    Ok(WalkModel {
        n: n as u32,
        p10: t.sin().powi(2) * half,
        p1m1: t.cos().powi(2) * half,
    })
}

impl<T: Real> WalkModel<T> {
    pub fn new(n: i64) -> Result<Self> {
        make_model(n)
    }

    /// `π/n`.
    pub fn angle(&self) -> T {
        T::PI() / T::count(self.n as usize)
    }

    /// The four jumps `(di, dj, probability)`.
    pub fn jumps(&self) -> [(i64, i64, T); 4] {
        [
            (1, 0, self.p10),
            (-1, 0, self.p10),
            (1, -1, self.p1m1),
            (-1, 1, self.p1m1),
        ]
    }

    pub fn total_probability(&self) -> T {
        self.jumps().iter().map(|j| j.2).sum()
    }

    /// `xy[p10·x + p10/x + p1m1·x/y + p1m1·y/x − 1]`.
    pub fn kernel_q(&self, x: Cx<T>, y: Cx<T>) -> Result<Cx<T>> {
        if x.norm() == T::zero() {
            return Err(Error::DivisionByZero("kernel evaluated at x = 0"));
        }
        if y.norm() == T::zero() {
            return Err(Error::DivisionByZero("kernel evaluated at y = 0"));
        }
        let inner = x * self.p10 + x.inv() * self.p10 + x / y * self.p1m1 + y / x * self.p1m1
            - real(T::one());
        Ok(x * y * inner)
    }

    pub fn quadratic_coeffs(&self, axis: Axis) -> QuadraticCoeffs<T> {
        let (p, q, z) = (self.p10, self.p1m1, T::zero());
        match axis {
            Axis::InY => QuadraticCoeffs {
                axis,
                a: Poly(vec![q]),
                b: Poly(vec![p, -T::one(), p]),
                c: Poly(vec![z, z, q]),
            },
            Axis::InX => QuadraticCoeffs {
                axis,
                a: Poly(vec![q, p]),
                b: Poly(vec![z, -T::one()]),
                c: Poly(vec![z, p, q]),
            },
        }
    }

    /// Factored discriminant `p10²(x−1)²(x² + 2x(1 − 1/p10) + 1)`.
    pub fn discriminant_factored(&self, x: Cx<T>) -> Cx<T> {
        let one = real(T::one());
        let lin = T::lit(2.0) * (T::one() - self.p10.recip());
        let xm1 = x - one;
        xm1 * xm1 * (x * x + x * lin + one) * (self.p10 * self.p10)
    }

    /// Factored discriminant in `y`: `−4·p10·p1m1·y(y−1)²`.
    pub fn discriminant_tilde_factored(&self, y: Cx<T>) -> Cx<T> {
        let ym1 = y - real(T::one());
        y * ym1 * ym1 * (-T::lit(4.0) * self.p10 * self.p1m1)
    }

    pub fn discriminant_roots(&self) -> BranchPoints<T> {
        // Roots of x² − 2βx + 1 with β = 1/p10 − 1 > 1.
        let beta = self.p10.recip() - T::one();
        let s = (beta * beta - T::one()).sqrt();
        let x4 = beta + s;
        BranchPoints {
            x1: x4.recip(),
            x4,
            y1: SpherePoint::Finite(real(T::zero())),
            y4: SpherePoint::Infinity,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn probabilities() {
        let m = make_model::<f64>(4).unwrap();
        assert!((m.p10 - 0.25).abs() < 1e-16 && (m.p1m1 - 0.25).abs() < 1e-16);
        let m = make_model::<f64>(3).unwrap();
        assert!((m.p10 - 0.375).abs() < 1e-15 && (m.p1m1 - 0.125).abs() < 1e-15);
        let m = make_model::<f64>(6).unwrap();
        assert!((m.p10 - 0.125).abs() < 1e-15 && (m.p1m1 - 0.375).abs() < 1e-15);
        assert!(matches!(make_model::<f64>(2), Err(Error::InvalidOrder(2))));
        for n in 3..40 {
            let m = make_model::<f64>(n).unwrap();
            assert!((m.total_probability() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn kernel_values() {
        let m = make_model::<f64>(4).unwrap();
        let one = cx(1.0, 0.0);
        assert!(m.kernel_q(one, one).unwrap().norm() < 1e-15);
        assert!((m.kernel_q(one, -one).unwrap() - one).norm() < 1e-15);
        assert!(m.kernel_q(cx(0.0, 0.0), one).is_err());
        assert!(m.kernel_q(one, cx(0.0, 0.0)).is_err());
    }

    #[test]
    fn coefficients_and_roots() {
        let m = make_model::<f64>(4).unwrap();
        let qy = m.quadratic_coeffs(Axis::InY);
        assert!((qy.a.0[0] - 0.25).abs() < 1e-15 && qy.a.0.len() == 1);
        assert!((qy.b.eval_real(2.0) - (1.0 - 2.0 + 0.25)).abs() < 1e-15);
        assert!(qy.discriminant(cx(1.0, 0.0)).norm() < 1e-15);
        let qx = m.quadratic_coeffs(Axis::InX);
        assert!((qx.a.eval_real(1.0) - 0.5).abs() < 1e-15);
        let r = m.discriminant_roots();
        assert!((r.x1 - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!((r.x4 - (3.0 + 2.0 * 2f64.sqrt())).abs() < 1e-14);
        assert!(r.y4.is_infinite());
        assert_eq!(r.y1.value().unwrap(), cx(0.0, 0.0));
    }

    #[test]
    fn states() {
        assert!(State::new(-1, 2).is_err());
        assert!(!State::new(3, 0).unwrap().is_interior());
        assert!(State::interior(0, 5).is_err());
        assert!(State::interior(2, 5).is_ok());
    }
}
