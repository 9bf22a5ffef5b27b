//! Rational parametrization `z ↦ (x(z), y(z))` of the kernel curve `Q = 0`.

use crate::error::{Error, Result};
use crate::scalar::{cis, cx, real, Cx, Real};
use crate::sphere::{SpherePoint, POLE_EPS};
use crate::walk_model::WalkModel;

/// Imaginary-part band used by the branch-cut membership checks.
pub const CUT_BAND: f64 = 1e-9;
/// Tolerance of the cycle-image checks.
pub const CYCLE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Uniformization<T> {
    pub model: WalkModel<T>,
    /// `−exp(−iπ/n)`.
    pub z0: Cx<T>,
}

/// Closed cone `Λ(θ1, θ2) = {t·e^{iθ} : t ∈ [0, ∞], θ1 ≤ θ ≤ θ2}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cone<T> {
    pub theta1: T,
    pub theta2: T,
}

impl<T: Real> Cone<T> {
    pub fn new(theta1: T, theta2: T) -> Self {
        debug_assert!(theta1 <= theta2);
        Cone { theta1, theta2 }
    }

    /// Membership of a finite nonzero point, angles compared modulo 2π.
    /// `0` and `∞` belong to every cone.
    pub fn contains(&self, z: Cx<T>, tol: T) -> bool {
        if z.norm() == T::zero() || !z.norm().is_finite() {
            return true;
        }
        let two_pi = T::TAU();
        let mut d = z.arg() - self.theta1;
        d = d - (d / two_pi).floor() * two_pi;
        let width = self.theta2 - self.theta1;
        d <= width + tol || d >= two_pi - tol
    }

    /// Point at distance `t` along the ray of angle `theta1 + s·(theta2 − theta1)`.
    pub fn point(&self, s: T, t: T) -> Cx<T> {
        cis(self.theta1 + s * (self.theta2 - self.theta1)) * t
    }
}

/// One of the four preimage cycles: `ℝ`, `iℝ`, `z0ℝ`, `z0iℝ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cycle {
    Real,
    Imaginary,
    Z0Real,
    Z0Imaginary,
}

impl Cycle {
    pub const ALL: [Cycle; 4] = [
        Cycle::Real,
        Cycle::Imaginary,
        Cycle::Z0Real,
        Cycle::Z0Imaginary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Cycle::Real => "x(R) in [x1, x4]",
            Cycle::Imaginary => "|x(iR)| = 1",
            Cycle::Z0Real => "y(z0 R) in [0, inf]",
            Cycle::Z0Imaginary => "|y(z0 iR)| = 1",
        }
    }
}

/// Outcome of [`Uniformization::cycle_images`]: worst deviation per cycle.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleReport {
    pub samples_per_cycle: usize,
    pub max_deviation: [(Cycle, f64); 4],
}

fn mobius_quotient<T: Real>(z: Cx<T>, p: Cx<T>) -> SpherePoint<T> {
    // (z + p)/(z − p)
    let den = z - p;
    if den.norm() < T::lit(POLE_EPS) {
        SpherePoint::Infinity
    } else {
        SpherePoint::Finite((z + p) / den)
    }
}

impl<T: Real> Uniformization<T> {
    pub fn new(model: WalkModel<T>) -> Self {
        Uniformization {
            model,
            z0: -cis(-model.angle()),
        }
    }

    pub fn from_order(n: i64) -> Result<Self> {
        Ok(Self::new(WalkModel::new(n)?))
    }

    pub fn n(&self) -> u32 {
        self.model.n
    }

    pub fn eval_x(&self, z: SpherePoint<T>) -> SpherePoint<T> {
        match z {
            SpherePoint::Infinity => SpherePoint::Finite(real(T::one())),
            SpherePoint::Finite(z) => {
                match (mobius_quotient(z, self.z0), mobius_quotient(z, self.z0.conj())) {
                    (SpherePoint::Finite(a), SpherePoint::Finite(b)) => SpherePoint::Finite(a * b),
                    _ => SpherePoint::Infinity,
                }
            }
        }
    }

    pub fn eval_y(&self, z: SpherePoint<T>) -> SpherePoint<T> {
        match z {
            SpherePoint::Infinity => SpherePoint::Finite(real(T::one())),
            SpherePoint::Finite(z) => match mobius_quotient(z, self.z0) {
                SpherePoint::Finite(a) => SpherePoint::Finite(a * a),
                SpherePoint::Infinity => SpherePoint::Infinity,
            },
        }
    }

    /// `x(z)` for a finite `z` away from the poles; no pole handling.
    #[inline]
    pub fn x(&self, z: Cx<T>) -> Cx<T> {
        let zb = self.z0.conj();
        (z + self.z0) * (z + zb) / ((z - self.z0) * (z - zb))
    }

    /// `y(z)` for a finite `z` away from the poles; no pole handling.
    #[inline]
    pub fn y(&self, z: Cx<T>) -> Cx<T> {
        let q = (z + self.z0) / (z - self.z0);
        q * q
    }

    /// A logarithm of `x(z)` (branch immaterial for integer exponents).
    #[inline]
    pub fn ln_x(&self, z: Cx<T>) -> Cx<T> {
        let zb = self.z0.conj();
        (z + self.z0).ln() + (z + zb).ln() - (z - self.z0).ln() - (z - zb).ln()
    }

    /// A logarithm of `y(z)` (branch immaterial for integer exponents).
    #[inline]
    pub fn ln_y(&self, z: Cx<T>) -> Cx<T> {
        ((z + self.z0).ln() - (z - self.z0).ln()) * T::lit(2.0)
    }

    /// `|Q(x(z), y(z))|`.
    pub fn verify_on_curve(&self, z: Cx<T>) -> Result<T> {
        let x = self.eval_x(z.into());
        let y = self.eval_y(z.into());
        match (x, y) {
            (SpherePoint::Finite(x), SpherePoint::Finite(y)) => {
                Ok(self.model.kernel_q(x, y)?.norm())
            }
            _ => Err(Error::PoleCollision {
                distance: 0.0,
                re: z.re.as_f64(),
                im: z.im.as_f64(),
            }),
        }
    }

    /// Curve residual divided by `(1 + |x|²)(1 + |y|²)`.
    pub fn curve_residual_scaled(&self, z: Cx<T>) -> Result<T> {
        let r = self.verify_on_curve(z)?;
        let (x, y) = (self.x(z), self.y(z));
        Ok(r / ((T::one() + x.norm_sqr()) * (T::one() + y.norm_sqr())))
    }

    /// Deviation of one sample from the cycle's target set (zero at a pole
    /// when the target set contains `∞`).
    fn cycle_deviation(&self, cycle: Cycle, z: Cx<T>) -> T {
        let band = T::lit(CUT_BAND);
        let roots = self.model.discriminant_roots();
        match cycle {
            Cycle::Real => match self.eval_x(z.into()) {
                SpherePoint::Infinity => T::infinity(),
                SpherePoint::Finite(x) => {
                    let scale = T::one() + x.norm();
                    let off = (x.im.abs() - band * scale).max(T::zero());
                    let below = (roots.x1 - x.re).max(T::zero());
                    let above = (x.re - roots.x4).max(T::zero());
                    (off + below + above) / scale
                }
            },
            Cycle::Imaginary => match self.eval_x(z.into()) {
                SpherePoint::Infinity => T::infinity(),
                SpherePoint::Finite(x) => (x.norm() - T::one()).abs(),
            },
            Cycle::Z0Real => match self.eval_y(z.into()) {
                SpherePoint::Infinity => T::zero(),
                SpherePoint::Finite(y) => {
                    let scale = T::one() + y.norm();
                    let off = (y.im.abs() - band * scale).max(T::zero());
                    let neg = (-y.re).max(T::zero());
                    (off + neg) / scale
                }
            },
            Cycle::Z0Imaginary => match self.eval_y(z.into()) {
                SpherePoint::Infinity => T::infinity(),
                SpherePoint::Finite(y) => (y.norm() - T::one()).abs(),
            },
        }
    }

    fn cycle_direction(&self, cycle: Cycle) -> Cx<T> {
        match cycle {
            Cycle::Real => real(T::one()),
            Cycle::Imaginary => cx(T::zero(), T::one()),
            Cycle::Z0Real => self.z0,
            Cycle::Z0Imaginary => self.z0 * cx(T::zero(), T::one()),
        }
    }

    /// Samples each preimage cycle at `samples` points (both half-lines,
    /// geometric spacing) and checks its image. Returns the first failing
    /// sample as an error.
    pub fn cycle_images(&self, samples: usize) -> Result<CycleReport> {
        let tol = T::lit(CYCLE_TOL);
        let samples = samples.max(2);
        let mut out = [(Cycle::Real, 0.0); 4];
        for (slot, cycle) in out.iter_mut().zip(Cycle::ALL) {
            let dir = self.cycle_direction(cycle);
            let mut worst = T::zero();
            for k in 0..samples {
                // log-uniform radii in [1e-3, 1e3], alternating sign
                let s = T::count(k / 2) / T::count((samples / 2).max(1));
                let t = T::lit(10.0).powf(T::lit(6.0) * s - T::lit(3.0));
                let z = if k % 2 == 0 { dir * t } else { -dir * t };
                let d = self.cycle_deviation(cycle, z);
                if !(d <= tol) {
                    return Err(Error::CycleCheck {
                        cycle: cycle.name(),
                        re: z.re.as_f64(),
                        im: z.im.as_f64(),
                        residual: d.as_f64(),
                    });
                }
                worst = worst.max(d);
            }
            *slot = (cycle, worst.as_f64());
        }
        Ok(CycleReport {
            samples_per_cycle: samples,
            max_deviation: out,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(n: i64) -> Uniformization<f64> {
        Uniformization::from_order(n).unwrap()
    }

    #[test]
    fn base_point_and_special_values() {
        for n in 3..10 {
            let u = u(n);
            assert!((u.z0.norm() - 1.0).abs() < 1e-15);
            assert!((crate::scalar::cpowi(u.z0, 2 * n as u32) - 1.0).norm() < 1e-12);
            let zero = SpherePoint::Finite(cx(0.0, 0.0));
            assert!((u.eval_x(zero).value().unwrap() - 1.0).norm() < 1e-12);
            assert!((u.eval_y(zero).value().unwrap() - 1.0).norm() < 1e-12);
            assert!(u.eval_x(u.z0.into()).is_infinite());
            assert!(u.eval_x(u.z0.conj().into()).is_infinite());
            assert!(u.eval_y(u.z0.into()).is_infinite());
        }
        let u4 = u(4);
        let x1 = 3.0 - 2.0 * 2f64.sqrt();
        assert!((u4.x(cx(1.0, 0.0)) - x1).norm() < 1e-14);
        assert!((u4.y(cx(1.0, 0.0)) + x1).norm() < 1e-14);
        assert!((u4.x(cx(-1.0, 0.0)) - u4.model.discriminant_roots().x4).norm() < 1e-12);
    }

    #[test]
    fn curve_membership() {
        assert!(u(4).verify_on_curve(cx(0.3, 0.2)).unwrap() < 1e-10);
        assert!(u(5).verify_on_curve(cx(-2.0, 0.0)).unwrap() < 1e-10);
        assert!(u(4).verify_on_curve(u(4).z0).is_err());
    }

    #[test]
    fn cycles() {
        let u4 = u(4);
        let r = u4.model.discriminant_roots();
        let x = u4.x(cx(2.5, 0.0));
        assert!(x.im.abs() < 1e-15 && x.re >= r.x1 && x.re <= r.x4);
        let u3 = u(3);
        let y = u3.y(u3.z0 * 0.7);
        assert!(y.im.abs() < 1e-12 && y.re >= 0.0);
        let u6 = u(6);
        assert!((u6.y(u6.z0 * cx(0.0, 4.0)).norm() - 1.0).abs() < 1e-12);
        for n in 3..9 {
            u(n).cycle_images(200).unwrap();
        }
    }

    #[test]
    fn logs_match_values() {
        let u5 = u(5);
        let z = cx(-0.4, 0.9);
        assert!((u5.ln_x(z).exp() - u5.x(z)).norm() < 1e-13);
        assert!((u5.ln_y(z).exp() - u5.y(z)).norm() < 1e-13);
    }

    #[test]
    fn cone_membership() {
        let c = Cone::new(-std::f64::consts::FRAC_PI_4, 0.0);
        assert!(c.contains(cx(1.0, -0.5), 1e-12));
        assert!(!c.contains(cx(1.0, 0.5), 1e-12));
        assert!(c.contains(cx(0.0, 0.0), 1e-12));
    }
}
