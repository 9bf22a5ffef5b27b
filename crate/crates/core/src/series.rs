//! Truncated power series at `z = 0` and the expansions of `x(z)`, `y(z)`.

use std::ops::{Add, Mul, Sub};

use crate::scalar::{cis, cpowi, real, Cx, Real};
use crate::uniformization::Uniformization;

/// Power series known up to and including `z^order`. Coefficients past
/// `order` are unknown, not zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSeries<T> {
    coeffs: Vec<Cx<T>>,
}

impl<T: Real> ComplexSeries<T> {
    /// Builds a series from its first `order + 1` coefficients.
    pub fn from_coeffs(coeffs: Vec<Cx<T>>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least a constant term");
        ComplexSeries { coeffs }
    }

    /// The constant `c` known to the given order.
    pub fn constant(c: Cx<T>, order: usize) -> Self {
        let mut coeffs = vec![real(T::zero()); order + 1];
        coeffs[0] = c;
        ComplexSeries { coeffs }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(real(T::one()), order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.coeffs
    }

    /// Coefficient of `z^p`, `None` beyond the truncation order.
    pub fn coeff(&self, p: usize) -> Option<Cx<T>> {
        self.coeffs.get(p).copied()
    }

    pub fn truncate(&self, order: usize) -> Self {
        let k = order.min(self.order());
        ComplexSeries {
            coeffs: self.coeffs[..=k].to_vec(),
        }
    }

    /// Cauchy product truncated to the smaller of the two orders.
    pub fn mul_series(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let a = &self.coeffs;
        let b = &other.coeffs;
        let coeffs = (0..=order)
            .map(|p| {
                (0..=p).fold(real(T::zero()), |acc, k| acc + a[k] * b[p - k])
            })
            .collect();
        ComplexSeries { coeffs }
    }

    /// `self^e` by binary powering.
    pub fn powi(&self, mut e: u32) -> Self {
        let mut acc = Self::one(self.order());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_series(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_series(&base);
            }
        }
        acc
    }

    /// Logarithm of a series with constant term 1.
    pub fn ln(&self) -> Self {
        let f = &self.coeffs;
        assert!(
            (f[0] - real(T::one())).norm() < T::lit(1e-12),
            "series logarithm needs constant term 1"
        );
        let order = self.order();
        let mut l = vec![real(T::zero()); order + 1];
        for k in 1..=order {
            // k·L_k = k·f_k − Σ_{m<k} m·L_m·f_{k−m}
            let kf = T::count(k);
            let mut s = f[k] * kf;
            for m in 1..k {
                s = s - l[m] * f[k - m] * T::count(m);
            }
            l[k] = s / kf;
        }
        ComplexSeries { coeffs: l }
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        ComplexSeries {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, z: Cx<T>) -> Cx<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(real(T::zero()), |acc, &c| acc * z + c)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Cx<T>, Cx<T>) -> Cx<T>) -> Self {
        let order = self.order().min(other.order());
        ComplexSeries {
            coeffs: (0..=order)
                .map(|p| f(self.coeffs[p], other.coeffs[p]))
                .collect(),
        }
    }
}

impl<T: Real> Add for &ComplexSeries<T> {
    type Output = ComplexSeries<T>;
    fn add(self, rhs: Self) -> ComplexSeries<T> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<T: Real> Sub for &ComplexSeries<T> {
    type Output = ComplexSeries<T>;
    fn sub(self, rhs: Self) -> ComplexSeries<T> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<T: Real> Mul for &ComplexSeries<T> {
    type Output = ComplexSeries<T>;
    fn mul(self, rhs: Self) -> ComplexSeries<T> {
        self.mul_series(rhs)
    }
}

fn sign<T: Real>(p: usize) -> T {
    if p % 2 == 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// `x(z) = 1 + (4/tan(π/n)) Σ_{p≥1} (−1)^p sin(pπ/n) z^p`.
pub fn series_x<T: Real>(u: &Uniformization<T>, order: usize) -> ComplexSeries<T> {
    let a = u.model.angle();
    let k = T::lit(4.0) / a.tan();
    let mut coeffs = vec![real(T::one())];
    coeffs.extend((1..=order).map(|p| real(k * sign::<T>(p) * (T::count(p) * a).sin())));
    ComplexSeries { coeffs }
}

/// `y(z) = 1 + 4 Σ_{p≥1} (−1)^p p e^{ipπ/n} z^p`.
pub fn series_y<T: Real>(u: &Uniformization<T>, order: usize) -> ComplexSeries<T> {
    let a = u.model.angle();
    let mut coeffs = vec![real(T::one())];
    coeffs.extend(
        (1..=order).map(|p| cis(T::count(p) * a) * (T::lit(4.0) * sign::<T>(p) * T::count(p))),
    );
    ComplexSeries { coeffs }
}

/// Series of `x^{i0} y^{j0}` to the given order.
pub fn monomial_series<T: Real>(
    u: &Uniformization<T>,
    i0: u32,
    j0: u32,
    order: usize,
) -> ComplexSeries<T> {
    let sx = series_x(u, order).powi(i0);
    let sy = series_y(u, order).powi(j0);
    sx.mul_series(&sy)
}

/// `κ_p(i0, j0)`: coefficient of `z^p` in `x^{i0} y^{j0}`.
pub fn kappa<T: Real>(u: &Uniformization<T>, i0: u32, j0: u32, p: usize) -> Cx<T> {
    monomial_series(u, i0, j0, p).coeffs[p]
}

/// `ν_{2p+1} = 2/(2p+1)·[z0^{2p+1} + z̄0^{2p+1} + 2·ratio·z̄0^{2p+1}]` for
/// `p = 0..count`.
pub fn nu_coefficients<T: Real>(u: &Uniformization<T>, ratio: T, count: usize) -> Vec<Cx<T>> {
    let two = T::lit(2.0);
    (0..count)
        .map(|p| {
            let m = (2 * p + 1) as u32;
            let a = cpowi(u.z0, m);
            let b = cpowi(u.z0.conj(), m);
            (a + b + b * (two * ratio)) * (two / T::count(m as usize))
        })
        .collect()
}

/// `χ(z) = ln x(z) + ratio·ln y(z)` as a series, for checking the odd expansion.
pub fn chi_series<T: Real>(u: &Uniformization<T>, ratio: T, order: usize) -> ComplexSeries<T> {
    let lx = series_x(u, order).ln();
    let ly = series_y(u, order).ln();
    &lx + &ly.scale(real(ratio))
}

/// Taylor coefficient of an analytic function at 0 by the trapezoidal rule on
/// `|z| = radius` with `m` nodes.
pub fn taylor_by_contour<T: Real>(
    f: impl Fn(Cx<T>) -> Cx<T>,
    radius: T,
    p: usize,
    m: usize,
) -> Cx<T> {
    let mut acc = real(T::zero());
    for k in 0..m {
        let theta = T::TAU() * T::count(k) / T::count(m);
        let w = cis(theta);
        acc = acc + f(w * radius) * cpowi(w.conj(), p as u32);
    }
    acc / (T::count(m) * radius.powi(p as i32))
}
