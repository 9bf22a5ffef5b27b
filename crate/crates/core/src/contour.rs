//! Contour-integral evaluation of the Green function along a ray
//! `t ↦ t·e^{iθ}` and the Laplace-method leading term.
//!
//! `G_{i,j} = 1/(4π√(p10·p1m1)) ∫ S(z) / (z·x(z)^i y(z)^j) dz`, where `S` is
//! the signed orbit sum of `x^{i0} y^{j0}`. The integrand at `1/z̄` is the
//! conjugate of the integrand at `z`, and the ray is mapped to itself by
//! `z ↦ 1/z̄`, so with `u = ln t` the integral is `2·Re ∫_{−∞}^0 Φ(e^{u+iθ}) du`.

use crate::error::{Error, Result};
use crate::harmonic::HarmonicEvaluator;
use crate::quadrature::{integrate, QuadratureOptions, QuadratureResult};
use crate::scalar::{cis, cpowi, cx, factorial, real, Cx, Real};
use crate::series::monomial_series;
use crate::uniformization::Uniformization;

/// Minimal distance between an orbit point and a pole of `x`, `y`.
pub const POLE_PROXIMITY: f64 = 1e-8;
/// Relative size of the integrand at which the ray is cut near `0`.
pub const RAY_CUTOFF: f64 = 1e-18;
/// Below this modulus the orbit sum is summed from its Taylor series, which
/// avoids the `|z|^n` cancellation between orbit terms.
pub const SERIES_RADIUS: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaddleData<T> {
    /// `ρ_{j/i} = 1/ν_1(j/i)`.
    pub rho: Cx<T>,
    /// `ν_1(j/i) = 2(z0 + z̄0 + 2(j/i)·z̄0)`.
    pub nu1: Cx<T>,
}

/// How the ray `(0, ∞)` is covered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RayMode {
    /// `t ∈ (0, 1]`, the rest by conjugate reflection.
    Half,
    /// Both halves integrated explicitly.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourSpec<T> {
    /// Ray angle; `None` picks `arg ρ_{j/i}`.
    pub angle: Option<T>,
    /// Initial number of panels on the half-ray.
    pub panels: usize,
    /// Smallest ray parameter, as a multiple of the saddle scale; `None`
    /// derives it from [`RAY_CUTOFF`].
    pub truncation: Option<T>,
    pub rel_tol: f64,
    pub max_panels: usize,
    pub mode: RayMode,
}

impl<T: Real> Default for ContourSpec<T> {
    fn default() -> Self {
        ContourSpec {
            angle: None,
            panels: 24,
            truncation: None,
            rel_tol: 1e-11,
            max_panels: 4000,
            mode: RayMode::Half,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourResult<T> {
    pub value: T,
    pub error_estimate: T,
    pub angle: T,
    pub panels: usize,
    pub evaluations: usize,
    /// Imaginary part of the full-ray integral (zero by symmetry); only
    /// computed in [`RayMode::Full`].
    pub imaginary: Option<T>,
}

/// The admissible angle band `[π − π/n, π]`.
pub fn admissible_band<T: Real>(n: u32) -> (T, T) {
    let pi = T::PI();
    (pi - pi / T::count(n as usize), pi)
}

pub fn rho<T: Real>(u: &Uniformization<T>, ratio: T) -> Result<SaddleData<T>> {
    if !(ratio >= T::zero()) || !ratio.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "slope ratio must be finite and non-negative, got {ratio}"
        )));
    }
    let zb = u.z0.conj();
    let nu1 = (u.z0 + zb + zb * (T::lit(2.0) * ratio)) * T::lit(2.0);
    Ok(SaddleData {
        rho: nu1.inv(),
        nu1,
    })
}

/// `arg ρ_{j/i}` clamped to the admissible band.
pub fn default_angle<T: Real>(u: &Uniformization<T>, i: u32, j: u32) -> Result<T> {
    if i == 0 {
        return Ok(admissible_band::<T>(u.n()).0);
    }
    let s = rho(u, T::count(j as usize) / T::count(i as usize))?;
    let mut a = s.rho.arg();
    if a < T::zero() {
        a += T::TAU();
    }
    let (lo, hi) = admissible_band(u.n());
    Ok(a.max(lo).min(hi))
}

/// `|ρ_{j/i}|/i = 1/(4√(cos(π/n)²(i² + 2ij) + j²))`, symmetric in the roles
/// of `i` and `j` so that steep rays keep a sensible scale.
pub fn saddle_scale<T: Real>(n: u32, i: u32, j: u32) -> T {
    let c = (T::PI() / T::count(n as usize)).cos();
    let (fi, fj) = (T::count(i as usize), T::count(j as usize));
    T::one() / (T::lit(4.0) * (c * c * (fi * fi + T::lit(2.0) * fi * fj) + fj * fj).sqrt())
}

fn check_pole<T: Real>(u: &Uniformization<T>, w: Cx<T>) -> Result<()> {
    for p in [u.z0, u.z0.conj()] {
        let d = (w - p).norm();
        if d < T::lit(POLE_PROXIMITY) {
            return Err(Error::PoleCollision {
                distance: d.as_f64(),
                re: w.re.as_f64(),
                im: w.im.as_f64(),
            });
        }
    }
    Ok(())
}

/// `Φ(z) = S(z) / (x(z)^i y(z)^j)`, so that the contour integrand is
/// `Φ(z) dz/z`. Evaluated through logarithms to avoid overflow of the
/// individual powers.
pub fn ray_integrand<T: Real>(
    u: &Uniformization<T>,
    i0: u32,
    j0: u32,
    i: u32,
    j: u32,
    z: Cx<T>,
) -> Result<Cx<T>> {
    check_pole(u, z)?;
    let n = u.n();
    let (fi0, fj0) = (T::count(i0 as usize), T::count(j0 as usize));
    let base = u.ln_x(z) * T::count(i as usize) + u.ln_y(z) * T::count(j as usize);
    let omega = cis(-T::TAU() / T::count(n as usize));
    let zi = z.inv();
    let mut rot = real(T::one());
    let mut acc = real(T::zero());
    for _ in 0..n {
        for (w, sign) in [(rot * z, T::one()), (rot * zi, -T::one())] {
            check_pole(u, w)?;
            let e = u.ln_x(w) * fi0 + u.ln_y(w) * fj0 - base;
            acc += e.exp() * sign;
        }
        rot *= omega;
    }
    if !(acc.re.is_finite() && acc.im.is_finite()) {
        return Err(Error::Quadrature(format!(
            "non-finite integrand at z = {} {:+}i",
            z.re, z.im
        )));
    }
    Ok(acc)
}

/// `S(z) = Σ_m s_m z^{mn}`: only multiples of `n` survive the rotation sum,
/// and `s_m = 2i·n·Im κ_{mn}` because the `1/z` half of the orbit has the
/// conjugate Taylor coefficients.
#[derive(Clone, Debug)]
struct OrbitSeries<T> {
    n: u32,
    coeffs: Vec<Cx<T>>,
}

impl<T: Real> OrbitSeries<T> {
    fn new(u: &Uniformization<T>, i0: u32, j0: u32) -> Self {
        let n = u.n() as usize;
        // Coefficients grow like p^{i0+2j0}; stop once the tail at the
        // switching radius is below 1e-20 of the leading term.
        let growth = (i0 + 2 * j0) as f64;
        let mut m = 1;
        while (n * m) as f64 * SERIES_RADIUS.ln().abs() - growth * ((n * m) as f64).ln() < 46.0 {
            m += 1;
        }
        let a = monomial_series(u, i0, j0, n * m);
        let two_n = T::count(2 * n);
        let coeffs = (1..=m)
            .map(|k| cx(T::zero(), two_n * a.coeffs()[k * n].im))
            .collect();
        OrbitSeries { n: u.n(), coeffs }
    }

    fn eval(&self, z: Cx<T>) -> Cx<T> {
        let w = cpowi(z, self.n);
        self.coeffs
            .iter()
            .rev()
            .fold(real(T::zero()), |acc, &c| (acc + c) * w)
    }
}

/// [`ray_integrand`] with the orbit sum taken from its series near `0` and `∞`.
#[derive(Clone, Debug)]
pub struct RayIntegrand<'a, T> {
    u: &'a Uniformization<T>,
    i0: u32,
    j0: u32,
    i: u32,
    j: u32,
    series: OrbitSeries<T>,
}

impl<'a, T: Real> RayIntegrand<'a, T> {
    pub fn new(u: &'a Uniformization<T>, i0: u32, j0: u32, i: u32, j: u32) -> Self {
        RayIntegrand {
            u,
            i0,
            j0,
            i,
            j,
            series: OrbitSeries::new(u, i0, j0),
        }
    }

    pub fn eval(&self, z: Cx<T>) -> Result<Cx<T>> {
        let r = z.norm();
        let orbit = if r <= T::lit(SERIES_RADIUS) {
            self.series.eval(z)
        } else if r >= T::lit(SERIES_RADIUS).recip() {
            // ξ has sign −1, so S(z) = −S(1/z)
            -self.series.eval(z.inv())
        } else {
            return ray_integrand(self.u, self.i0, self.j0, self.i, self.j, z);
        };
        let base = self.u.ln_x(z) * T::count(self.i as usize)
            + self.u.ln_y(z) * T::count(self.j as usize);
        let v = orbit * (-base).exp();
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Quadrature(format!(
                "non-finite integrand at z = {} {:+}i",
                z.re, z.im
            )));
        }
        Ok(v)
    }
}

/// Targets for which the ray formula is asserted: `i ≥ i0` and
/// `i + 2j ≥ i0 + 2j0`, so `x^i y^j` vanishes at `z0` and `z̄0` at least to the
/// pole order of the orbit terms. Measured against the oracle for
/// `n ∈ {3, 4, 5, 6, 8}` on `[1, 12]²`, agreement already holds whenever
/// either inequality does; outside both it fails by orders of magnitude.
pub fn in_validity_region(i0: u32, j0: u32, i: u32, j: u32) -> bool {
    i >= i0 && i + 2 * j >= i0 + 2 * j0
}

/// `1/(4π√(p10·p1m1)) = 1/(π sin(2π/n))`.
pub fn contour_prefactor<T: Real>(n: u32) -> T {
    T::one() / (T::PI() * (T::TAU() / T::count(n as usize)).sin())
}

pub fn green_by_contour<T: Real>(
    u: &Uniformization<T>,
    i0: u32,
    j0: u32,
    i: u32,
    j: u32,
    spec: &ContourSpec<T>,
) -> Result<ContourResult<T>> {
    if i0 == 0 || j0 == 0 || i == 0 || j == 0 {
        let (a, b) = if i0 == 0 || j0 == 0 { (i0, j0) } else { (i, j) };
        return Err(Error::NotInterior {
            i: a as usize,
            j: b as usize,
        });
    }
    let n = u.n();
    let (lo, hi) = admissible_band::<T>(n);
    let angle = match spec.angle {
        Some(a) => a,
        None => default_angle(u, i, j)?,
    };
    let slack = T::lit(1e-12);
    if !(angle >= lo - slack && angle <= hi + slack) {
        return Err(Error::InvalidArgument(format!(
            "ray angle {angle} outside [{lo}, {hi}]"
        )));
    }
    let scale = saddle_scale::<T>(n, i, j);
    let tmin = match spec.truncation {
        Some(t) if t > T::zero() => scale * t,
        Some(t) => {
            return Err(Error::InvalidArgument(format!(
                "ray truncation must be positive, got {t}"
            )))
        }
        None => scale * T::lit(RAY_CUTOFF).powf(T::one() / T::count(n as usize)),
    };
    let umin = tmin.ln();
    let dir = cis(angle);
    let opts = QuadratureOptions {
        rel_tol: spec.rel_tol,
        abs_tol: 0.0,
        initial_panels: spec.panels,
        max_panels: spec.max_panels,
    };
    let integrand = RayIntegrand::new(u, i0, j0, i, j);
    let phi = |s: T| integrand.eval(dir * s.exp());
    let pref = contour_prefactor::<T>(n);
    let (q, imaginary): (QuadratureResult<T>, Option<T>) = match spec.mode {
        RayMode::Half => (integrate(|s| Ok(phi(s)?.re), umin, T::zero(), &opts)?, None),
        RayMode::Full => {
            let opts = QuadratureOptions {
                initial_panels: 2 * spec.panels,
                max_panels: 2 * spec.max_panels,
                ..opts
            };
            let re = integrate(|s| Ok(phi(s)?.re), umin, -umin, &opts)?;
            let im_opts = QuadratureOptions {
                abs_tol: spec.rel_tol * re.value.abs().as_f64(),
                ..opts
            };
            let im = integrate(|s| Ok(phi(s)?.im), umin, -umin, &im_opts)?;
            (
                QuadratureResult {
                    value: re.value * T::lit(0.5),
                    error: re.error * T::lit(0.5),
                    panels: re.panels + im.panels,
                    evaluations: re.evaluations + im.evaluations,
                },
                Some(im.value * pref),
            )
        }
    };
    let two = T::lit(2.0);
    Ok(ContourResult {
        value: two * pref * q.value,
        error_estimate: two * pref * q.error,
        angle,
        panels: q.panels,
        evaluations: q.evaluations,
        imaginary,
    })
}

/// Near-`0` Laplace contribution
/// `1/(4π√(p10·p1m1))·(−1)^n (n−1)! f_n(i0, j0)·i·(ρ_{j/i}/i)^n` and its
/// conjugate (the near-`∞` contribution).
pub fn laplace_leading_term<T: Real>(
    h: &HarmonicEvaluator<T>,
    i0: u32,
    j0: u32,
    i: u32,
    j: u32,
) -> Result<(Cx<T>, Cx<T>)> {
    if i == 0 {
        return Err(Error::InvalidArgument("laplace term needs i ≥ 1".into()));
    }
    let n = h.n();
    let fi = T::count(i as usize);
    let s = rho(&h.u, T::count(j as usize) / fi)?;
    let sign = if n % 2 == 0 { T::one() } else { -T::one() };
    let c = contour_prefactor::<T>(n) * sign * factorial::<T>(n - 1) * h.f_n(i0, j0);
    let near0 = cx(T::zero(), c) * cpowi(s.rho / fi, n);
    Ok((near0, near0.conj()))
}

/// Quadrature of `t^k e^{−s t}` over `[0, upper]` against `k!/s^{k+1}`;
/// returns `(quadrature, exact)`.
pub fn laplace_moment_check<T: Real>(k: u32, s: T, upper: T) -> Result<(T, T)> {
    let opts = QuadratureOptions {
        rel_tol: 1e-12,
        ..Default::default()
    };
    let kk = k as i32;
    let q = integrate(|t: T| Ok(t.powi(kk) * (-s * t).exp()), T::zero(), upper, &opts)?;
    Ok((q.value, factorial::<T>(k) / s.powi(kk + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn uni(n: i64) -> Uniformization<f64> {
        Uniformization::from_order(n).unwrap()
    }

    #[test]
    fn rho_examples() {
        let u = uni(4);
        let s = rho(&u, 0.0).unwrap();
        assert!((s.rho.re + 1.0 / (4.0 * (PI / 4.0).cos())).abs() < 1e-15);
        assert!(s.rho.im.abs() < 1e-15);
        let a = default_angle(&u, 1, 1).unwrap();
        assert!(a > 0.75 * PI && a < PI);
        assert!((s.rho * s.nu1 - 1.0).norm() < 1e-15);
        let far = rho(&u, 1e9).unwrap().rho.arg();
        assert!((far - 0.75 * PI).abs() < 1e-8);
        assert!(rho(&u, -1.0).is_err());
        assert!(rho(&u, f64::NAN).is_err());
        let mut a0 = default_angle(&u, 5, 0).unwrap();
        if a0 < 0.0 {
            a0 += 2.0 * PI;
        }
        assert!((a0 - PI).abs() < 1e-15);
    }

    #[test]
    fn saddle_scale_matches_rho() {
        for n in 3..8 {
            let u = uni(n);
            for (i, j) in [(1, 1), (7, 3), (2, 9)] {
                let s = rho(&u, j as f64 / i as f64).unwrap();
                let lhs = s.rho.norm() / i as f64;
                assert!((lhs / saddle_scale::<f64>(n as u32, i, j) - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn contour_matches_frozen_oracle() {
        // Oracle values from the banded direct solve at radius 512.
        let u = uni(4);
        let r = green_by_contour(&u, 1, 1, 8, 8, &ContourSpec::default()).unwrap();
        assert!((r.value / 2.8393320930201744e-4 - 1.0).abs() < 1e-9, "{}", r.value);
        let u = uni(3);
        let r = green_by_contour(&u, 1, 1, 8, 8, &ContourSpec::default()).unwrap();
        assert!((r.value / 0.002004361567282618 - 1.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn full_ray_matches_half_ray() {
        let u = uni(3);
        let half = green_by_contour(&u, 2, 1, 9, 7, &ContourSpec::default()).unwrap();
        let spec = ContourSpec {
            mode: RayMode::Full,
            ..Default::default()
        };
        let full = green_by_contour(&u, 2, 1, 9, 7, &spec).unwrap();
        assert!((full.value / half.value - 1.0).abs() < 1e-10);
        assert!(full.imaginary.unwrap().abs() < 1e-10 * half.value);
    }

    #[test]
    fn rejects_bad_arguments() {
        let u = uni(4);
        assert!(green_by_contour(&u, 1, 1, 0, 5, &ContourSpec::default()).is_err());
        let spec = ContourSpec {
            angle: Some(0.5),
            ..Default::default()
        };
        assert!(green_by_contour(&u, 1, 1, 5, 5, &spec).is_err());
        assert!(matches!(
            ray_integrand(&u, 1, 1, 3, 3, u.z0),
            Err(Error::PoleCollision { .. })
        ));
    }

    #[test]
    fn series_integrand_matches_direct() {
        for n in [3, 4, 7] {
            let u = uni(n);
            for (i0, j0) in [(1, 1), (2, 1), (3, 4)] {
                let f = RayIntegrand::new(&u, i0, j0, 6, 5);
                for t in [0.5, 0.3, 2.0, 3.5] {
                    let z = cis(2.8) * t;
                    let a = f.eval(z).unwrap();
                    let b = ray_integrand(&u, i0, j0, 6, 5, z).unwrap();
                    assert!((a - b).norm() < 1e-9 * b.norm(), "n={n} t={t} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn laplace_terms_are_conjugate() {
        let h = HarmonicEvaluator::new(uni(5));
        let (a, b) = laplace_leading_term(&h, 1, 2, 10, 4).unwrap();
        assert_eq!(a.conj(), b);
        assert!((a + b).re > 0.0);
    }

    #[test]
    fn moment_identity() {
        let s: f64 = 1e4;
        let eps = s.powf(-0.75);
        let rho_abs = rho(&uni(3), 1.0).unwrap().rho.norm();
        let (q, exact) = laplace_moment_check(2, s, s * eps / rho_abs).unwrap();
        assert!((q / exact - 1.0).abs() < 1e-6);
    }
}
