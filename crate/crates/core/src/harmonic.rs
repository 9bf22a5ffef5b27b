//! The discrete harmonic polynomial `f_n` and its continuous counterparts.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::scalar::{binomial, factorial, real, Cx, Real};
use crate::series::{series_x, series_y, ComplexSeries};
use crate::uniformization::Uniformization;
use crate::walk_model::WalkModel;

/// Evaluates `f_n(i0, j0) = n[κ_n − κ̄_n] / ((−1)^n i)` with a memo cache.
#[derive(Debug)]
pub struct HarmonicEvaluator<T> {
    pub u: Uniformization<T>,
    cache: RwLock<HashMap<(u32, u32), T>>,
}

impl<T: Real> Clone for HarmonicEvaluator<T> {
    fn clone(&self) -> Self {
        HarmonicEvaluator {
            u: self.u,
            cache: RwLock::new(self.cache.read().expect("cache lock").clone()),
        }
    }
}

impl<T: Real> HarmonicEvaluator<T> {
    pub fn new(u: Uniformization<T>) -> Self {
        HarmonicEvaluator {
            u,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn n(&self) -> u32 {
        self.u.n()
    }

    pub fn model(&self) -> &WalkModel<T> {
        &self.u.model
    }

    fn order(&self) -> usize {
        self.n() as usize
    }

    /// The raw complex value `n[κ_n − κ̄_n] / ((−1)^n i)`; its imaginary part
    /// is roundoff.
    pub fn f_n_raw(&self, i0: u32, j0: u32) -> Cx<T> {
        let p = self.order();
        let sx = series_x(&self.u, p).powi(i0);
        let sy = series_y(&self.u, p).powi(j0);
        raw_from_kappa(self.n(), kappa_n(&sx, &sy, p))
    }

    pub fn f_n(&self, i0: u32, j0: u32) -> T {
        if let Some(&v) = self.cache.read().expect("cache lock").get(&(i0, j0)) {
            return v;
        }
        let v = self.f_n_raw(i0, j0).re;
        self.cache
            .write()
            .expect("cache lock")
            .insert((i0, j0), v);
        v
    }

    /// `f_n` on `[0, imax] × [0, jmax]`, indexed `[i][j]`, using incremental
    /// series powers.
    pub fn grid(&self, imax: usize, jmax: usize) -> Vec<Vec<T>> {
        let p = self.order();
        let sx = series_x(&self.u, p);
        let sy = series_y(&self.u, p);
        let xs = powers(&sx, imax);
        let ys = powers(&sy, jmax);
        xs.iter()
            .map(|xi| {
                ys.iter()
                    .map(|yj| raw_from_kappa(self.n(), kappa_n(xi, yj, p)).re)
                    .collect()
            })
            .collect()
    }

    /// Max over `1 ≤ i ≤ imax, 1 ≤ j ≤ jmax` of the relative mean-value residual
    /// `|f − Σ p·f(neighbour)| / max(1, |f|)`.
    pub fn check_harmonicity(&self, imax: usize, jmax: usize) -> T {
        let g = self.grid(imax + 1, jmax + 1);
        mean_value_residual(&self.u.model, &g, imax, jmax)
    }

    /// `max_k |f(k, 0)| / |f(k, 1)|` and the same along the other axis, `k ≤ kmax`.
    pub fn boundary_residual(&self, kmax: usize) -> T {
        let g = self.grid(kmax, kmax);
        let mut worst = T::zero();
        for k in 1..=kmax {
            worst = worst.max(g[k][0].abs() / g[k][1].abs());
            worst = worst.max(g[0][k].abs() / g[1][k].abs());
        }
        worst
    }

    /// Doob-transformed kernel `p·f(target)/f(i, j)` over interior targets.
    pub fn doob_kernel(&self, i: u32, j: u32) -> Vec<((u32, u32), T)> {
        let f = self.f_n(i, j);
        self.u
            .model
            .jumps()
            .iter()
            .filter_map(|&(di, dj, p)| {
                let ti = i as i64 + di;
                let tj = j as i64 + dj;
                if ti < 1 || tj < 1 {
                    return None;
                }
                let t = (ti as u32, tj as u32);
                Some((t, p * self.f_n(t.0, t.1) / f))
            })
            .collect()
    }
}

fn powers<T: Real>(s: &ComplexSeries<T>, kmax: usize) -> Vec<ComplexSeries<T>> {
    let mut v = Vec::with_capacity(kmax + 1);
    v.push(ComplexSeries::one(s.order()));
    for k in 1..=kmax {
        let next = v[k - 1].mul_series(s);
        v.push(next);
    }
    v
}

fn kappa_n<T: Real>(a: &ComplexSeries<T>, b: &ComplexSeries<T>, p: usize) -> Cx<T> {
    let (a, b) = (a.coeffs(), b.coeffs());
    (0..=p).fold(real(T::zero()), |acc, k| acc + a[k] * b[p - k])
}

fn raw_from_kappa<T: Real>(n: u32, k: Cx<T>) -> Cx<T> {
    // (κ − κ̄)/i = 2 Im κ, computed in complex form so roundoff stays visible.
    let diff = k - k.conj();
    let sign = if n % 2 == 0 { T::one() } else { -T::one() };
    diff * Cx::new(T::zero(), -T::one()) * (T::count(n as usize) * sign)
}

/// Mean-value residual of a grid indexed `[i][j]` that covers `imax + 1, jmax + 1`.
pub fn mean_value_residual<T: Real>(
    m: &WalkModel<T>,
    g: &[Vec<T>],
    imax: usize,
    jmax: usize,
) -> T {
    let mut worst = T::zero();
    for i in 1..=imax {
        for j in 1..=jmax {
            let mean = m.p10 * (g[i + 1][j] + g[i - 1][j])
                + m.p1m1 * (g[i + 1][j - 1] + g[i - 1][j + 1]);
            let r = (g[i][j] - mean).abs() / g[i][j].abs().max(T::one());
            worst = worst.max(r);
        }
    }
    worst
}

/// `8n³ / tan(π/n)`.
pub fn f_n_11<T: Real>(n: u32) -> T {
    let nf = T::count(n as usize);
    T::lit(8.0) * nf.powi(3) / (T::PI() / nf).tan()
}

/// `(16/3) n³ [n² + 2 − 6/tan(π/n)²] / [sin(π/n)² tan(π/n)]`.
pub fn f_n_22<T: Real>(n: u32) -> T {
    let nf = T::count(n as usize);
    let a = T::PI() / nf;
    let (s, t) = (a.sin(), a.tan());
    T::lit(16.0) / T::lit(3.0) * nf.powi(3) * (nf * nf + T::lit(2.0) - T::lit(6.0) / (t * t))
        / (s * s * t)
}

/// Known factorized forms for `n ∈ {3, 4, 6}`.
pub fn closed_form<T: Real>(n: u32, i: T, j: T) -> Option<T> {
    let r3 = T::lit(3.0).sqrt();
    let two = T::lit(2.0);
    match n {
        3 => Some(T::lit(24.0) * r3 * i * j * (i + two * j)),
        4 => Some(T::lit(256.0) / T::lit(3.0) * i * j * (i + two * j) * (i + j)),
        6 => {
            let q = (i + two * j / T::lit(3.0)) * (i + T::lit(4.0) * j / T::lit(3.0))
                + T::lit(10.0) / T::lit(9.0);
            Some(T::lit(288.0) / T::lit(5.0) * r3 * i * j * (i + two * j) * (i + j) * q)
        }
        _ => None,
    }
}

/// `2^{2n+1}/(n−1)! Σ_{p=1}^{n−1} C(n,p) sin(pπ/n) cos(π/n)^{n−p} j^p i^{n−p}`.
pub fn dominant_term<T: Real>(n: u32, i: T, j: T) -> T {
    let a = T::PI() / T::count(n as usize);
    let c = a.cos();
    let sum: T = (1..n)
        .map(|p| {
            binomial::<T>(n, p)
                * (T::count(p as usize) * a).sin()
                * c.powi((n - p) as i32)
                * j.powi(p as i32)
                * i.powi((n - p) as i32)
        })
        .sum();
    T::lit(2.0).powi(2 * n as i32 + 1) / factorial::<T>(n - 1) * sum
}

/// `φ(x, y) = ((x + y)/sin(π/n), y/cos(π/n))`.
pub fn phi_transform<T: Real>(n: u32, x: T, y: T) -> (T, T) {
    let a = T::PI() / T::count(n as usize);
    ((x + y) / a.sin(), y / a.cos())
}

/// Réduite of the cone of opening `π/n`: `ρ^n sin(nθ)`.
pub fn reduite<T: Real>(n: u32, rho: T, theta: T) -> T {
    rho.powi(n as i32) * (T::count(n as usize) * theta).sin()
}

/// Cartesian form `Σ_p C(n, 2p+1)(−1)^p u^{n−2p−1} v^{2p+1}`.
pub fn reduite_cartesian<T: Real>(n: u32, u: T, v: T) -> T {
    (0..)
        .map(|p: u32| 2 * p + 1)
        .take_while(|&k| k <= n)
        .map(|k| {
            let s = if (k / 2) % 2 == 0 { T::one() } else { -T::one() };
            s * binomial::<T>(n, k) * u.powi((n - k) as i32) * v.powi(k as i32)
        })
        .sum()
}

/// `h(φ(i, j))`.
pub fn reduite_at<T: Real>(n: u32, i: T, j: T) -> T {
    let (u, v) = phi_transform(n, i, j);
    reduite_cartesian(n, u, v)
}

/// Constant `K_n = 2^{n+1} sin(2π/n)^n / (n−1)!` with
/// `dominant_term(i, j) = K_n · h(φ(i, j))` identically.
pub fn dominant_to_reduite_constant<T: Real>(n: u32) -> T {
    let s = (T::TAU() / T::count(n as usize)).sin();
    T::lit(2.0).powi(n as i32 + 1) * s.powi(n as i32) / factorial::<T>(n - 1)
}
