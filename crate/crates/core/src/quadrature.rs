//! Globally adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.

use crate::error::{Error, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_panels: usize,
    pub max_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            rel_tol: 1e-11,
            abs_tol: 0.0,
            initial_panels: 16,
            max_panels: 4000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub error: T,
    pub panels: usize,
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn gk15<T: Real>(f: &mut impl FnMut(T) -> Result<T>, a: T, b: T) -> Result<Panel<T>> {
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let fc = f(mid)?;
    let mut k = fc * T::lit(WGK[7]);
    let mut g = fc * T::lit(WG[3]);
    for m in 0..7 {
        let dx = half * T::lit(XGK[m]);
        let s = f(mid - dx)? + f(mid + dx)?;
        k += s * T::lit(WGK[m]);
        if m % 2 == 1 {
            g += s * T::lit(WG[m / 2]);
        }
    }
    let value = k * half;
    let error = ((k - g) * half).abs();
    if !value.is_finite() {
        return Err(Error::Quadrature(format!(
            "non-finite integrand on [{}, {}]",
            a.as_f64(),
            b.as_f64()
        )));
    }
    Ok(Panel { a, b, value, error })
}

/// Integrates `f` over `[a, b]`, bisecting the worst panel until the summed
/// error estimate meets `max(abs_tol, rel_tol·|value|)`.
pub fn integrate<T: Real>(
    mut f: impl FnMut(T) -> Result<T>,
    a: T,
    b: T,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult<T>> {
    let np = opts.initial_panels.max(1);
    let width = (b - a) / T::count(np);
    let mut panels = Vec::with_capacity(opts.max_panels.max(np) + 2);
    for k in 0..np {
        let lo = a + width * T::count(k);
        let hi = if k + 1 == np { b } else { lo + width };
        panels.push(gk15(&mut f, lo, hi)?);
    }
    let mut evaluations = 15 * np;
    loop {
        let value: T = panels.iter().map(|p| p.value).sum();
        let error: T = panels.iter().map(|p| p.error).sum();
        let target = T::lit(opts.abs_tol).max(T::lit(opts.rel_tol) * value.abs());
        if error <= target {
            return Ok(QuadratureResult {
                value,
                error,
                panels: panels.len(),
                evaluations,
            });
        }
        if panels.len() >= opts.max_panels {
            return Err(Error::Quadrature(format!(
                "error estimate {:e} above target {:e} after {} panels",
                error.as_f64(),
                target.as_f64(),
                panels.len()
            )));
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |best, (k, p)| {
                if p.error > best.1 {
                    (k, p.error)
                } else {
                    best
                }
            });
        let p = panels.swap_remove(worst);
        let mid = (p.a + p.b) * T::lit(0.5);
        if !(mid > p.a && mid < p.b) {
            return Err(Error::Quadrature("panel width underflow".into()));
        }
        panels.push(gk15(&mut f, p.a, mid)?);
        panels.push(gk15(&mut f, mid, p.b)?);
        evaluations += 30;
    }
}
