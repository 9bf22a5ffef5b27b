//! Closed-form asymptotics of the Green function and of the absorption
//! probabilities, and ratio diagnostics against the oracle.

use crate::error::{Error, Result};
use crate::green::{solve_green, LatticeField, LinearSolver, TruncationPolicy};
use crate::harmonic::{reduite, HarmonicEvaluator};
use crate::scalar::{factorial, Real};

/// Boundary half-line on which the walk is killed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryAxis {
    /// Sites `(k, 0)`.
    X,
    /// Sites `(0, k)`.
    Y,
}

/// Slope `j/i`, with `∞` for the vertical direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SlopeRatio<T> {
    Finite(T),
    Infinite,
}

/// `N_n(r) = sin(n·arctan[r/(1 + r)·tan(π/n)])`.
pub fn nn<T: Real>(n: u32, ratio: SlopeRatio<T>) -> T {
    let a = T::PI() / T::count(n as usize);
    let q = match ratio {
        SlopeRatio::Finite(r) => r / (T::one() + r),
        SlopeRatio::Infinite => T::one(),
    };
    (T::count(n as usize) * (q * a.tan()).atan()).sin()
}

/// First-order small-slope form `n·tan(π/n)·r`.
pub fn nn_small<T: Real>(n: u32, r: T) -> T {
    let nf = T::count(n as usize);
    nf * (T::PI() / nf).tan() * r
}

/// First-order large-slope form `(n·sin(2π/n)/2)/r`.
pub fn nn_large<T: Real>(n: u32, r: T) -> T {
    let nf = T::count(n as usize);
    nf * (T::TAU() / nf).sin() / T::lit(2.0) / r
}

/// Smallest `C` with `|N_n(r) − nn_small(r)| ≤ C·r²` on a log grid of
/// `r ∈ [1e−4, 1e−2]` (`small = true`), or `|N_n(r) − nn_large(r)| ≤ C/r²` on
/// `r ∈ [1e2, 1e4]`.
pub fn fit_expansion_constant<T: Real>(n: u32, small: bool) -> T {
    (0..=40)
        .map(|k| {
            let e = T::lit(-4.0) + T::lit(2.0) * T::count(k) / T::lit(40.0);
            let r = T::lit(10.0).powf(if small { e } else { -e });
            let v = nn(n, SlopeRatio::Finite(r));
            if small {
                (v - nn_small(n, r)).abs() / (r * r)
            } else {
                (v - nn_large(n, r)).abs() * r * r
            }
        })
        .fold(T::zero(), T::max)
}

/// `(2/π)(n−1)!/(4^n sin(2π/n))·f_n(i0, j0)·N_n(j/i) / [cos(π/n)²(i² + 2ij) + j²]^{n/2}`.
pub fn theorem_rhs<T: Real>(h: &HarmonicEvaluator<T>, i0: u32, j0: u32, i: u32, j: u32) -> T {
    let n = h.n();
    let nf = T::count(n as usize);
    let c = (T::PI() / nf).cos();
    let (fi, fj) = (T::count(i as usize), T::count(j as usize));
    let ratio = if i == 0 {
        SlopeRatio::Infinite
    } else {
        SlopeRatio::Finite(fj / fi)
    };
    let d = (c * c * (fi * fi + T::lit(2.0) * fi * fj) + fj * fj).powf(nf / T::lit(2.0));
    let pref = T::lit(2.0) / T::PI() * factorial::<T>(n - 1)
        / (T::lit(4.0).powi(n as i32) * (T::TAU() / nf).sin());
    pref * h.f_n(i0, j0) * nn(n, ratio) / d
}

/// Leading term of `P[killed at (k, 0)]` (`BoundaryAxis::X`) or `P[killed at (0, k)]`
/// (`BoundaryAxis::Y`).
pub fn absorption_rhs<T: Real>(
    h: &HarmonicEvaluator<T>,
    i0: u32,
    j0: u32,
    axis: BoundaryAxis,
    k: u32,
) -> Result<T> {
    if k == 0 {
        return Err(Error::InvalidArgument("absorption site index must be ≥ 1".into()));
    }
    let n = h.n();
    let four = match axis {
        BoundaryAxis::X => T::lit(4.0) * (T::PI() / T::count(n as usize)).cos(),
        BoundaryAxis::Y => T::lit(4.0),
    };
    Ok(factorial::<T>(n) / (T::TAU() * four.powi(n as i32)) * h.f_n(i0, j0)
        / T::count(k as usize).powi(n as i32 + 1))
}

/// Brownian Green function in the cone of opening `π/n` from `ρe^{iθ}` to
/// `re^{iη}` for large `r`: `(2/√π)·h(ρe^{iθ})·sin(nη)/r^n`.
pub fn brownian_green_rhs<T: Real>(n: u32, rho: T, theta: T, r: T, eta: T) -> Result<T> {
    let top = T::PI() / T::count(n as usize);
    let ok = |a: T| a >= T::zero() && a <= top;
    if !(ok(theta) && ok(eta) && r > T::zero() && rho >= T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "need angles in [0, π/n], r > 0, ρ ≥ 0; got θ={theta}, η={eta}, r={r}, ρ={rho}"
        )));
    }
    let nf = T::count(n as usize);
    Ok(T::lit(2.0) / T::PI().sqrt() * reduite(n, rho, theta) * (nf * eta).sin() / r.powi(n as i32))
}

/// Lattice point nearest to `t·(cos γ, sin γ)` with both coordinates `≥ 1`.
pub fn snap_to_ray(gamma: f64, t: f64) -> (u32, u32) {
    let i = (t * gamma.cos()).round().max(1.0);
    let j = (t * gamma.sin()).round().max(1.0);
    (i as u32, j as u32)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RayDescriptor {
    /// Direction `γ ∈ [0, π/2]` of the Green-function ray.
    Direction { gamma: f64 },
    /// Absorption sites `(k, 0)` or `(0, k)`.
    Absorption { axis: BoundaryAxis },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReportCell<T> {
    pub scale: u32,
    pub i: u32,
    pub j: u32,
    pub exact: T,
    pub error_bar: T,
    pub formula: T,
    /// `exact / formula` when both are positive.
    pub ratio: Option<T>,
    pub usable: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrendVerdict {
    /// `|ratio − 1|` over the last three usable scales.
    pub last_deviations: Vec<f64>,
    pub decreasing: bool,
    pub final_deviation: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl TrendVerdict {
    fn from_cells<T: Real>(cells: &[ReportCell<T>], threshold: f64) -> Self {
        let devs: Vec<f64> = cells
            .iter()
            .filter(|c| c.usable)
            .filter_map(|c| c.ratio.map(|r| (r.as_f64() - 1.0).abs()))
            .collect();
        let last: Vec<f64> = devs.iter().rev().take(3).rev().copied().collect();
        let decreasing = last.len() == 3 && last.windows(2).all(|w| w[1] < w[0]);
        let final_deviation = last.last().copied().unwrap_or(f64::INFINITY);
        TrendVerdict {
            passed: decreasing && final_deviation < threshold,
            last_deviations: last,
            decreasing,
            final_deviation,
            threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticReport<T> {
    pub n: u32,
    pub i0: u32,
    pub j0: u32,
    pub ray: RayDescriptor,
    pub cells: Vec<ReportCell<T>>,
    pub verdict: TrendVerdict,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReportOptions {
    pub policy: TruncationPolicy,
    pub solver: LinearSolver,
    /// Final `|ratio − 1|` allowed by the verdict.
    pub threshold: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            policy: TruncationPolicy {
                initial_radius: 256,
                tolerance: 0.05,
                max_doublings: 1,
            },
            solver: LinearSolver::Auto,
            threshold: 0.15,
        }
    }
}

fn cell<T: Real>(scale: u32, i: u32, j: u32, exact: T, error_bar: T, formula: T) -> ReportCell<T> {
    let ratio = (exact > T::zero() && formula > T::zero()).then(|| exact / formula);
    ReportCell {
        scale,
        i,
        j,
        exact,
        error_bar,
        formula,
        ratio,
        usable: exact >= T::lit(10.0) * error_bar,
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&gamma) {
        return Err(Error::InvalidArgument(format!(
            "ray direction γ = {gamma} outside [0, π/2]"
        )));
    }
    Ok(())
}

fn check_scales(scales: &[u32]) -> Result<()> {
    if scales.is_empty() || scales.contains(&0) {
        return Err(Error::InvalidArgument("scales must be non-empty and positive".into()));
    }
    Ok(())
}

/// Window covering every snapped target of the given rays.
pub fn report_window(gammas: &[f64], scales: &[u32]) -> (usize, usize) {
    gammas
        .iter()
        .flat_map(|&g| scales.iter().map(move |&t| snap_to_ray(g, t as f64)))
        .fold((1, 1), |(a, b), (i, j)| (a.max(i as usize), b.max(j as usize)))
}

/// Ratio report along direction `γ` using an already computed oracle field
/// (with site error bars) that covers the snapped targets.
pub fn convergence_report_from_field<T: Real>(
    h: &HarmonicEvaluator<T>,
    field: &LatticeField<T>,
    gamma: f64,
    scales: &[u32],
    threshold: f64,
) -> Result<AsymptoticReport<T>> {
    check_gamma(gamma)?;
    check_scales(scales)?;
    let (i0, j0) = (field.i0 as u32, field.j0 as u32);
    let mut cells = Vec::with_capacity(scales.len());
    for &t in scales {
        let (i, j) = snap_to_ray(gamma, t as f64);
        if i as usize > field.imax || j as usize > field.jmax {
            return Err(Error::InvalidArgument(format!(
                "target ({i}, {j}) outside the oracle window"
            )));
        }
        let exact = field.get(i as usize, j as usize);
        let err = field
            .site_error(i as usize, j as usize)
            .unwrap_or(field.error_estimate * exact);
        cells.push(cell(t, i, j, exact, err, theorem_rhs(h, i0, j0, i, j)));
    }
    Ok(AsymptoticReport {
        n: h.n(),
        i0,
        j0,
        ray: RayDescriptor::Direction { gamma },
        verdict: TrendVerdict::from_cells(&cells, threshold),
        cells,
    })
}

pub fn convergence_report<T: Real>(
    h: &HarmonicEvaluator<T>,
    i0: u32,
    j0: u32,
    gamma: f64,
    scales: &[u32],
    opts: &ReportOptions,
) -> Result<AsymptoticReport<T>> {
    check_gamma(gamma)?;
    check_scales(scales)?;
    let window = report_window(&[gamma], scales);
    let sol = solve_green(h.model(), i0 as usize, j0 as usize, window, &opts.policy, opts.solver)?;
    convergence_report_from_field(h, &sol.field, gamma, scales, opts.threshold)
}

/// Ratio report of `P[killed at (k, 0)]` or `P[killed at (0, k)]` against
/// [`absorption_rhs`].
pub fn absorption_report<T: Real>(
    h: &HarmonicEvaluator<T>,
    i0: u32,
    j0: u32,
    axis: BoundaryAxis,
    ks: &[u32],
    opts: &ReportOptions,
) -> Result<AsymptoticReport<T>> {
    check_scales(ks)?;
    let kmax = *ks.iter().max().expect("non-empty") as usize;
    let window = match axis {
        BoundaryAxis::X => (kmax, 1),
        BoundaryAxis::Y => (1, kmax),
    };
    let sol = solve_green(h.model(), i0 as usize, j0 as usize, window, &opts.policy, opts.solver)?;
    let f = &sol.field;
    let m = h.model();
    let err = |i: usize, j: usize| f.site_error(i, j).unwrap_or(f.error_estimate * f.get(i, j));
    let mut cells = Vec::with_capacity(ks.len());
    for &k in ks {
        let ku = k as usize;
        let (exact, bar, i, j) = match axis {
            BoundaryAxis::X => (m.p1m1 * f.get(ku - 1, 1), m.p1m1 * err(ku - 1, 1), k, 0),
            BoundaryAxis::Y => (
                m.p10 * f.get(1, ku) + m.p1m1 * f.get(1, ku - 1),
                m.p10 * err(1, ku) + m.p1m1 * err(1, ku - 1),
                0,
                k,
            ),
        };
        cells.push(cell(k, i, j, exact, bar, absorption_rhs(h, i0, j0, axis, k)?));
    }
    Ok(AsymptoticReport {
        n: h.n(),
        i0,
        j0,
        ray: RayDescriptor::Absorption { axis },
        verdict: TrendVerdict::from_cells(&cells, opts.threshold),
        cells,
    })
}
