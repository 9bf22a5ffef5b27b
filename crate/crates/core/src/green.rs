//! Brute-force Green functions of the killed walk on a truncated box.
//!
//! Interior states `1 ≤ i, j ≤ R` are kept; every other state is absorbing.
//! States on the axes are the genuine killing sites, states with `i > R` or
//! `j > R` form the artificial outer cutoff, so truncated values are lower
//! bounds of the true ones.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{cpowi, real, Cx, Real};
use crate::uniformization::Uniformization;
use crate::walk_model::{State, WalkModel};

/// Largest radius handled by the banded direct solver (memory ~ 8·R²·(2R+1) bytes).
pub const DIRECT_MAX_RADIUS: usize = 256;
/// Radius up to which [`LinearSolver::Auto`] picks the direct solver.
pub const AUTO_DIRECT_RADIUS: usize = 128;
/// Relative residual at which conjugate gradients stop.
pub const CG_RTOL: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationPolicy {
    pub initial_radius: usize,
    pub tolerance: f64,
    pub max_doublings: u32,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            initial_radius: 64,
            tolerance: 1e-9,
            max_doublings: 4,
        }
    }
}

impl TruncationPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "truncation tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.initial_radius < 2 {
            return Err(Error::InvalidArgument(
                "initial radius must be at least 2".into(),
            ));
        }
        Ok(())
    }
}

/// Linear solver used on a fixed box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinearSolver {
    /// Banded elimination up to [`AUTO_DIRECT_RADIUS`], conjugate gradients beyond.
    Auto,
    /// Banded elimination with row sums carried separately; entrywise accurate.
    Direct,
    ConjugateGradient,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Green,
    AbsorptionXAxis,
    AbsorptionYAxis,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Green => "green",
            FieldKind::AbsorptionXAxis => "absorption_x_axis",
            FieldKind::AbsorptionYAxis => "absorption_y_axis",
        }
    }
}

/// Values on `0 ≤ i ≤ imax, 0 ≤ j ≤ jmax`, row-major in `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeField<T> {
    pub kind: FieldKind,
    pub n: u32,
    pub i0: usize,
    pub j0: usize,
    pub imax: usize,
    pub jmax: usize,
    /// Truncation radius the values were computed at.
    pub radius: usize,
    pub values: Vec<T>,
    /// Max relative change over the last radius doubling (0 if none was done).
    pub error_estimate: T,
    /// Per-site absolute change over the last doubling, if available.
    pub site_errors: Option<Vec<T>>,
}

impl<T: Real> LatticeField<T> {
    pub fn get(&self, i: usize, j: usize) -> T {
        if i > self.imax || j > self.jmax {
            return T::zero();
        }
        self.values[i * (self.jmax + 1) + j]
    }

    pub fn site_error(&self, i: usize, j: usize) -> Option<T> {
        self.site_errors
            .as_ref()
            .map(|e| e[i * (self.jmax + 1) + j])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        let w = self.jmax + 1;
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| (k / w, k % w, v))
    }

    pub fn total(&self) -> T {
        self.values.iter().copied().sum()
    }
}

/// Green function from one start on a box of radius `R`, stored with a zero
/// frame: `(R + 2)²` values indexed `i·(R + 2) + j`.
#[derive(Clone, Debug)]
pub struct BoxGreen<T> {
    pub model: WalkModel<T>,
    pub start: State,
    pub radius: usize,
    values: Vec<T>,
    pub iterations: usize,
    /// Relative residual `‖δ − (I − P)G‖ / ‖δ‖`.
    pub residual: f64,
    pub solver: LinearSolver,
}

impl<T: Real> BoxGreen<T> {
    fn stride(&self) -> usize {
        self.radius + 2
    }

    /// `G_{i,j}`; zero off the interior box.
    pub fn get(&self, i: usize, j: usize) -> T {
        if i == 0 || j == 0 || i > self.radius || j > self.radius {
            return T::zero();
        }
        self.values[i * self.stride() + j]
    }

    /// `P[killed at (i, 0)] = p1m1 · G_{i−1,1}` (zero for `i = 1`).
    pub fn absorbed_x(&self, i: usize) -> T {
        if i < 2 {
            return T::zero();
        }
        self.model.p1m1 * self.get(i - 1, 1)
    }

    /// `P[killed at (0, j)] = p10 · G_{1,j} + p1m1 · G_{1,j−1}`.
    pub fn absorbed_y(&self, j: usize) -> T {
        if j < 1 {
            return T::zero();
        }
        self.model.p10 * self.get(1, j) + self.model.p1m1 * self.get(1, j - 1)
    }

    /// Total probability of being killed on the axes.
    pub fn axis_mass(&self) -> T {
        let r = self.radius + 1;
        (1..=r).map(|i| self.absorbed_x(i)).sum::<T>() + (1..=r).map(|j| self.absorbed_y(j)).sum::<T>()
    }

    /// Probability of leaving through the outer cutoff, summed site by site.
    pub fn outer_mass(&self) -> T {
        let (p, q, r) = (self.model.p10, self.model.p1m1, self.radius);
        let mut m = T::zero();
        for j in 1..=r {
            // (R, j) → (R+1, j) and (R, j) → (R+1, j−1) with j ≥ 2
            m += p * self.get(r, j);
            if j >= 2 {
                m += q * self.get(r, j);
            }
        }
        for i in 2..=r {
            // (i, R) → (i−1, R+1)
            m += q * self.get(i, r);
        }
        m
    }

    pub fn field(&self, imax: usize, jmax: usize) -> LatticeField<T> {
        let mut values = Vec::with_capacity((imax + 1) * (jmax + 1));
        for i in 0..=imax {
            for j in 0..=jmax {
                values.push(self.get(i, j));
            }
        }
        LatticeField {
            kind: FieldKind::Green,
            n: self.model.n,
            i0: self.start.i,
            j0: self.start.j,
            imax,
            jmax,
            radius: self.radius,
            values,
            error_estimate: T::zero(),
            site_errors: None,
        }
    }

    fn axis_field(&self, kind: FieldKind) -> LatticeField<T> {
        let r = self.radius + 1;
        let values: Vec<T> = (0..=r)
            .map(|k| match kind {
                FieldKind::AbsorptionXAxis => self.absorbed_x(k),
                _ => self.absorbed_y(k),
            })
            .collect();
        let (imax, jmax) = match kind {
            FieldKind::AbsorptionXAxis => (r, 0),
            _ => (0, r),
        };
        LatticeField {
            kind,
            n: self.model.n,
            i0: self.start.i,
            j0: self.start.j,
            imax,
            jmax,
            radius: self.radius,
            values,
            error_estimate: T::zero(),
            site_errors: None,
        }
    }
}

fn check_start(radius: usize, i0: usize, j0: usize) -> Result<State> {
    let s = State::interior(i0 as i64, j0 as i64)?;
    if i0 > radius || j0 > radius {
        return Err(Error::InvalidArgument(format!(
            "start ({i0}, {j0}) lies outside the box of radius {radius}"
        )));
    }
    Ok(s)
}

/// `out = (I − P) v` on the interior, frame entries left at zero.
fn apply_operator<T: Real>(m: &WalkModel<T>, r: usize, v: &[T], out: &mut [T]) {
    let s = r + 2;
    let (p, q) = (m.p10, m.p1m1);
    out[..s].iter_mut().for_each(|x| *x = T::zero());
    out[(r + 1) * s..].iter_mut().for_each(|x| *x = T::zero());
    out[s..(r + 1) * s]
        .par_chunks_mut(s)
        .enumerate()
        .for_each(|(k, row)| {
            let i = k + 1;
            let (up, mid, down) = (&v[(i + 1) * s..], &v[i * s..], &v[(i - 1) * s..]);
            row[0] = T::zero();
            row[r + 1] = T::zero();
            for j in 1..=r {
                row[j] = mid[j] - p * (up[j] + down[j]) - q * (up[j - 1] + down[j + 1]);
            }
        });
}

/// Deterministic dot product: per-row partials in parallel, summed in order.
fn dot<T: Real>(a: &[T], b: &[T], s: usize) -> T {
    let partial: Vec<T> = a
        .par_chunks(s)
        .zip(b.par_chunks(s))
        .map(|(x, y)| x.iter().zip(y).map(|(&u, &v)| u * v).sum())
        .collect();
    partial.into_iter().sum()
}

fn solve_cg<T: Real>(m: &WalkModel<T>, start: State, r: usize) -> Result<BoxGreen<T>> {
    let s = r + 2;
    let len = s * s;
    let mut x = vec![T::zero(); len];
    let mut res = vec![T::zero(); len];
    res[start.i * s + start.j] = T::one();
    let mut dir = res.clone();
    let mut ad = vec![T::zero(); len];
    let mut rr = dot(&res, &res, s);
    let tol2 = T::lit(CG_RTOL * CG_RTOL);
    let max_iter = 50 * r + 1000;
    let mut it = 0;
    let mut best = rr;
    let mut stall = 0;
    while rr > tol2 && it < max_iter {
        apply_operator(m, r, &dir, &mut ad);
        let alpha = rr / dot(&dir, &ad, s);
        x.par_iter_mut()
            .zip(dir.par_iter())
            .for_each(|(xi, &di)| *xi += alpha * di);
        res.par_iter_mut()
            .zip(ad.par_iter())
            .for_each(|(ri, &ai)| *ri -= alpha * ai);
        let rr_new = dot(&res, &res, s);
        let beta = rr_new / rr;
        dir.par_iter_mut()
            .zip(res.par_iter())
            .for_each(|(di, &ri)| *di = ri + beta * *di);
        rr = rr_new;
        it += 1;
        if rr < best * T::lit(0.999) {
            best = rr;
            stall = 0;
        } else {
            stall += 1;
            if stall > 4 * r + 100 {
                break;
            }
        }
    }
    // true residual
    apply_operator(m, r, &x, &mut ad);
    ad[start.i * s + start.j] -= T::one();
    let true_res = dot(&ad, &ad, s).sqrt().as_f64();
    if !(true_res < 1e-10) {
        return Err(Error::SolverStalled {
            iterations: it,
            residual: true_res,
        });
    }
    Ok(BoxGreen {
        model: *m,
        start,
        radius: r,
        values: x,
        iterations: it,
        residual: true_res,
        solver: LinearSolver::ConjugateGradient,
    })
}

/// Banded elimination of `(I − P) G = δ` in the ordering `k = (i−1)R + (j−1)`.
///
/// The matrix is an M-matrix: off-diagonal entries stay nonpositive under
/// elimination. Row sums (killing rates) are carried separately and the
/// pivot is rebuilt from them, so no subtraction ever occurs and every entry
/// of the solution is computed to near machine relative accuracy.
fn solve_direct<T: Real>(m: &WalkModel<T>, start: State, r: usize) -> Result<BoxGreen<T>> {
    if r > DIRECT_MAX_RADIUS {
        return Err(Error::InvalidArgument(format!(
            "direct solver limited to radius {DIRECT_MAX_RADIUS}, got {r}"
        )));
    }
    let n = r * r;
    let w = 2 * r + 1; // band: columns k−r ..= k+r at offset (c + r − k)
    let (p, q) = (m.p10, m.p1m1);
    // magnitudes of off-diagonal entries, kept nonnegative
    let mut band = vec![T::zero(); n * w];
    let mut kill = vec![T::zero(); n];
    let mut rhs = vec![T::zero(); n];
    let idx = |i: usize, j: usize| (i - 1) * r + (j - 1);
    for i in 1..=r {
        for j in 1..=r {
            let k = idx(i, j);
            let mut d = T::zero();
            let mut put = |ti: usize, tj: usize, pr: T, d: &mut T| {
                if ti >= 1 && tj >= 1 && ti <= r && tj <= r {
                    let c = idx(ti, tj);
                    band[k * w + (c + r - k)] = pr;
                } else {
                    *d += pr;
                }
            };
            put(i + 1, j, p, &mut d);
            put(i - 1, j, p, &mut d);
            put(i + 1, j - 1, q, &mut d);
            put(i - 1, j + 1, q, &mut d);
            kill[k] = d;
        }
    }
    rhs[idx(start.i, start.j)] = T::one();
    let mut diag = vec![T::zero(); n];
    for piv in 0..n {
        // pivot: killing rate plus off-diagonal magnitudes right of the diagonal
        let prow = piv * w;
        let upper: T = band[prow + r + 1..prow + w].iter().copied().sum();
        let dp = kill[piv] + upper;
        if !(dp > T::zero()) {
            return Err(Error::SolverStalled {
                iterations: piv,
                residual: f64::NAN,
            });
        }
        diag[piv] = dp;
        let last = (piv + r).min(n - 1);
        let (head, tail) = band.split_at_mut((piv + 1) * w);
        let pivot_row = &head[prow..prow + w];
        for row in piv + 1..=last {
            let off = piv + r - row;
            let rrow = &mut tail[(row - piv - 1) * w..(row - piv) * w];
            let a = rrow[off];
            if a == T::zero() {
                continue;
            }
            let f = a / dp; // multiplier magnitude
            rrow[off] = T::zero();
            let (kp, bp) = (kill[piv], rhs[piv]);
            kill[row] += f * kp;
            rhs[row] += f * bp;
            // columns piv+1 ..= piv+r of the pivot row land at offset shift
            for c in piv + 1..=(piv + r).min(n - 1) {
                let pv = pivot_row[c + r - piv];
                if pv == T::zero() || c == row {
                    continue;
                }
                rrow[c + r - row] += f * pv;
            }
        }
    }
    let mut sol = vec![T::zero(); n];
    for k in (0..n).rev() {
        let row = &band[k * w..(k + 1) * w];
        let mut acc = rhs[k];
        for c in k + 1..=(k + r).min(n - 1) {
            acc += row[c + r - k] * sol[c];
        }
        sol[k] = acc / diag[k];
    }
    let s = r + 2;
    let mut values = vec![T::zero(); s * s];
    for i in 1..=r {
        for j in 1..=r {
            values[i * s + j] = sol[idx(i, j)];
        }
    }
    let mut ad = vec![T::zero(); s * s];
    apply_operator(m, r, &values, &mut ad);
    ad[start.i * s + start.j] -= T::one();
    let res = dot(&ad, &ad, s).sqrt().as_f64();
    Ok(BoxGreen {
        model: *m,
        start,
        radius: r,
        values,
        iterations: n,
        residual: res,
        solver: LinearSolver::Direct,
    })
}

/// Solves `(I − P) G = δ_{(i0,j0)}` on the box of the given radius.
pub fn solve_box<T: Real>(
    model: &WalkModel<T>,
    i0: usize,
    j0: usize,
    radius: usize,
    solver: LinearSolver,
) -> Result<BoxGreen<T>> {
    let start = check_start(radius, i0, j0)?;
    match solver {
        LinearSolver::Direct => solve_direct(model, start, radius),
        LinearSolver::ConjugateGradient => solve_cg(model, start, radius),
        LinearSolver::Auto if radius <= AUTO_DIRECT_RADIUS => solve_direct(model, start, radius),
        LinearSolver::Auto => solve_cg(model, start, radius),
    }
}

/// A Green field converged in the truncation radius.
#[derive(Clone, Debug)]
pub struct GreenSolution<T> {
    pub field: LatticeField<T>,
    pub solution: BoxGreen<T>,
    /// `(radius, max relative change versus the previous radius)`.
    pub history: Vec<(usize, f64)>,
}

/// Doubles the radius from `policy.initial_radius` until the max relative
/// change over the report window `[0, imax] × [0, jmax]` is below
/// `policy.tolerance`.
pub fn solve_green<T: Real>(
    model: &WalkModel<T>,
    i0: usize,
    j0: usize,
    window: (usize, usize),
    policy: &TruncationPolicy,
    solver: LinearSolver,
) -> Result<GreenSolution<T>> {
    policy.validate()?;
    let (imax, jmax) = window;
    let mut radius = policy.initial_radius.max(imax).max(jmax).max(i0).max(j0);
    let mut prev = solve_box(model, i0, j0, radius, solver)?;
    let mut history = vec![(radius, f64::INFINITY)];
    let mut last_delta = f64::INFINITY;
    for _ in 0..policy.max_doublings {
        radius *= 2;
        let next = solve_box(model, i0, j0, radius, solver)?;
        let mut delta = T::zero();
        let mut site_errors = Vec::with_capacity((imax + 1) * (jmax + 1));
        for i in 0..=imax {
            for j in 0..=jmax {
                let (a, b) = (prev.get(i, j), next.get(i, j));
                site_errors.push((b - a).abs());
                if b > T::zero() {
                    delta = delta.max((b - a).abs() / b);
                }
            }
        }
        last_delta = delta.as_f64();
        history.push((radius, last_delta));
        if last_delta < policy.tolerance {
            let mut field = next.field(imax, jmax);
            field.error_estimate = delta;
            field.site_errors = Some(site_errors);
            return Ok(GreenSolution {
                field,
                solution: next,
                history,
            });
        }
        prev = next;
    }
    Err(Error::TruncationNotConverged {
        doublings: policy.max_doublings,
        delta: last_delta,
    })
}

/// Partial sums `Σ_{k<K} P^k δ` on a box, with the killed mass booked per site
/// as it leaves the interior.
#[derive(Clone, Debug)]
pub struct StepIterated<T> {
    pub radius: usize,
    pub steps: usize,
    values: Vec<T>,
    /// Mass killed at `(i, 0)`, index `i ∈ 0..=R+1`.
    pub absorbed_x: Vec<T>,
    /// Mass killed at `(0, j)`, index `j ∈ 0..=R+1`.
    pub absorbed_y: Vec<T>,
    /// Mass killed by the outer cutoff.
    pub outer: T,
    /// Mass still alive after the last step.
    pub alive: T,
}

impl<T: Real> StepIterated<T> {
    pub fn get(&self, i: usize, j: usize) -> T {
        if i == 0 || j == 0 || i > self.radius || j > self.radius {
            return T::zero();
        }
        self.values[i * (self.radius + 2) + j]
    }

    pub fn axis_mass(&self) -> T {
        self.absorbed_x.iter().copied().sum::<T>() + self.absorbed_y.iter().copied().sum::<T>()
    }
}

fn propagate<T: Real>(m: &WalkModel<T>, r: usize, v: &[T], out: &mut [T]) {
    // out(i,j) = Σ_{s'} v(s') P(s' → (i,j)); P is symmetric, so same stencil.
    let s = r + 2;
    let (p, q) = (m.p10, m.p1m1);
    out[s..(r + 1) * s]
        .par_chunks_mut(s)
        .enumerate()
        .for_each(|(k, row)| {
            let i = k + 1;
            let (up, down) = (&v[(i + 1) * s..], &v[(i - 1) * s..]);
            for j in 1..=r {
                row[j] = p * (up[j] + down[j]) + q * (up[j - 1] + down[j + 1]);
            }
        });
}

/// Time-iterates the walk from `(i0, j0)`, doubling the step count until the
/// estimated remaining tail is below `tol` relative at every site whose
/// value exceeds `floor`.
pub fn step_iterate<T: Real>(
    model: &WalkModel<T>,
    i0: usize,
    j0: usize,
    radius: usize,
    tol: f64,
    floor: f64,
    max_steps: usize,
) -> Result<StepIterated<T>> {
    let start = check_start(radius, i0, j0)?;
    let r = radius;
    let s = r + 2;
    let (p, q) = (model.p10, model.p1m1);
    let mut cur = vec![T::zero(); s * s];
    let mut nxt = vec![T::zero(); s * s];
    cur[start.i * s + start.j] = T::one();
    let mut acc = vec![T::zero(); s * s];
    let mut ax = vec![T::zero(); r + 2];
    let mut ay = vec![T::zero(); r + 2];
    let mut outer = T::zero();
    let mut steps = 0usize;
    let mut block = 256usize;
    let mut snapshot = acc.clone();
    let mut alive_prev = T::one();
    loop {
        for _ in 0..block {
            acc.par_iter_mut()
                .zip(cur.par_iter())
                .for_each(|(a, &c)| *a += c);
            for i in 1..=r {
                ax[i + 1] += q * cur[i * s + 1];
            }
            for j in 1..=r {
                let v = cur[s + j];
                ay[j] += p * v;
                ay[j + 1] += q * v;
            }
            for j in 1..=r {
                let v = cur[r * s + j];
                outer += p * v;
                if j >= 2 {
                    outer += q * v;
                }
            }
            for i in 2..=r {
                outer += q * cur[i * s + r];
            }
            propagate(model, r, &cur, &mut nxt);
            std::mem::swap(&mut cur, &mut nxt);
            steps += 1;
        }
        let alive: T = cur.iter().copied().sum();
        let rho = (alive / alive_prev).min(T::lit(0.999_999));
        alive_prev = alive;
        let mut worst = T::zero();
        for (a, b) in acc.iter().zip(&snapshot) {
            if *a > T::lit(floor) {
                worst = worst.max((*a - *b) / *a);
            }
        }
        // geometric tail beyond this block, in units of the last block's increment
        let tail = worst * rho / (T::one() - rho);
        if tail.as_f64() < tol || steps >= max_steps {
            if tail.as_f64() >= tol {
                return Err(Error::TruncationNotConverged {
                    doublings: steps as u32,
                    delta: tail.as_f64(),
                });
            }
            return Ok(StepIterated {
                radius: r,
                steps,
                values: acc,
                absorbed_x: ax,
                absorbed_y: ay,
                outer,
                alive,
            });
        }
        snapshot.copy_from_slice(&acc);
        block = steps;
    }
}

/// Absorption probabilities computed two ways on the same box.
#[derive(Clone, Debug)]
pub struct AbsorptionProfile<T> {
    /// From the Green field through the one-step identities.
    pub x_axis: LatticeField<T>,
    pub y_axis: LatticeField<T>,
    /// Booked directly while time-iterating the walk.
    pub x_axis_direct: Vec<T>,
    pub y_axis_direct: Vec<T>,
    /// Max absolute difference between the two routes.
    pub discrepancy: T,
    /// Total axis mass from the Green route.
    pub total_mass: T,
    pub radius: usize,
}

/// Absorption profile at the radius selected by `policy` for the window
/// `[0, 2i0 + 2j0]²`; the direct route runs at the same radius.
pub fn absorption_profile<T: Real>(
    model: &WalkModel<T>,
    i0: usize,
    j0: usize,
    policy: &TruncationPolicy,
) -> Result<AbsorptionProfile<T>> {
    let w = 2 * (i0 + j0);
    let g = solve_green(model, i0, j0, (w, w), policy, LinearSolver::Auto)?;
    let b = &g.solution;
    let direct = step_iterate(model, i0, j0, b.radius, 1e-12, 0.0, 50_000_000)?;
    let x_axis = b.axis_field(FieldKind::AbsorptionXAxis);
    let y_axis = b.axis_field(FieldKind::AbsorptionYAxis);
    let mut disc = T::zero();
    for k in 0..=b.radius + 1 {
        disc = disc.max((x_axis.values[k] - direct.absorbed_x[k]).abs());
        disc = disc.max((y_axis.values[k] - direct.absorbed_y[k]).abs());
    }
    Ok(AbsorptionProfile {
        total_mass: b.axis_mass(),
        x_axis,
        y_axis,
        x_axis_direct: direct.absorbed_x,
        y_axis_direct: direct.absorbed_y,
        discrepancy: disc,
        radius: b.radius,
    })
}

/// Residual of a generating-function identity with its certified budget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityCheck<T> {
    pub residual: T,
    /// `(outer mass)·max(|x|, |y|)^{R+1}` plus a rounding allowance.
    pub budget: T,
}

impl<T: Real> IdentityCheck<T> {
    pub fn passed(&self) -> bool {
        self.residual <= self.budget
    }
}

const ROUNDING_ALLOWANCE: f64 = 64.0 * f64::EPSILON;

fn boundary_series<T: Real>(b: &BoxGreen<T>, x: Cx<T>, y: Cx<T>) -> (Cx<T>, Cx<T>, T) {
    // h(x) = Σ P[killed at (i,0)] x^i, h̃(y) = Σ P[killed at (0,j)] y^j
    let mut h = real(T::zero());
    let mut ht = real(T::zero());
    let mut scale = T::zero();
    let mut xp = real(T::one());
    let mut yp = real(T::one());
    for k in 1..=b.radius + 1 {
        xp = xp * x;
        yp = yp * y;
        let (a, c) = (b.absorbed_x(k), b.absorbed_y(k));
        h = h + xp * a;
        ht = ht + yp * c;
        scale += a * xp.norm() + c * yp.norm();
    }
    (h, ht, scale)
}

/// `|Q(x,y)·G(x,y) − h(x) − h̃(y) + x^{i0} y^{j0}|` for the truncated field.
pub fn generating_function_check<T: Real>(
    b: &BoxGreen<T>,
    x: Cx<T>,
    y: Cx<T>,
) -> Result<IdentityCheck<T>> {
    if !(x.norm() < T::one() && y.norm() < T::one()) {
        return Err(Error::OutsideRegion(format!(
            "generating functions need |x| < 1 and |y| < 1, got |x| = {}, |y| = {}",
            x.norm(),
            y.norm()
        )));
    }
    let r = b.radius;
    // G(x, y) = Σ G_{ij} x^{i−1} y^{j−1}
    let mut xs = vec![real(T::one()); r + 1];
    let mut ys = vec![real(T::one()); r + 1];
    for k in 1..=r {
        xs[k] = xs[k - 1] * x;
        ys[k] = ys[k - 1] * y;
    }
    let mut gxy = real(T::zero());
    let mut gscale = T::zero();
    for i in 1..=r {
        let mut row = real(T::zero());
        let mut rs = T::zero();
        for j in 1..=r {
            let g = b.get(i, j);
            row = row + ys[j - 1] * g;
            rs += g * ys[j - 1].norm();
        }
        gxy = gxy + xs[i - 1] * row;
        gscale += rs * xs[i - 1].norm();
    }
    let m = &b.model;
    // Q = xy[p x + p/x + q x/y + q y/x − 1] in expanded form, valid on the axes
    let q = x * x * y * m.p10 + y * m.p10 + (x * x + y * y) * m.p1m1 - x * y;
    let (h, ht, hscale) = boundary_series(b, x, y);
    let mono = cpowi(x, b.start.i as u32) * cpowi(y, b.start.j as u32);
    let residual = (q * gxy - h - ht + mono).norm();
    let outer = (T::one() - b.axis_mass()).max(T::zero());
    let mx = x.norm().max(y.norm());
    let tail = outer * mx.powi(r as i32 + 1);
    let scale = gscale * (T::lit(4.0) + q.norm()) + hscale + mono.norm();
    Ok(IdentityCheck {
        residual,
        budget: tail + T::lit(ROUNDING_ALLOWANCE) * scale,
    })
}

/// `|h(x(z)) + h̃(y(z)) − x(z)^{i0} y(z)^{j0}|` for `z` with `|x(z)|, |y(z)| < 1`.
pub fn continuation_identity_check<T: Real>(
    u: &Uniformization<T>,
    b: &BoxGreen<T>,
    z: Cx<T>,
) -> Result<IdentityCheck<T>> {
    let (x, y) = (u.x(z), u.y(z));
    if !(x.norm() < T::one() && y.norm() < T::one()) {
        return Err(Error::OutsideRegion(format!(
            "z = {z} maps to |x| = {}, |y| = {}",
            x.norm(),
            y.norm()
        )));
    }
    let (h, ht, hscale) = boundary_series(b, x, y);
    let mono = cpowi(x, b.start.i as u32) * cpowi(y, b.start.j as u32);
    let residual = (h + ht - mono).norm();
    let outer = (T::one() - b.axis_mass()).max(T::zero());
    let tail = outer * x.norm().max(y.norm()).powi(b.radius as i32 + 1);
    Ok(IdentityCheck {
        residual,
        budget: tail + T::lit(ROUNDING_ALLOWANCE) * (hscale + mono.norm()),
    })
}
