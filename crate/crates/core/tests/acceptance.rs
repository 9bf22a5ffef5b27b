//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criterion 9 asks for `f_n / h(φ) → 1`, but the leading part of `f_n` is
//! `K_n·h(φ)` with `K_n ≠ 1`, so that line is expected to read FAIL. Known
//! failures do not change the exit status unless `QGREEN_ACCEPTANCE_STRICT`
//! is set; any other failure exits with status 1.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use quadrant_green::asymptotics::{
    absorption_report, convergence_report_from_field, report_window, theorem_rhs, BoundaryAxis,
    ReportOptions,
};
use quadrant_green::contour::{
    admissible_band, green_by_contour, in_validity_region, laplace_leading_term, ContourSpec,
};
use quadrant_green::green::{
    absorption_profile, continuation_identity_check, generating_function_check, solve_box,
    solve_green, step_iterate, LinearSolver, TruncationPolicy,
};
use quadrant_green::group::{enumerate_group, generators, MobiusMap, MAP_EQ_TOL};
use quadrant_green::harmonic::{
    closed_form, dominant_to_reduite_constant, f_n_11, f_n_22, reduite_at,
};
use quadrant_green::scalar::Cx;
use quadrant_green::{HarmonicEvaluatorF64, UniformizationF64, WalkModelF64};

const KNOWN_FAILURES: [u32; 1] = [9];

type Check = Result<(bool, String), String>;

struct Outcome {
    id: u32,
    pass: bool,
}

fn run(id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Check) -> Outcome {
    let t = Instant::now();
    let res = f();
    let el = t.elapsed();
    let (ok, detail) = match res {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    let in_time = el <= budget;
    let pass = ok && in_time;
    let timing = format!(
        "{:.2} s of {} s{}",
        el.as_secs_f64(),
        budget.as_secs(),
        if in_time { "" } else { ", over budget" }
    );
    println!(
        "{} [{id}] {name}: {detail} ({timing})",
        if pass { "PASS" } else { "FAIL" }
    );
    Outcome { id, pass }
}

fn harmonicity() -> Check {
    let (mut mv, mut bd) = (0.0f64, 0.0f64);
    for n in 3..=8 {
        let h = HarmonicEvaluatorF64::new(UniformizationF64::from_order(n).map_err(|e| e.to_string())?);
        mv = mv.max(h.check_harmonicity(30, 30));
        bd = bd.max(h.boundary_residual(30));
    }
    Ok((
        mv < 1e-9 && bd < 1e-9,
        format!("n=3..8 on [1,30]²: mean-value residual {mv:.2e}, boundary/neighbour {bd:.2e} (limit 1e-9)"),
    ))
}

fn closed_forms() -> Check {
    let mut worst_cf = 0.0f64;
    for n in [3u32, 4, 6] {
        let h = HarmonicEvaluatorF64::new(UniformizationF64::from_order(n as i64).map_err(|e| e.to_string())?);
        let g = h.grid(20, 20);
        for i in 0..=20 {
            for j in 0..=20 {
                let c = closed_form(n, i as f64, j as f64).expect("closed form exists");
                let scale = if c != 0.0 {
                    c.abs()
                } else {
                    g[i.max(1)][j.max(1)].abs()
                };
                worst_cf = worst_cf.max((g[i][j] - c).abs() / scale);
            }
        }
    }
    let (mut w11, mut w22, mut min_gap) = (0.0f64, 0.0f64, f64::INFINITY);
    for n in 3u32..=12 {
        let h = HarmonicEvaluatorF64::new(UniformizationF64::from_order(n as i64).map_err(|e| e.to_string())?);
        let (a, b) = (h.f_n(1, 1), h.f_n(2, 2));
        w11 = w11.max((a / f_n_11::<f64>(n) - 1.0).abs());
        w22 = w22.max((b / f_n_22::<f64>(n) - 1.0).abs());
        if n >= 5 {
            min_gap = min_gap.min((b / a / 2f64.powi(n as i32) - 1.0).abs());
        }
    }
    Ok((
        worst_cf < 1e-10 && w11 < 1e-10 && w22 < 1e-10 && min_gap > 1e-6,
        format!(
            "f3/f4/f6 on [0,20]² {worst_cf:.2e}; f(1,1) {w11:.2e}; f(2,2) {w22:.2e} (limit 1e-10); \
             min |f(2,2)/f(1,1)/2^n − 1| for n≥5 {min_gap:.3} (needs > 1e-6)"
        ),
    ))
}

fn curve_and_group() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    let mut group_ok = true;
    let mut cycles = 0.0f64;
    for n in 3i64..=8 {
        let u = UniformizationF64::from_order(n).map_err(|e| e.to_string())?;
        for _ in 0..1000 {
            let r = 10f64.powf(rng.gen_range(-3.0..3.0));
            let z = Cx::from_polar(r, rng.gen_range(-PI..PI));
            worst = worst.max(u.curve_residual_scaled(z).map_err(|e| e.to_string())?);
        }
        let (xi, eta) = generators::<f64>(n).map_err(|e| e.to_string())?;
        let id = MobiusMap::identity();
        let tol = MAP_EQ_TOL;
        let xe = xi.map.compose(&eta.map);
        let xen = (1..n).fold(xe, |acc, _| acc.compose(&xe));
        group_ok &= xi.map.compose(&xi.map).approx_eq(&id, tol)
            && eta.map.compose(&eta.map).approx_eq(&id, tol)
            && xen.approx_eq(&id, tol);
        group_ok &= enumerate_group::<f64>(n).map_err(|e| e.to_string())?.len() == 2 * n as usize;
        let rep = u.cycle_images(200).map_err(|e| e.to_string())?;
        cycles = rep.max_deviation.iter().fold(cycles, |m, &(_, d)| m.max(d));
    }
    Ok((
        worst < 1e-10 && group_ok,
        format!(
            "curve residual {worst:.2e} at 1000 z per n=3..8 (limit 1e-10); relations and order 2n {}; \
             cycle images at 200 samples, worst deviation {cycles:.2e}",
            if group_ok { "hold" } else { "FAIL" }
        ),
    ))
}

fn oracle_consistency() -> Check {
    let (mut rel, mut disc, mut min_mass) = (0.0f64, 0.0f64, f64::INFINITY);
    let mut radii = Vec::new();
    for n in [3i64, 4] {
        let m = WalkModelF64::new(n).map_err(|e| e.to_string())?;
        let a = solve_box(&m, 1, 1, 128, LinearSolver::Direct).map_err(|e| e.to_string())?;
        let s = step_iterate(&m, 1, 1, 128, 1e-12, 0.0, 50_000_000).map_err(|e| e.to_string())?;
        for i in 1..=128 {
            for j in 1..=128 {
                let v = a.get(i, j);
                if v > 0.0 {
                    rel = rel.max((s.get(i, j) - v).abs() / v);
                }
            }
        }
        let pol = TruncationPolicy {
            initial_radius: 64,
            tolerance: 1e-4,
            max_doublings: 2,
        };
        let prof = absorption_profile(&m, 1, 1, &pol).map_err(|e| e.to_string())?;
        disc = disc.max(prof.discrepancy);
        let pol = TruncationPolicy {
            initial_radius: 128,
            tolerance: 1e-6,
            max_doublings: 2,
        };
        let g = solve_green(&m, 1, 1, (12, 12), &pol, LinearSolver::Auto).map_err(|e| e.to_string())?;
        min_mass = min_mass.min(g.solution.axis_mass());
        radii.push(g.solution.radius);
    }
    Ok((
        rel < 1e-8 && disc < 1e-10 && min_mass >= 1.0 - 1e-6,
        format!(
            "linear vs step-iterated at R=128 {rel:.2e} (limit 1e-8); absorption identities {disc:.2e} \
             (limit 1e-10); absorbed mass {min_mass:.9} at final radii {radii:?}"
        ),
    ))
}

fn identities() -> Check {
    let mut rng = StdRng::seed_from_u64(0xfeed);
    let (mut worst_gf, mut worst_ct) = (0.0f64, 0.0f64);
    let mut ok = true;
    for n in [3i64, 4] {
        let u = UniformizationF64::from_order(n).map_err(|e| e.to_string())?;
        let b = solve_box(&u.model, 1, 1, 96, LinearSolver::Direct).map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let x = Cx::from_polar(rng.gen_range(0.0..0.95f64).sqrt(), rng.gen_range(-PI..PI));
            let y = Cx::from_polar(rng.gen_range(0.0..0.95f64).sqrt(), rng.gen_range(-PI..PI));
            let c = generating_function_check(&b, x, y).map_err(|e| e.to_string())?;
            ok &= c.passed();
            worst_gf = worst_gf.max(c.residual / c.budget);
        }
        let mut taken = 0;
        while taken < 20 {
            let z = Cx::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let (x, y) = (u.x(z), u.y(z));
            if x.norm() >= 0.95 || y.norm() >= 0.95 {
                continue;
            }
            let c = continuation_identity_check(&u, &b, z).map_err(|e| e.to_string())?;
            ok &= c.passed();
            worst_ct = worst_ct.max(c.residual / c.budget);
            taken += 1;
        }
    }
    Ok((
        ok,
        format!(
            "worst residual/budget: functional equation {worst_gf:.2e}, continuation {worst_ct:.2e} \
             (20 + 20 samples per n=3,4)"
        ),
    ))
}

fn contour_equivalence() -> Check {
    let (mut worst, mut spread) = (0.0f64, 0.0f64);
    let mut cells = 0;
    for n in [3i64, 4] {
        let u = UniformizationF64::from_order(n).map_err(|e| e.to_string())?;
        let (lo, hi) = admissible_band::<f64>(n as u32);
        let angles: Vec<f64> = (1..=5).map(|k| lo + (hi - lo) * k as f64 / 6.0).collect();
        for (i0, j0) in [(1u32, 1u32), (2, 1)] {
            let pol = TruncationPolicy {
                initial_radius: 128,
                tolerance: 1e-6,
                max_doublings: 2,
            };
            let sol = solve_green(&u.model, i0 as usize, j0 as usize, (12, 12), &pol, LinearSolver::Auto)
                .map_err(|e| e.to_string())?;
            for i in 6..=12u32 {
                for j in 6..=12u32 {
                    if !in_validity_region(i0, j0, i, j) {
                        return Err(format!("({i},{j}) from ({i0},{j0}) outside the validity region"));
                    }
                    let g = sol.field.get(i as usize, j as usize);
                    let c = green_by_contour(&u, i0, j0, i, j, &ContourSpec::default())
                        .map_err(|e| e.to_string())?;
                    worst = worst.max((c.value / g - 1.0).abs());
                    let mut vals = Vec::with_capacity(5);
                    for &a in &angles {
                        let spec = ContourSpec {
                            angle: Some(a),
                            ..Default::default()
                        };
                        vals.push(green_by_contour(&u, i0, j0, i, j, &spec).map_err(|e| e.to_string())?.value);
                    }
                    let (mn, mx) = vals
                        .iter()
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
                    spread = spread.max((mx - mn) / mn);
                    cells += 1;
                }
            }
        }
    }
    Ok((
        worst <= 1e-5 && spread <= 1e-7,
        format!(
            "{cells} cells: contour vs oracle {worst:.2e} (limit 1e-5); spread over 5 angles {spread:.2e} (limit 1e-7)"
        ),
    ))
}

fn theorem_trend() -> Check {
    let scales = [8u32, 16, 32, 64];
    let gammas = [PI / 6.0, PI / 4.0, PI / 3.0];
    let opts = ReportOptions::default();
    let mut ok = true;
    let mut lines = Vec::new();
    for n in [3i64, 4] {
        let h = HarmonicEvaluatorF64::new(UniformizationF64::from_order(n).map_err(|e| e.to_string())?);
        let w = report_window(&gammas, &scales);
        let sol = solve_green(h.model(), 1, 1, w, &opts.policy, opts.solver).map_err(|e| e.to_string())?;
        for g in gammas {
            let r = convergence_report_from_field(&h, &sol.field, g, &scales, opts.threshold)
                .map_err(|e| e.to_string())?;
            ok &= r.verdict.passed;
            lines.push(format!(
                "n={n} γ={:.3}: {}",
                g,
                r.verdict
                    .last_deviations
                    .iter()
                    .map(|d| format!("{d:.1e}"))
                    .collect::<Vec<_>>()
                    .join("→")
            ));
        }
    }
    Ok((ok, format!("|ratio−1| over last three scales (final < 0.15): {}", lines.join("; "))))
}

fn corollary_trend() -> Check {
    let h = HarmonicEvaluatorF64::new(UniformizationF64::from_order(3).map_err(|e| e.to_string())?);
    let opts = ReportOptions {
        threshold: 0.2,
        ..Default::default()
    };
    let r = absorption_report(&h, 1, 1, BoundaryAxis::X, &[8, 16, 24, 32, 40], &opts)
        .map_err(|e| e.to_string())?;
    let norm: Vec<String> = r
        .cells
        .iter()
        .map(|c| {
            let k = c.scale as f64;
            format!("{:.4}", k.powi(4) * c.exact)
        })
        .collect();
    let constant = r.cells[0].formula * (r.cells[0].scale as f64).powi(4);
    Ok((
        r.verdict.passed,
        format!(
            "k⁴·P[killed at (k,0)] for k=8..40: {} vs constant {constant:.4}; last deviations {:?} (final < 0.2)",
            norm.join(", "),
            r.verdict
                .last_deviations
                .iter()
                .map(|d| format!("{d:.2e}"))
                .collect::<Vec<_>>()
        ),
    ))
}

fn reduite_link() -> Check {
    let rays = [PI / 8.0, PI / 4.0, 3.0 * PI / 8.0];
    let mut worst = 0.0f64;
    let mut diag = Vec::new();
    for n in 3u32..=6 {
        let h = HarmonicEvaluatorF64::new(UniformizationF64::from_order(n as i64).map_err(|e| e.to_string())?);
        let k = dominant_to_reduite_constant::<f64>(n);
        let mut per_n = Vec::new();
        for g in rays {
            let (i, j) = quadrant_green::asymptotics::snap_to_ray(g, 4096.0);
            let ratio = h.f_n(i, j) / reduite_at(n, i as f64, j as f64);
            worst = worst.max((ratio - 1.0).abs());
            per_n.push(ratio / k);
        }
        diag.push(format!(
            "n={n}: ratio {:.4} (K_n = {k:.4}, ratio/K_n within {:.1e} of 1)",
            per_n[0] * k,
            per_n.iter().fold(0.0f64, |m, r| m.max((r - 1.0).abs()))
        ));
    }
    Ok((
        worst <= 0.02,
        format!("max |f_n/h(φ) − 1| = {worst:.3} (limit 0.02); {}", diag.join("; ")),
    ))
}

fn laplace_identity() -> Check {
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in 3i64..=8 {
        let h = HarmonicEvaluatorF64::new(UniformizationF64::from_order(n).map_err(|e| e.to_string())?);
        for (i0, j0) in [(1u32, 1u32), (2, 1), (1, 3)] {
            for i in [1u32, 2, 5, 16, 100, 1000] {
                for j in [0u32, 1, 3, 16, 250] {
                    let (a, b) = laplace_leading_term(&h, i0, j0, i, j).map_err(|e| e.to_string())?;
                    let s = a + b;
                    let rhs = theorem_rhs(&h, i0, j0, i, j);
                    let scale = rhs.abs().max(a.norm());
                    worst = worst.max((s.re - rhs).abs() / scale).max(s.im.abs() / scale);
                    count += 1;
                }
            }
        }
    }
    Ok((
        worst <= 1e-12,
        format!("{count} cases, worst relative gap {worst:.2e} (limit 1e-12)"),
    ))
}

fn main() {
    let s = Duration::from_secs;
    let outcomes = [
        run(1, "harmonicity", s(5), harmonicity),
        run(2, "closed forms", s(1), closed_forms),
        run(3, "curve and group", s(2), curve_and_group),
        run(4, "oracle self-consistency", s(60), oracle_consistency),
        run(5, "functional equation and continuation", s(30), identities),
        run(6, "contour formula equivalence", s(120), contour_equivalence),
        run(7, "Green asymptotic trend", s(600), theorem_trend),
        run(8, "absorption asymptotic trend", s(300), corollary_trend),
        run(9, "réduite link", s(1), reduite_link),
        run(10, "Laplace term identity", s(1), laplace_identity),
    ];
    let strict = std::env::var_os("QGREEN_ACCEPTANCE_STRICT").is_some();
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    let unexpected: Vec<u32> = failed
        .iter()
        .copied()
        .filter(|id| strict || !KNOWN_FAILURES.contains(id))
        .collect();
    println!(
        "acceptance: {} passed, {} failed {:?}, known failures {:?}",
        outcomes.len() - failed.len(),
        failed.len(),
        failed,
        KNOWN_FAILURES
    );
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}
