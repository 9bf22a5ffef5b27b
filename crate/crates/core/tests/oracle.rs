use approx::assert_relative_eq;
use quadrant_green::export::{field_csv, field_json, report_json};
use quadrant_green::green::*;
use quadrant_green::asymptotics::{convergence_report_from_field, report_window};
use quadrant_green::{Error, HarmonicEvaluatorF64, UniformizationF64, WalkModelF64};

#[test]
fn doubling_reaches_frozen_values() {
    let m = WalkModelF64::new(4).unwrap();
    let pol = TruncationPolicy {
        initial_radius: 64,
        tolerance: 1e-8,
        max_doublings: 3,
    };
    let s = solve_green(&m, 1, 1, (8, 8), &pol, LinearSolver::Auto).unwrap();
    assert!(s.history.windows(2).all(|w| w[1].1 < w[0].1));
    assert_relative_eq!(s.field.get(1, 1), 1.0801804127462282, max_relative = 1e-9);
    assert_relative_eq!(s.field.get(8, 8), 2.8393320930201744e-4, max_relative = 1e-7);
    assert!(s.field.site_error(8, 8).unwrap() < 1e-7 * s.field.get(8, 8));
}

#[test]
fn stalls_are_reported() {
    let m = WalkModelF64::new(3).unwrap();
    let pol = TruncationPolicy {
        initial_radius: 16,
        tolerance: 1e-12,
        max_doublings: 1,
    };
    let e = solve_green(&m, 1, 1, (8, 8), &pol, LinearSolver::Auto).unwrap_err();
    assert!(matches!(e, Error::TruncationNotConverged { .. }));
}

#[test]
fn solvers_agree_near_the_start() {
    let m = WalkModelF64::new(5).unwrap();
    let a = solve_box(&m, 2, 2, 96, LinearSolver::Direct).unwrap();
    let b = solve_box(&m, 2, 2, 96, LinearSolver::ConjugateGradient).unwrap();
    for i in 1..=20 {
        for j in 1..=20 {
            assert_relative_eq!(a.get(i, j), b.get(i, j), max_relative = 1e-9);
        }
    }
}

#[test]
fn exports_are_deterministic_and_parse() {
    let u = UniformizationF64::from_order(4).unwrap();
    let pol = TruncationPolicy {
        initial_radius: 32,
        tolerance: 1e-2,
        max_doublings: 2,
    };
    let w = report_window(&[0.7], &[4, 8]);
    let s1 = solve_green(&u.model, 1, 1, w, &pol, LinearSolver::Auto).unwrap();
    let s2 = solve_green(&u.model, 1, 1, w, &pol, LinearSolver::Auto).unwrap();
    assert_eq!(field_csv(&s1.field), field_csv(&s2.field));
    assert_eq!(field_json(&s1.field), field_json(&s2.field));
    let csv = field_csv(&s1.field);
    assert!(csv.starts_with("i,j,value,error\n"));
    let h = HarmonicEvaluatorF64::new(u);
    let r = convergence_report_from_field(&h, &s1.field, 0.7, &[4, 8], 0.5).unwrap();
    let js: serde_json::Value = serde_json::from_str(&report_json(&r)).unwrap();
    assert_eq!(js["meta"]["ray"], "direction");
    assert_eq!(js["data"].as_array().unwrap().len(), 2);
}
