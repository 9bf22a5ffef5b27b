//! `qgreen`: model data, harmonic tables, Green-function estimates and
//! convergence reports for the zero-drift quarter-plane walk of order `n`.
//!
//! Exit status: 0 success, 1 a numerical check failed, 2 usage error.
//! `QGREEN_THREADS` caps the worker pool.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use quadrant_green::asymptotics::{
    absorption_report, convergence_report, theorem_rhs, AsymptoticReport, BoundaryAxis,
    RayDescriptor, ReportOptions,
};
use quadrant_green::contour::{green_by_contour, in_validity_region, ContourSpec};
use quadrant_green::export::{fmt12, report_csv, report_json, to_json, Document, Num};
use quadrant_green::green::{solve_green, LinearSolver, TruncationPolicy};
use quadrant_green::group::enumerate_group;
use quadrant_green::harmonic::closed_form;
use quadrant_green::{Error, HarmonicEvaluatorF64, UniformizationF64};

/// Harmonicity residual above which `harmonic` fails.
const HARMONIC_TOL: f64 = 1e-9;
/// Oracle-vs-contour relative gap above which `green` fails.
const CONTOUR_TOL: f64 = 1e-4;

#[derive(Parser, Debug)]
#[command(name = "qgreen", version, about = "Green functions of killed zero-drift walks in the quarter plane")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transition probabilities, uniformization pole, branch points and group table.
    ModelInfo(ModelInfoArgs),
    /// Table of the harmonic polynomial f_n with its mean-value residual.
    Harmonic(HarmonicArgs),
    /// Green-function value by the lattice oracle, the contour formula and the asymptotic.
    Green(GreenArgs),
    /// Ratio of exact to asymptotic values along a ray or a boundary axis.
    Converge(ConvergeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SolverArg {
    Auto,
    Direct,
    Cg,
}

impl From<SolverArg> for LinearSolver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Auto => LinearSolver::Auto,
            SolverArg::Direct => LinearSolver::Direct,
            SolverArg::Cg => LinearSolver::ConjugateGradient,
        }
    }
}

#[derive(Args, Debug)]
struct TruncationArgs {
    /// Initial box radius of the oracle.
    #[arg(long)]
    radius: Option<usize>,
    /// Relative change over the report window that stops the doubling.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    max_doublings: Option<u32>,
    #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
    solver: SolverArg,
}

impl TruncationArgs {
    fn policy(&self, default: TruncationPolicy) -> TruncationPolicy {
        TruncationPolicy {
            initial_radius: self.radius.unwrap_or(default.initial_radius),
            tolerance: self.tolerance.unwrap_or(default.tolerance),
            max_doublings: self.max_doublings.unwrap_or(default.max_doublings),
        }
    }
}

#[derive(Args, Debug)]
struct QuadratureArgs {
    /// Ray angle in [π − π/n, π]; defaults to arg ρ.
    #[arg(long, allow_hyphen_values = true)]
    angle: Option<f64>,
    #[arg(long, default_value_t = 1e-11)]
    rel_tol: f64,
    #[arg(long, default_value_t = 24)]
    panels: usize,
    #[arg(long, default_value_t = 4000)]
    max_panels: usize,
}

#[derive(Args, Debug)]
struct ModelInfoArgs {
    #[arg(long, allow_hyphen_values = true)]
    n: i64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct HarmonicArgs {
    #[arg(long, allow_hyphen_values = true)]
    n: i64,
    #[arg(long, default_value_t = 10)]
    imax: usize,
    #[arg(long, default_value_t = 10)]
    jmax: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Oracle,
    Contour,
    Asymptotic,
    All,
}

#[derive(Args, Debug)]
struct GreenArgs {
    #[arg(long, allow_hyphen_values = true)]
    n: i64,
    /// Start state i0 j0.
    #[arg(long, num_args = 2, value_names = ["I0", "J0"], allow_hyphen_values = true)]
    from: Vec<i64>,
    /// Target state i j.
    #[arg(long, num_args = 2, value_names = ["I", "J"], allow_hyphen_values = true)]
    at: Vec<i64>,
    #[arg(long, value_enum, default_value_t = Method::All)]
    method: Method,
    #[command(flatten)]
    truncation: TruncationArgs,
    #[command(flatten)]
    quadrature: QuadratureArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AxisArg {
    X,
    Y,
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    #[arg(long, allow_hyphen_values = true)]
    n: i64,
    #[arg(long, num_args = 2, value_names = ["I0", "J0"], default_values_t = [1, 1])]
    from: Vec<i64>,
    /// Ray direction in [0, π/2].
    #[arg(long, allow_hyphen_values = true, default_value_t = std::f64::consts::FRAC_PI_4)]
    gamma: f64,
    /// Report absorption on a boundary axis instead of a ray; scales are then site indices.
    #[arg(long, value_enum)]
    axis: Option<AxisArg>,
    #[arg(long, value_delimiter = ',', default_values_t = [8u32, 16, 32, 64])]
    scales: Vec<u32>,
    /// Final |ratio − 1| allowed (0.15 on rays, 0.2 on axes by default).
    #[arg(long)]
    threshold: Option<f64>,
    #[command(flatten)]
    truncation: TruncationArgs,
    #[command(flatten)]
    out: OutputArgs,
}

/// A rejected invocation (exit status 2).
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

/// Result of a subcommand: rendered output and whether its checks held.
struct Outcome {
    text: String,
    passed: bool,
}

fn state(v: &[i64], what: &str, interior: bool) -> anyhow::Result<(u32, u32)> {
    let (i, j) = (v[0], v[1]);
    let lo = if interior { 1 } else { 0 };
    if i < lo || j < lo || i > u32::MAX as i64 || j > u32::MAX as i64 {
        return Err(usage(format!(
            "{what} ({i}, {j}) must have coordinates ≥ {lo}"
        )));
    }
    Ok((i as u32, j as u32))
}

fn uniformization(n: i64) -> anyhow::Result<UniformizationF64> {
    UniformizationF64::from_order(n).map_err(anyhow::Error::from)
}

#[derive(Serialize)]
struct ModelMeta {
    n: u32,
    p10: Num,
    p1m1: Num,
    z0_re: Num,
    z0_im: Num,
    x1: Num,
    x4: Num,
    y1: String,
    y4: String,
    group_order: usize,
}

#[derive(Serialize)]
struct ElementRow {
    word: String,
    length: usize,
    sign: i32,
}

fn model_info(a: &ModelInfoArgs) -> anyhow::Result<Outcome> {
    let u = uniformization(a.n)?;
    let m = u.model;
    let b = m.discriminant_roots();
    let group = enumerate_group::<f64>(a.n)?;
    let passed = group.len() == 2 * m.n as usize;
    let text = match a.out.format {
        Format::Human => {
            let mut s = String::new();
            writeln!(s, "n            {}", m.n)?;
            writeln!(s, "p10          {}", fmt12(m.p10))?;
            writeln!(s, "p1m1         {}", fmt12(m.p1m1))?;
            writeln!(s, "z0           {} {:+.11e}i", fmt12(u.z0.re), u.z0.im)?;
            writeln!(s, "x1           {}", fmt12(b.x1))?;
            writeln!(s, "x4           {}", fmt12(b.x4))?;
            writeln!(s, "x1*x4        {}", fmt12(b.x1 * b.x4))?;
            writeln!(s, "y1           {}", b.y1)?;
            writeln!(s, "y4           {}", b.y4)?;
            writeln!(s, "group order  {}", group.len())?;
            writeln!(s, "word\tlength\tsign")?;
            for g in &group {
                writeln!(s, "{}\t{}\t{:+}", g.word_string(), g.length(), g.sign())?;
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("word,length,sign\n");
            for g in &group {
                writeln!(s, "{},{},{}", g.word_string(), g.length(), g.sign())?;
            }
            s
        }
        Format::Json => to_json(&Document {
            meta: ModelMeta {
                n: m.n,
                p10: Num(m.p10),
                p1m1: Num(m.p1m1),
                z0_re: Num(u.z0.re),
                z0_im: Num(u.z0.im),
                x1: Num(b.x1),
                x4: Num(b.x4),
                y1: b.y1.to_string(),
                y4: b.y4.to_string(),
                group_order: group.len(),
            },
            data: group
                .iter()
                .map(|g| ElementRow {
                    word: g.word_string(),
                    length: g.length(),
                    sign: g.sign(),
                })
                .collect(),
        }),
    };
    Ok(Outcome { text, passed })
}

#[derive(Serialize)]
struct HarmonicMeta {
    n: u32,
    imax: usize,
    jmax: usize,
    residual: Num,
    tolerance: Num,
    passed: bool,
}

#[derive(Serialize)]
struct HarmonicRow {
    i: usize,
    j: usize,
    value: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<Num>,
}

fn harmonic(a: &HarmonicArgs) -> anyhow::Result<Outcome> {
    let u = uniformization(a.n)?;
    if a.imax == 0 || a.jmax == 0 {
        return Err(usage("--imax and --jmax must be at least 1"));
    }
    let h = HarmonicEvaluatorF64::new(u);
    let n = h.n();
    let grid = h.grid(a.imax, a.jmax);
    let residual = h.check_harmonicity(a.imax, a.jmax).max(h.boundary_residual(a.imax.min(a.jmax)));
    let passed = residual <= HARMONIC_TOL;
    let closed = |i: usize, j: usize| closed_form::<f64>(n, i as f64, j as f64);
    let has_closed = closed(1, 1).is_some();
    let text = match a.out.format {
        Format::Human => {
            let mut s = String::new();
            writeln!(s, "f_{n} on [0, {}] x [0, {}]", a.imax, a.jmax)?;
            writeln!(
                s,
                "max mean-value residual {:.3e} (tolerance {:.0e})",
                residual, HARMONIC_TOL
            )?;
            writeln!(s, "i\tj\tvalue{}", if has_closed { "\tclosed_form" } else { "" })?;
            for (i, row) in grid.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    write!(s, "{i}\t{j}\t{}", fmt12(v))?;
                    if let Some(c) = closed(i, j) {
                        write!(s, "\t{}", fmt12(c))?;
                    }
                    writeln!(s)?;
                }
            }
            s
        }
        Format::Csv => {
            let mut s = String::from(if has_closed { "i,j,value,closed_form\n" } else { "i,j,value\n" });
            for (i, row) in grid.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    write!(s, "{i},{j},{}", quadrant_green::export::fmt17(v))?;
                    if let Some(c) = closed(i, j) {
                        write!(s, ",{}", quadrant_green::export::fmt17(c))?;
                    }
                    writeln!(s)?;
                }
            }
            s
        }
        Format::Json => {
            let mut data = Vec::new();
            for (i, row) in grid.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    data.push(HarmonicRow {
                        i,
                        j,
                        value: Num(v),
                        closed_form: closed(i, j).map(Num),
                    });
                }
            }
            to_json(&Document {
                meta: HarmonicMeta {
                    n,
                    imax: a.imax,
                    jmax: a.jmax,
                    residual: Num(residual),
                    tolerance: Num(HARMONIC_TOL),
                    passed,
                },
                data,
            })
        }
    };
    Ok(Outcome { text, passed })
}

#[derive(Serialize)]
struct Estimate {
    method: &'static str,
    value: Num,
    error: Option<Num>,
    note: Option<String>,
}

#[derive(Serialize)]
struct Delta {
    pair: String,
    relative: Num,
}

#[derive(Serialize)]
struct GreenMeta {
    n: u32,
    i0: u32,
    j0: u32,
    i: u32,
    j: u32,
    deltas: Vec<Delta>,
    passed: bool,
}

fn green(a: &GreenArgs) -> anyhow::Result<Outcome> {
    let u = uniformization(a.n)?;
    let n = u.n();
    let (i0, j0) = state(&a.from, "start", true)?;
    let wants = |m: Method| a.method == m || a.method == Method::All;
    // Only the asymptotic formula makes sense on the boundary.
    let (i, j) = state(&a.at, "target", a.method != Method::Asymptotic)?;
    if i == 0 {
        return Err(usage("the asymptotic formula needs i ≥ 1"));
    }
    let mut est: Vec<Estimate> = Vec::new();
    if wants(Method::Oracle) {
        let default = TruncationPolicy {
            initial_radius: 128,
            tolerance: 1e-6,
            max_doublings: 2,
        };
        let pol = a.truncation.policy(default);
        let sol = solve_green(
            &u.model,
            i0 as usize,
            j0 as usize,
            (i as usize, j as usize),
            &pol,
            a.truncation.solver.into(),
        )?;
        est.push(Estimate {
            method: "oracle",
            value: Num(sol.field.get(i as usize, j as usize)),
            error: sol.field.site_error(i as usize, j as usize).map(Num),
            note: Some(format!("radius {}", sol.solution.radius)),
        });
    }
    let valid = in_validity_region(i0, j0, i, j);
    if wants(Method::Contour) {
        let spec = ContourSpec {
            angle: a.quadrature.angle,
            panels: a.quadrature.panels,
            rel_tol: a.quadrature.rel_tol,
            max_panels: a.quadrature.max_panels,
            ..Default::default()
        };
        let r = green_by_contour(&u, i0, j0, i, j, &spec)?;
        est.push(Estimate {
            method: "contour",
            value: Num(r.value),
            error: Some(Num(r.error_estimate)),
            note: (!valid).then(|| "outside the validity region, not checked".to_string()),
        });
    }
    if wants(Method::Asymptotic) {
        let h = HarmonicEvaluatorF64::new(u);
        est.push(Estimate {
            method: "asymptotic",
            value: Num(theorem_rhs(&h, i0, j0, i, j)),
            error: None,
            note: (j == 0).then(|| "N_n(0) = 0 on the horizontal axis".to_string()),
        });
    }
    let mut deltas = Vec::new();
    let mut passed = true;
    for x in 0..est.len() {
        for y in x + 1..est.len() {
            let (a, b) = (&est[x], &est[y]);
            let rel = (a.value.0 - b.value.0).abs() / b.value.0.abs().max(a.value.0.abs());
            if a.method == "oracle" && b.method == "contour" && valid && !(rel <= CONTOUR_TOL) {
                passed = false;
            }
            deltas.push(Delta {
                pair: format!("{}/{}", a.method, b.method),
                relative: Num(rel),
            });
        }
    }
    let text = match a.out.format {
        Format::Human => {
            let mut s = String::new();
            writeln!(s, "G({i},{j}) from ({i0},{j0}), n = {n}")?;
            for e in &est {
                write!(s, "{:<11} {}", e.method, fmt12(e.value.0))?;
                if let Some(err) = e.error {
                    write!(s, "  ± {:.2e}", err.0)?;
                }
                if let Some(note) = &e.note {
                    write!(s, "  ({note})")?;
                }
                writeln!(s)?;
            }
            for d in &deltas {
                writeln!(s, "delta {:<18} {:.3e}", d.pair, d.relative.0)?;
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("method,i,j,value,error\n");
            for e in &est {
                let err = e.error.map(|x| quadrant_green::export::fmt17(x.0)).unwrap_or_default();
                writeln!(s, "{},{i},{j},{},{err}", e.method, quadrant_green::export::fmt17(e.value.0))?;
            }
            s
        }
        Format::Json => to_json(&Document {
            meta: GreenMeta {
                n,
                i0,
                j0,
                i,
                j,
                deltas,
                passed,
            },
            data: est,
        }),
    };
    Ok(Outcome { text, passed })
}

fn render_report(r: &AsymptoticReport<f64>, format: Format) -> anyhow::Result<String> {
    Ok(match format {
        Format::Csv => report_csv(r),
        Format::Json => report_json(r),
        Format::Human => {
            let mut s = String::new();
            let target = match r.ray {
                RayDescriptor::Direction { gamma } => format!("ray gamma = {gamma}"),
                RayDescriptor::Absorption { axis } => format!("absorption on the {axis:?} axis"),
            };
            writeln!(s, "n = {}, start ({}, {}), {target}", r.n, r.i0, r.j0)?;
            writeln!(s, "scale\ti\tj\texact\terror\tformula\tratio\tusable")?;
            for c in &r.cells {
                writeln!(
                    s,
                    "{}\t{}\t{}\t{}\t{:.2e}\t{}\t{}\t{}",
                    c.scale,
                    c.i,
                    c.j,
                    fmt12(c.exact),
                    c.error_bar,
                    fmt12(c.formula),
                    c.ratio.map(fmt12).unwrap_or_else(|| "-".into()),
                    c.usable
                )?;
            }
            let v = &r.verdict;
            writeln!(
                s,
                "last |ratio-1|: {:?}; decreasing {}; final {:.3e} < {}: {}",
                v.last_deviations, v.decreasing, v.final_deviation, v.threshold, v.passed
            )?;
            s
        }
    })
}

fn converge(a: &ConvergeArgs) -> anyhow::Result<Outcome> {
    let u = uniformization(a.n)?;
    let (i0, j0) = state(&a.from, "start", true)?;
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&a.gamma) {
        return Err(usage(format!("--gamma {} outside [0, π/2]", a.gamma)));
    }
    let h = HarmonicEvaluatorF64::new(u);
    let base = ReportOptions::default();
    let opts = ReportOptions {
        policy: a.truncation.policy(base.policy),
        solver: a.truncation.solver.into(),
        threshold: a
            .threshold
            .unwrap_or(if a.axis.is_some() { 0.2 } else { base.threshold }),
    };
    let report = match a.axis {
        None => convergence_report(&h, i0, j0, a.gamma, &a.scales, &opts)?,
        Some(ax) => {
            let axis = match ax {
                AxisArg::X => BoundaryAxis::X,
                AxisArg::Y => BoundaryAxis::Y,
            };
            absorption_report(&h, i0, j0, axis, &a.scales, &opts)?
        }
    };
    Ok(Outcome {
        text: render_report(&report, a.out.format)?,
        passed: report.verdict.passed,
    })
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("QGREEN_THREADS") {
        let k: usize = v
            .parse()
            .ok()
            .filter(|&k| k > 0)
            .ok_or_else(|| usage(format!("QGREEN_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| anyhow!("thread pool: {e}"))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    configure_threads()?;
    let (outcome, out) = match &cli.command {
        Command::ModelInfo(a) => (model_info(a)?, &a.out),
        Command::Harmonic(a) => (harmonic(a)?, &a.out),
        Command::Green(a) => (green(a)?, &a.out),
        Command::Converge(a) => (converge(a)?, &a.out),
    };
    match &out.output {
        Some(p) => std::fs::write(p, &outcome.text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{}", outcome.text),
    }
    Ok(outcome.passed)
}

fn is_usage(e: &anyhow::Error) -> bool {
    if e.downcast_ref::<Usage>().is_some() {
        return true;
    }
    matches!(
        e.downcast_ref::<Error>(),
        Some(
            Error::InvalidOrder(_)
                | Error::NegativeState { .. }
                | Error::NotInterior { .. }
                | Error::ConeIndex { .. }
                | Error::InvalidArgument(_)
                | Error::OutsideRegion(_)
        )
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("qgreen: check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("qgreen: {e:#}");
            ExitCode::from(if is_usage(&e) { 2 } else { 1 })
        }
    }
}
