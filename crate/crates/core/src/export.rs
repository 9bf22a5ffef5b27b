//! CSV and JSON serialization of lattice fields and asymptotic reports.
//!
//! JSON numbers carry 17 significant digits; non-finite values become `null`.
//! CSV rows start with `i,j,value` and optionally `error`.

use serde::Serialize;
use serde_json::value::RawValue;

use crate::asymptotics::{AsymptoticReport, BoundaryAxis, RayDescriptor};
use crate::green::LatticeField;
use crate::scalar::Real;

/// `x` with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// `x` with 12 significant digits, for human-readable output.
pub fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

/// A number serialized with 17 significant digits (`null` if not finite).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        RawValue::from_string(fmt17(self.0))
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    }
}

#[derive(Serialize)]
struct FieldMeta<'a> {
    n: u32,
    i0: usize,
    j0: usize,
    kind: &'a str,
    imax: usize,
    jmax: usize,
    radius: usize,
    error_estimate: Num,
}

#[derive(Serialize)]
struct FieldRow {
    i: usize,
    j: usize,
    value: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<Num>,
}

/// Top-level `{meta, data}` layout shared by every JSON output.
#[derive(Serialize)]
pub struct Document<M, R> {
    pub meta: M,
    pub data: Vec<R>,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<S: Serialize>(doc: &S) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn field_csv<T: Real>(field: &LatticeField<T>) -> String {
    let with_err = field.site_errors.is_some();
    let mut out = String::from(if with_err { "i,j,value,error\n" } else { "i,j,value\n" });
    for (i, j, v) in field.iter() {
        out.push_str(&format!("{i},{j},{}", fmt17(v.as_f64())));
        if let Some(e) = field.site_error(i, j) {
            out.push_str(&format!(",{}", fmt17(e.as_f64())));
        }
        out.push('\n');
    }
    out
}

pub fn field_json<T: Real>(field: &LatticeField<T>) -> String {
    let meta = FieldMeta {
        n: field.n,
        i0: field.i0,
        j0: field.j0,
        kind: field.kind.name(),
        imax: field.imax,
        jmax: field.jmax,
        radius: field.radius,
        error_estimate: Num(field.error_estimate.as_f64()),
    };
    let data = field
        .iter()
        .map(|(i, j, v)| FieldRow {
            i,
            j,
            value: Num(v.as_f64()),
            error: field.site_error(i, j).map(|e| Num(e.as_f64())),
        })
        .collect();
    to_json(&Document { meta, data })
}

#[derive(Serialize)]
struct ReportMeta {
    n: u32,
    i0: u32,
    j0: u32,
    ray: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<Num>,
    last_deviations: Vec<Num>,
    decreasing: bool,
    final_deviation: Num,
    threshold: Num,
    passed: bool,
}

#[derive(Serialize)]
struct ReportRow {
    i: u32,
    j: u32,
    value: Num,
    error: Num,
    formula: Num,
    ratio: Option<Num>,
    usable: bool,
    scale: u32,
}

fn ray_name(ray: &RayDescriptor) -> (&'static str, Option<f64>) {
    match *ray {
        RayDescriptor::Direction { gamma } => ("direction", Some(gamma)),
        RayDescriptor::Absorption { axis: BoundaryAxis::X } => ("absorption-x", None),
        RayDescriptor::Absorption { axis: BoundaryAxis::Y } => ("absorption-y", None),
    }
}

pub fn report_csv<T: Real>(report: &AsymptoticReport<T>) -> String {
    let mut out = String::from("i,j,value,error,formula,ratio,usable,scale\n");
    for c in &report.cells {
        let ratio = c.ratio.map(|r| fmt17(r.as_f64())).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            c.i,
            c.j,
            fmt17(c.exact.as_f64()),
            fmt17(c.error_bar.as_f64()),
            fmt17(c.formula.as_f64()),
            ratio,
            c.usable,
            c.scale
        ));
    }
    out
}

pub fn report_json<T: Real>(report: &AsymptoticReport<T>) -> String {
    let (ray, gamma) = ray_name(&report.ray);
    let v = &report.verdict;
    let meta = ReportMeta {
        n: report.n,
        i0: report.i0,
        j0: report.j0,
        ray,
        gamma: gamma.map(Num),
        last_deviations: v.last_deviations.iter().map(|&d| Num(d)).collect(),
        decreasing: v.decreasing,
        final_deviation: Num(v.final_deviation),
        threshold: Num(v.threshold),
        passed: v.passed,
    };
    let data = report
        .cells
        .iter()
        .map(|c| ReportRow {
            i: c.i,
            j: c.j,
            value: Num(c.exact.as_f64()),
            error: Num(c.error_bar.as_f64()),
            formula: Num(c.formula.as_f64()),
            ratio: c.ratio.map(|r| Num(r.as_f64())),
            usable: c.usable,
            scale: c.scale,
        })
        .collect();
    to_json(&Document { meta, data })
}
