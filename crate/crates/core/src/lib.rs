//! Green functions of the zero-drift walk in the quarter plane with jumps
//! `(±1, 0)`, `±(1, −1)`, killed on the axes, whose group is dihedral of
//! order `2n`.
//!
//! The crate provides the rational uniformization of the kernel curve, the
//! group action, the harmonic polynomial `f_n`, a brute-force Green-function
//! oracle, the contour-integral representation of the Green function and the
//! closed-form asymptotics. Everything is generic over [`Real`] (`f32`/`f64`);
//! the `*F64` aliases fix the scalar to `f64`.

pub mod scalar;
pub mod sphere;
pub mod error;
pub mod walk_model;
pub mod uniformization;
pub mod group;
pub mod series;
pub mod harmonic;
pub mod green;
pub mod quadrature;
pub mod contour;
pub mod asymptotics;
pub mod export;

pub use error::{Error, Result};
pub use scalar::{Cx, Real};
pub use sphere::SpherePoint;
pub use walk_model::{make_model, Axis, State, WalkModel};
pub use uniformization::{Cone, Uniformization};
pub use series::ComplexSeries;
pub use harmonic::HarmonicEvaluator;
pub use contour::{ContourSpec, SaddleData};
pub use asymptotics::AsymptoticReport;

pub type WalkModelF64 = WalkModel<f64>;
pub type UniformizationF64 = Uniformization<f64>;
pub type HarmonicEvaluatorF64 = HarmonicEvaluator<f64>;
pub type ComplexSeriesF64 = ComplexSeries<f64>;
pub type ContourSpecF64 = ContourSpec<f64>;
pub type AsymptoticReportF64 = AsymptoticReport<f64>;
