pub mod barcode;
pub mod cone_calculus;
pub mod density;
pub mod gf2;
pub mod graph;
pub mod interleave;
pub mod io;
pub mod scalar;
pub mod tamefn;
pub mod twisted;

pub use graph::{CechCover, GraphPoint, MetricGraph, Region};
pub use scalar::{Ext, Scalar, Threshold};
pub use tamefn::TameFunction;

/// Exact rational scalar used throughout the reference pipeline.
pub type Rational = num_rational::BigRational;
