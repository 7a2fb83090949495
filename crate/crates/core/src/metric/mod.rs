//! Metric-space primitives over finite samples.
//!
//! Point sets are plain slices paired with a [`Metric`] oracle; nothing here
//! assumes coordinates, so the same routines serve Euclidean samples,
//! symbolic sequences and points of a suspension.

mod axioms;
mod gluing;
mod hausdorff;
mod separation;
mod size;

pub use axioms::{
    check_metric_axioms, check_metric_axioms_on_triples, AxiomKind, AxiomReport, AxiomViolation,
    DEFAULT_AXIOM_TOL,
};
pub use gluing::{glue_local_metric, is_locally_minimizing, LocalMetric, MetricTable};
pub use hausdorff::{diameter, hausdorff_distance};
pub use separation::{delta_cardinality, MAX_EXHAUSTIVE};
pub use size::{whitney_size, SizeFunctionSpec, DEFAULT_DEPTH};

/// A distance oracle on points of type `P`.
pub trait Metric<P: ?Sized> {
    fn distance(&self, a: &P, b: &P) -> f64;
}

impl<P: ?Sized, F> Metric<P> for F
where
    F: Fn(&P, &P) -> f64,
{
    fn distance(&self, a: &P, b: &P) -> f64 {
        self(a, b)
    }
}

/// Euclidean distance on coordinate vectors.
#[derive(Debug, Clone, Copy, Default)]
pub struct Euclidean;

impl Metric<[f64]> for Euclidean {
    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        crate::numeric::euclidean(a, b)
    }
}

impl Metric<Vec<f64>> for Euclidean {
    fn distance(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        crate::numeric::euclidean(a, b)
    }
}

impl Metric<f64> for Euclidean {
    fn distance(&self, a: &f64, b: &f64) -> f64 {
        (a - b).abs()
    }
}
