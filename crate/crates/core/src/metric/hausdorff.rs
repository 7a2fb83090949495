use super::Metric;
use crate::error::{Error, Result};

/// Hausdorff distance between two non-empty finite sets:
/// `max(sup_a dist(a, B), sup_b dist(b, A))`.
pub fn hausdorff_distance<P, M>(a: &[P], b: &[P], metric: &M) -> Result<f64>
where
    M: Metric<P> + ?Sized,
{
    if a.is_empty() || b.is_empty() {
        return Err(Error::Domain("hausdorff distance of an empty set".into()));
    }
    Ok(directed(a, b, metric).max(directed(b, a, metric)))
}

fn directed<P, M: Metric<P> + ?Sized>(from: &[P], to: &[P], metric: &M) -> f64 {
    from.iter()
        .map(|p| {
            to.iter()
                .map(|q| metric.distance(p, q))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Largest pairwise distance; zero for singletons.
pub fn diameter<P, M>(a: &[P], metric: &M) -> Result<f64>
where
    M: Metric<P> + ?Sized,
{
    if a.is_empty() {
        return Err(Error::Domain("diameter of an empty set".into()));
    }
    let mut d = 0.0f64;
    for (i, p) in a.iter().enumerate() {
        for q in &a[i + 1..] {
            d = d.max(metric.distance(p, q));
        }
    }
    Ok(d)
}
