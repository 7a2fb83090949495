use super::Metric;
use crate::error::{Error, Result};

/// Default number of reference points in a Whitney size function.
pub const DEFAULT_DEPTH: usize = 16;

/// Truncated Whitney size function: reference points `q_1..q_m` with weights
/// `2^-i`.
///
/// The untruncated construction needs a dense sequence. With finitely many
/// references, `μ(A) = 0` only certifies that no reference separates the
/// points of `A`, so callers should choose references that separate the sets
/// they compare.
#[derive(Debug, Clone)]
pub struct SizeFunctionSpec<P> {
    refs: Vec<P>,
}

impl<P: Clone> SizeFunctionSpec<P> {
    /// Uses the given references in order. They must be pairwise distinct.
    pub fn new<M: Metric<P> + ?Sized>(refs: Vec<P>, metric: &M) -> Result<Self> {
        if refs.is_empty() {
            return Err(Error::Spec(
                "size function needs at least one reference".into(),
            ));
        }
        for i in 0..refs.len() {
            for j in i + 1..refs.len() {
                if metric.distance(&refs[i], &refs[j]) == 0.0 {
                    return Err(Error::Spec(format!(
                        "reference points {i} and {j} coincide"
                    )));
                }
            }
        }
        Ok(Self { refs })
    }

    /// Deterministic farthest-point sampling: start from `sample[0]`, then
    /// repeatedly take the point farthest from those already chosen (lowest
    /// index on ties). Stops early if the sample runs out of distinct points.
    pub fn farthest_point<M: Metric<P> + ?Sized>(
        sample: &[P],
        depth: usize,
        metric: &M,
    ) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::Domain(
                "farthest-point sampling of an empty sample".into(),
            ));
        }
        let mut chosen = vec![0usize];
        let mut gap: Vec<f64> = sample
            .iter()
            .map(|p| metric.distance(p, &sample[0]))
            .collect();
        while chosen.len() < depth {
            let (best, best_gap) =
                gap.iter()
                    .copied()
                    .enumerate()
                    .fold(
                        (0, -1.0),
                        |acc, (i, g)| if g > acc.1 { (i, g) } else { acc },
                    );
            if best_gap <= 0.0 {
                break;
            }
            chosen.push(best);
            for (i, p) in sample.iter().enumerate() {
                gap[i] = gap[i].min(metric.distance(p, &sample[best]));
            }
        }
        let refs = chosen.into_iter().map(|i| sample[i].clone()).collect();
        Ok(Self { refs })
    }
}

impl<P> SizeFunctionSpec<P> {
    pub fn refs(&self) -> &[P] {
        &self.refs
    }

    pub fn depth(&self) -> usize {
        self.refs.len()
    }

    /// Weight of the `i`-th reference (1-based), `2^-i`.
    pub fn weight(&self, i: usize) -> f64 {
        0.5f64.powi(i as i32)
    }
}

/// Whitney size `μ(A) = Σ_i μ_i(A) / 2^i` where
/// `μ_i(A) = max_{x∈A} dist(q_i, x) - min_{x∈A} dist(q_i, x)`.
pub fn whitney_size<P, M>(a: &[P], spec: &SizeFunctionSpec<P>, metric: &M) -> Result<f64>
where
    M: Metric<P> + ?Sized,
{
    if a.is_empty() {
        return Err(Error::Domain("size of an empty set".into()));
    }
    let mut total = 0.0;
    for (k, q) in spec.refs.iter().enumerate() {
        let (lo, hi) = a
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                let d = metric.distance(q, x);
                (lo.min(d), hi.max(d))
            });
        total += (hi - lo) * spec.weight(k + 1);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Euclidean;

    #[test]
    fn singleton_has_zero_size() {
        let spec = SizeFunctionSpec::new(vec![0.0, 1.0, 0.5], &Euclidean).unwrap();
        assert_eq!(whitney_size(&[0.37], &spec, &Euclidean).unwrap(), 0.0);
    }

    #[test]
    fn endpoints_of_unit_interval() {
        // μ_1 = μ_2 = 1, so μ = 1/2 + 1/4.
        let spec = SizeFunctionSpec::new(vec![0.0, 1.0], &Euclidean).unwrap();
        let mu = whitney_size(&[0.0, 1.0], &spec, &Euclidean).unwrap();
        assert!((mu - 0.75).abs() < 1e-15);
    }

    #[test]
    fn proper_subset_is_smaller() {
        let spec = SizeFunctionSpec::new(vec![0.0, 1.0], &Euclidean).unwrap();
        let small = whitney_size(&[0.2, 0.5], &spec, &Euclidean).unwrap();
        let big = whitney_size(&[0.2, 0.5, 0.9], &spec, &Euclidean).unwrap();
        assert!(small < big);
    }

    #[test]
    fn duplicate_refs_rejected() {
        assert!(SizeFunctionSpec::new(vec![0.0, 0.0], &Euclidean).is_err());
    }

    #[test]
    fn farthest_point_order() {
        let sample = vec![0.0, 0.1, 0.5, 1.0, 0.9];
        let spec = SizeFunctionSpec::farthest_point(&sample, 3, &Euclidean).unwrap();
        assert_eq!(spec.refs(), &[0.0, 1.0, 0.5]);
    }

    #[test]
    fn farthest_point_stops_on_duplicates() {
        let sample = vec![2.0, 2.0, 2.0];
        let spec = SizeFunctionSpec::farthest_point(&sample, 16, &Euclidean).unwrap();
        assert_eq!(spec.depth(), 1);
    }
}
