use super::Metric;
use crate::error::{Error, Result};

/// Largest set handled by the exhaustive δ-cardinality search.
pub const MAX_EXHAUSTIVE: usize = 20;

/// Size of a largest δ-separated subset: all pairwise distances strictly
/// greater than `delta`. Pairs at distance exactly `delta` are not separated.
pub fn delta_cardinality<P, M>(a: &[P], delta: f64, metric: &M) -> Result<usize>
where
    M: Metric<P> + ?Sized,
{
    if a.is_empty() {
        return Err(Error::Domain("δ-cardinality of an empty set".into()));
    }
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::Domain(format!("δ must be positive, got {delta}")));
    }
    if a.len() > MAX_EXHAUSTIVE {
        return Err(Error::Capacity {
            size: a.len(),
            limit: MAX_EXHAUSTIVE,
        });
    }
    // conflict[i]: points too close to i to share a separated subset with it
    let n = a.len();
    let mut conflict = vec![0u32; n];
    for i in 0..n {
        for j in i + 1..n {
            if metric.distance(&a[i], &a[j]) <= delta {
                conflict[i] |= 1 << j;
                conflict[j] |= 1 << i;
            }
        }
    }
    Ok(max_independent((1u32 << n) - 1, &conflict) as usize)
}

// Branch on the lowest remaining vertex: either drop it or take it and drop
// its neighbours.
fn max_independent(candidates: u32, conflict: &[u32]) -> u32 {
    if candidates == 0 {
        return 0;
    }
    let v = candidates.trailing_zeros() as usize;
    let rest = candidates & !(1 << v);
    if conflict[v] & rest == 0 {
        return 1 + max_independent(rest, conflict);
    }
    let take = 1 + max_independent(rest & !conflict[v], conflict);
    if take > rest.count_ones() {
        return take;
    }
    take.max(max_independent(rest, conflict))
}
