use serde::Serialize;

use super::{catenary_roots, DiscreteSystem, ShiftMetric, SymbolicPoint};
use crate::error::{Error, Result};
use crate::metric::{diameter, LocalMetric, Metric, MAX_EXHAUSTIVE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Separation {
    /// `x = y`; nothing to separate.
    Excluded,
    /// First iterate (in the order 0, 1, −1, 2, −2, …) with distance `> δ`.
    At(i64),
    Unresolved,
}

// 0, 1, −1, 2, −2, …, N, −N
fn search_order(n: i64) -> impl Iterator<Item = i64> {
    std::iter::once(0).chain((1..=n).flat_map(|k| [k, -k]))
}

/// For each pair, the first `n` with `|n| ≤ n_max` and
/// `dist(fⁿx, fⁿy) > δ`.
pub fn expansivity_probe<D, M>(
    map: &D,
    metric: &M,
    delta: f64,
    pairs: &[(D::Point, D::Point)],
    n_max: i64,
) -> Result<Vec<Separation>>
where
    D: DiscreteSystem,
    M: Metric<D::Point> + ?Sized,
{
    pairs
        .iter()
        .map(|(x, y)| {
            if x == y {
                return Ok(Separation::Excluded);
            }
            for n in search_order(n_max) {
                if metric.distance(&map.iterate(x, n)?, &map.iterate(y, n)?) > delta {
                    return Ok(Separation::At(n));
                }
            }
            Ok(Separation::Unresolved)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperspaceTrace<P> {
    /// `g^k(A)` for `k = 0, 1, …, n` (or `0, −1, …, n` when `n < 0`).
    pub iterates: Vec<Vec<P>>,
    pub diameters: Vec<f64>,
}

/// Iterates of `g(A) = {f(x) : x ∈ A}` with the diameter of each.
pub fn hyperspace_iterate<D, M>(
    map: &D,
    metric: &M,
    a: &[D::Point],
    n: i64,
) -> Result<HyperspaceTrace<D::Point>>
where
    D: DiscreteSystem,
    M: Metric<D::Point> + ?Sized,
{
    check_capacity(a)?;
    let step = n.signum();
    let mut current = a.to_vec();
    let mut iterates = vec![current.clone()];
    let mut diameters = vec![diameter(&current, metric)?];
    for _ in 0..n.unsigned_abs() {
        current = current
            .iter()
            .map(|x| map.iterate(x, step))
            .collect::<Result<_>>()?;
        diameters.push(diameter(&current, metric)?);
        iterates.push(current.clone());
    }
    Ok(HyperspaceTrace {
        iterates,
        diameters,
    })
}

/// First `k` (in the order 0, 1, −1, …) with `|k| ≤ n_max` and
/// `diam(g^k A) > δ`, or `None` if `A` stays in `K_δ(X)`.
pub fn isolation_probe<D, M>(
    map: &D,
    metric: &M,
    a: &[D::Point],
    delta: f64,
    n_max: i64,
) -> Result<Option<i64>>
where
    D: DiscreteSystem,
    M: Metric<D::Point> + ?Sized,
{
    check_capacity(a)?;
    for k in search_order(n_max) {
        let image: Vec<D::Point> = a.iter().map(|x| map.iterate(x, k)).collect::<Result<_>>()?;
        if diameter(&image, metric)? > delta {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

fn check_capacity<P>(a: &[P]) -> Result<()> {
    if a.is_empty() {
        return Err(Error::Domain("empty hyperspace point".into()));
    }
    if a.len() > MAX_EXHAUSTIVE {
        return Err(Error::Capacity {
            size: a.len(),
            limit: MAX_EXHAUSTIVE,
        });
    }
    Ok(())
}

/// `D_x(y, z) = đ({x, y}, {x, z})` for a pseudo-metric `đ` on unordered
/// pairs, defined for `y, z` within `radius` of `x`.
pub struct PairLocalMetric<P, A, H> {
    ambient: A,
    pair_metric: H,
    radius: f64,
    _point: std::marker::PhantomData<fn(&P)>,
}

impl<P, A, H> PairLocalMetric<P, A, H>
where
    A: Metric<P>,
    H: Fn(&(P, P), &(P, P)) -> f64,
{
    pub fn new(ambient: A, pair_metric: H, radius: f64) -> Self {
        Self {
            ambient,
            pair_metric,
            radius,
            _point: std::marker::PhantomData,
        }
    }
}

impl<P, A, H> LocalMetric<P> for PairLocalMetric<P, A, H>
where
    P: Clone,
    A: Metric<P>,
    H: Fn(&(P, P), &(P, P)) -> f64,
{
    fn radius(&self) -> f64 {
        self.radius
    }

    fn eval(&self, x: &P, y: &P, z: &P) -> Result<f64> {
        for (name, p) in [("y", y), ("z", z)] {
            let d = self.ambient.distance(x, p);
            if !(d <= self.radius) {
                return Err(Error::Domain(format!(
                    "{name} is at distance {d} from the base point, beyond the radius {}",
                    self.radius
                )));
            }
        }
        Ok((self.pair_metric)(
            &(x.clone(), y.clone()),
            &(x.clone(), z.clone()),
        ))
    }
}

/// Pseudo-metric on unordered pairs of the full shift: the shift metric
/// between the disagreement patterns `x ⊕ y`. It vanishes on the diagonal
/// `{x, x}` and inherits the catenary relation from the shift metric.
pub fn xor_pair_metric(
    p: &(SymbolicPoint, SymbolicPoint),
    q: &(SymbolicPoint, SymbolicPoint),
) -> f64 {
    let m = ShiftMetric::catenary();
    m.distance(&p.0.xor(&p.1), &q.0.xor(&q.1))
}

type ShiftLocal = PairLocalMetric<
    SymbolicPoint,
    ShiftMetric,
    fn(&(SymbolicPoint, SymbolicPoint), &(SymbolicPoint, SymbolicPoint)) -> f64,
>;

/// Catenary local metric on the full shift built from [`xor_pair_metric`].
pub fn shift_local_metric(radius: f64) -> ShiftLocal {
    debug_assert!(catenary_roots().1 > 1.0);
    PairLocalMetric::new(ShiftMetric::catenary(), xor_pair_metric as _, radius)
}
