use super::{catenary_roots, DiscreteSystem, PairSystem};
use crate::block::{Block, DEFAULT_T_MAX};
use crate::catenary::{catenary_bvp, BvpSpec};
use crate::error::{Error, Result};
use crate::flow::{SuspensionFlow, SuspensionPoint};
use crate::metric::Metric;

type PairPoint<D> = (<D as DiscreteSystem>::Point, <D as DiscreteSystem>::Point);

/// Catenary function of `f × f` obtained from the suspension flow with
/// `ν = 1/ln λ_u`, so one return time multiplies by `e^T = λ_u`.
///
/// The block in the suspension is `{Î ≤ δ}` where `Î(s, (x, y))`
/// interpolates linearly in `s` between `đ(x, y)` and `đ(fx, fy)`. The
/// continuous catenary field with boundary data `δ` is evaluated at
/// `π(0, (x, y))`.
pub struct SuspensionCatenary<D: DiscreteSystem> {
    flow: SuspensionFlow<PairSystem<D>>,
    block: Block<SuspensionPoint<PairPoint<D>>>,
    spec: BvpSpec<SuspensionPoint<PairPoint<D>>>,
    t_max: f64,
}

impl<D> SuspensionCatenary<D>
where
    D: DiscreteSystem + Clone + Send + Sync + 'static,
    D::Point: Send + Sync + 'static,
{
    pub fn new<M>(map: D, metric: M, delta: f64) -> Result<Self>
    where
        M: Metric<D::Point> + Clone + Send + Sync + 'static,
    {
        let lu = catenary_roots().1;
        let period = lu.ln();
        let flow = SuspensionFlow::new(PairSystem(map.clone()), 1.0 / period)?;
        let m = metric.clone();
        let indicator = move |p: &SuspensionPoint<PairPoint<D>>| -> Result<f64> {
            let d0 = m.distance(&p.x.0, &p.x.1);
            if p.s == 0.0 {
                return Ok(d0);
            }
            let d1 = m.distance(&map.forward(&p.x.0)?, &map.forward(&p.x.1)?);
            let w = p.s / period;
            Ok((1.0 - w) * d0 + w * d1)
        };
        let block = Block::new(indicator, delta)?
            .with_lambda(move |p: &SuspensionPoint<PairPoint<D>>| metric.distance(&p.x.0, &p.x.1));
        let spec = BvpSpec::constant(delta, 1.0)?;
        Ok(Self {
            flow,
            block,
            spec,
            t_max: DEFAULT_T_MAX,
        })
    }

    pub fn with_horizon(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn flow(&self) -> &SuspensionFlow<PairSystem<D>> {
        &self.flow
    }

    pub fn block(&self) -> &Block<SuspensionPoint<PairPoint<D>>> {
        &self.block
    }

    pub fn period(&self) -> f64 {
        self.flow.period()
    }

    /// Value at an arbitrary point of the suspension.
    pub fn eval_at(&self, p: &SuspensionPoint<PairPoint<D>>) -> Result<f64> {
        catenary_bvp(&self.flow, &self.block, &self.spec, p, self.t_max)
    }

    /// `L(x, y) = L̂(π(0, (x, y)))`.
    pub fn eval(&self, x: &D::Point, y: &D::Point) -> Result<f64> {
        self.eval_at(&SuspensionPoint {
            s: 0.0,
            x: (x.clone(), y.clone()),
        })
    }

    /// Values at `(f^k x, f^k y)` for the consecutive `k` around 0 whose
    /// pairs lie in the block, at most `reach` steps each way.
    pub fn orbit_values(&self, x: &D::Point, y: &D::Point, reach: i64) -> Result<Vec<(i64, f64)>> {
        let map = &self.flow.map().0;
        let inside = |k: i64| -> Result<Option<(D::Point, D::Point)>> {
            let p = (map.iterate(x, k)?, map.iterate(y, k)?);
            let d = self.block.indicator(&SuspensionPoint {
                s: 0.0,
                x: p.clone(),
            })?;
            Ok((d <= self.block.delta()).then_some(p))
        };
        if inside(0)?.is_none() {
            return Err(Error::Domain("pair outside the block".into()));
        }
        let mut lo = 0;
        while lo > -reach && inside(lo - 1)?.is_some() {
            lo -= 1;
        }
        let mut out = Vec::new();
        let mut k = lo;
        while k - lo <= 2 * reach {
            match inside(k)? {
                Some(p) => out.push((k, self.eval(&p.0, &p.1)?)),
                None => break,
            }
            k += 1;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::{recurrence_residual, FullShift, ShiftMetric, SymbolicPoint};

    #[test]
    fn diagonal_is_zero_and_recurrence_holds() {
        let sc = SuspensionCatenary::new(FullShift, ShiftMetric::catenary(), 0.5).unwrap();
        let x = SymbolicPoint::from_ones([-2, 4]);
        assert_eq!(sc.eval(&x, &x).unwrap(), 0.0);
        let values = sc.orbit_values(&x, &SymbolicPoint::zero(), 10).unwrap();
        assert!(values.len() >= 3, "{values:?}");
        assert!(recurrence_residual(&values) < 1e-6, "{values:?}");
    }
}
