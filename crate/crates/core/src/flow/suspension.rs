use super::{Flow, FlowKind, FlowResult};
use crate::discrete::DiscreteSystem;
use crate::error::{Error, Result};

/// The point `π(s, x)` of the suspension, normalized to `s ∈ [0, T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuspensionPoint<P> {
    pub s: f64,
    pub x: P,
}

/// Suspension of a homeomorphism with return time `T = 1/ν`, under the
/// identification `(s + T, x) ~ (s, f(x))`.
#[derive(Debug, Clone)]
pub struct SuspensionFlow<D> {
    map: D,
    nu: f64,
}

impl<D: DiscreteSystem> SuspensionFlow<D> {
    pub fn new(map: D, nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::Spec(format!(
                "suspension rate ν must be positive, got {nu}"
            )));
        }
        Ok(Self { map, nu })
    }

    pub fn map(&self) -> &D {
        &self.map
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn period(&self) -> f64 {
        1.0 / self.nu
    }

    /// Number of applications of `f` performed by `advance(p, t)`.
    pub fn wraps(&self, p: &SuspensionPoint<D::Point>, t: f64) -> i64 {
        self.split(p.s + t).0
    }

    // (k, s') with s + t = kT + s' and s' ∈ [0, T).
    fn split(&self, total: f64) -> (i64, f64) {
        let period = self.period();
        let mut k = (total / period).floor();
        let mut s = total - k * period;
        if s >= period {
            s -= period;
            k += 1.0;
        }
        if s < 0.0 {
            s += period;
            k -= 1.0;
        }
        if s >= period {
            s = 0.0;
            k += 1.0;
        }
        (k as i64, s)
    }
}

impl<D: DiscreteSystem> Flow for SuspensionFlow<D> {
    type State = SuspensionPoint<D::Point>;

    fn kind(&self) -> FlowKind {
        FlowKind::Suspension
    }

    fn advance(&self, p: &Self::State, t: f64) -> Result<FlowResult<Self::State>> {
        if !(p.s >= 0.0 && p.s < self.period()) {
            return Err(Error::Domain(format!(
                "fiber coordinate {} outside [0, {})",
                p.s,
                self.period()
            )));
        }
        if t == 0.0 {
            return Ok(FlowResult::Interior(p.clone()));
        }
        let (k, s) = self.split(p.s + t);
        let x = self.map.iterate(&p.x, k)?;
        Ok(FlowResult::Interior(SuspensionPoint { s, x }))
    }
}
