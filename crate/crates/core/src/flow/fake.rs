use super::{Flow, FlowKind, FlowResult};
use crate::error::{Error, Result};
use crate::numeric::{euclidean, simpson};

/// Speed `W(s, x)` along the horizontal trajectory through `x ∈ Σ`.
pub type SpeedField = Box<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>;

/// A state `(u, x_index)` of `ℝ × Σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FakePoint {
    pub u: f64,
    pub index: usize,
}

pub struct FakeSingularitySpec {
    /// Sample of Σ in coordinates.
    pub sigma: Vec<Vec<f64>>,
    /// Index of `x₀` in `sigma`.
    pub base: usize,
    pub speed: SpeedField,
}

impl FakeSingularitySpec {
    /// `W(s, x) = |s| + dist(x, x₀)`.
    pub fn standard(sigma: Vec<Vec<f64>>, base: usize) -> Result<Self> {
        let x0 = sigma
            .get(base)
            .cloned()
            .ok_or_else(|| Error::Spec(format!("base index {base} out of range")))?;
        Ok(Self {
            sigma,
            base,
            speed: Box::new(move |s, x| s.abs() + euclidean(x, &x0)),
        })
    }

    pub fn singular_point(&self) -> FakePoint {
        FakePoint {
            u: 0.0,
            index: self.base,
        }
    }

    /// `x_s = (-1, x₀)`.
    pub fn stable_marker(&self) -> FakePoint {
        FakePoint {
            u: -1.0,
            index: self.base,
        }
    }

    /// `x_u = (1, x₀)`.
    pub fn unstable_marker(&self) -> FakePoint {
        FakePoint {
            u: 1.0,
            index: self.base,
        }
    }
}

// Decades checked when testing that ∫ 1/W(s, x₀) ds diverges at s = 0.
const DECADES: i32 = 12;

/// Flow with horizontal trajectories `u̇ = W(u, x)`, `ẋ = 0`, integrated by
/// RK4. On the fiber of `x₀` the step is capped at `|u|/2 + 1e-12` so the
/// non-Lipschitz slowdown near `u = 0` is never stepped over.
pub struct FakeSingularityFlow {
    spec: FakeSingularitySpec,
    h: f64,
}

impl FakeSingularityFlow {
    /// Checks `W(0, x₀) = 0`, `W > 0` at the sampled states, and that
    /// `∫ ds / W(s, x₀)` does not shrink decade by decade towards `s = 0` on
    /// either side, which is the numerical form of the divergence condition.
    pub fn new(spec: FakeSingularitySpec, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Spec(format!("RK4 step must be positive, got {h}")));
        }
        let x0 = spec
            .sigma
            .get(spec.base)
            .ok_or_else(|| Error::Spec(format!("base index {} out of range", spec.base)))?;
        let w0 = (spec.speed)(0.0, x0);
        if w0 != 0.0 {
            return Err(Error::Spec(format!("W(0, x₀) = {w0}, expected 0")));
        }
        for (k, x) in spec.sigma.iter().enumerate() {
            for i in -8..=8 {
                let s = i as f64 / 8.0;
                if k == spec.base && i == 0 {
                    continue;
                }
                let w = (spec.speed)(s, x);
                if !(w > 0.0) {
                    return Err(Error::Spec(format!("W({s}, Σ[{k}]) = {w} is not positive")));
                }
            }
        }
        for side in [-1.0, 1.0] {
            let decade = |k: i32| -> Result<f64> {
                // ∫_{10^-(k+1)}^{10^-k} ds/W with s = e^v
                let (lo, hi) = (-(k + 1) as f64 * 10f64.ln(), -k as f64 * 10f64.ln());
                simpson(
                    |v| Ok(v.exp() / (spec.speed)(side * v.exp(), x0)),
                    lo,
                    hi,
                    16,
                )
            };
            let first = decade(0)?;
            let last = decade(DECADES)?;
            if !(last.is_finite() && first.is_finite() && last >= 0.5 * first) {
                return Err(Error::Spec(format!(
                    "∫ ds/W(s, x₀) appears to converge on the {} side (decade integrals {first} → {last})",
                    if side < 0.0 { "negative" } else { "positive" }
                )));
            }
        }
        Ok(Self { spec, h })
    }

    pub fn spec(&self) -> &FakeSingularitySpec {
        &self.spec
    }

    fn speed(&self, u: f64, x: &[f64]) -> Result<f64> {
        let w = (self.spec.speed)(u, x);
        if !(w >= 0.0) {
            return Err(Error::Spec(format!("W({u}, ·) = {w} is negative")));
        }
        Ok(w)
    }
}

impl Flow for FakeSingularityFlow {
    type State = FakePoint;

    fn kind(&self) -> FlowKind {
        FlowKind::FakeSingularity
    }

    fn advance(&self, p: &FakePoint, t: f64) -> Result<FlowResult<FakePoint>> {
        let x = self
            .spec
            .sigma
            .get(p.index)
            .ok_or_else(|| Error::Domain(format!("Σ index {} out of range", p.index)))?;
        if !p.u.is_finite() {
            return Err(Error::Domain(format!("fiber coordinate {}", p.u)));
        }
        let singular_fiber = p.index == self.spec.base;
        let dir = t.signum();
        let mut u = p.u;
        let mut done = 0.0;
        let total = t.abs();
        while done < total {
            if self.speed(u, x)? == 0.0 {
                // fixed point
                break;
            }
            let mut dt = self.h.min(total - done);
            if singular_fiber {
                dt = dt.min(0.5 * u.abs() + 1e-12);
            }
            let step = dir * dt;
            let k1 = self.speed(u, x)?;
            let k2 = self.speed(u + 0.5 * step * k1, x)?;
            let k3 = self.speed(u + 0.5 * step * k2, x)?;
            let k4 = self.speed(u + step * k3, x)?;
            let next = u + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if !next.is_finite() {
                return Err(Error::Divergence {
                    last_time: dir * done,
                });
            }
            if singular_fiber && next.signum() != u.signum() {
                // never step across the singular point
                u *= 0.5;
            } else {
                u = next;
            }
            done += dt;
        }
        Ok(FlowResult::Interior(FakePoint { u, index: p.index }))
    }
}
