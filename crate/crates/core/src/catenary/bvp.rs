use std::sync::Arc;

use super::ScalarField;
use crate::block::{hit_times, Block};
use crate::error::{Error, Result};
use crate::flow::Flow;
use crate::numeric::central_first;

type Field<S> = Arc<dyn Fn(&S) -> Result<f64> + Send + Sync>;
type Pseudo<S> = Arc<dyn Fn(&S, &S) -> Result<f64> + Send + Sync>;

/// Boundary data and exponent for the catenary boundary value problem on a
/// block.
pub struct BvpSpec<S> {
    boundary: Field<S>,
    pub a: f64,
    /// Reject non-positive boundary values.
    pub require_positive: bool,
}

impl<S> Clone for BvpSpec<S> {
    fn clone(&self) -> Self {
        Self {
            boundary: self.boundary.clone(),
            a: self.a,
            require_positive: self.require_positive,
        }
    }
}

impl<S> BvpSpec<S> {
    pub fn new<G>(boundary: G, a: f64) -> Result<Self>
    where
        G: Fn(&S) -> Result<f64> + Send + Sync + 'static,
    {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Spec(format!(
                "exponent a must be a positive constant, got {a}"
            )));
        }
        Ok(Self {
            boundary: Arc::new(boundary),
            a,
            require_positive: true,
        })
    }

    /// `f ≡ value`.
    pub fn constant(value: f64, a: f64) -> Result<Self>
    where
        S: 'static,
    {
        Self::new(move |_: &S| Ok(value), a)
    }

    pub fn boundary(&self, x: &S) -> Result<f64> {
        let v = (self.boundary)(x)?;
        if self.require_positive && !(v > 0.0) {
            return Err(Error::Spec(format!("boundary value {v} is not positive")));
        }
        Ok(v)
    }
}

/// The solution `L₂` of `L̈₂ = a²L₂` on the block with `L₂ = f` on the
/// boundary:
///
/// - transient: `[f(π_s x) sinh(aT^u) − f(π_u x) sinh(aT^s)] / sinh(aT)`,
/// - `W^s`: `f(π_s x) e^{aT^s}`, `W^u`: `f(π_u x) e^{−aT^u}`,
/// - Λ: `0`, boundary points: `f(x)`.
///
/// The sinh ratios are rewritten with `expm1` so that no intermediate
/// overflows for any finite `T`.
pub fn catenary_bvp<F: Flow>(
    flow: &F,
    block: &Block<F::State>,
    spec: &BvpSpec<F::State>,
    x: &F::State,
    t_max: f64,
) -> Result<f64> {
    if block.on_boundary(x)? {
        return spec.boundary(x);
    }
    let h = hit_times(flow, block, x, t_max)?;
    let a = spec.a;
    match (&h.pi_s, &h.pi_u) {
        (None, None) => {
            if !h.in_lambda() {
                return Err(Error::Unresolved(format!(
                    "orbit stays in the block for |t| ≤ {t_max} away from Λ"
                )));
            }
            Ok(0.0)
        }
        (Some(ps), None) => Ok(spec.boundary(ps)? * (a * h.t_s).exp()),
        (None, Some(pu)) => Ok(spec.boundary(pu)? * (-a * h.t_u).exp()),
        (Some(ps), Some(pu)) => {
            let fs = spec.boundary(ps)?;
            let fu = spec.boundary(pu)?;
            let total = h.total();
            if total == 0.0 {
                return Ok(fu);
            }
            let den = (-2.0 * a * total).exp_m1();
            // sinh(aT^u)/sinh(aT) and −sinh(aT^s)/sinh(aT)
            let cs = (a * h.t_s).exp() * (-2.0 * a * h.t_u).exp_m1() / den;
            let cu = (-a * h.t_u).exp() * (2.0 * a * h.t_s).exp_m1() / den;
            Ok(fs * cs + fu * cu)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rate {
    /// `L̇ = aL`.
    Growth,
    /// `L̇ = −aL`.
    Decay,
}

/// A field with exact exponential growth or decay along orbits.
pub struct RateField<S> {
    field: Field<S>,
    pub a: f64,
    pub rate: Rate,
}

impl<S> RateField<S> {
    pub fn new<G>(field: G, a: f64, rate: Rate) -> Self
    where
        G: Fn(&S) -> Result<f64> + Send + Sync + 'static,
    {
        Self {
            field: Arc::new(field),
            a,
            rate,
        }
    }

    pub fn eval(&self, x: &S) -> Result<f64> {
        (self.field)(x)
    }
}

/// A pseudo-metric with exact exponential growth or decay along the product
/// flow.
pub struct RatePseudometric<S> {
    d: Pseudo<S>,
    pub a: f64,
    pub rate: Rate,
}

impl<S> RatePseudometric<S> {
    pub fn new<G>(d: G, a: f64, rate: Rate) -> Self
    where
        G: Fn(&S, &S) -> Result<f64> + Send + Sync + 'static,
    {
        Self {
            d: Arc::new(d),
            a,
            rate,
        }
    }

    pub fn eval(&self, x: &S, y: &S) -> Result<f64> {
        (self.d)(x, y)
    }
}

fn check_rates(alpha: (Rate, f64), omega: (Rate, f64)) -> Result<()> {
    if alpha.0 != Rate::Growth || omega.0 != Rate::Decay {
        return Err(Error::Spec(
            "sum needs a growing (repeller) term and a decaying (attractor) term".into(),
        ));
    }
    if !(alpha.1 > 0.0) || (alpha.1 - omega.1).abs() > 1e-12 * alpha.1 {
        return Err(Error::Spec(format!(
            "exponent mismatch: growth a = {}, decay a = {}",
            alpha.1, omega.1
        )));
    }
    Ok(())
}

/// `L = L_α + L_ω` with `L̇_α = aL_α` and `L̇_ω = −aL_ω`, so `L̈ = a²L`.
pub fn catenary_sum_function<S>(alpha: &RateField<S>, omega: &RateField<S>, x: &S) -> Result<f64> {
    check_rates((alpha.rate, alpha.a), (omega.rate, omega.a))?;
    Ok(alpha.eval(x)? + omega.eval(x)?)
}

/// `đ = đ_α + đ_ω` for pseudo-metrics with exact growth and decay.
pub fn catenary_sum_pseudometric<S>(
    alpha: &RatePseudometric<S>,
    omega: &RatePseudometric<S>,
    x: &S,
    y: &S,
) -> Result<f64> {
    check_rates((alpha.rate, alpha.a), (omega.rate, omega.a))?;
    Ok(alpha.eval(x, y)? + omega.eval(x, y)?)
}

/// `L₁ = −L̇` by a central difference with step `h`. For a catenary `L`
/// this is again catenary and strictly decreasing off Λ.
pub fn derived_decreasing<F, L>(field: &L, flow: &F, x: &F::State, h: f64) -> Result<f64>
where
    F: Flow,
    L: ScalarField<F::State> + ?Sized,
{
    let d = central_first(
        |t| match flow.at(x, t) {
            Ok(y) => field.eval(&y),
            Err(Error::Exited { time }) => Err(Error::Truncation(format!(
                "derivative stencil leaves the domain at t = {time}"
            ))),
            Err(e) => Err(e),
        },
        h,
    )?;
    Ok(-d)
}
