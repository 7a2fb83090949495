use super::{Flow, FlowKind, FlowResult};
use crate::error::{Error, Result};

/// Default RK4 step.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Right-hand side of `ẋ = F(x)`.
pub trait VectorField {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64], out: &mut [f64]) -> Result<()>;
}

/// Vector field from a closure plus its dimension.
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F> VectorField for FnField<F>
where
    F: Fn(&[f64], &mut [f64]) -> Result<()>,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        (self.f)(x, out)
    }
}

/// Fixed-step classical RK4. A request for time `t` takes `⌊|t|/h⌋` full
/// steps and one final partial step, so every call lands exactly on `t`.
pub struct OdeFlow<V> {
    field: V,
    h: f64,
}

impl<F> OdeFlow<FnField<F>>
where
    F: Fn(&[f64], &mut [f64]) -> Result<()>,
{
    pub fn from_fn(dim: usize, f: F, h: f64) -> Result<Self> {
        Self::new(FnField { dim, f }, h)
    }
}

impl<V: VectorField> OdeFlow<V> {
    pub fn new(field: V, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Spec(format!("RK4 step must be positive, got {h}")));
        }
        Ok(Self { field, h })
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    pub fn field(&self) -> &V {
        &self.field
    }

    fn rk4(&self, x: &mut [f64], dt: f64, scratch: &mut [Vec<f64>; 5]) -> Result<()> {
        let n = x.len();
        let [k1, k2, k3, k4, tmp] = scratch;
        self.field.eval(x, k1)?;
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * dt * k1[i];
        }
        self.field.eval(tmp, k2)?;
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * dt * k2[i];
        }
        self.field.eval(tmp, k3)?;
        for i in 0..n {
            tmp[i] = x[i] + dt * k3[i];
        }
        self.field.eval(tmp, k4)?;
        for i in 0..n {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        Ok(())
    }
}

impl<V: VectorField> Flow for OdeFlow<V> {
    type State = Vec<f64>;

    fn kind(&self) -> FlowKind {
        FlowKind::Ode
    }

    fn advance(&self, x: &Vec<f64>, t: f64) -> Result<FlowResult<Vec<f64>>> {
        let n = self.field.dim();
        if x.len() != n {
            return Err(Error::Domain(format!(
                "state has dimension {}, field has {n}",
                x.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite state {x:?}")));
        }
        let mut y = x.clone();
        if t == 0.0 {
            return Ok(FlowResult::Interior(y));
        }
        let dir = t.signum();
        let full = (t.abs() / self.h).floor() as usize;
        let rest = t.abs() - full as f64 * self.h;
        let mut scratch: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n]);
        let mut done = 0.0;
        let steps = (0..full)
            .map(|_| self.h)
            .chain((rest > 0.0).then_some(rest));
        for dt in steps {
            self.rk4(&mut y, dir * dt, &mut scratch)?;
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::Divergence {
                    last_time: dir * done,
                });
            }
            done += dt;
        }
        Ok(FlowResult::Interior(y))
    }
}
