//! Flows and partial flows behind one evaluator.
//!
//! A partial flow may leave its domain in finite time; [`FlowResult`] carries
//! that exit explicitly instead of folding it into an error, so callers such
//! as hit-time searches can treat the exit as an event.

mod closed;
mod fake;
mod linear;
mod ode;
mod restricted;
mod suspension;

pub use closed::{CircleRotation, ClosedForm, DiagonalLinear};
pub use fake::{FakePoint, FakeSingularityFlow, FakeSingularitySpec, SpeedField};
pub use linear::{ConePoint, LinearAttractor, LinearModelSpec, Orientation};
pub use ode::{FnField, OdeFlow, VectorField, DEFAULT_STEP};
pub use restricted::{Restricted, DEFAULT_SCAN_STEP};
pub use suspension::{SuspensionFlow, SuspensionPoint};

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    ClosedForm,
    Ode,
    LinearModel,
    Suspension,
    FakeSingularity,
}

impl FlowKind {
    /// Whether `advance` is evaluated by formula rather than by stepping.
    pub fn is_exact(self) -> bool {
        matches!(
            self,
            FlowKind::ClosedForm | FlowKind::LinearModel | FlowKind::Suspension
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FlowResult<S> {
    Interior(S),
    /// The maximal interval ended at `time` (signed, same direction as the
    /// request); `point` is the last state inside the domain.
    Exited {
        time: f64,
        point: S,
    },
}

impl<S> FlowResult<S> {
    pub fn interior(self) -> Result<S> {
        match self {
            FlowResult::Interior(s) => Ok(s),
            FlowResult::Exited { time, .. } => Err(Error::Exited { time }),
        }
    }

    pub fn point(&self) -> &S {
        match self {
            FlowResult::Interior(s) => s,
            FlowResult::Exited { point, .. } => point,
        }
    }
}

/// A (partial) flow `φ_t`.
pub trait Flow {
    type State: Clone;

    fn kind(&self) -> FlowKind;

    /// `φ_t(x)`, or the exit event if the maximal interval of `x` ends
    /// before `t`. States outside the domain are a domain error.
    fn advance(&self, x: &Self::State, t: f64) -> Result<FlowResult<Self::State>>;

    /// `φ_t(x)`, treating an exit as an error.
    fn at(&self, x: &Self::State, t: f64) -> Result<Self::State> {
        self.advance(x, t)?.interior()
    }
}

impl<F: Flow + ?Sized> Flow for &F {
    type State = F::State;

    fn kind(&self) -> FlowKind {
        (**self).kind()
    }

    fn advance(&self, x: &Self::State, t: f64) -> Result<FlowResult<Self::State>> {
        (**self).advance(x, t)
    }
}

impl<F: Flow + ?Sized> Flow for Box<F> {
    type State = F::State;

    fn kind(&self) -> FlowKind {
        (**self).kind()
    }

    fn advance(&self, x: &Self::State, t: f64) -> Result<FlowResult<Self::State>> {
        (**self).advance(x, t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TracePoint<S> {
    pub t: f64,
    pub state: S,
    /// Set on the final sample when the orbit left the domain at `t`.
    pub exit: bool,
}

/// Samples `φ_t(x)` at `t0, t0 + step, …` up to `t1` (inclusive when it lands
/// on the grid). If the orbit leaves the domain, the trace stops with the exit
/// event.
pub fn orbit_trace<F: Flow + ?Sized>(
    flow: &F,
    x: &F::State,
    t0: f64,
    t1: f64,
    step: f64,
) -> Result<Vec<TracePoint<F::State>>> {
    if !(t0 < t1) {
        return Err(Error::Domain(format!("empty trace interval [{t0}, {t1}]")));
    }
    if !(step > 0.0) {
        return Err(Error::Domain(format!(
            "trace step must be positive, got {step}"
        )));
    }
    let mut out = Vec::new();
    let mut state = match flow.advance(x, t0)? {
        FlowResult::Interior(s) => s,
        FlowResult::Exited { time, point } => {
            out.push(TracePoint {
                t: time,
                state: point,
                exit: true,
            });
            return Ok(out);
        }
    };
    out.push(TracePoint {
        t: t0,
        state: state.clone(),
        exit: false,
    });
    let count = ((t1 - t0) / step * (1.0 + 1e-12)).floor() as usize;
    let mut prev_t = t0;
    for k in 1..=count {
        let t = t0 + k as f64 * step;
        match flow.advance(&state, t - prev_t)? {
            FlowResult::Interior(s) => {
                state = s;
                out.push(TracePoint {
                    t,
                    state: state.clone(),
                    exit: false,
                });
            }
            FlowResult::Exited { time, point } => {
                out.push(TracePoint {
                    t: prev_t + time,
                    state: point,
                    exit: true,
                });
                return Ok(out);
            }
        }
        prev_t = t;
    }
    Ok(out)
}
