use super::{Flow, FlowKind, FlowResult};
use crate::error::{Error, Result};
use crate::numeric::bisect_boundary;

/// Default scan step for exit detection.
pub const DEFAULT_SCAN_STEP: f64 = 1e-2;

/// The partial flow obtained by restricting `flow` to `{g ≤ level}`.
///
/// Orbits are scanned in chunks of `scan_step`; the first chunk that ends
/// outside is bisected down to floating resolution, so the reported exit
/// time is the last time at which the orbit is still inside.
pub struct Restricted<F: Flow, G> {
    flow: F,
    indicator: G,
    level: f64,
    band: f64,
    scan_step: f64,
}

impl<F, G> Restricted<F, G>
where
    F: Flow,
    G: Fn(&F::State) -> Result<f64>,
{
    pub fn new(flow: F, indicator: G, level: f64) -> Self {
        Self {
            flow,
            indicator,
            level,
            band: 1e-9,
            scan_step: DEFAULT_SCAN_STEP,
        }
    }

    pub fn with_scan_step(mut self, step: f64) -> Self {
        self.scan_step = step;
        self
    }

    pub fn inner(&self) -> &F {
        &self.flow
    }

    pub fn inside(&self, x: &F::State) -> Result<bool> {
        Ok((self.indicator)(x)? <= self.level)
    }
}

impl<F, G> Flow for Restricted<F, G>
where
    F: Flow,
    G: Fn(&F::State) -> Result<f64>,
{
    type State = F::State;

    fn kind(&self) -> FlowKind {
        self.flow.kind()
    }

    fn advance(&self, x: &F::State, t: f64) -> Result<FlowResult<F::State>> {
        let g = (self.indicator)(x)?;
        if !(g <= self.level + self.band) {
            return Err(Error::Domain(format!(
                "state outside the domain (indicator {g} > {})",
                self.level
            )));
        }
        let dir = t.signum();
        let mut done = 0.0;
        let mut state = x.clone();
        while done < t.abs() {
            let dt = self.scan_step.min(t.abs() - done);
            let inner = self.flow.advance(&state, dir * dt)?;
            let (next, inner_exit) = match inner {
                FlowResult::Interior(s) => (s, None),
                FlowResult::Exited { time, point } => (point, Some(time)),
            };
            if !self.inside(&next)? {
                let base = state.clone();
                let tau = bisect_boundary(
                    |s| match self.flow.advance(&base, dir * s)? {
                        FlowResult::Interior(p) => self.inside(&p),
                        FlowResult::Exited { .. } => Ok(false),
                    },
                    0.0,
                    dt,
                    0.0,
                )?;
                let point = self.flow.at(&base, dir * tau)?;
                return Ok(FlowResult::Exited {
                    time: dir * (done + tau),
                    point,
                });
            }
            if let Some(time) = inner_exit {
                return Ok(FlowResult::Exited {
                    time: dir * done + time,
                    point: next,
                });
            }
            state = next;
            done += dt;
        }
        Ok(FlowResult::Interior(state))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{orbit_trace, DiagonalLinear};

    #[test]
    fn saddle_trace_ends_at_block_exit() {
        let block = Restricted::new(
            DiagonalLinear::saddle(),
            |p: &Vec<f64>| Ok(p[0].abs() + p[1].abs()),
            1.0,
        );
        let trace = orbit_trace(&block, &vec![0.1, 0.5], 0.0, 5.0, 0.5).unwrap();
        let last = trace.last().unwrap();
        assert!(last.exit);
        let expected = ((1.0 + 0.8f64.sqrt()) / 0.2).ln();
        assert!((last.t - expected).abs() < 1e-9, "{}", last.t);
        assert!((last.state[0].abs() + last.state[1].abs() - 1.0).abs() < 1e-12);
    }
}
