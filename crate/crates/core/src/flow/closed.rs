use std::f64::consts::TAU;

use super::{Flow, FlowKind, FlowResult};
use crate::error::{Error, Result};

/// `ẋ_i = r_i x_i`, solved as `x_i e^{r_i t}`. The saddle is rates `[1, -1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalLinear {
    rates: Vec<f64>,
}

impl DiagonalLinear {
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if rates.is_empty() || rates.iter().any(|r| !r.is_finite()) {
            return Err(Error::Spec(format!("invalid diagonal rates {rates:?}")));
        }
        Ok(Self { rates })
    }

    pub fn saddle() -> Self {
        Self {
            rates: vec![1.0, -1.0],
        }
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn dim(&self) -> usize {
        self.rates.len()
    }
}

impl Flow for DiagonalLinear {
    type State = Vec<f64>;

    fn kind(&self) -> FlowKind {
        FlowKind::ClosedForm
    }

    fn advance(&self, x: &Vec<f64>, t: f64) -> Result<FlowResult<Vec<f64>>> {
        if x.len() != self.rates.len() {
            return Err(Error::Domain(format!(
                "state has dimension {}, system has {}",
                x.len(),
                self.rates.len()
            )));
        }
        if t == 0.0 {
            return Ok(FlowResult::Interior(x.clone()));
        }
        let y: Vec<f64> = x
            .iter()
            .zip(&self.rates)
            .map(|(xi, r)| xi * (r * t).exp())
            .collect();
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { last_time: 0.0 });
        }
        Ok(FlowResult::Interior(y))
    }
}

/// Rotation of a circle of the given circumference at unit speed. States are
/// arc positions in `[0, circumference)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleRotation {
    pub circumference: f64,
}

impl Default for CircleRotation {
    fn default() -> Self {
        Self { circumference: TAU }
    }
}

impl CircleRotation {
    /// Shorter-arc distance between two positions.
    pub fn arc_distance(&self, a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(self.circumference);
        d.min(self.circumference - d)
    }

    fn normalize(&self, s: f64) -> f64 {
        let r = s.rem_euclid(self.circumference);
        if r >= self.circumference {
            0.0
        } else {
            r
        }
    }
}

impl Flow for CircleRotation {
    type State = f64;

    fn kind(&self) -> FlowKind {
        FlowKind::ClosedForm
    }

    fn advance(&self, x: &f64, t: f64) -> Result<FlowResult<f64>> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("circle position {x}")));
        }
        Ok(FlowResult::Interior(self.normalize(x + t)))
    }
}

/// A flow given by an explicit solution formula.
pub struct ClosedForm<S, F> {
    solution: F,
    _state: std::marker::PhantomData<fn() -> S>,
}

impl<S, F> ClosedForm<S, F>
where
    S: Clone,
    F: Fn(&S, f64) -> Result<S>,
{
    pub fn new(solution: F) -> Self {
        Self {
            solution,
            _state: std::marker::PhantomData,
        }
    }
}

impl<S, F> Flow for ClosedForm<S, F>
where
    S: Clone,
    F: Fn(&S, f64) -> Result<S>,
{
    type State = S;

    fn kind(&self) -> FlowKind {
        FlowKind::ClosedForm
    }

    fn advance(&self, x: &S, t: f64) -> Result<FlowResult<S>> {
        if t == 0.0 {
            return Ok(FlowResult::Interior(x.clone()));
        }
        (self.solution)(x, t).map(FlowResult::Interior)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saddle_from_one_one() {
        let y = DiagonalLinear::saddle().at(&vec![1.0, 1.0], 1.0).unwrap();
        assert_eq!(y, vec![std::f64::consts::E, (-1.0f64).exp()]);
    }

    #[test]
    fn zero_time_is_identity() {
        let x = vec![0.3, -2.0];
        assert_eq!(DiagonalLinear::saddle().at(&x, 0.0).unwrap(), x);
        assert_eq!(CircleRotation::default().at(&1.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn circle_wraps() {
        let c = CircleRotation { circumference: 1.0 };
        assert!((c.at(&0.75, 0.5).unwrap() - 0.25).abs() < 1e-15);
        assert!((c.at(&0.25, -0.5).unwrap() - 0.75).abs() < 1e-15);
        assert!((c.arc_distance(0.1, 0.9) - 0.2).abs() < 1e-15);
    }
}
