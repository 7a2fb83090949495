use serde::{Deserialize, Serialize};

use super::{Flow, FlowKind, FlowResult};
use crate::error::{Error, Result};

/// Image of a cross section in coordinate space. Every tuple starts with 1;
/// the cone over these tuples carries the flow `ψ_t(v) = e^{-t} v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModelSpec {
    pub section: Vec<Vec<f64>>,
}

impl LinearModelSpec {
    pub fn validate(&self) -> Result<()> {
        if self.section.is_empty() {
            return Err(Error::Spec("linear model needs a non-empty section".into()));
        }
        for (k, v) in self.section.iter().enumerate() {
            if v.first() != Some(&1.0) {
                return Err(Error::Spec(format!(
                    "section tuple {k} must have first coordinate 1, got {v:?}"
                )));
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::Spec(format!("section tuple {k} is not finite")));
            }
        }
        Ok(())
    }

    /// Coordinates of `r·i(x_k)`.
    pub fn embed(&self, p: &ConePoint) -> Result<Vec<f64>> {
        let v = self
            .section
            .get(p.index)
            .ok_or_else(|| Error::Domain(format!("section index {} out of range", p.index)))?;
        Ok(v.iter().map(|c| p.r * c).collect())
    }
}

/// The cone point `r·i(x_index)`, `r ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub r: f64,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `r ↦ e^{-t} r`: attractor at the origin.
    Attracting,
    /// `r ↦ e^{t} r`: the time-reversed model, a repeller.
    Repelling,
}

/// Linear attractor (or repeller) on the cone `C_A`. The cone is bounded by
/// `r ≤ 1`, so orbits leave it in finite time in one direction.
#[derive(Debug, Clone)]
pub struct LinearAttractor {
    spec: LinearModelSpec,
    orientation: Orientation,
}

impl LinearAttractor {
    pub fn new(spec: LinearModelSpec) -> Result<Self> {
        Self::with_orientation(spec, Orientation::Attracting)
    }

    pub fn with_orientation(spec: LinearModelSpec, orientation: Orientation) -> Result<Self> {
        spec.validate()?;
        Ok(Self { spec, orientation })
    }

    pub fn spec(&self) -> &LinearModelSpec {
        &self.spec
    }

    fn rate(&self) -> f64 {
        match self.orientation {
            Orientation::Attracting => -1.0,
            Orientation::Repelling => 1.0,
        }
    }
}

impl Flow for LinearAttractor {
    type State = ConePoint;

    fn kind(&self) -> FlowKind {
        FlowKind::LinearModel
    }

    fn advance(&self, x: &ConePoint, t: f64) -> Result<FlowResult<ConePoint>> {
        if !(0.0..=1.0).contains(&x.r) {
            return Err(Error::Domain(format!("cone radius {} outside [0, 1]", x.r)));
        }
        if x.index >= self.spec.section.len() {
            return Err(Error::Domain(format!(
                "section index {} out of range",
                x.index
            )));
        }
        let r = x.r * (self.rate() * t).exp();
        if r > 1.0 {
            // r e^{rate·τ} = 1
            let time = -x.r.ln() / self.rate();
            return Ok(FlowResult::Exited {
                time,
                point: ConePoint {
                    r: 1.0,
                    index: x.index,
                },
            });
        }
        Ok(FlowResult::Interior(ConePoint { r, index: x.index }))
    }
}
