//! Isolating blocks given as sublevel sets `B = {L₁ ≤ δ}`: hit times,
//! boundary projections, the entrance/exit split of `∂B` and the coarse
//! classification of points by where their orbits go.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{Flow, FlowResult};
use crate::numeric::{bisect_boundary, central_first};

/// Default horizon standing in for `±∞`.
pub const DEFAULT_T_MAX: f64 = 50.0;
/// Default width of the boundary band in indicator units.
pub const DEFAULT_BAND: f64 = 1e-9;
/// Step of the derivative used to split the boundary.
pub const SPLIT_STEP: f64 = 1e-5;
/// `|L̇₁|` below this is labelled as both entering and exiting.
pub const SPLIT_TIE: f64 = 1e-7;
/// Orbit samples of a Λ point must stay this close to the designated Λ.
pub const LAMBDA_RADIUS: f64 = 1e-6;

type Field<S> = Arc<dyn Fn(&S) -> Result<f64> + Send + Sync>;
type Distance<S> = Arc<dyn Fn(&S) -> f64 + Send + Sync>;

/// `B = {x : L₁(x) ≤ δ}`, with an optional distance to the designated
/// invariant set `Λ`.
pub struct Block<S> {
    indicator: Field<S>,
    delta: f64,
    band: f64,
    scan_step: f64,
    lambda_distance: Option<Distance<S>>,
}

impl<S> Clone for Block<S> {
    fn clone(&self) -> Self {
        Self {
            indicator: self.indicator.clone(),
            delta: self.delta,
            band: self.band,
            scan_step: self.scan_step,
            lambda_distance: self.lambda_distance.clone(),
        }
    }
}

impl<S: Clone> Block<S> {
    pub fn new<G>(indicator: G, delta: f64) -> Result<Self>
    where
        G: Fn(&S) -> Result<f64> + Send + Sync + 'static,
    {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Spec(format!(
                "block level δ must be positive, got {delta}"
            )));
        }
        Ok(Self {
            indicator: Arc::new(indicator),
            delta,
            band: DEFAULT_BAND,
            scan_step: crate::flow::DEFAULT_SCAN_STEP,
            lambda_distance: None,
        })
    }

    pub fn with_band(mut self, band: f64) -> Self {
        self.band = band;
        self
    }

    /// Step of the exit scan. Excursions outside `B` shorter than this may
    /// be missed.
    pub fn with_scan_step(mut self, step: f64) -> Self {
        self.scan_step = step;
        self
    }

    pub fn with_lambda<D>(mut self, distance: D) -> Self
    where
        D: Fn(&S) -> f64 + Send + Sync + 'static,
    {
        self.lambda_distance = Some(Arc::new(distance));
        self
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn band(&self) -> f64 {
        self.band
    }

    pub fn scan_step(&self) -> f64 {
        self.scan_step
    }

    pub fn indicator(&self, x: &S) -> Result<f64> {
        (self.indicator)(x)
    }

    /// `L₁(x) ≤ δ + η`.
    pub fn contains(&self, x: &S) -> Result<bool> {
        Ok(self.indicator(x)? <= self.delta + self.band)
    }

    /// `|L₁(x) − δ| ≤ η`.
    pub fn on_boundary(&self, x: &S) -> Result<bool> {
        Ok((self.indicator(x)? - self.delta).abs() <= self.band)
    }

    pub fn lambda_distance(&self, x: &S) -> Option<f64> {
        self.lambda_distance.as_ref().map(|d| d(x))
    }

    fn require_inside(&self, x: &S) -> Result<()> {
        let g = self.indicator(x)?;
        if g <= self.delta + self.band {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "point outside the block (L₁ = {g} > δ = {})",
                self.delta
            )))
        }
    }
}

/// Exit times of an orbit from the block. Infinite sides are `±∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct HitTimes<S> {
    /// `T^s ≤ 0`, `-∞` on `W^u`.
    pub t_s: f64,
    /// `T^u ≥ 0`, `+∞` on `W^s`.
    pub t_u: f64,
    /// `π_s x = φ_{T^s}(x)` when `T^s` is finite.
    pub pi_s: Option<S>,
    /// `π_u x = φ_{T^u}(x)` when `T^u` is finite.
    pub pi_u: Option<S>,
    /// Largest distance to Λ over the scanned orbit samples, when Λ is
    /// designated.
    pub lambda_excursion: Option<f64>,
}

impl<S> HitTimes<S> {
    /// `T = T^u − T^s`.
    pub fn total(&self) -> f64 {
        self.t_u - self.t_s
    }

    pub fn in_ws(&self) -> bool {
        self.t_u.is_infinite()
    }

    pub fn in_wu(&self) -> bool {
        self.t_s.is_infinite()
    }

    /// Both sides infinite and, if Λ is designated, the orbit stayed near it.
    pub fn in_lambda(&self) -> bool {
        self.in_ws() && self.in_wu() && self.lambda_excursion.is_none_or(|d| d <= LAMBDA_RADIUS)
    }

    pub fn transient(&self) -> bool {
        !self.in_ws() && !self.in_wu()
    }
}

struct SideScan<S> {
    hit: Option<(f64, S)>,
    excursion: Option<f64>,
}

// Walks one direction until the orbit leaves the block or the horizon is
// reached. Returns the unsigned exit time and the last inside point.
fn scan_side<F: Flow>(
    flow: &F,
    block: &Block<F::State>,
    x: &F::State,
    dir: f64,
    t_max: f64,
) -> Result<SideScan<F::State>> {
    let exact = flow.kind().is_exact();
    let mut excursion = block.lambda_distance(x);
    let mut state = x.clone();
    let mut done = 0.0;
    while done < t_max {
        let dt = block.scan_step.min(t_max - done);
        let (next, domain_exit) = match flow.advance(&state, dir * dt)? {
            FlowResult::Interior(s) => (s, None),
            FlowResult::Exited { time, point } => (point, Some(time.abs())),
        };
        if block.indicator(&next)? > block.delta {
            let (base, offset) = if exact {
                (x.clone(), done)
            } else {
                (state.clone(), 0.0)
            };
            let inside = |tau: f64| -> Result<bool> {
                match flow.advance(&base, dir * (offset + tau))? {
                    FlowResult::Interior(p) => Ok(block.indicator(&p)? <= block.delta),
                    FlowResult::Exited { .. } => Ok(false),
                }
            };
            let tau = bisect_boundary(inside, 0.0, dt, 0.0)?;
            let point = flow.advance(&base, dir * (offset + tau))?.point().clone();
            return Ok(SideScan {
                hit: Some((done + tau, point)),
                excursion,
            });
        }
        if let Some(time) = domain_exit {
            return Ok(SideScan {
                hit: Some((done + time, next)),
                excursion,
            });
        }
        if let Some(d) = block.lambda_distance(&next) {
            excursion = Some(excursion.map_or(d, |e: f64| e.max(d)));
        }
        state = next;
        done += dt;
    }
    Ok(SideScan {
        hit: None,
        excursion,
    })
}

/// `T^u(x) = sup{t ≥ 0 : φ_{[0,t]}(x) ⊂ B}` and its backward counterpart,
/// with exits refined by bisection to floating resolution. A side with no
/// exit before `t_max` is reported as infinite.
pub fn hit_times<F: Flow>(
    flow: &F,
    block: &Block<F::State>,
    x: &F::State,
    t_max: f64,
) -> Result<HitTimes<F::State>> {
    if !(t_max > 0.0) {
        return Err(Error::Spec(format!(
            "horizon must be positive, got {t_max}"
        )));
    }
    block.require_inside(x)?;
    let fwd = scan_side(flow, block, x, 1.0, t_max)?;
    let bwd = scan_side(flow, block, x, -1.0, t_max)?;
    let excursion = match (fwd.excursion, bwd.excursion) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    };
    let (t_u, pi_u) = match fwd.hit {
        Some((t, p)) => (t, Some(p)),
        None => (f64::INFINITY, None),
    };
    let (t_s, pi_s) = match bwd.hit {
        Some((t, p)) => (-t, Some(p)),
        None => (f64::NEG_INFINITY, None),
    };
    Ok(HitTimes {
        t_s,
        t_u,
        pi_s,
        pi_u,
        lambda_excursion: excursion,
    })
}

/// Stable and unstable exit points.
pub type BoundaryPair<S> = (Option<S>, Option<S>);

/// `(π_s x, π_u x)`; each is absent on the corresponding invariant manifold.
pub fn boundary_projections<F: Flow>(
    flow: &F,
    block: &Block<F::State>,
    x: &F::State,
    t_max: f64,
) -> Result<BoundaryPair<F::State>> {
    let h = hit_times(flow, block, x, t_max)?;
    Ok((h.pi_s, h.pi_u))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundarySide {
    /// Entering: `L̇₁ < 0`.
    Stable,
    /// Exiting: `L̇₁ > 0`.
    Unstable,
    /// `L̇₁ ≈ 0`: in both `Σ_s` and `Σ_u`.
    Both,
}

impl BoundarySide {
    pub fn in_sigma_s(self) -> bool {
        matches!(self, BoundarySide::Stable | BoundarySide::Both)
    }

    pub fn in_sigma_u(self) -> bool {
        matches!(self, BoundarySide::Unstable | BoundarySide::Both)
    }
}

/// Splits boundary points into `Σ_s`/`Σ_u` by the sign of the central
/// difference of `L₁` along the flow.
pub fn boundary_split<F: Flow>(
    flow: &F,
    block: &Block<F::State>,
    sample: &[F::State],
) -> Result<Vec<BoundarySide>> {
    sample
        .iter()
        .enumerate()
        .map(|(k, x)| {
            if !block.on_boundary(x)? {
                return Err(Error::Domain(format!(
                    "sample point {k} is off the boundary band (L₁ = {})",
                    block.indicator(x)?
                )));
            }
            let d = central_first(|t| block.indicator(&flow.at(x, t)?), SPLIT_STEP)?;
            Ok(if d.abs() <= SPLIT_TIE {
                BoundarySide::Both
            } else if d < 0.0 {
                BoundarySide::Stable
            } else {
                BoundarySide::Unstable
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Label {
    #[serde(rename = "Lambda")]
    Lambda,
    #[serde(rename = "Ws_minus_Lambda")]
    WsMinusLambda,
    #[serde(rename = "Wu_minus_Lambda")]
    WuMinusLambda,
    #[serde(rename = "transient")]
    Transient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    Lambda,
    /// Forward exit, collapsed to the point `ω`.
    Omega,
    /// Backward exit, collapsed to the point `α`.
    Alpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UniverseLabel {
    pub label: Label,
    pub forward: Endpoint,
    pub backward: Endpoint,
}

/// Where the orbit of `x` goes in the two-point compactification: `ω` if it
/// leaves forward, `α` if it leaves backward, Λ otherwise.
pub fn classify_point<F: Flow>(
    flow: &F,
    block: &Block<F::State>,
    x: &F::State,
    t_max: f64,
) -> Result<UniverseLabel> {
    let h = hit_times(flow, block, x, t_max)?;
    let forward = if h.in_ws() {
        Endpoint::Lambda
    } else {
        Endpoint::Omega
    };
    let backward = if h.in_wu() {
        Endpoint::Lambda
    } else {
        Endpoint::Alpha
    };
    let label = match (forward, backward) {
        (Endpoint::Lambda, Endpoint::Lambda) => {
            if !h.in_lambda() {
                return Err(Error::Unresolved(format!(
                    "orbit stays in the block for |t| ≤ {t_max} but strays {} from Λ",
                    h.lambda_excursion.unwrap_or(f64::NAN)
                )));
            }
            Label::Lambda
        }
        (Endpoint::Lambda, _) => Label::WsMinusLambda,
        (_, Endpoint::Lambda) => Label::WuMinusLambda,
        _ => Label::Transient,
    };
    Ok(UniverseLabel {
        label,
        forward,
        backward,
    })
}

/// Residual of the cocycle `T^u(φ_t x) = T^u(x) − t` (or the `T^s` form when
/// `T^u` is infinite), together with `T(φ_t x) = T(x)` on transient points.
pub fn cocycle_check<F: Flow>(
    flow: &F,
    block: &Block<F::State>,
    x: &F::State,
    t: f64,
    t_max: f64,
) -> Result<f64> {
    let h0 = hit_times(flow, block, x, t_max)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let y = flow.at(x, t)?;
    let h1 = hit_times(flow, block, &y, t_max)?;
    let mut r = if h0.t_u.is_finite() {
        (h1.t_u - (h0.t_u - t)).abs()
    } else if h0.t_s.is_finite() {
        (h1.t_s - (h0.t_s - t)).abs()
    } else {
        return Err(Error::Unresolved("both hit times are infinite".into()));
    };
    if h0.transient() {
        r = r.max((h1.total() - h0.total()).abs());
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::DiagonalLinear;

    fn saddle_block() -> Block<Vec<f64>> {
        Block::new(|p: &Vec<f64>| Ok(p[0].abs() + p[1].abs()), 1.0)
            .unwrap()
            .with_lambda(|p: &Vec<f64>| p[0].hypot(p[1]))
    }

    #[test]
    fn stable_axis_point() {
        let h = hit_times(
            &DiagonalLinear::saddle(),
            &saddle_block(),
            &vec![0.0, 0.5],
            50.0,
        )
        .unwrap();
        assert_eq!(h.t_u, f64::INFINITY);
        assert!((h.t_s - 0.5f64.ln()).abs() < 1e-12);
        assert!(h.pi_u.is_none());
    }

    #[test]
    fn origin_is_lambda() {
        let f = DiagonalLinear::saddle();
        let l = classify_point(&f, &saddle_block(), &vec![0.0, 0.0], 50.0).unwrap();
        assert_eq!(l.label, Label::Lambda);
    }

    #[test]
    fn outside_point_rejected() {
        let f = DiagonalLinear::saddle();
        assert!(matches!(
            hit_times(&f, &saddle_block(), &vec![0.9, 0.9], 50.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn split_on_axes_and_corner() {
        let f = DiagonalLinear::saddle();
        let s = boundary_split(
            &f,
            &saddle_block(),
            &[vec![0.0, 1.0], vec![1.0, 0.0], vec![0.5, 0.5]],
        )
        .unwrap();
        assert_eq!(
            s,
            vec![
                BoundarySide::Stable,
                BoundarySide::Unstable,
                BoundarySide::Both
            ]
        );
    }
}
