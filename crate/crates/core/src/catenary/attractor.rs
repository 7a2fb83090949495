use super::ScalarField;
use crate::error::{Error, Result};
use crate::flow::{ConePoint, Flow, FlowResult, LinearAttractor};
use crate::metric::{whitney_size, Metric, SizeFunctionSpec};
use crate::numeric::{bisect_root, norm, simpson};

/// Orbits count as converged once within this distance of the attractor.
pub const CONVERGENCE_RADIUS: f64 = 1e-6;
/// Default Simpson panel count for the smoothing integral.
pub const SMOOTHING_PANELS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttractorOptions {
    /// Give up if the orbit has not converged by this time.
    pub horizon: f64,
    /// Orbit sampling step.
    pub step: f64,
    pub radius: f64,
}

impl Default for AttractorOptions {
    fn default() -> Self {
        Self {
            horizon: 50.0,
            step: 1e-2,
            radius: CONVERGENCE_RADIUS,
        }
    }
}

/// `L(x) = μ({φ_t(x) : t ≥ 0} ∪ {p})` with the forward orbit sampled at
/// `opts.step` until it enters the `opts.radius` ball around `p`.
pub fn attractor_lyapunov<F, M>(
    flow: &F,
    metric: &M,
    p: &F::State,
    refs: &SizeFunctionSpec<F::State>,
    x: &F::State,
    opts: &AttractorOptions,
) -> Result<f64>
where
    F: Flow,
    M: Metric<F::State> + ?Sized,
{
    let mut orbit = vec![p.clone(), x.clone()];
    let mut state = x.clone();
    let mut t = 0.0;
    while metric.distance(&state, p) > opts.radius {
        if t >= opts.horizon {
            return Err(Error::Basin {
                horizon: opts.horizon,
            });
        }
        state = flow.at(&state, opts.step)?;
        t += opts.step;
        orbit.push(state.clone());
    }
    whitney_size(&orbit, refs, metric)
}

/// `(L₁(x), L̇₁(x))` with `L₁(x) = ∫₀^τ L(φ_t x) dt` by composite Simpson and
/// `L̇₁(x) = L(φ_τ x) − L(x)`.
pub fn smooth_lyapunov<F, L>(
    field: &L,
    flow: &F,
    tau: f64,
    panels: usize,
    x: &F::State,
) -> Result<(f64, f64)>
where
    F: Flow,
    L: ScalarField<F::State> + ?Sized,
{
    if !(tau > 0.0) {
        return Err(Error::Spec(format!(
            "smoothing time must be positive, got {tau}"
        )));
    }
    let along = |t: f64| -> Result<f64> {
        match flow.advance(x, t)? {
            FlowResult::Interior(y) => field.eval(&y),
            FlowResult::Exited { time, .. } => Err(Error::Truncation(format!(
                "orbit leaves the domain at t = {time} inside the smoothing window [0, {tau}]"
            ))),
        }
    };
    let l1 = simpson(along, 0.0, tau, panels)?;
    let l1_dot = along(tau)? - field.eval(x)?;
    Ok((l1, l1_dot))
}

// Bracketing stops this far out in either direction.
const DECAY_SEARCH_LIMIT: f64 = 200.0;

/// Exact-decay Lyapunov function `L(x) = e^{-aτ(x)}`, where `τ(x)` is the
/// signed time since the orbit crossed `Σ = {V = level}`. `V` must be
/// strictly decreasing along orbits near `Σ`.
pub fn exact_decay_lyapunov<F, V>(flow: &F, v: &V, level: f64, a: f64, x: &F::State) -> Result<f64>
where
    F: Flow,
    V: ScalarField<F::State> + ?Sized,
{
    if !(a > 0.0) {
        return Err(Error::Spec(format!(
            "decay exponent must be positive, got {a}"
        )));
    }
    let g = |s: f64| -> Result<f64> { Ok(v.eval(&flow.at(x, -s)?)? - level) };
    let g0 = g(0.0)?;
    if g0 == 0.0 {
        return Ok(1.0);
    }
    // V(φ_{-s} x) increases with s, so search s > 0 when V(x) < level.
    let dir = if g0 < 0.0 { 1.0 } else { -1.0 };
    let mut lo = 0.0;
    let mut step = 0.25;
    loop {
        let hi = lo + step;
        if hi > DECAY_SEARCH_LIMIT {
            return Err(Error::Domain(format!(
                "orbit does not cross the level set V = {level} within |t| ≤ {DECAY_SEARCH_LIMIT}"
            )));
        }
        let gh = match g(dir * hi) {
            Ok(v) => v,
            Err(Error::Exited { .. }) | Err(Error::Divergence { .. }) => {
                return Err(Error::Domain(format!(
                    "orbit leaves the domain before crossing V = {level}"
                )))
            }
            Err(e) => return Err(e),
        };
        if gh.signum() != g0.signum() {
            let s = bisect_root(|s| g(dir * s), lo, hi, 0.0)?;
            return Ok((-a * dir * s).exp());
        }
        lo = hi;
        step *= 2.0;
    }
}

/// The constant `l = max ‖x₀‖^{-2}` over samples `x₀ ∈ Σ`, for the bound
/// `L(x) ≤ l‖x‖²` when `a = 2k` and `k` bounds the contraction rate.
pub fn quadratic_bound(section: &[Vec<f64>]) -> Result<f64> {
    if section.is_empty() {
        return Err(Error::Domain("empty section sample".into()));
    }
    Ok(section
        .iter()
        .map(|x0| norm(x0).powi(-2))
        .fold(0.0, f64::max))
}

/// `đ(x, y) = ‖h(x) − h(y)‖`, the norm of the difference of the cone
/// representations (shorter tuples are padded with zeros).
pub fn linear_pseudometric(model: &LinearAttractor, x: &ConePoint, y: &ConePoint) -> Result<f64> {
    let u = model.spec().embed(x)?;
    let v = model.spec().embed(y)?;
    let n = u.len().max(v.len());
    let diff: Vec<f64> = (0..n)
        .map(|i| u.get(i).copied().unwrap_or(0.0) - v.get(i).copied().unwrap_or(0.0))
        .collect();
    Ok(norm(&diff))
}
