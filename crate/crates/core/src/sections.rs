//! Local cross sections of regular flows built from `θ_x(y) = ∫₀^τ dist(x, φ_t y) dt`,
//! the reparametrized product flow on section pairs, and sectional metrics.

use std::path::Path;

use serde::Serialize;

use crate::discrete::{catenary_roots, DiscreteSystem, FullShift, SymbolicPoint};
use crate::error::{Error, Result};
use crate::flow::{Flow, SuspensionFlow, SuspensionPoint};
use crate::metric::Metric;
use crate::numeric::{illinois_root, simpson};

pub const DEFAULT_TAU: f64 = 0.3;
pub const DEFAULT_PANELS: usize = 64;
/// Residuals at or below this are accepted without a bracket search.
pub const SECTION_EXACT: f64 = 1e-12;
pub const MIN_REPARAM_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectionSpec {
    pub tau: f64,
    /// Section radius ε.
    pub epsilon: f64,
    /// Pairs within δ must satisfy `dist(x, φ_τ y) − dist(x, y) ≥ a`.
    pub delta: f64,
    pub a: f64,
    pub panels: usize,
}

impl SectionSpec {
    /// Takes `a` as the smallest rate over the δ-close sampled pairs.
    pub fn calibrate<F, M>(
        flow: &F,
        dist: &M,
        pairs: &[(F::State, F::State)],
        tau: f64,
        epsilon: f64,
        delta: f64,
        panels: usize,
    ) -> Result<Self>
    where
        F: Flow,
        M: Metric<F::State> + ?Sized,
    {
        if !(tau > 0.0 && epsilon > 0.0 && delta > 0.0) || panels == 0 {
            return Err(Error::Spec(format!(
                "section parameters must be positive (τ = {tau}, ε = {epsilon}, δ = {delta}, panels = {panels})"
            )));
        }
        let mut spec = Self {
            tau,
            epsilon,
            delta,
            a: f64::INFINITY,
            panels,
        };
        for (x, y) in pairs {
            if dist.distance(x, y) <= delta {
                spec.a = spec.a.min(theta_rate(flow, dist, x, y, &spec)?);
            }
        }
        if !spec.a.is_finite() {
            return Err(Error::Spec("no sampled pair within δ".into()));
        }
        if !(spec.a > 0.0) {
            return Err(Error::Spec(format!(
                "transversality rate {} is not positive; try a larger τ or smaller δ",
                spec.a
            )));
        }
        Ok(spec)
    }

    /// Rejects the spec if a δ-close pair has rate below `a`.
    pub fn check<F, M>(&self, flow: &F, dist: &M, pairs: &[(F::State, F::State)]) -> Result<()>
    where
        F: Flow,
        M: Metric<F::State> + ?Sized,
    {
        if !(self.a > 0.0) {
            return Err(Error::Spec(format!(
                "rate bound a = {} must be positive",
                self.a
            )));
        }
        for (i, (x, y)) in pairs.iter().enumerate() {
            if dist.distance(x, y) <= self.delta {
                let rate = theta_rate(flow, dist, x, y, self)?;
                if rate < self.a {
                    return Err(Error::Spec(format!(
                        "pair {i} has rate {rate} below a = {}",
                        self.a
                    )));
                }
            }
        }
        Ok(())
    }
}

fn truncating<S>(r: Result<S>) -> Result<S> {
    r.map_err(|e| match e {
        Error::Exited { time } => {
            Error::Truncation(format!("quadrature orbit leaves the domain at t = {time}"))
        }
        e => e,
    })
}

/// `θ_x(y)` by composite Simpson.
pub fn theta<F, M>(
    flow: &F,
    dist: &M,
    x: &F::State,
    y: &F::State,
    spec: &SectionSpec,
) -> Result<f64>
where
    F: Flow,
    M: Metric<F::State> + ?Sized,
{
    simpson(
        |t| Ok(dist.distance(x, &truncating(flow.at(y, t))?)),
        0.0,
        spec.tau,
        spec.panels,
    )
}

/// `θ̇_x(y) = dist(x, φ_τ y) − dist(x, y)`.
pub fn theta_rate<F, M>(
    flow: &F,
    dist: &M,
    x: &F::State,
    y: &F::State,
    spec: &SectionSpec,
) -> Result<f64>
where
    F: Flow,
    M: Metric<F::State> + ?Sized,
{
    let far = truncating(flow.at(y, spec.tau))?;
    Ok(dist.distance(x, &far) - dist.distance(x, y))
}

/// Whether `y ∈ H_ε(x)` up to `tol` on the θ residual.
pub fn in_section<F, M>(
    flow: &F,
    dist: &M,
    x: &F::State,
    y: &F::State,
    spec: &SectionSpec,
    tol: f64,
) -> Result<bool>
where
    F: Flow,
    M: Metric<F::State> + ?Sized,
{
    if dist.distance(x, y) > spec.epsilon {
        return Ok(false);
    }
    let g = theta(flow, dist, x, y, spec)? - theta(flow, dist, x, x, spec)?;
    Ok(g.abs() <= tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Projection {
    /// Flow time taking `y` into `H_ε(x)`.
    pub s: f64,
    /// `|θ_x(φ_s y) − θ_x(x)|`.
    pub residual: f64,
}

/// The time `s` near `s₀` with `φ_s y ∈ H_ε(x)`.
///
/// The residual `g(s) = θ_x(φ_s y) − θ_x(x)` increases through the section,
/// so the search runs right of `s₀` when `g(s₀) < 0` and left otherwise, in
/// steps of `τ/8` up to `τ`, then bisects to floating resolution.
pub fn section_project<F, M>(
    flow: &F,
    dist: &M,
    x: &F::State,
    y: &F::State,
    s0: f64,
    spec: &SectionSpec,
) -> Result<Projection>
where
    F: Flow,
    M: Metric<F::State> + ?Sized,
{
    let start = truncating(flow.at(y, s0))?;
    let d0 = dist.distance(x, &start);
    if !(d0 <= spec.epsilon) {
        return Err(Error::Projection(format!(
            "starting point at distance {d0} exceeds ε = {}",
            spec.epsilon
        )));
    }
    let target = theta(flow, dist, x, x, spec)?;
    let g = |s: f64| -> Result<f64> {
        let p = truncating(flow.at(y, s))?;
        Ok(theta(flow, dist, x, &p, spec)? - target)
    };
    let g0 = g(s0)?;
    if g0.abs() <= SECTION_EXACT {
        return Ok(Projection {
            s: s0,
            residual: g0.abs(),
        });
    }
    let dir = if g0 < 0.0 { 1.0 } else { -1.0 };
    let step = spec.tau / 8.0;
    let mut prev = s0;
    let mut bracket = None;
    for k in 1..=8 {
        let s = s0 + dir * step * k as f64;
        let gs = g(s)?;
        if gs.signum() != g0.signum() || gs == 0.0 {
            bracket = Some((prev, s));
            break;
        }
        prev = s;
    }
    let (a, b) = bracket.ok_or_else(|| {
        Error::Projection(format!(
            "no section crossing within τ = {} of s₀ = {s0}",
            spec.tau
        ))
    })?;
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let (s, gs) = illinois_root(g, lo, hi, 1e-13, SECTION_EXACT)?;
    let p = truncating(flow.at(y, s))?;
    let d = dist.distance(x, &p);
    if !(d <= spec.epsilon) {
        return Err(Error::Projection(format!(
            "section crossing at distance {d} exceeds ε = {}",
            spec.epsilon
        )));
    }
    Ok(Projection {
        s,
        residual: gs.abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReparamState {
    pub t: f64,
    /// `h(t)`.
    pub s: f64,
    pub residual: f64,
}

/// Follows `ψ_t(x, y) = (φ_t x, φ_{h(t)} y)` by projecting the companion onto
/// the section through `φ_t x` after each outer step.
pub struct Reparametrizer<'a, F: Flow, M: ?Sized> {
    flow: &'a F,
    dist: &'a M,
    spec: SectionSpec,
    x: F::State,
    y: F::State,
    state: ReparamState,
}

impl<'a, F, M> Reparametrizer<'a, F, M>
where
    F: Flow,
    M: Metric<F::State> + ?Sized,
{
    /// `y` must lie in `H_ε(x)`; `h(0) = 0`.
    pub fn new(
        flow: &'a F,
        dist: &'a M,
        spec: SectionSpec,
        x: F::State,
        y: F::State,
    ) -> Result<Self> {
        let p = section_project(flow, dist, &x, &y, 0.0, &spec)?;
        if p.s != 0.0 {
            return Err(Error::Projection(format!(
                "companion is off the section (projection moves it by {})",
                p.s
            )));
        }
        Ok(Self {
            flow,
            dist,
            spec,
            x,
            y,
            state: ReparamState {
                t: 0.0,
                s: 0.0,
                residual: p.residual,
            },
        })
    }

    pub fn state(&self) -> ReparamState {
        self.state
    }

    /// The current pair `(φ_t x, φ_{h(t)} y)`.
    pub fn pair(&self) -> Result<(F::State, F::State)> {
        Ok((
            self.flow.at(&self.x, self.state.t)?,
            self.flow.at(&self.y, self.state.s)?,
        ))
    }

    /// Steps of `τ/10` towards `t_end` (either direction), halving on
    /// projection failure or loss of monotonicity down to
    /// [`MIN_REPARAM_STEP`]. Returns every accepted state. Stops with
    /// [`Error::Exited`] when the pair separates beyond ε, since `ψ` is only
    /// defined near the diagonal.
    pub fn advance_to(&mut self, t_end: f64) -> Result<Vec<ReparamState>> {
        let mut out = Vec::new();
        let outer = self.spec.tau / 10.0;
        let mut left = false;
        while self.state.t != t_end {
            let dir = (t_end - self.state.t).signum();
            let mut dt = outer.min((t_end - self.state.t).abs());
            loop {
                let t = if dt >= (t_end - self.state.t).abs() {
                    t_end
                } else {
                    self.state.t + dir * dt
                };
                let base = self.flow.at(&self.x, t)?;
                let s0 = self.state.s + (t - self.state.t);
                let guess = truncating(self.flow.at(&self.y, s0))?;
                if !(self.dist.distance(&base, &guess) <= self.spec.epsilon) {
                    left = true;
                }
                match section_project(self.flow, self.dist, &base, &self.y, s0, &self.spec) {
                    Ok(p) if (p.s - self.state.s) * dir > 0.0 => {
                        self.state = ReparamState {
                            t,
                            s: p.s,
                            residual: p.residual,
                        };
                        out.push(self.state);
                        break;
                    }
                    Ok(_) | Err(Error::Projection(_)) | Err(Error::Domain(_)) => {
                        dt *= 0.5;
                        if dt < MIN_REPARAM_STEP {
                            if left {
                                return Err(Error::Exited { time: self.state.t });
                            }
                            return Err(Error::Projection(format!(
                                "reparametrization stalled at t = {}",
                                self.state.t
                            )));
                        }
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(out)
    }
}

/// Writes `t, s, residual` rows.
pub fn write_section_trace(path: &Path, states: &[ReparamState]) -> Result<()> {
    let io = |e: csv::Error| Error::Spec(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["t", "s", "residual"]).map_err(io)?;
    for st in states {
        w.write_record([st.t, st.s, st.residual].map(|v| v.to_string()))
            .map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::Spec(format!("cannot write {}: {e}", path.display())))
}

/// `D_x(y, z) = đ((x, y), (x, z))` for `y, z ∈ H_ε(x)` (θ residual within
/// `tol`).
#[allow(clippy::too_many_arguments)]
pub fn sectional_metric<F, M, P>(
    pair_metric: &P,
    flow: &F,
    dist: &M,
    spec: &SectionSpec,
    x: &F::State,
    y: &F::State,
    z: &F::State,
    tol: f64,
) -> Result<f64>
where
    F: Flow,
    M: Metric<F::State> + ?Sized,
    P: Fn(&(F::State, F::State), &(F::State, F::State)) -> f64 + ?Sized,
{
    for (name, p) in [("y", y), ("z", z)] {
        if !in_section(flow, dist, x, p, spec, tol)? {
            return Err(Error::Projection(format!(
                "{name} is not in the section through x"
            )));
        }
    }
    Ok(pair_metric(
        &(x.clone(), y.clone()),
        &(x.clone(), z.clone()),
    ))
}

/// The pairs `ψ_t(x, y)` at `t = −h, 0, h`, each reached by a fresh
/// [`Reparametrizer`].
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil<S> {
    pub h: f64,
    pub pairs: [(S, S); 3],
}

pub fn reparam_stencil<F, M>(
    flow: &F,
    dist: &M,
    spec: &SectionSpec,
    x: &F::State,
    y: &F::State,
    h: f64,
) -> Result<Stencil<F::State>>
where
    F: Flow,
    M: Metric<F::State> + ?Sized,
{
    if !(h > 0.0) {
        return Err(Error::Domain(format!(
            "stencil step must be positive, got {h}"
        )));
    }
    let at = |t: f64| -> Result<(F::State, F::State)> {
        let mut r = Reparametrizer::new(flow, dist, *spec, x.clone(), y.clone())?;
        r.advance_to(t)?;
        r.pair()
    };
    Ok(Stencil {
        h,
        pairs: [at(-h)?, at(0.0)?, at(h)?],
    })
}

/// `|D̈ − D|` at `t = 0` from the stencils of two companions of the same
/// base point.
pub fn stencil_residual<S, P>(pair_metric: &P, y: &Stencil<S>, z: &Stencil<S>) -> Result<f64>
where
    S: Clone,
    P: Fn(&(S, S), &(S, S)) -> f64 + ?Sized,
{
    if y.h != z.h {
        return Err(Error::Domain(format!(
            "stencil steps differ: {} and {}",
            y.h, z.h
        )));
    }
    let d: Vec<f64> = (0..3)
        .map(|i| {
            let (xt, yt) = &y.pairs[i];
            let zt = &z.pairs[i].1;
            pair_metric(&(xt.clone(), yt.clone()), &(xt.clone(), zt.clone()))
        })
        .collect();
    let d2 = (d[2] - 2.0 * d[1] + d[0]) / (y.h * y.h);
    Ok((d2 - d[1]).abs())
}

/// `|D̈ − D|` at `t = 0` along the reparametrized product flow, with each
/// companion carried by its own [`Reparametrizer`] to `t = ±h`.
#[allow(clippy::too_many_arguments)]
pub fn sectional_residual<F, M, P>(
    pair_metric: &P,
    flow: &F,
    dist: &M,
    spec: &SectionSpec,
    x: &F::State,
    y: &F::State,
    z: &F::State,
    h: f64,
) -> Result<f64>
where
    F: Flow,
    M: Metric<F::State> + ?Sized,
    P: Fn(&(F::State, F::State), &(F::State, F::State)) -> f64 + ?Sized,
{
    let sy = reparam_stencil(flow, dist, spec, x, y, h)?;
    let sz = reparam_stencil(flow, dist, spec, x, z, h)?;
    stencil_residual(pair_metric, &sy, &sz)
}

type ShiftPoint = SuspensionPoint<SymbolicPoint>;

/// Suspension of the full shift with return time `T = ln λ_u`, carrying a
/// distance and a catenary pseudo-metric on section pairs.
///
/// The distance between `(s, ω)` and `(s', η)` is the smallest over lifts
/// `(s' + kT, f^{−k}η)`, `k ∈ {−1, 0, 1}`, of the height gap plus the mean of
/// the fiber term `w(h; ω, η)` at both heights, where `w` interpolates the
/// shift metric linearly between `(f^m ω, f^m η)` and `(f^{m+1} ω, f^{m+1} η)`
/// for `h ∈ [mT, (m+1)T]`. The interpolation keeps it continuous across the
/// identification.
#[derive(Debug, Clone)]
pub struct ShiftSuspension {
    flow: SuspensionFlow<FullShift>,
    lambda: f64,
}

impl Default for ShiftSuspension {
    fn default() -> Self {
        Self::new()
    }
}

impl ShiftSuspension {
    pub fn new() -> Self {
        let lambda = catenary_roots().1;
        let flow = SuspensionFlow::new(FullShift, 1.0 / lambda.ln()).expect("positive rate");
        Self { flow, lambda }
    }

    pub fn flow(&self) -> &SuspensionFlow<FullShift> {
        &self.flow
    }

    pub fn period(&self) -> f64 {
        self.flow.period()
    }

    // w(h; a, b) with the disagreement set D = a ⊕ b: on lap m the shift
    // metric of (f^m a, f^m b) is Σ_{n∈D} λ^{−|n−m|}.
    fn fiber(&self, h: f64, diff: &[i64]) -> f64 {
        let t = self.period();
        let m = (h / t).floor();
        let r = h / t - m;
        let m = m as i64;
        let rho = |m: i64| -> f64 {
            diff.iter()
                .map(|n| self.lambda.powi(-((n - m).abs() as i32)))
                .sum()
        };
        let d0 = rho(m);
        if r == 0.0 {
            return d0;
        }
        (1.0 - r) * d0 + r * rho(m + 1)
    }

    /// Symbols of `q` lifted to the lap of height `s`: the representative
    /// `(q.s + kT, f^{−k} q.x)` whose height is nearest `s`.
    pub fn lift(&self, s: f64, q: &ShiftPoint) -> (f64, SymbolicPoint) {
        let t = self.period();
        let k = ((s - q.s) / t).round() as i64;
        (
            q.s + k as f64 * t,
            FullShift.iterate(&q.x, -k).expect("shift is total"),
        )
    }

    /// `đ((x, y), (x', z)) = Σ_{n ∈ D} e^{−|nT − s|}`, where `s` is the height
    /// of `x` and `D` the indices where the lifted disagreement patterns
    /// `x ⊕ y` and `x' ⊕ z` differ. Along the product flow each term is
    /// `e^{±t}` up to the kink at `s ≡ 0 (mod T)`, so `đ` is catenary on
    /// pairs whose base height stays away from the lap boundary.
    pub fn pair_metric(&self, p: &(ShiftPoint, ShiftPoint), q: &(ShiftPoint, ShiftPoint)) -> f64 {
        let t = self.period();
        let s = p.0.s;
        let pattern = |pair: &(ShiftPoint, ShiftPoint)| {
            let (_, base) = self.lift(s, &pair.0);
            let (_, other) = self.lift(s, &pair.1);
            base.xor(&other)
        };
        let diff = pattern(p).xor(&pattern(q));
        let mut terms: Vec<f64> = diff
            .ones()
            .map(|n| (-(n as f64 * t - s).abs()).exp())
            .collect();
        terms.sort_by(f64::total_cmp);
        terms.iter().sum()
    }
}

impl Metric<ShiftPoint> for ShiftSuspension {
    fn distance(&self, a: &ShiftPoint, b: &ShiftPoint) -> f64 {
        let t = self.period();
        (-1..=1)
            .map(|k: i64| {
                let h = b.s + k as f64 * t;
                let eta = FullShift.iterate(&b.x, -k).expect("shift is total");
                let diff: Vec<i64> = a.x.xor(&eta).ones().collect();
                (a.s - h).abs() + 0.5 * (self.fiber(a.s, &diff) + self.fiber(h, &diff))
            })
            .fold(f64::INFINITY, f64::min)
    }
}
