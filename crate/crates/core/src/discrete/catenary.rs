use serde::Serialize;

use super::{DiscreteSystem, SymbolicPoint};
use crate::error::{Error, Result};
use crate::metric::Metric;

/// Roots `(λ_s, λ_u)` of `λ² − 3λ + 1 = 0`. `λ_s` is computed as `1/λ_u`
/// in the rationalized form `2/(3+√5)`, which avoids the cancellation in
/// `(3−√5)/2`.
pub fn catenary_roots() -> (f64, f64) {
    let s5 = 5f64.sqrt();
    (2.0 / (3.0 + s5), (3.0 + s5) / 2.0)
}

/// `L(f x) − 2L(x) + L(f⁻¹ x)`.
pub fn second_difference<D, L>(field: &L, map: &D, x: &D::Point) -> Result<f64>
where
    D: DiscreteSystem,
    L: Fn(&D::Point) -> Result<f64>,
{
    let stencil = |e: Error| match e {
        Error::Domain(m) => Error::Truncation(format!("second-difference stencil: {m}")),
        other => other,
    };
    let fx = map.forward(x).map_err(stencil)?;
    let bx = map.backward(x).map_err(stencil)?;
    Ok(field(&fx).map_err(stencil)? - 2.0 * field(x)? + field(&bx).map_err(stencil)?)
}

/// `đ(x, y) = Σ_n |x_n − y_n| λ^{−|n|}`, summed smallest terms first.
pub fn shift_metric(x: &SymbolicPoint, y: &SymbolicPoint, lambda: f64) -> Result<f64> {
    if !(lambda > 1.0) {
        return Err(Error::Domain(format!(
            "shift metric needs λ > 1, got {lambda}"
        )));
    }
    Ok(ShiftMetric { lambda }.eval(x, y))
}

/// The shift metric as a [`Metric`] oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftMetric {
    lambda: f64,
}

impl ShiftMetric {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 1.0) {
            return Err(Error::Domain(format!(
                "shift metric needs λ > 1, got {lambda}"
            )));
        }
        Ok(Self { lambda })
    }

    /// `λ = λ_u`, the catenary choice.
    pub fn catenary() -> Self {
        Self {
            lambda: catenary_roots().1,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    fn eval(&self, x: &SymbolicPoint, y: &SymbolicPoint) -> f64 {
        let mut diff = x.difference(y);
        diff.sort_by_key(|n| std::cmp::Reverse(n.unsigned_abs()));
        diff.iter()
            .map(|n| self.lambda.powi(-(n.unsigned_abs() as i32)))
            .sum()
    }
}

impl Metric<SymbolicPoint> for ShiftMetric {
    fn distance(&self, a: &SymbolicPoint, b: &SymbolicPoint) -> f64 {
        self.eval(a, b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscreteCatenarySpec {
    pub lambda_s: f64,
    pub lambda_u: f64,
    /// Pair-space block level.
    pub delta: f64,
    /// Iterates searched on each side before a side counts as infinite.
    pub n_max: i64,
}

impl Default for DiscreteCatenarySpec {
    fn default() -> Self {
        let (lambda_s, lambda_u) = catenary_roots();
        Self {
            lambda_s,
            lambda_u,
            delta: 0.5,
            n_max: 40,
        }
    }
}

impl DiscreteCatenarySpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.lambda_s > 0.0
            && self.lambda_s < 1.0
            && self.lambda_u > 1.0
            && (self.lambda_s * self.lambda_u - 1.0).abs() <= 1e-12
            && (self.lambda_s + self.lambda_u - 3.0).abs() <= 1e-12;
        if !ok {
            return Err(Error::Spec(format!(
                "λ_s = {}, λ_u = {} are not the roots of λ² − 3λ + 1",
                self.lambda_s, self.lambda_u
            )));
        }
        if !(self.delta > 0.0) || self.n_max < 1 {
            return Err(Error::Spec(format!(
                "need δ > 0 and N_max ≥ 1, got δ = {}, N_max = {}",
                self.delta, self.n_max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscreteBranch {
    Diagonal,
    Transient,
    Ws,
    Wu,
}

/// Solution of `u_{k+1} − 3u_k + u_{k−1} = 0` along the orbit of a pair,
/// with `u = δ` at the first iterates that leave the block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscreteBvp {
    pub value: f64,
    /// Last `n ≤ 0` with `đ(fⁿx, fⁿy) > δ`, if found within `N_max`.
    pub n_s: Option<i64>,
    /// First `n ≥ 0` with `đ(fⁿx, fⁿy) > δ`, if found within `N_max`.
    pub n_u: Option<i64>,
    pub branch: DiscreteBranch,
}

impl DiscreteBvp {
    /// `u_k` from the closed form (orbit index relative to the pair).
    pub fn value_at(&self, spec: &DiscreteCatenarySpec, k: i64) -> f64 {
        let (ls, lu, d) = (spec.lambda_s, spec.lambda_u, spec.delta);
        let pow = |b: f64, e: i64| b.powi(e as i32);
        match (self.branch, self.n_s, self.n_u) {
            (DiscreteBranch::Transient, Some(ns), Some(nu)) => {
                let r = pow(ls, nu - ns);
                d / (1.0 + r) * (pow(lu, k - nu) + pow(ls, k - ns))
            }
            (DiscreteBranch::Ws, Some(ns), _) => d * pow(ls, k - ns),
            (DiscreteBranch::Wu, _, Some(nu)) => d * pow(lu, k - nu),
            _ => 0.0,
        }
    }
}

fn exit_index<D, M>(
    map: &D,
    metric: &M,
    x: &D::Point,
    y: &D::Point,
    delta: f64,
    n_max: i64,
    dir: i64,
) -> Result<Option<i64>>
where
    D: DiscreteSystem,
    M: Metric<D::Point> + ?Sized,
{
    let (mut a, mut b) = (x.clone(), y.clone());
    for n in 1..=n_max {
        a = map.iterate(&a, dir)?;
        b = map.iterate(&b, dir)?;
        if metric.distance(&a, &b) > delta {
            return Ok(Some(dir * n));
        }
    }
    Ok(None)
}

/// Discrete catenary boundary value problem on the pair `(x, y)`.
///
/// With `L = n_u − n_s` and `r = λ_s^L` the transient solution is
/// `u_k = δ/(1+r) (λ_u^{k−n_u} + λ_s^{k−n_s})`; if only one side exits the
/// solution is the single exponential through `δ` at that side.
pub fn discrete_catenary_bvp<D, M>(
    map: &D,
    metric: &M,
    spec: &DiscreteCatenarySpec,
    x: &D::Point,
    y: &D::Point,
) -> Result<DiscreteBvp>
where
    D: DiscreteSystem,
    M: Metric<D::Point> + ?Sized,
{
    spec.validate()?;
    let d0 = metric.distance(x, y);
    if !(d0 <= spec.delta) {
        return Err(Error::Domain(format!(
            "pair outside the block: đ = {d0} > δ = {}",
            spec.delta
        )));
    }
    if x == y {
        return Ok(DiscreteBvp {
            value: 0.0,
            n_s: Some(0),
            n_u: Some(0),
            branch: DiscreteBranch::Diagonal,
        });
    }
    let n_u = exit_index(map, metric, x, y, spec.delta, spec.n_max, 1)?;
    let n_s = exit_index(map, metric, x, y, spec.delta, spec.n_max, -1)?;
    let branch = match (n_s, n_u) {
        (Some(_), Some(_)) => DiscreteBranch::Transient,
        (Some(_), None) => DiscreteBranch::Ws,
        (None, Some(_)) => DiscreteBranch::Wu,
        (None, None) => {
            return Err(Error::Unresolved(format!(
                "distinct pair stays δ-close for |n| ≤ {}",
                spec.n_max
            )))
        }
    };
    let mut out = DiscreteBvp {
        value: 0.0,
        n_s,
        n_u,
        branch,
    };
    out.value = out.value_at(spec, 0);
    Ok(out)
}

/// Values `(k, u_k)` along the orbit of the pair: boundary indices carry
/// `δ`, interior indices are re-solved at `(f^k x, f^k y)`. Transient pairs
/// cover `[n_s, n_u]`, `W^s` pairs `[n_s, 0]`, `W^u` pairs `[0, n_u]`.
pub fn discrete_orbit_values<D, M>(
    map: &D,
    metric: &M,
    spec: &DiscreteCatenarySpec,
    x: &D::Point,
    y: &D::Point,
) -> Result<Vec<(i64, f64)>>
where
    D: DiscreteSystem,
    M: Metric<D::Point> + ?Sized,
{
    let base = discrete_catenary_bvp(map, metric, spec, x, y)?;
    let (lo, hi) = match base.branch {
        DiscreteBranch::Diagonal => return Ok(vec![(0, 0.0)]),
        DiscreteBranch::Transient => (base.n_s.unwrap_or(0), base.n_u.unwrap_or(0)),
        DiscreteBranch::Ws => (base.n_s.unwrap_or(0), 0),
        DiscreteBranch::Wu => (0, base.n_u.unwrap_or(0)),
    };
    let mut out = Vec::with_capacity((hi - lo + 1) as usize);
    for k in lo..=hi {
        let boundary = Some(k) == base.n_s || Some(k) == base.n_u;
        let v = if boundary {
            spec.delta
        } else {
            let (a, b) = (map.iterate(x, k)?, map.iterate(y, k)?);
            discrete_catenary_bvp(map, metric, spec, &a, &b)?.value
        };
        out.push((k, v));
    }
    Ok(out)
}

/// Largest `|u_{k+1} − 3u_k + u_{k−1}|` over interior indices of
/// consecutive orbit values.
pub fn recurrence_residual(values: &[(i64, f64)]) -> f64 {
    values
        .windows(3)
        .filter(|w| w[1].0 - w[0].0 == 1 && w[2].0 - w[1].0 == 1)
        .map(|w| (w[2].1 - 3.0 * w[1].1 + w[0].1).abs())
        .fold(0.0, f64::max)
}
