use std::path::Path;

use serde::Serialize;

use super::ScalarField;
use crate::block::{Block, LAMBDA_RADIUS};
use crate::discrete::SymbolicPoint;
use crate::error::{Error, Result};
use crate::flow::{ConePoint, FakePoint, Flow, SuspensionPoint};
use crate::numeric::{central_first, central_second};

/// Step for first flow derivatives.
pub const FIRST_STEP: f64 = 1e-5;
/// Step for second flow derivatives.
pub const SECOND_STEP: f64 = 1e-4;

/// Flat coordinates of a state, used to name witness points in reports.
pub trait Coordinates {
    fn coords(&self) -> Vec<f64>;
}

impl Coordinates for Vec<f64> {
    fn coords(&self) -> Vec<f64> {
        self.clone()
    }
}

impl Coordinates for f64 {
    fn coords(&self) -> Vec<f64> {
        vec![*self]
    }
}

impl Coordinates for [f64; 2] {
    fn coords(&self) -> Vec<f64> {
        self.to_vec()
    }
}

impl Coordinates for ConePoint {
    fn coords(&self) -> Vec<f64> {
        vec![self.r, self.index as f64]
    }
}

impl Coordinates for FakePoint {
    fn coords(&self) -> Vec<f64> {
        vec![self.u, self.index as f64]
    }
}

impl Coordinates for SymbolicPoint {
    fn coords(&self) -> Vec<f64> {
        self.ones().map(|n| n as f64).collect()
    }
}

impl<A: Coordinates, B: Coordinates> Coordinates for (A, B) {
    fn coords(&self) -> Vec<f64> {
        let mut v = self.0.coords();
        v.extend(self.1.coords());
        v
    }
}

impl<P: Coordinates> Coordinates for SuspensionPoint<P> {
    fn coords(&self) -> Vec<f64> {
        let mut v = vec![self.s];
        v.extend(self.x.coords());
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub index: usize,
    pub coords: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    /// Tolerance on `|L̈ − a²L|`.
    pub residual_tol: f64,
    /// Tolerance on the drift of `L̇² − a²L²`.
    pub drift_tol: f64,
    /// `|L̇|` at or below this marks a critical point for the hyperbolicity
    /// check.
    pub critical_tol: f64,
    /// Length and sampling step of the drift orbits.
    pub orbit_length: f64,
    pub orbit_step: f64,
    /// Flag points off Λ with `L ≤ 0`.
    pub expect_positive: bool,
    /// Without a designated Λ, points with `|L| ≤ zero_tol` count as Λ.
    pub zero_tol: f64,
    pub max_witnesses: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-6,
            drift_tol: 1e-8,
            critical_tol: 1e-6,
            orbit_length: 5.0,
            orbit_step: 0.05,
            expect_positive: true,
            zero_tol: 1e-12,
            max_witnesses: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatenaryReport {
    pub points: usize,
    /// Grid points whose stencil or orbit left the domain.
    pub skipped: usize,
    pub max_residual: f64,
    pub residual_violations: usize,
    pub residual_witnesses: Vec<Witness>,
    /// The point attaining `max_residual`.
    pub worst_residual: Option<Witness>,
    pub hyperbolicity_violations: usize,
    pub hyperbolicity_witnesses: Vec<Witness>,
    pub max_drift: f64,
    pub drift_witness: Option<Witness>,
    pub positivity_violations: usize,
    pub positivity_witnesses: Vec<Witness>,
}

impl CatenaryReport {
    pub fn passed(&self, opts: &VerifyOptions) -> bool {
        self.residual_violations == 0
            && self.hyperbolicity_violations == 0
            && self.positivity_violations == 0
            && self.max_drift <= opts.drift_tol
    }
}

/// `(L, L̇, L̈)` at `x` by central differences along the flow.
pub fn flow_derivatives<F, L>(field: &L, flow: &F, x: &F::State) -> Result<(f64, f64, f64)>
where
    F: Flow,
    L: ScalarField<F::State> + ?Sized,
{
    let along = |t: f64| -> Result<f64> { field.eval(&flow.at(x, t)?) };
    let l = field.eval(x)?;
    let d1 = central_first(along, FIRST_STEP)?;
    let d2 = central_second(along, SECOND_STEP)?;
    Ok((l, d1, d2))
}

fn stencil_failure(e: &Error) -> bool {
    matches!(
        e,
        Error::Exited { .. } | Error::Divergence { .. } | Error::Truncation(_)
    )
}

fn push(list: &mut Vec<Witness>, cap: usize, w: Witness) {
    if list.len() < cap {
        list.push(w);
    }
}

/// Checks `L̈ = a²L` on every grid point, hyperbolicity (`L̈ > 0` wherever
/// `L̇ ≈ 0` off Λ), positivity off Λ, and the constancy of
/// `c = L̇² − a²L²` along orbits of length `opts.orbit_length`. When a block
/// is given, orbits are cut where they leave it and Λ is the block's
/// designated set.
pub fn verify_catenary<F, L>(
    field: &L,
    a: f64,
    flow: &F,
    grid: &[F::State],
    block: Option<&Block<F::State>>,
    opts: &VerifyOptions,
) -> Result<CatenaryReport>
where
    F: Flow,
    F::State: Coordinates,
    L: ScalarField<F::State> + ?Sized,
{
    let mut r = CatenaryReport {
        points: grid.len(),
        skipped: 0,
        max_residual: 0.0,
        residual_violations: 0,
        residual_witnesses: Vec::new(),
        worst_residual: None,
        hyperbolicity_violations: 0,
        hyperbolicity_witnesses: Vec::new(),
        max_drift: 0.0,
        drift_witness: None,
        positivity_violations: 0,
        positivity_witnesses: Vec::new(),
    };
    let cap = opts.max_witnesses;
    let a2 = a * a;
    for (index, x) in grid.iter().enumerate() {
        let (l, d1, d2) = match flow_derivatives(field, flow, x) {
            Ok(v) => v,
            Err(e) if stencil_failure(&e) => {
                r.skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let witness = |value: f64| Witness {
            index,
            coords: x.coords(),
            value,
        };
        let in_lambda = match block.and_then(|b| b.lambda_distance(x)) {
            Some(d) => d <= LAMBDA_RADIUS,
            None => l.abs() <= opts.zero_tol,
        };
        let residual = (d2 - a2 * l).abs();
        if !(residual <= opts.residual_tol) {
            r.residual_violations += 1;
            push(&mut r.residual_witnesses, cap, witness(residual));
        }
        if residual > r.max_residual || residual.is_nan() {
            r.max_residual = residual;
            r.worst_residual = Some(witness(residual));
        }
        if !in_lambda {
            if d1.abs() <= opts.critical_tol && !(d2 > 0.0) {
                r.hyperbolicity_violations += 1;
                push(&mut r.hyperbolicity_witnesses, cap, witness(d2));
            }
            if opts.expect_positive && !(l > 0.0) {
                r.positivity_violations += 1;
                push(&mut r.positivity_witnesses, cap, witness(l));
            }
        }

        let c0 = d1 * d1 - a2 * l * l;
        let steps = (opts.orbit_length / opts.orbit_step).round() as usize;
        for k in 1..=steps {
            let y = match flow.at(x, k as f64 * opts.orbit_step) {
                Ok(y) => y,
                Err(e) if stencil_failure(&e) => break,
                Err(e) => return Err(e),
            };
            if let Some(b) = block {
                if !b.contains(&y)? {
                    break;
                }
            }
            let ly = field.eval(&y)?;
            let dy = match central_first(|t| field.eval(&flow.at(&y, t)?), FIRST_STEP) {
                Ok(v) => v,
                Err(e) if stencil_failure(&e) => break,
                Err(e) => return Err(e),
            };
            let drift = (dy * dy - a2 * ly * ly - c0).abs();
            if drift > r.max_drift || drift.is_nan() {
                r.max_drift = drift;
                r.drift_witness = Some(witness(drift));
            }
        }
    }
    Ok(r)
}

/// One CSV row: state coordinates followed by `L`, `L̇`, `L̈` and the
/// residual `|L̈ − a²L|`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub coords: Vec<f64>,
    pub l: f64,
    pub l_dot: f64,
    pub l_ddot: f64,
    pub residual: f64,
}

pub fn write_grid_csv(path: &Path, coord_names: &[&str], rows: &[GridRow]) -> Result<()> {
    let io = |e: csv::Error| Error::Spec(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    let mut header: Vec<String> = coord_names.iter().map(|s| s.to_string()).collect();
    header.extend(["L", "Ldot", "Lddot", "residual"].map(String::from));
    w.write_record(&header).map_err(io)?;
    for row in rows {
        let mut rec: Vec<String> = row.coords.iter().map(|v| v.to_string()).collect();
        rec.extend([row.l, row.l_dot, row.l_ddot, row.residual].map(|v| v.to_string()));
        w.write_record(&rec).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::Spec(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}
