use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::*;
use super::expr::Expr;
use super::ScenarioError;
use crate::block::{Block, DEFAULT_BAND, LAMBDA_RADIUS};
use crate::catenary::{
    attractor_lyapunov, catenary_bvp, catenary_sum_function, exact_decay_lyapunov,
    flow_derivatives, quadratic_bound, verify_catenary, write_grid_csv, AttractorOptions, BvpSpec,
    CatenaryReport, GridRow, Rate, RateField, VerifyOptions, FIRST_STEP, SECOND_STEP,
};
use crate::discrete::{
    catenary_roots, discrete_orbit_values, recurrence_residual, second_difference,
    DiscreteCatenarySpec, FullShift, PairSystem, ShiftMetric, SymbolicPoint,
};
use crate::error::{Error, Result};
use crate::flow::{orbit_trace, DiagonalLinear, Flow, OdeFlow, Restricted, SuspensionPoint};
use crate::metric::{check_metric_axioms, Euclidean, Metric, SizeFunctionSpec};
use crate::numeric::norm;
use crate::sections::{
    reparam_stencil, section_project, sectional_metric, stencil_residual, write_section_trace,
    ReparamState, Reparametrizer, SectionSpec, ShiftSuspension,
};

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Overrides the scenario's seed.
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
    pub tolerance_scale: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            seed: None,
            out_dir: PathBuf::from("."),
            tolerance_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// `"<="` or `">="`.
    pub relation: &'static str,
    pub limit: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

impl Check {
    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: "<=",
            limit,
            passed: value <= limit,
            witness: None,
        }
    }

    pub fn at_least(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: ">=",
            limit,
            passed: value >= limit,
            witness: None,
        }
    }

    pub fn with_witness<W: Serialize>(mut self, w: Option<W>) -> Self {
        self.witness = w.and_then(|w| serde_json::to_value(w).ok());
        self
    }
}

/// Numerical constants in effect for a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constants {
    pub fd_first_step: f64,
    pub fd_second_step: f64,
    pub block_band: f64,
    pub lambda_radius: f64,
    pub lambda_u: f64,
    pub bisection: &'static str,
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            fd_first_step: FIRST_STEP,
            fd_second_step: SECOND_STEP,
            block_band: DEFAULT_BAND,
            lambda_radius: LAMBDA_RADIUS,
            lambda_u: catenary_roots().1,
            bisection: "floating resolution",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub scenario: Scenario,
    pub seed: u64,
    pub tolerance_scale: f64,
    pub effective_tolerances: Tolerances,
    pub constants: Constants,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub scenario: String,
    pub construction: &'static str,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catenary: Option<CatenaryReport>,
    pub outputs: Vec<String>,
    pub config: ConfigEcho,
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    /// The first failing check, if any.
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

fn config_err(origin: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Config {
        origin: origin.to_string(),
        message: message.into(),
    }
}

pub fn load_scenario(path: &Path) -> std::result::Result<Scenario, ScenarioError> {
    let origin = path.display().to_string();
    let text =
        fs::read_to_string(path).map_err(|e| config_err(&origin, format!("cannot read: {e}")))?;
    parse_scenario(&text, &origin)
}

/// Parses and validates a scenario; diagnostics carry line and column.
pub fn parse_scenario(text: &str, origin: &str) -> std::result::Result<Scenario, ScenarioError> {
    let sc: Scenario = serde_json::from_str(text).map_err(|e| config_err(origin, e.to_string()))?;
    validate(&sc).map_err(|m| config_err(origin, m))?;
    Ok(sc)
}

fn validate(sc: &Scenario) -> std::result::Result<(), String> {
    if sc.schema != SCENARIO_SCHEMA {
        return Err(format!(
            "field `schema`: expected \"{SCENARIO_SCHEMA}\", got \"{}\"",
            sc.schema
        ));
    }
    if sc.name.is_empty() || sc.name.contains(['/', '\\']) {
        return Err(format!("field `name`: \"{}\" is not a plain name", sc.name));
    }
    for (name, v) in sc.tolerances.named() {
        if !(v > 0.0 && v.is_finite()) {
            return Err(format!(
                "field `tolerances.{name}` must be positive, got {v}"
            ));
        }
    }
    if sc.grid.n < 2 || !(sc.grid.lo < sc.grid.hi) {
        return Err("field `grid`: need n ≥ 2 and lo < hi".into());
    }
    let continuous = sc.system.is_continuous_vector();
    let dim = sc.system.dim().unwrap_or(0);
    if let SystemSpec::Ode {
        variables,
        field,
        h,
    } = &sc.system
    {
        if variables.is_empty() || variables.len() != field.len() {
            return Err("field `system.field`: need one expression per variable".into());
        }
        if !(*h > 0.0) {
            return Err(format!("field `system.h` must be positive, got {h}"));
        }
        for e in field {
            Expr::parse(e, variables)?;
        }
    }
    if let SystemSpec::Diagonal { rates } = &sc.system {
        if rates.is_empty() || rates.iter().any(|r| !r.is_finite()) {
            return Err("field `system.rates`: need finite rates".into());
        }
    }
    if let Some(b) = &sc.block {
        if !continuous {
            return Err("field `block`: only vector systems take a block".into());
        }
        if !(b.delta > 0.0) {
            return Err(format!(
                "field `block.delta` must be positive, got {}",
                b.delta
            ));
        }
        if !(b.t_max > 0.0) || !(b.scan_step > 0.0) {
            return Err("fields `block.t_max` and `block.scan_step` must be positive".into());
        }
        if let Some(l) = &b.lambda {
            if l.len() != dim {
                return Err(format!("field `block.lambda`: expected {dim} coordinates"));
            }
        }
    }
    if let Some(c) = &sc.corruption {
        if !continuous {
            return Err("field `corruption`: only vector systems carry a field".into());
        }
        Expr::parse(c, &sc.system.variables())?;
    }
    let needs = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(format!(
                "field `construction`: `{}` needs {what}",
                sc.construction.name()
            ))
        }
    };
    match &sc.construction {
        Construction::Bvp { boundary, a } => {
            needs(
                continuous && sc.block.is_some(),
                "a vector system and a block",
            )?;
            if !(*boundary > 0.0) || !(*a > 0.0) {
                return Err(
                    "fields `construction.boundary` and `construction.a` must be positive".into(),
                );
            }
        }
        Construction::Sum => {
            needs(
                matches!(sc.system, SystemSpec::Saddle | SystemSpec::Diagonal { .. }),
                "a saddle or diagonal system",
            )?;
            sum_rate(&sc.system)?;
        }
        Construction::ExactDecay {
            a, level, max_time, ..
        } => {
            needs(continuous, "a vector system")?;
            if !(*a > 0.0 && *level > 0.0 && *max_time > 0.0) {
                return Err("fields `construction.a`, `level`, `max_time` must be positive".into());
            }
        }
        Construction::AttractorSize { depth, .. } => {
            needs(continuous, "a vector system")?;
            if *depth == 0 {
                return Err("field `construction.depth` must be positive".into());
            }
        }
        Construction::DiscreteBvp { .. } | Construction::ShiftMetric { .. } => {
            needs(matches!(sc.system, SystemSpec::FullShift), "the full shift")?;
        }
        Construction::Sectional { .. } => {
            needs(
                matches!(sc.system, SystemSpec::ShiftSuspension),
                "the shift suspension",
            )?;
        }
    }
    if let Some(t) = &sc.trace {
        needs(
            matches!(
                sc.construction,
                Construction::Bvp { .. } | Construction::Sum | Construction::ExactDecay { .. }
            ),
            "a catenary field to trace (bvp, sum or exact_decay)",
        )?;
        if t.start.len() != dim {
            return Err(format!("field `trace.start`: expected {dim} coordinates"));
        }
        if !(t.t0 < t.t1) || !(t.step > 0.0) {
            return Err("field `trace`: need t0 < t1 and step > 0".into());
        }
        if t.restrict && sc.block.is_none() {
            return Err("field `trace.restrict` needs a block".into());
        }
    }
    Ok(())
}

fn sum_rate(system: &SystemSpec) -> std::result::Result<f64, String> {
    let rates = match system {
        SystemSpec::Saddle => vec![1.0, -1.0],
        SystemSpec::Diagonal { rates } => rates.clone(),
        _ => return Err("sum needs a saddle or diagonal system".into()),
    };
    let a = rates[0].abs();
    if !(a > 0.0) || rates.iter().any(|r| (r.abs() - a).abs() > 1e-12 * a) {
        return Err(format!(
            "field `system.rates`: sum needs rates ±a with one common a, got {rates:?}"
        ));
    }
    Ok(a)
}

type VecFlow = Box<dyn Flow<State = Vec<f64>>>;
type VecField<'a> = Box<dyn Fn(&Vec<f64>) -> Result<f64> + 'a>;

fn build_flow(system: &SystemSpec) -> Result<VecFlow> {
    Ok(match system {
        SystemSpec::Saddle => Box::new(DiagonalLinear::saddle()),
        SystemSpec::Diagonal { rates } => Box::new(DiagonalLinear::new(rates.clone())?),
        SystemSpec::Ode {
            variables,
            field,
            h,
        } => {
            let exprs = field
                .iter()
                .map(|e| Expr::parse(e, variables).map_err(Error::Spec))
                .collect::<Result<Vec<_>>>()?;
            let f = move |x: &[f64], out: &mut [f64]| -> Result<()> {
                for (o, e) in out.iter_mut().zip(&exprs) {
                    *o = e.eval(x)?;
                }
                Ok(())
            };
            Box::new(OdeFlow::from_fn(variables.len(), f, *h)?)
        }
        _ => return Err(Error::Spec("not a vector system".into())),
    })
}

fn build_block(spec: &BlockSpec, dim: usize) -> Result<Block<Vec<f64>>> {
    let ind = spec.indicator;
    let indicator = move |x: &Vec<f64>| -> Result<f64> {
        Ok(match ind {
            Indicator::L1 => x.iter().map(|v| v.abs()).sum(),
            Indicator::L2 => norm(x),
            Indicator::Linf => x.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
        })
    };
    let lambda = spec.lambda.clone().unwrap_or_else(|| vec![0.0; dim]);
    Ok(Block::new(indicator, spec.delta)?
        .with_scan_step(spec.scan_step)
        .with_lambda(move |x: &Vec<f64>| crate::numeric::euclidean(x, &lambda)))
}

fn box_grid(grid: &GridSpec, dim: usize) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (0..grid.n)
        .map(|i| grid.lo + (grid.hi - grid.lo) * i as f64 / (grid.n - 1) as f64)
        .collect();
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

fn random_vec(rng: &mut ChaCha8Rng, dim: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(lo..=hi)).collect()
}

/// Random finite-support sequence with ones among indices `lo..=hi`.
fn random_symbols(rng: &mut ChaCha8Rng, lo: i64, hi: i64, density: f64) -> SymbolicPoint {
    SymbolicPoint::from_ones(
        (lo..=hi)
            .filter(|_| rng.gen_bool(density))
            .collect::<Vec<_>>(),
    )
}

/// Random nonempty set of indices with `min ≤ |n| ≤ max`.
fn random_flips(rng: &mut ChaCha8Rng, min: i64, max: i64) -> SymbolicPoint {
    loop {
        let ones: Vec<i64> = (-max..=max)
            .filter(|n| n.abs() >= min)
            .filter(|_| rng.gen_bool(0.2))
            .collect();
        if !ones.is_empty() {
            return SymbolicPoint::from_ones(ones);
        }
    }
}

#[derive(Serialize)]
struct PairWitness {
    x: Vec<i64>,
    y: Vec<i64>,
    value: f64,
}

#[derive(Serialize)]
struct PointWitness {
    point: Vec<f64>,
    value: f64,
}

struct Outcome {
    checks: Vec<Check>,
    catenary: Option<CatenaryReport>,
    outputs: Vec<String>,
}

/// Runs a validated scenario, writing the report and requested CSV files
/// under `opts.out_dir`.
pub fn run_loaded(
    sc: &Scenario,
    opts: &RunOptions,
) -> std::result::Result<RunReport, ScenarioError> {
    let clock = Instant::now();
    if !(opts.tolerance_scale > 0.0 && opts.tolerance_scale.is_finite()) {
        return Err(config_err(
            "--tolerance-scale",
            format!("must be positive, got {}", opts.tolerance_scale),
        ));
    }
    let seed = opts.seed.unwrap_or(sc.seed);
    let tol = sc.tolerances.scaled(opts.tolerance_scale);
    fs::create_dir_all(&opts.out_dir).map_err(|e| {
        config_err(
            &opts.out_dir.display().to_string(),
            format!("cannot create output directory: {e}"),
        )
    })?;
    let mut out = Outcome {
        checks: Vec::new(),
        catenary: None,
        outputs: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match &sc.system {
        s if s.is_continuous_vector() => run_vector(sc, &tol, &mut rng, opts, &mut out)?,
        SystemSpec::FullShift => run_shift(sc, &tol, &mut rng, &mut out)?,
        _ => run_sectional(sc, &tol, &mut rng, opts, &mut out)?,
    }
    let verdict = if out.checks.iter().all(|c| c.passed) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let report = RunReport {
        schema: REPORT_SCHEMA,
        scenario: sc.name.clone(),
        construction: sc.construction.name(),
        verdict,
        checks: out.checks,
        catenary: out.catenary,
        outputs: out.outputs,
        config: ConfigEcho {
            scenario: sc.clone(),
            seed,
            tolerance_scale: opts.tolerance_scale,
            effective_tolerances: tol,
            constants: Constants::default(),
        },
        wall_time_s: clock.elapsed().as_secs_f64(),
    };
    let path = opts.out_dir.join(&sc.outputs.report);
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    fs::write(&path, json + "\n").map_err(|e| {
        ScenarioError::Run(Error::Spec(format!("cannot write {}: {e}", path.display())))
    })?;
    Ok(report)
}

fn verify_options(tol: &Tolerances) -> VerifyOptions {
    VerifyOptions {
        residual_tol: tol.residual,
        drift_tol: tol.drift,
        critical_tol: tol.critical,
        orbit_length: tol.orbit_length,
        orbit_step: tol.orbit_step,
        ..VerifyOptions::default()
    }
}

/// The catenary field of a vector scenario and its exponent, with the
/// corruption term added.
fn vector_field<'a>(
    sc: &'a Scenario,
    flow: &'a VecFlow,
    block: Option<&'a Block<Vec<f64>>>,
) -> Result<(VecField<'a>, f64)> {
    let (base, a): (VecField<'a>, f64) = match &sc.construction {
        Construction::Bvp { boundary, a } => {
            let block = block.ok_or_else(|| Error::Spec("bvp needs a block".into()))?;
            let spec = BvpSpec::constant(*boundary, *a)?;
            let t_max = sc
                .block
                .as_ref()
                .map_or(crate::block::DEFAULT_T_MAX, |b| b.t_max);
            let f = move |x: &Vec<f64>| -> Result<f64> {
                if !block.contains(x)? {
                    return Err(Error::Truncation("point outside the block".into()));
                }
                catenary_bvp(flow, block, &spec, x, t_max)
            };
            (Box::new(f), *a)
        }
        Construction::Sum => {
            let a = sum_rate(&sc.system).map_err(Error::Spec)?;
            let rates: Vec<f64> = match &sc.system {
                SystemSpec::Diagonal { rates } => rates.clone(),
                _ => vec![1.0, -1.0],
            };
            let r1 = rates.clone();
            let alpha = RateField::new(
                move |x: &Vec<f64>| {
                    Ok(x.iter()
                        .zip(&r1)
                        .filter(|(_, r)| **r > 0.0)
                        .map(|(v, _)| v.abs())
                        .sum())
                },
                a,
                Rate::Growth,
            );
            let omega = RateField::new(
                move |x: &Vec<f64>| {
                    Ok(x.iter()
                        .zip(&rates)
                        .filter(|(_, r)| **r < 0.0)
                        .map(|(v, _)| v.abs())
                        .sum())
                },
                a,
                Rate::Decay,
            );
            (
                Box::new(move |x: &Vec<f64>| catenary_sum_function(&alpha, &omega, x)),
                a,
            )
        }
        Construction::ExactDecay { a, level, .. } => {
            let (a, level) = (*a, *level);
            let v = |x: &Vec<f64>| Ok(norm(x));
            (
                Box::new(move |x: &Vec<f64>| exact_decay_lyapunov(flow, &v, level, a, x)),
                a,
            )
        }
        _ => return Err(Error::Spec("construction has no catenary field".into())),
    };
    Ok(match &sc.corruption {
        None => (base, a),
        Some(src) => {
            let e = Expr::parse(src, &sc.system.variables()).map_err(Error::Spec)?;
            (Box::new(move |x: &Vec<f64>| Ok(base(x)? + e.eval(x)?)), a)
        }
    })
}

fn run_vector(
    sc: &Scenario,
    tol: &Tolerances,
    rng: &mut ChaCha8Rng,
    opts: &RunOptions,
    out: &mut Outcome,
) -> Result<()> {
    let dim = sc.system.dim().unwrap_or(0);
    let flow = build_flow(&sc.system)?;
    let block = sc.block.as_ref().map(|b| build_block(b, dim)).transpose()?;

    if let Construction::AttractorSize { depth, samples } = &sc.construction {
        return run_attractor_size(sc, &flow, *depth, *samples, tol, rng, out);
    }

    let (field, a) = vector_field(sc, &flow, block.as_ref())?;
    let mut grid = box_grid(&sc.grid, dim);
    if let Some(b) = &block {
        grid.retain(|x| b.contains(x).unwrap_or(false));
    }
    if matches!(sc.construction, Construction::ExactDecay { .. }) {
        // the origin never crosses the level set
        grid.retain(|x| norm(x) > 1e-9);
    }
    let vopts = verify_options(tol);
    let report = verify_catenary(&field, a, &flow, &grid, block.as_ref(), &vopts)?;
    out.checks.push(
        Check::at_most("catenary_residual", report.max_residual, tol.residual)
            .with_witness(report.worst_residual.as_ref()),
    );
    out.checks.push(
        Check::at_most(
            "hyperbolicity_violations",
            report.hyperbolicity_violations as f64,
            0.0,
        )
        .with_witness(report.hyperbolicity_witnesses.first()),
    );
    out.checks.push(
        Check::at_most("constant_of_motion_drift", report.max_drift, tol.drift)
            .with_witness(report.drift_witness.as_ref()),
    );
    out.checks.push(
        Check::at_most(
            "positivity_violations",
            report.positivity_violations as f64,
            0.0,
        )
        .with_witness(report.positivity_witnesses.first()),
    );
    out.checks.push(Check::at_least(
        "evaluated_points",
        (report.points - report.skipped) as f64,
        1.0,
    ));

    if let Construction::ExactDecay {
        a,
        level,
        samples,
        max_time,
    } = &sc.construction
    {
        exact_decay_checks(
            sc, &flow, &field, *a, *level, *samples, *max_time, tol, rng, out,
        )?;
    }

    if let Some(name) = &sc.outputs.grid_csv {
        let rows: Vec<GridRow> = grid
            .iter()
            .filter_map(|x| {
                flow_derivatives(&field, &flow, x)
                    .ok()
                    .map(|(l, d1, d2)| GridRow {
                        coords: x.clone(),
                        l,
                        l_dot: d1,
                        l_ddot: d2,
                        residual: (d2 - a * a * l).abs(),
                    })
            })
            .collect();
        let names = sc.system.variables();
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        write_grid_csv(&opts.out_dir.join(name), &names, &rows)?;
        out.outputs.push(name.clone());
    }
    if let (Some(_), Some(name)) = (&sc.trace, &sc.outputs.trace_csv) {
        write_trace(
            sc,
            &flow,
            block.as_ref(),
            &field,
            a,
            &opts.out_dir.join(name),
        )?;
        out.outputs.push(name.clone());
    }
    out.catenary = Some(report);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn exact_decay_checks(
    sc: &Scenario,
    flow: &VecFlow,
    field: &VecField<'_>,
    a: f64,
    level: f64,
    samples: usize,
    max_time: f64,
    tol: &Tolerances,
    rng: &mut ChaCha8Rng,
    out: &mut Outcome,
) -> Result<()> {
    let dim = sc.system.dim().unwrap_or(0);
    let mut worst = (0.0, None);
    let mut bound_excess = f64::NEG_INFINITY;
    let mut bound_witness = None;
    let mut points = Vec::with_capacity(samples);
    while points.len() < samples {
        let x = random_vec(rng, dim, -level, level);
        let r = norm(&x);
        if r > 0.05 * level && r <= level {
            points.push(x);
        }
    }
    for x in &points {
        let t = rng.gen_range(0.0..=max_time);
        let lx = field(x)?;
        let lt = field(&flow.at(x, t)?)?;
        let err = (lt - (-a * t).exp() * lx).abs();
        if err > worst.0 || err.is_nan() {
            worst = (
                err,
                Some(PointWitness {
                    point: x.clone(),
                    value: err,
                }),
            );
        }
    }
    out.checks
        .push(Check::at_most("decay_law", worst.0, tol.decay).with_witness(worst.1));

    // L ≤ l‖x‖² inside the level ball needs a ≥ 2k, k the fastest contraction rate.
    if let SystemSpec::Diagonal { rates } = &sc.system {
        let k = rates.iter().fold(0.0, |m: f64, r| m.max(r.abs()));
        if rates.iter().all(|r| *r < 0.0) && a >= 2.0 * k {
            let section: Vec<Vec<f64>> = points
                .iter()
                .map(|x| x.iter().map(|v| v * level / norm(x)).collect())
                .collect();
            let l = quadratic_bound(&section)?;
            for x in &points {
                let excess = field(x)? - l * norm(x).powi(2);
                if excess > bound_excess {
                    bound_excess = excess;
                    bound_witness = Some(PointWitness {
                        point: x.clone(),
                        value: excess,
                    });
                }
            }
            out.checks.push(
                Check::at_most("quadratic_bound_excess", bound_excess, tol.decay)
                    .with_witness(bound_witness),
            );
        }
    }
    Ok(())
}

fn run_attractor_size(
    sc: &Scenario,
    flow: &VecFlow,
    depth: usize,
    samples: usize,
    tol: &Tolerances,
    rng: &mut ChaCha8Rng,
    out: &mut Outcome,
) -> Result<()> {
    let dim = sc.system.dim().unwrap_or(0);
    let p = sc
        .block
        .as_ref()
        .and_then(|b| b.lambda.clone())
        .unwrap_or_else(|| vec![0.0; dim]);
    let (lo, hi) = (sc.grid.lo, sc.grid.hi);
    let mut pool = vec![p.clone()];
    pool.extend((0..4 * depth).map(|_| random_vec(rng, dim, lo, hi)));
    let refs = SizeFunctionSpec::farthest_point(&pool, depth, &Euclidean)?;
    let opts = AttractorOptions::default();
    let l = |x: &Vec<f64>| attractor_lyapunov(flow, &Euclidean, &p, &refs, x, &opts);

    out.checks
        .push(Check::at_most("size_at_attractor", l(&p)?.abs(), tol.exact));
    let mut nonpositive = 0usize;
    let mut increases = 0usize;
    let mut witness = None;
    for _ in 0..samples {
        let x = random_vec(rng, dim, lo, hi);
        if Euclidean.distance(&x, &p) <= opts.radius {
            continue;
        }
        let lx = l(&x)?;
        if !(lx > 0.0) {
            nonpositive += 1;
        }
        for t in [0.1, 0.5, 1.0] {
            let lt = l(&flow.at(&x, t)?)?;
            if lt > lx + tol.axiom {
                increases += 1;
                witness.get_or_insert(PointWitness {
                    point: x.clone(),
                    value: lt - lx,
                });
            }
        }
    }
    out.checks.push(Check::at_most(
        "positivity_violations",
        nonpositive as f64,
        0.0,
    ));
    out.checks.push(
        Check::at_most("monotonicity_violations", increases as f64, 0.0).with_witness(witness),
    );
    Ok(())
}

fn write_trace(
    sc: &Scenario,
    flow: &VecFlow,
    block: Option<&Block<Vec<f64>>>,
    field: &VecField<'_>,
    a: f64,
    path: &Path,
) -> Result<()> {
    let spec = sc
        .trace
        .as_ref()
        .ok_or_else(|| Error::Spec("no trace requested".into()))?;
    let points = match (spec.restrict, block) {
        (true, Some(b)) => {
            let restricted = Restricted::new(flow, |x: &Vec<f64>| b.indicator(x), b.delta())
                .with_scan_step(b.scan_step());
            orbit_trace(&restricted, &spec.start, spec.t0, spec.t1, spec.step)?
        }
        _ => orbit_trace(flow, &spec.start, spec.t0, spec.t1, spec.step)?,
    };
    let io = |e: csv::Error| Error::Spec(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    let mut header = vec!["t".to_string()];
    header.extend(sc.system.variables());
    header.extend(["L", "Ldot", "Lddot", "residual", "event"].map(String::from));
    w.write_record(&header).map_err(io)?;
    for p in &points {
        let (l, d1, d2) =
            flow_derivatives(field, flow, &p.state).unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        let mut rec = vec![p.t.to_string()];
        rec.extend(p.state.iter().map(|v| v.to_string()));
        rec.extend([l, d1, d2, (d2 - a * a * l).abs()].map(|v| v.to_string()));
        rec.push(if p.exit { "exit".into() } else { String::new() });
        w.write_record(&rec).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::Spec(format!("cannot write {}: {e}", path.display())))
}

/// Writes only the orbit trace of a scenario and returns its path.
pub fn trace_scenario(
    sc: &Scenario,
    opts: &RunOptions,
) -> std::result::Result<PathBuf, ScenarioError> {
    if sc.trace.is_none() {
        return Err(config_err(
            &sc.name,
            "field `trace` is required for a trace export",
        ));
    }
    fs::create_dir_all(&opts.out_dir).map_err(|e| {
        config_err(
            &opts.out_dir.display().to_string(),
            format!("cannot create: {e}"),
        )
    })?;
    let dim = sc.system.dim().unwrap_or(0);
    let flow = build_flow(&sc.system)?;
    let block = sc.block.as_ref().map(|b| build_block(b, dim)).transpose()?;
    let (field, a) = vector_field(sc, &flow, block.as_ref())?;
    let name = sc
        .outputs
        .trace_csv
        .clone()
        .unwrap_or_else(|| "trace.csv".into());
    let path = opts.out_dir.join(name);
    write_trace(sc, &flow, block.as_ref(), &field, a, &path)?;
    Ok(path)
}

fn run_shift(
    sc: &Scenario,
    tol: &Tolerances,
    rng: &mut ChaCha8Rng,
    out: &mut Outcome,
) -> Result<()> {
    let metric = ShiftMetric::catenary();
    match &sc.construction {
        Construction::ShiftMetric { pairs } => {
            let (ls, lu) = catenary_roots();
            out.checks.push(Check::at_most(
                "roots_identity",
                (ls * lu - 1.0).abs().max((ls + lu - 3.0).abs()),
                tol.roots,
            ));
            let map = PairSystem(FullShift);
            let d = |p: &(SymbolicPoint, SymbolicPoint)| Ok(metric.distance(&p.0, &p.1));
            let mut worst = (0.0, None);
            let mut done = 0;
            while done < *pairs {
                let x = random_symbols(rng, -12, 12, 0.3);
                let y = x.xor(&random_flips(rng, 1, 14));
                let dxy = metric.distance(&x, &y);
                if !(dxy < 1.0) {
                    continue;
                }
                done += 1;
                let err = (second_difference(&d, &map, &(x.clone(), y.clone()))? - dxy).abs();
                if err > worst.0 || err.is_nan() {
                    worst = (
                        err,
                        Some(PairWitness {
                            x: x.ones().collect(),
                            y: y.ones().collect(),
                            value: err,
                        }),
                    );
                }
            }
            out.checks.push(
                Check::at_most("second_difference_error", worst.0, tol.exact).with_witness(worst.1),
            );
        }
        Construction::DiscreteBvp {
            delta,
            n_max,
            pairs,
        } => {
            let spec = DiscreteCatenarySpec {
                delta: *delta,
                n_max: *n_max,
                ..DiscreteCatenarySpec::default()
            };
            spec.validate()?;
            let mut worst = (0.0, None);
            let mut unresolved = 0usize;
            let mut done = 0;
            while done < *pairs {
                let x = random_symbols(rng, -12, 12, 0.3);
                let y = x.xor(&random_flips(rng, 2, 14));
                if !(metric.distance(&x, &y) <= *delta) {
                    continue;
                }
                done += 1;
                match discrete_orbit_values(&FullShift, &metric, &spec, &x, &y) {
                    Ok(values) => {
                        let r = recurrence_residual(&values);
                        if r > worst.0 || r.is_nan() {
                            worst = (
                                r,
                                Some(PairWitness {
                                    x: x.ones().collect(),
                                    y: y.ones().collect(),
                                    value: r,
                                }),
                            );
                        }
                    }
                    Err(Error::Unresolved(_)) => unresolved += 1,
                    Err(e) => return Err(e),
                }
            }
            out.checks.push(
                Check::at_most("recurrence_residual", worst.0, tol.recurrence)
                    .with_witness(worst.1),
            );
            out.checks
                .push(Check::at_most("unresolved_pairs", unresolved as f64, 0.0));
        }
        _ => return Err(Error::Spec("construction needs a different system".into())),
    }
    Ok(())
}

type ShiftPoint = SuspensionPoint<SymbolicPoint>;

#[derive(Serialize)]
struct SectionWitness {
    base_height: f64,
    base: Vec<i64>,
    value: f64,
}

fn run_sectional(
    sc: &Scenario,
    tol: &Tolerances,
    rng: &mut ChaCha8Rng,
    opts: &RunOptions,
    out: &mut Outcome,
) -> Result<()> {
    let Construction::Sectional {
        tau,
        epsilon,
        delta,
        panels,
        bases,
        companions,
        horizon,
        step,
    } = &sc.construction
    else {
        return Err(Error::Spec("construction needs a different system".into()));
    };
    let sys = ShiftSuspension::new();
    let flow = sys.flow();
    let period = sys.period();
    // Base heights stay clear of the lap boundary, where the pair metric
    // has its kink, by more than the stencil and reparametrization reach.
    let margin = 0.2_f64.min(period / 4.0);
    let mut families: Vec<(ShiftPoint, Vec<ShiftPoint>)> = Vec::new();
    for _ in 0..*bases {
        let x = SuspensionPoint {
            s: rng.gen_range(margin..=period - margin),
            x: random_symbols(rng, -6, 6, 0.4),
        };
        let raw: Vec<ShiftPoint> = (0..*companions)
            .map(|_| SuspensionPoint {
                s: x.s,
                x: x.x.xor(&random_flips(rng, 3, 8)),
            })
            .collect();
        families.push((x, raw));
    }
    let mut pairs = Vec::new();
    for (x, raw) in &families {
        for y in raw {
            pairs.push((x.clone(), y.clone()));
        }
    }
    let spec = SectionSpec::calibrate(flow, &sys, &pairs, *tau, *epsilon, *delta, *panels)?;

    let mut worst_projection = 0.0_f64;
    let mut failures = 0usize;
    let mut sections: Vec<(ShiftPoint, Vec<ShiftPoint>)> = Vec::new();
    for (x, raw) in &families {
        let mut members = Vec::new();
        // The section lemma only covers companions within δ of the base.
        for y0 in raw.iter().filter(|y0| sys.distance(x, y0) < spec.delta) {
            match section_project(flow, &sys, x, y0, 0.0, &spec) {
                Ok(p) => {
                    worst_projection = worst_projection.max(p.residual);
                    members.push(flow.at(y0, p.s)?);
                }
                Err(Error::Projection(_)) => failures += 1,
                Err(e) => return Err(e),
            }
        }
        sections.push((x.clone(), members));
    }

    let mut monotone_failures = 0usize;
    let mut completed = 0usize;
    let mut separated = 0usize;
    let mut first_trace: Option<Vec<ReparamState>> = None;
    for (x, members) in &sections {
        for y in members {
            for end in [*horizon, -*horizon] {
                let mut r = Reparametrizer::new(flow, &sys, spec, x.clone(), y.clone())?;
                match r.advance_to(end) {
                    Ok(states) => {
                        completed += 1;
                        let sign = end.signum();
                        let mut prev = 0.0;
                        for st in &states {
                            worst_projection = worst_projection.max(st.residual);
                            if !((st.s - prev) * sign > 0.0) {
                                monotone_failures += 1;
                            }
                            prev = st.s;
                        }
                        if end > 0.0 && first_trace.is_none() {
                            let mut all = vec![ReparamState {
                                t: 0.0,
                                s: 0.0,
                                residual: 0.0,
                            }];
                            all.extend(states);
                            first_trace = Some(all);
                        }
                    }
                    Err(Error::Projection(_)) => failures += 1,
                    Err(Error::Exited { .. }) => separated += 1,
                    Err(e) => return Err(e),
                }
            }
        }
    }

    let pm = |p: &(ShiftPoint, ShiftPoint), q: &(ShiftPoint, ShiftPoint)| sys.pair_metric(p, q);
    let mut worst_residual = (0.0, None);
    let mut axiom_violations = 0usize;
    let mut triples = 0usize;
    for (x, members) in &sections {
        let stencils = members
            .iter()
            .map(|y| reparam_stencil(flow, &sys, &spec, x, y, *step))
            .collect::<Result<Vec<_>>>()?;
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                sectional_metric(
                    &pm,
                    flow,
                    &sys,
                    &spec,
                    x,
                    &members[i],
                    &members[j],
                    tol.projection,
                )?;
                let r = stencil_residual(&pm, &stencils[i], &stencils[j])?;
                if r > worst_residual.0 || r.is_nan() {
                    worst_residual = (
                        r,
                        Some(SectionWitness {
                            base_height: x.s,
                            base: x.x.ones().collect(),
                            value: r,
                        }),
                    );
                }
            }
        }
        let d =
            |y: &ShiftPoint, z: &ShiftPoint| pm(&(x.clone(), y.clone()), &(x.clone(), z.clone()));
        let report = check_metric_axioms(members, &d, tol.axiom);
        axiom_violations += report.nonnegativity
            + report.identity
            + report.symmetry
            + report.indiscernibles
            + report.triangle;
        triples += report.triples_checked;
    }

    out.checks.push(Check::at_most(
        "projection_residual",
        worst_projection,
        tol.projection,
    ));
    out.checks
        .push(Check::at_most("projection_failures", failures as f64, 0.0));
    out.checks.push(
        Check::at_least("reparametrizations_completed", completed as f64, 1.0).with_witness(Some(
            serde_json::json!({ "separated_beyond_epsilon": separated }),
        )),
    );
    out.checks.push(Check::at_most(
        "reparametrization_not_increasing",
        monotone_failures as f64,
        0.0,
    ));
    out.checks.push(
        Check::at_most("sectional_residual", worst_residual.0, tol.sectional)
            .with_witness(worst_residual.1),
    );
    out.checks.push(Check::at_most(
        "metric_axiom_violations",
        axiom_violations as f64,
        0.0,
    ));
    out.checks.push(Check::at_least(
        "axiom_triples_checked",
        triples as f64,
        1.0,
    ));

    if let (Some(name), Some(states)) = (&sc.outputs.section_csv, first_trace) {
        write_section_trace(&opts.out_dir.join(name), &states)?;
        out.outputs.push(name.clone());
    }
    Ok(())
}
