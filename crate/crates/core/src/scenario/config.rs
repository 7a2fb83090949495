use serde::{Deserialize, Serialize};

use crate::block::DEFAULT_T_MAX;
use crate::flow::{DEFAULT_SCAN_STEP, DEFAULT_STEP};
use crate::sections::{DEFAULT_PANELS, DEFAULT_TAU};

pub const SCENARIO_SCHEMA: &str = "catenary-scenario/1";
pub const SUITE_SCHEMA: &str = "catenary-suite/1";
pub const REPORT_SCHEMA: &str = "catenary-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: String,
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub system: SystemSpec,
    #[serde(default)]
    pub block: Option<BlockSpec>,
    pub construction: Construction,
    /// Expression added to the constructed field, in the system's variables.
    #[serde(default)]
    pub corruption: Option<String>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub trace: Option<TraceSpec>,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    /// `ẋ = x, ẏ = −y` in closed form.
    Saddle,
    /// `ẋ_i = r_i x_i` in closed form.
    Diagonal {
        rates: Vec<f64>,
    },
    /// RK4 on a vector field given as one expression per variable.
    Ode {
        variables: Vec<String>,
        field: Vec<String>,
        #[serde(default = "default_ode_step")]
        h: f64,
    },
    FullShift,
    ShiftSuspension,
}

impl SystemSpec {
    pub fn is_continuous_vector(&self) -> bool {
        matches!(
            self,
            Self::Saddle | Self::Diagonal { .. } | Self::Ode { .. }
        )
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::Saddle => Some(2),
            Self::Diagonal { rates } => Some(rates.len()),
            Self::Ode { variables, .. } => Some(variables.len()),
            _ => None,
        }
    }

    pub fn variables(&self) -> Vec<String> {
        match self {
            Self::Ode { variables, .. } => variables.clone(),
            _ => default_variables(self.dim().unwrap_or(0)),
        }
    }
}

pub fn default_variables(dim: usize) -> Vec<String> {
    const NAMES: [&str; 4] = ["x", "y", "z", "w"];
    if dim <= NAMES.len() {
        NAMES[..dim].iter().map(|s| s.to_string()).collect()
    } else {
        (0..dim).map(|i| format!("x{i}")).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Indicator {
    L1,
    L2,
    Linf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    #[serde(default = "default_indicator")]
    pub indicator: Indicator,
    pub delta: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_scan_step")]
    pub scan_step: f64,
    /// The isolated set, as a point; the origin when omitted.
    #[serde(default)]
    pub lambda: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Construction {
    /// Catenary boundary value problem with constant boundary data.
    Bvp {
        #[serde(default = "one")]
        boundary: f64,
        #[serde(default = "one")]
        a: f64,
    },
    /// `Σ |x_i|`, split into growing and decaying coordinates.
    Sum,
    /// `e^{−aτ(x)}` with `τ` the time since crossing `‖x‖ = level`.
    ExactDecay {
        a: f64,
        #[serde(default = "one")]
        level: f64,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_max_time")]
        max_time: f64,
    },
    /// Whitney size of the forward orbit of an attracting fixed point.
    AttractorSize {
        #[serde(default = "default_depth")]
        depth: usize,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    DiscreteBvp {
        #[serde(default = "default_discrete_delta")]
        delta: f64,
        #[serde(default = "default_n_max")]
        n_max: i64,
        #[serde(default = "default_samples")]
        pairs: usize,
    },
    ShiftMetric {
        #[serde(default = "default_shift_pairs")]
        pairs: usize,
    },
    Sectional {
        #[serde(default = "default_tau")]
        tau: f64,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default = "default_section_delta")]
        delta: f64,
        #[serde(default = "default_panels")]
        panels: usize,
        #[serde(default = "default_bases")]
        bases: usize,
        #[serde(default = "default_companions")]
        companions: usize,
        #[serde(default = "default_horizon")]
        horizon: f64,
        #[serde(default = "default_fd_step")]
        step: f64,
    },
}

impl Construction {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Bvp { .. } => "bvp",
            Self::Sum => "sum",
            Self::ExactDecay { .. } => "exact_decay",
            Self::AttractorSize { .. } => "attractor_size",
            Self::DiscreteBvp { .. } => "discrete_bvp",
            Self::ShiftMetric { .. } => "shift_metric",
            Self::Sectional { .. } => "sectional",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_grid_n")]
    pub n: usize,
    #[serde(default = "default_lo")]
    pub lo: f64,
    #[serde(default = "one")]
    pub hi: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n: default_grid_n(),
            lo: default_lo(),
            hi: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "tol_residual")]
    pub residual: f64,
    #[serde(default = "tol_drift")]
    pub drift: f64,
    /// `|L̇|` threshold marking critical points; not a tolerance, never scaled.
    #[serde(default = "tol_critical")]
    pub critical: f64,
    #[serde(default = "default_orbit_length")]
    pub orbit_length: f64,
    #[serde(default = "default_orbit_step")]
    pub orbit_step: f64,
    #[serde(default = "tol_exact")]
    pub exact: f64,
    #[serde(default = "tol_roots")]
    pub roots: f64,
    #[serde(default = "tol_recurrence")]
    pub recurrence: f64,
    #[serde(default = "tol_decay")]
    pub decay: f64,
    #[serde(default = "tol_projection")]
    pub projection: f64,
    #[serde(default = "tol_sectional")]
    pub sectional: f64,
    #[serde(default = "tol_axiom")]
    pub axiom: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual: tol_residual(),
            drift: tol_drift(),
            critical: tol_critical(),
            orbit_length: default_orbit_length(),
            orbit_step: default_orbit_step(),
            exact: tol_exact(),
            roots: tol_roots(),
            recurrence: tol_recurrence(),
            decay: tol_decay(),
            projection: tol_projection(),
            sectional: tol_sectional(),
            axiom: tol_axiom(),
        }
    }
}

impl Tolerances {
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            residual: self.residual * k,
            drift: self.drift * k,
            exact: self.exact * k,
            roots: self.roots * k,
            recurrence: self.recurrence * k,
            decay: self.decay * k,
            projection: self.projection * k,
            sectional: self.sectional * k,
            axiom: self.axiom * k,
            ..*self
        }
    }

    pub fn named(&self) -> [(&'static str, f64); 12] {
        [
            ("residual", self.residual),
            ("drift", self.drift),
            ("critical", self.critical),
            ("orbit_length", self.orbit_length),
            ("orbit_step", self.orbit_step),
            ("exact", self.exact),
            ("roots", self.roots),
            ("recurrence", self.recurrence),
            ("decay", self.decay),
            ("projection", self.projection),
            ("sectional", self.sectional),
            ("axiom", self.axiom),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceSpec {
    pub start: Vec<f64>,
    #[serde(default)]
    pub t0: f64,
    #[serde(default = "default_trace_t1")]
    pub t1: f64,
    #[serde(default = "default_trace_step")]
    pub step: f64,
    /// Restrict the flow to the block so that exits appear in the trace.
    #[serde(default)]
    pub restrict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default = "default_report")]
    pub report: String,
    #[serde(default)]
    pub grid_csv: Option<String>,
    #[serde(default)]
    pub trace_csv: Option<String>,
    #[serde(default)]
    pub section_csv: Option<String>,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            report: default_report(),
            grid_csv: None,
            trace_csv: None,
            section_csv: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    pub schema: String,
    /// Scenario paths, relative to the suite file.
    pub scenarios: Vec<String>,
}

fn one() -> f64 {
    1.0
}
fn default_ode_step() -> f64 {
    DEFAULT_STEP
}
fn default_indicator() -> Indicator {
    Indicator::L1
}
fn default_t_max() -> f64 {
    DEFAULT_T_MAX
}
fn default_scan_step() -> f64 {
    DEFAULT_SCAN_STEP
}
fn default_samples() -> usize {
    100
}
fn default_max_time() -> f64 {
    5.0
}
fn default_depth() -> usize {
    8
}
fn default_discrete_delta() -> f64 {
    0.5
}
fn default_n_max() -> i64 {
    40
}
fn default_shift_pairs() -> usize {
    200
}
fn default_tau() -> f64 {
    DEFAULT_TAU
}
fn default_epsilon() -> f64 {
    0.2
}
// Shifting a companion along the flow lowers θ by at most τ²/4, so δ must
// stay below roughly τ/4 for every δ-close companion to reach the section.
fn default_section_delta() -> f64 {
    0.05
}
fn default_panels() -> usize {
    DEFAULT_PANELS
}
fn default_bases() -> usize {
    4
}
fn default_companions() -> usize {
    5
}
fn default_horizon() -> f64 {
    0.3
}
fn default_fd_step() -> f64 {
    1e-2
}
fn default_grid_n() -> usize {
    21
}
fn default_lo() -> f64 {
    -1.0
}
fn tol_residual() -> f64 {
    1e-6
}
fn tol_drift() -> f64 {
    1e-8
}
fn tol_critical() -> f64 {
    1e-6
}
fn default_orbit_length() -> f64 {
    5.0
}
fn default_orbit_step() -> f64 {
    0.05
}
fn tol_exact() -> f64 {
    1e-12
}
fn tol_roots() -> f64 {
    1e-15
}
fn tol_recurrence() -> f64 {
    1e-10
}
fn tol_decay() -> f64 {
    1e-8
}
fn tol_projection() -> f64 {
    1e-9
}
fn tol_sectional() -> f64 {
    1e-3
}
fn tol_axiom() -> f64 {
    1e-9
}
fn default_trace_t1() -> f64 {
    5.0
}
fn default_trace_step() -> f64 {
    0.1
}
fn default_report() -> String {
    "report.json".into()
}
