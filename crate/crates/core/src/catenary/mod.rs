//! Lyapunov functions and pseudo-metrics of catenary type, and checks of
//! their defining relations along the flow.

mod attractor;
mod bvp;
mod verify;

pub use attractor::{
    attractor_lyapunov, exact_decay_lyapunov, linear_pseudometric, quadratic_bound,
    smooth_lyapunov, AttractorOptions, CONVERGENCE_RADIUS, SMOOTHING_PANELS,
};
pub use bvp::{
    catenary_bvp, catenary_sum_function, catenary_sum_pseudometric, derived_decreasing, BvpSpec,
    Rate, RateField, RatePseudometric,
};
pub use verify::{
    flow_derivatives, verify_catenary, write_grid_csv, CatenaryReport, Coordinates, GridRow,
    VerifyOptions, Witness, FIRST_STEP, SECOND_STEP,
};

use crate::error::Result;

/// A real-valued function on states.
pub trait ScalarField<S: ?Sized> {
    fn eval(&self, x: &S) -> Result<f64>;
}

impl<S: ?Sized, F> ScalarField<S> for F
where
    F: Fn(&S) -> Result<f64>,
{
    fn eval(&self, x: &S) -> Result<f64> {
        self(x)
    }
}
