use thiserror::Error;

/// Errors raised by the constructions and evaluators in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point or argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Integration produced a non-finite state.
    #[error("integration diverged after t = {last_time}")]
    Divergence { last_time: f64 },

    /// The flow left its domain before the requested time was reached.
    #[error("orbit left the domain at t = {time}")]
    Exited { time: f64 },

    /// Input exceeds the capacity of an exhaustive algorithm.
    #[error("capacity exceeded: {size} points given, at most {limit} supported")]
    Capacity { size: usize, limit: usize },

    /// The δ-chain graph over a sample is disconnected.
    #[error("chain graph is disconnected into {} components: {components:?}", components.len())]
    Partition { components: Vec<Vec<usize>> },

    /// A construction was given parameters that violate its contract.
    #[error("invalid specification: {0}")]
    Spec(String),

    /// An orbit did not converge to the attractor before the horizon.
    #[error("orbit did not enter the attractor ball before t = {horizon}")]
    Basin { horizon: f64 },

    /// A quadrature or finite-difference stencil left the domain.
    #[error("stencil or quadrature truncated: {0}")]
    Truncation(String),

    /// Projection onto a local cross section failed to bracket a root.
    #[error("section projection failed: {0}")]
    Projection(String),

    /// A hit time could not be resolved (both sides infinite away from the invariant set).
    #[error("unresolved orbit: {0}")]
    Unresolved(String),
}

pub type Result<T> = std::result::Result<T, Error>;
