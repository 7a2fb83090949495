//! Discrete-time catenary machinery: homeomorphisms, second differences,
//! shift metrics and catenary boundary value problems on pair spaces.

mod catenary;
mod probe;
mod suspension;
mod systems;

pub use catenary::{
    catenary_roots, discrete_catenary_bvp, discrete_orbit_values, recurrence_residual,
    second_difference, shift_metric, DiscreteBranch, DiscreteBvp, DiscreteCatenarySpec,
    ShiftMetric,
};
pub use probe::{
    expansivity_probe, hyperspace_iterate, isolation_probe, shift_local_metric, xor_pair_metric,
    HyperspaceTrace, PairLocalMetric, Separation,
};
pub use suspension::SuspensionCatenary;
pub use systems::{
    DiscreteSystem, FinitePermutation, FullShift, PairSystem, SymbolicPoint, ToralAutomorphism,
};
