//! Lattice discretization of the gravitational variational problem on a
//! periodic 3-torus: discrete actions, Euler–Lagrange residuals, and a
//! residual-descent solver.
//!
//! Derivatives are second-order central differences with periodic wrap.
//! The connection is stored in `k` coordinates, so every configuration
//! satisfies the metricity constraint.

mod action;
mod lattice;
mod solve;

pub use action::{
    discrete_action, el_residual, objective_and_gradient, ActionKind, ElResidual, PAIRS,
};
pub use lattice::{
    central_difference, prolong, LatticeConfig, Perturbation, SiteJet, MIN_LATTICE_COUNT,
};
pub use solve::{
    descend, directional_derivative, stationarity_report, DescentOptions, DirectionRecord,
    SolveReport, StationarityReport,
};
