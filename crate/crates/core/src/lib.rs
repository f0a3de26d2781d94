//! Numerical toolkit for the adaptive dynamics of a vaccination game.
//!
//! The model: individuals vaccinate with probability `P`; an unvaccinated
//! individual is infected with probability `pi(p)` at population coverage
//! `p`, and `P` evolves along the payoff gradient of a rare deviator,
//! `dP/dt = -r - eps pi'(P)(1-P) + pi(P)`, with relative risk `r` and
//! deviating fraction `eps`.
//!
//! The crate provides:
//!
//! - [`glue`]: the smooth bump kernel, its primitive and the gluing switch
//!   used to truncate payoff curves to zero at the herd-immunity cutoff;
//! - [`curve`]: payoff-curve families with analytic derivatives and a
//!   grid validator for the standing assumptions;
//! - [`dynamics`]: the vector field, its state derivative and fixed-step
//!   RK4 trajectories;
//! - [`solver`]: equilibrium location, stability classification,
//!   parameter sensitivities and a brute-force oracle;
//! - [`bifurcation`]: one-parameter diagrams in `r` and `eps`, saddle-node
//!   event detection, the closed-form two-parameter tangency locus and the
//!   3-D equilibrium surface.
//!
//! All types are immutable after construction and evaluations are pure;
//! sweeps parallelise over parameter values with deterministic output
//! ordering.

pub mod bifurcation;
pub mod curve;
pub mod dynamics;
mod error;
pub mod glue;
pub mod solver;

pub use bifurcation::{
    default_p_grid, detect_saddle_nodes, surface, sweep_eps, sweep_r, tangency_curve, Axis,
    BranchPoint, ClosedFormPoint, Diagram, SaddleNodeEvent, SurfaceSample, SweepOptions,
    TangencyCurve, TangencyPoint,
};
pub use curve::{
    make_convex_test, make_example1, make_example2, make_rational_glue, validate, AssumptionCheck,
    CurveFamily, CurveFamilySpec, PayoffCurve, ValidationReport,
};
pub use dynamics::{integrate, rhs, rhs_dp, ModelParams, Trajectory};
pub use error::Error;
pub use glue::GlueKernel;
pub use solver::{
    convex_bounds, find_all, oracle_scan, sensitivity_eps, sensitivity_r, DegenerateCandidate,
    Equilibrium, EquilibriumSet, SolverOptions, Stability,
};
