//! Ricci flow on rotationally symmetric 2-spheres, with the isoperimetric
//! (Cheeger) quantities of parallel loops tracked along the flow.
//!
//! A metric is a conformal exponent `u(θ)` sampled on a polar grid
//! ([`SurfaceProfile`]). [`SurfaceGeometry`] derives curvature, loop lengths
//! and cap areas; [`evolve`] runs the flow and records a [`FlowTrace`]; the
//! [`identities`] module checks the evolution equations along the way.

mod calculus;
pub mod error;
pub mod flow;
pub mod grid;
pub mod identities;
pub mod loops;
pub mod quadrature;
pub mod scenarios;
pub mod surface;

pub use error::{Error, Result};
pub use flow::{
    advance, area_law_check, evolve, flow_rhs, stable_dt, step, Evolution, EvolveError, FlowState,
    StepControl, StopReason,
};
pub use grid::GridSpec;
pub use identities::{
    cap_area_evolution_residual, cap_area_evolution_residuals, cap_balance_identity,
    convergence_order, heat_equation_balance, heat_equation_residual, length_evolution_residual,
    length_ratio_identity, monotonicity_check, observe, supersolution_term, ConvergenceStudy,
    FlowTrace, HeatBalance, MonotonicityViolation, OrderEstimate, ResidualReport, TraceRecord,
};
pub use loops::{
    gamma_geodesic, global_cheeger, loop_stats, papasoglu_bound, AreaBoundCheck, CheegerMinimizer,
    ParallelLoopStats,
};
pub use scenarios::{
    bump_sphere, detect_stationarity, dumbbell, find_stationary_candidate, round_sphere, Family,
    FlowSettings, Scenario, ScenarioSpec, StationaryCandidate, StationaryDiagnostics,
};
pub use surface::{
    arclength, cap_areas, circumference, gaussian_curvature, total_area, validate_profile,
    SurfaceGeometry, SurfaceProfile, ValidationReport, Violation,
};
