//! Energy-optimal motion planning for planar rigid formations.
//!
//! `N` single-integrator agents `ṙ_i = u_i` must move between two congruent
//! formations in time `t_f` while minimizing `½∫Σ‖u_i‖² dt` and keeping every
//! pairwise distance fixed. Writing the formation as its center of mass plus
//! a heading reduces this to a three-state problem whose optimum is a
//! constant CoM velocity and a constant turn rate:
//!
//! ```
//! use rigidplan::{plan, BoundaryConditions, Configuration};
//!
//! let initial = Configuration::from_xy(&[(0.0, 0.0), (0.0, 1.0)])?;
//! let terminal = Configuration::from_xy(&[(0.5, 0.0), (1.0, 3f64.sqrt() / 2.0)])?;
//! let sol = plan(&BoundaryConditions::new(initial, terminal, 1.0))?;
//! assert!((sol.cost - 0.6355).abs() < 5e-4);
//! # Ok::<(), rigidplan::Error>(())
//! ```
//!
//! The [`oracle`] module solves the same problem in full coordinates and
//! checks optimality conditions, to verify the reduction numerically.

pub mod error;
pub mod geometry;
pub mod oracle;
pub mod planner;
pub mod trajectory;

pub use error::{Error, Result};
pub use geometry::{
    center_of_mass, congruence_transform, constraint_count, extract_shape, normalize_angle,
    reconstruct_positions, rigidity_residual, rotational_coefficient, Configuration,
    FormationShape, PlanarPoint, RigidMotion, UnitBearing, DEFAULT_CONGRUENCE_TOL,
};
pub use oracle::{
    compare, fan_triangulation, pmp_residuals, solve_direct, ComparisonReport, DiscretizedProblem,
    OracleSolution, PmpDiagnostics,
};
pub use planner::{
    agent_controls, evaluate_cost, plan, reduced_cost, sample_trajectory, BoundaryConditions,
    PlanSolution,
};
pub use trajectory::Trajectory;
