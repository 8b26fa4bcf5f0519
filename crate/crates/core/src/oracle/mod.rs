//! Independent checks of the center-of-mass reduction.
//!
//! [`solve_direct`] solves the full-coordinate problem numerically, with every
//! agent as a free decision variable and rigidity enforced through distance
//! constraints. [`pmp_residuals`] checks the first-order optimality
//! conditions on any sampled trajectory. [`compare`] puts a closed-form plan
//! and a direct solution side by side.

mod pmp;
mod transcription;

pub use pmp::{pmp_residuals, PmpDiagnostics};
pub use transcription::solve_direct;

use crate::error::{Error, Result};
use crate::geometry::{constraint_count, Configuration};
use crate::planner::{BoundaryConditions, PlanSolution};
use crate::trajectory::Trajectory;

/// Penalty multiplied by 10 per outer iteration, starting at 1.
pub const DEFAULT_PENALTY_SCHEDULE: [f64; 7] = [1.0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6];
pub const DEFAULT_MAX_OUTER_ITERS: usize = 50;
pub const DEFAULT_GRAD_TOL: f64 = 1e-6;
/// Relative distance violation accepted as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// Full-coordinate problem transcribed onto `knots` uniformly spaced knots.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedProblem {
    pub knots: usize,
    pub boundary: BoundaryConditions,
    /// Agent index pairs whose distance is held fixed at every knot.
    pub constraint_pairs: Vec<(usize, usize)>,
    /// Penalty used at each outer iteration; the last entry repeats.
    pub penalty_schedule: Vec<f64>,
    /// Maximum number of outer (multiplier update) iterations.
    pub max_iters: usize,
    /// Tolerance on the nondimensional Lagrangian gradient.
    pub grad_tol: f64,
}

impl DiscretizedProblem {
    pub fn new(boundary: BoundaryConditions, knots: usize) -> Self {
        let constraint_pairs = fan_triangulation(boundary.n_agents());
        Self {
            knots,
            boundary,
            constraint_pairs,
            penalty_schedule: DEFAULT_PENALTY_SCHEDULE.to_vec(),
            max_iters: DEFAULT_MAX_OUTER_ITERS,
            grad_tol: DEFAULT_GRAD_TOL,
        }
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let n = self.boundary.n_agents();
        if self.knots < 3 {
            return Err(Error::InvalidProblem(format!(
                "need at least 3 knots, got {}",
                self.knots
            )));
        }
        if self.penalty_schedule.is_empty()
            || self
                .penalty_schedule
                .iter()
                .any(|&p| !(p > 0.0 && p.is_finite()))
        {
            return Err(Error::InvalidProblem(
                "penalty schedule must be non-empty and positive".into(),
            ));
        }
        if self.grad_tol.is_nan() || self.grad_tol <= 0.0 {
            return Err(Error::InvalidProblem(
                "gradient tolerance must be positive".into(),
            ));
        }
        let expected = if n < 2 { 0 } else { constraint_count(n)? };
        if self.constraint_pairs.len() != expected {
            return Err(Error::InvalidProblem(format!(
                "{} agents need {} constraint pairs, got {}",
                n,
                expected,
                self.constraint_pairs.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for &(a, b) in &self.constraint_pairs {
            if a == b || a >= n || b >= n {
                return Err(Error::InvalidProblem(format!("invalid pair ({a}, {b})")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidProblem(format!("duplicate pair ({a}, {b})")));
            }
        }
        if n >= 2 {
            check_infinitesimally_rigid(&self.boundary.initial, &self.constraint_pairs)?;
        }
        Ok(())
    }
}

/// Numerical solution of a [`DiscretizedProblem`].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    /// Knot positions; controls are the mean of the adjacent segment velocities.
    pub trajectory: Trajectory,
    /// Kinetic energy of the piecewise-linear knot path.
    pub cost: f64,
    /// Worst relative distance error over constrained pairs and knots.
    pub max_constraint_violation: f64,
    /// Final nondimensional Lagrangian gradient.
    pub gradient_norm: f64,
    pub converged: bool,
    /// Outer iterations performed.
    pub iterations: usize,
    /// Newton steps across all outer iterations.
    pub newton_steps: usize,
}

impl OracleSolution {
    pub fn ensure_converged(&self) -> Result<&Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                iterations: self.iterations,
                violation: self.max_constraint_violation,
                gradient: self.gradient_norm,
            })
        }
    }
}

/// Closed-form versus direct solution on the same boundary conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonReport {
    /// `(oracle − closed_form) / closed_form`; absolute difference when the
    /// closed-form cost is zero.
    pub cost_gap: f64,
    /// Largest distance between an oracle knot and the closed-form formation
    /// at the same time.
    pub max_deviation: f64,
    /// `max_deviation` divided by the formation scale.
    pub relative_deviation: f64,
}

pub fn compare(closed_form: &PlanSolution, oracle: &OracleSolution) -> Result<ComparisonReport> {
    let traj = &oracle.trajectory;
    if traj.n_agents() != closed_form.n_agents() {
        return Err(Error::MismatchedProblems(format!(
            "{} vs {} agents",
            closed_form.n_agents(),
            traj.n_agents()
        )));
    }
    if (traj.t_f() - closed_form.t_f).abs() > 1e-12 * closed_form.t_f {
        return Err(Error::MismatchedProblems(format!(
            "horizon {} vs {}",
            closed_form.t_f,
            traj.t_f()
        )));
    }
    let first = closed_form.state_at(0.0);
    let last = closed_form.state_at(closed_form.t_f);
    let scale = reference_length(&first, &last);
    let endpoint_gap = traj.states()[0]
        .max_deviation(&first)?
        .max(traj.states()[traj.len() - 1].max_deviation(&last)?);
    if endpoint_gap > 1e-6 * scale {
        return Err(Error::MismatchedProblems(format!(
            "boundary formations differ by {endpoint_gap:.3e}"
        )));
    }

    let mut max_deviation = 0.0_f64;
    for (&t, state) in traj.times().iter().zip(traj.states()) {
        max_deviation = max_deviation.max(state.max_deviation(&closed_form.state_at(t))?);
    }
    let cost_gap = if closed_form.cost > 0.0 {
        (oracle.cost - closed_form.cost) / closed_form.cost
    } else {
        oracle.cost - closed_form.cost
    };
    Ok(ComparisonReport {
        cost_gap,
        max_deviation,
        relative_deviation: max_deviation / scale,
    })
}

/// Pairs `(0,1)`, then `(0,i)` and `(1,i)` for every further agent: `2N − 3`
/// distances anchored on the first two agents.
pub fn fan_triangulation(n: usize) -> Vec<(usize, usize)> {
    if n < 2 {
        return Vec::new();
    }
    let mut pairs = vec![(0, 1)];
    for i in 2..n {
        pairs.push((0, i));
        pairs.push((1, i));
    }
    pairs
}

/// Length used to nondimensionalize residuals: formation scale, falling back
/// to CoM travel, then to 1.
pub(crate) fn reference_length(initial: &Configuration, terminal: &Configuration) -> f64 {
    let scale = initial.formation_scale();
    if scale > 0.0 {
        return scale;
    }
    let travel = terminal.center_of_mass().distance(initial.center_of_mass());
    if travel > 0.0 {
        travel
    } else {
        1.0
    }
}

fn check_infinitesimally_rigid(config: &Configuration, pairs: &[(usize, usize)]) -> Result<()> {
    let n = config.len();
    let needed = 2 * n - 3;
    let p = config.positions();
    let mut rows = nalgebra::DMatrix::<f64>::zeros(pairs.len(), 2 * n);
    for (row, &(a, b)) in pairs.iter().enumerate() {
        let d = p[a] - p[b];
        rows[(row, 2 * a)] = d.x;
        rows[(row, 2 * a + 1)] = d.y;
        rows[(row, 2 * b)] = -d.x;
        rows[(row, 2 * b + 1)] = -d.y;
    }
    let singular = rows.singular_values();
    let top = singular.iter().copied().fold(0.0, f64::max);
    let rank = singular
        .iter()
        .filter(|&&s| s > 1e-9 * top && s > 0.0)
        .count();
    if rank < needed {
        return Err(Error::FlexibleConstraintGraph { rank, needed });
    }
    Ok(())
}
