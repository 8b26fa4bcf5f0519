//! Closed-form energy-optimal plans for rigid formations.
//!
//! With single-integrator agents and cost `½∫Σ‖u_i‖²`, the formation energy
//! splits into a translational part `N‖u_c‖²` and a rotational part `I_c ω²`.
//! Both are minimized by constant rates, so the optimum moves the CoM on a
//! straight line at `u_c = Δr_c / t_f` and turns at `ω = Δθ / t_f`.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::{
    congruence_transform, extract_shape, reconstruct_positions, Configuration, FormationShape,
    PlanarPoint, UnitBearing, DEFAULT_CONGRUENCE_TOL,
};
use crate::trajectory::{uniform_grid, Trajectory};

/// Fixed initial and terminal formations over a horizon `t_f`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryConditions {
    pub initial: Configuration,
    pub terminal: Configuration,
    pub t_f: f64,
    /// Extra full turns added to the principal rotation.
    pub winding: i64,
    /// Congruence tolerance relative to formation scale.
    pub tol: f64,
}

impl BoundaryConditions {
    pub fn new(initial: Configuration, terminal: Configuration, t_f: f64) -> Self {
        Self {
            initial,
            terminal,
            t_f,
            winding: 0,
            tol: DEFAULT_CONGRUENCE_TOL,
        }
    }

    pub fn with_winding(mut self, winding: i64) -> Self {
        self.winding = winding;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn n_agents(&self) -> usize {
        self.initial.len()
    }
}

/// The optimal plan: constant CoM velocity and constant turn rate.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanSolution {
    pub u_c: PlanarPoint,
    pub omega: f64,
    pub theta0: f64,
    pub r_c0: PlanarPoint,
    pub shape: FormationShape,
    pub cost: f64,
    pub t_f: f64,
    /// Principal rotation between the boundary formations, in (−π, π].
    pub rotation: f64,
    pub winding: i64,
}

impl PlanSolution {
    pub fn n_agents(&self) -> usize {
        self.shape.n_agents()
    }

    pub fn com_at(&self, t: f64) -> PlanarPoint {
        self.r_c0 + self.u_c * t
    }

    pub fn heading_at(&self, t: f64) -> f64 {
        self.theta0 + self.omega * t
    }

    /// Formation at time `t` (not range-checked).
    pub fn state_at(&self, t: f64) -> Configuration {
        reconstruct_positions(&self.shape, self.com_at(t), self.heading_at(t))
    }
}

/// Computes the energy-optimal plan between two congruent formations.
pub fn plan(bc: &BoundaryConditions) -> Result<PlanSolution> {
    if !(bc.t_f > 0.0 && bc.t_f.is_finite()) {
        return Err(Error::InvalidHorizon(bc.t_f));
    }
    let motion = congruence_transform(&bc.initial, &bc.terminal, bc.tol)?;
    let n = bc.n_agents();

    let (shape, r_c0, theta0) = match extract_shape(&bc.initial) {
        Ok(parts) => parts,
        // Every agent on the CoM: heading is meaningless, plan pure translation.
        Err(Error::DegenerateHeading) if is_collapsed(&bc.initial) => (
            FormationShape::collapsed(n),
            bc.initial.center_of_mass(),
            0.0,
        ),
        Err(e) => return Err(e),
    };

    let u_c = motion.translation / bc.t_f;
    let (rotation, winding, omega) = if n == 1 || shape.is_collapsed() {
        (0.0, 0, 0.0)
    } else {
        let total = motion.rotation + TAU * bc.winding as f64;
        (motion.rotation, bc.winding, total / bc.t_f)
    };
    let cost = reduced_cost(&shape, u_c, omega, bc.t_f)?;
    Ok(PlanSolution {
        u_c,
        omega,
        theta0,
        r_c0,
        shape,
        cost,
        t_f: bc.t_f,
        rotation,
        winding,
    })
}

fn is_collapsed(config: &Configuration) -> bool {
    let c = config.center_of_mass();
    let tol = crate::geometry::HEADING_TOL * config.magnitude();
    config.positions().iter().all(|p| p.distance(c) <= tol)
}

/// Energy of holding CoM velocity `u_c` and turn rate `omega` for `t_f`:
/// `(N‖u_c‖² + I_c ω²) t_f / 2`.
pub fn reduced_cost(shape: &FormationShape, u_c: PlanarPoint, omega: f64, t_f: f64) -> Result<f64> {
    if !(t_f > 0.0 && t_f.is_finite()) {
        return Err(Error::InvalidHorizon(t_f));
    }
    let n = shape.n_agents() as f64;
    Ok((n * u_c.norm_squared() + shape.inertia() * omega * omega) * t_f / 2.0)
}

/// Per-agent velocities `u_i = u_c + l_i ω ŝ⊥(α_i + θ(t))`.
pub fn agent_controls(sol: &PlanSolution, t: f64) -> Result<Vec<PlanarPoint>> {
    if !(0.0..=sol.t_f).contains(&t) {
        return Err(Error::OutOfHorizon { t, t_f: sol.t_f });
    }
    Ok(controls_at(sol, t))
}

fn controls_at(sol: &PlanSolution, t: f64) -> Vec<PlanarPoint> {
    let theta = sol.heading_at(t);
    let shape = &sol.shape;
    (0..shape.n_agents())
        .map(|i| {
            sol.u_c
                + UnitBearing(shape.bearings()[i] + theta).perp() * (shape.radii()[i] * sol.omega)
        })
        .collect()
}

/// Samples the plan on a uniform grid of `n_samples` points.
pub fn sample_trajectory(sol: &PlanSolution, n_samples: usize) -> Result<Trajectory> {
    if n_samples < 2 {
        return Err(Error::InvalidSampleCount(n_samples));
    }
    let times = uniform_grid(sol.t_f, n_samples);
    let states = times.iter().map(|&t| sol.state_at(t)).collect();
    let controls = times.iter().map(|&t| controls_at(sol, t)).collect();
    Trajectory::new(times, states, Some(controls))
}

/// Trapezoidal quadrature of `½ Σ_i ‖u_i(t)‖²` over the trajectory grid.
pub fn evaluate_cost(traj: &Trajectory) -> Result<f64> {
    let controls = traj.controls().ok_or(Error::MissingControls)?;
    if traj.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: traj.len(),
        });
    }
    let power: Vec<f64> = controls
        .iter()
        .map(|u| 0.5 * u.iter().map(|v| v.norm_squared()).sum::<f64>())
        .collect();
    Ok(traj
        .times()
        .windows(2)
        .zip(power.windows(2))
        .map(|(t, p)| 0.5 * (t[1] - t[0]) * (p[0] + p[1]))
        .sum())
}
