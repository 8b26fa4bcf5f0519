//! First-order optimality checks on sampled trajectories.
//!
//! For `ṙ_i = u_i` with cost `½Σ‖u_i‖²` and distance constraints, the
//! minimum principle gives `u_i = −λ_i` and, per constrained pair,
//! `r̈_a − r̈_b = 2μ (r_a − r_b)`. Summing over agents, the CoM does not
//! accelerate. Both conditions are checked here with finite differences.

use super::{fan_triangulation, reference_length};
use crate::error::{Error, Result};
use crate::geometry::PlanarPoint;
use crate::trajectory::Trajectory;

const MIN_SAMPLES: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct PmpDiagnostics {
    /// `λ_i = −u_i` per sample.
    pub costates: Vec<Vec<PlanarPoint>>,
    /// Least-squares multiplier per interior sample, over all constrained
    /// pairs.
    pub mu_estimates: Vec<f64>,
    pub mu_mean: f64,
    pub mu_max_deviation: f64,
    /// `max ‖r̈_c‖ · t_f² / L`.
    pub com_accel_residual: f64,
    /// `max |(r_a − r_b) × (r̈_a − r̈_b)| · t_f² / L²` over constrained pairs.
    pub parallelism_residual: f64,
}

/// Central second differences at the interior samples `1..m-1`.
fn second_derivative(values: &[PlanarPoint], h: f64) -> Vec<PlanarPoint> {
    values
        .windows(3)
        .map(|w| (w[2] - w[1] * 2.0 + w[0]) / (h * h))
        .collect()
}

fn first_derivative(values: &[PlanarPoint], h: f64) -> Vec<PlanarPoint> {
    let m = values.len();
    (0..m)
        .map(|k| {
            if k == 0 {
                (values[1] * 4.0 - values[0] * 3.0 - values[2]) / (2.0 * h)
            } else if k == m - 1 {
                (values[m - 1] * 3.0 - values[m - 2] * 4.0 + values[m - 3]) / (2.0 * h)
            } else {
                (values[k + 1] - values[k - 1]) / (2.0 * h)
            }
        })
        .collect()
}

/// Evaluates the optimality conditions on a uniformly sampled trajectory.
///
/// Residuals and multipliers cover the interior samples, where central
/// differences apply; costates cover every sample.
pub fn pmp_residuals(traj: &Trajectory) -> Result<PmpDiagnostics> {
    if traj.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_SAMPLES,
            got: traj.len(),
        });
    }
    let h = traj.uniform_step()?;
    let n = traj.n_agents();
    let states = traj.states();
    let t_f = traj.t_f();
    let length = reference_length(&states[0], &states[states.len() - 1]);

    let series =
        |i: usize| -> Vec<PlanarPoint> { states.iter().map(|s| s.positions()[i]).collect() };
    let accel: Vec<Vec<PlanarPoint>> = (0..n).map(|i| second_derivative(&series(i), h)).collect();

    let com: Vec<PlanarPoint> = states.iter().map(|s| s.center_of_mass()).collect();
    let com_accel_residual = second_derivative(&com, h)
        .iter()
        .map(|a| a.norm())
        .fold(0.0, f64::max)
        * t_f
        * t_f
        / length;

    let pairs = fan_triangulation(n);
    let mut parallelism = 0.0_f64;
    let mut mu_estimates = Vec::with_capacity(traj.len());
    for (k, state) in states[1..states.len() - 1].iter().enumerate() {
        let p = state.positions();
        let (mut num, mut den) = (0.0, 0.0);
        for &(a, b) in &pairs {
            let d = p[a] - p[b];
            let dd = accel[a][k] - accel[b][k];
            parallelism = parallelism.max(d.cross(dd).abs());
            num += d.dot(dd);
            den += 2.0 * d.norm_squared();
        }
        mu_estimates.push(if den > 0.0 { num / den } else { 0.0 });
    }
    let parallelism_residual = parallelism * t_f * t_f / (length * length);

    let mu_mean = mu_estimates.iter().sum::<f64>() / mu_estimates.len() as f64;
    let mu_max_deviation = mu_estimates
        .iter()
        .map(|m| (m - mu_mean).abs())
        .fold(0.0, f64::max);

    let costates = match traj.controls() {
        Some(controls) => controls
            .iter()
            .map(|u| u.iter().map(|v| -*v).collect())
            .collect(),
        None => {
            let velocity: Vec<Vec<PlanarPoint>> =
                (0..n).map(|i| first_derivative(&series(i), h)).collect();
            (0..traj.len())
                .map(|k| (0..n).map(|i| -velocity[i][k]).collect())
                .collect()
        }
    };

    Ok(PmpDiagnostics {
        costates,
        mu_estimates,
        mu_mean,
        mu_max_deviation,
        com_accel_residual,
        parallelism_residual,
    })
}
