use std::fs;
use std::path::Path;

use rigidplan::{
    compare, pmp_residuals, rigidity_residual, sample_trajectory, solve_direct, DiscretizedProblem,
    PlanSolution, PlanarPoint, Trajectory,
};

use crate::failure::{self, Failure};
use crate::output::{write_summary, write_trajectory, Summary};
use crate::scenario::Scenario;
use crate::thresholds::Thresholds;

fn plan_and_sample(scenario: &Scenario) -> Result<(PlanSolution, Trajectory), Failure> {
    let sol = rigidplan::plan(&scenario.boundary()?)?;
    let traj = sample_trajectory(&sol, scenario.samples)?;
    Ok((sol, traj))
}

pub fn plan(scenario: &Scenario, out: &Path) -> Result<(), Failure> {
    let (sol, traj) = plan_and_sample(scenario)?;
    let rigidity = rigidity_residual(&traj)?;
    fs::create_dir_all(out)
        .map_err(|e| Failure::io(format!("cannot create {}", out.display()), e))?;
    write_trajectory(&out.join("trajectory.csv"), &sol, &traj)?;
    write_summary(
        &out.join("summary.json"),
        &Summary::new(scenario, &sol, rigidity),
    )?;
    println!(
        "{}: J = {:.6}, u_c = ({:.6}, {:.6}), omega = {:.6}, wrote {}",
        scenario.name,
        sol.cost,
        sol.u_c.x,
        sol.u_c.y,
        sol.omega,
        out.display()
    );
    Ok(())
}

/// `max_t ‖Σ u_i − N u_c‖`, relative to `N ‖u_c‖` once that exceeds one.
fn control_sum_residual(sol: &PlanSolution, traj: &Trajectory) -> f64 {
    let target = sol.u_c * sol.n_agents() as f64;
    traj.controls()
        .expect("planned trajectories carry controls")
        .iter()
        .map(|u| u.iter().copied().sum::<PlanarPoint>().distance(target))
        .fold(0.0, f64::max)
        / target.norm().max(1.0)
}

pub fn verify(scenario: &Scenario, limits: &Thresholds) -> Result<(), Failure> {
    let (sol, traj) = plan_and_sample(scenario)?;
    let pmp = pmp_residuals(&traj)?;
    let rows = [
        ("rigidity", rigidity_residual(&traj)?, limits.rigidity),
        ("com", pmp.com_accel_residual, limits.com),
        ("parallel", pmp.parallelism_residual, limits.parallel),
        (
            "control_sum",
            control_sum_residual(&sol, &traj),
            limits.control_sum,
        ),
    ];
    println!("{}: {} samples", scenario.name, scenario.samples);
    println!("{:<12} {:>12} {:>12}  status", "residual", "value", "limit");
    let mut failed = Vec::new();
    for (name, value, limit) in rows {
        let ok = value <= limit;
        println!(
            "{name:<12} {value:>12.3e} {limit:>12.3e}  {}",
            if ok { "ok" } else { "FAIL" }
        );
        if !ok {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(
            failure::THRESHOLD_EXCEEDED,
            format!("residuals above threshold: {}", failed.join(", ")),
        ))
    }
}

pub fn oracle(
    scenario: &Scenario,
    knots: usize,
    max_iters: Option<usize>,
    limits: &Thresholds,
) -> Result<(), Failure> {
    if knots < 3 {
        return Err(Failure::invalid(format!(
            "--knots must be at least 3, got {knots}"
        )));
    }
    let bc = scenario.boundary()?;
    let closed = rigidplan::plan(&bc)?;
    let mut problem = DiscretizedProblem::new(bc, knots);
    if let Some(iters) = max_iters {
        problem = problem.with_max_iters(iters);
    }
    let solution = solve_direct(&problem)?;
    let report = compare(&closed, &solution)?;
    println!("{}: {knots} knots", scenario.name);
    println!("closed-form cost  {:.10}", closed.cost);
    println!("oracle cost       {:.10}", solution.cost);
    println!("cost gap          {:+.3e}", report.cost_gap);
    println!(
        "max deviation     {:.3e} ({:.3e} of scale)",
        report.max_deviation, report.relative_deviation
    );
    println!(
        "violation         {:.3e}",
        solution.max_constraint_violation
    );
    println!(
        "iterations        {} outer, {} newton",
        solution.iterations, solution.newton_steps
    );
    println!(
        "status            {}",
        if solution.converged {
            "converged"
        } else {
            "not converged"
        }
    );
    solution.ensure_converged()?;
    if report.cost_gap.abs() > limits.gap {
        return Err(Failure::new(
            failure::THRESHOLD_EXCEEDED,
            format!(
                "cost gap {:+.3e} exceeds {:.3e}",
                report.cost_gap, limits.gap
            ),
        ));
    }
    Ok(())
}
