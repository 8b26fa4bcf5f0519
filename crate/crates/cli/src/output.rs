use std::fs::File;
use std::io::Write;
use std::path::Path;

use rigidplan::{PlanSolution, Trajectory};
use serde::Serialize;

use crate::failure::Failure;
use crate::scenario::Scenario;

#[derive(Debug, Serialize)]
pub struct Summary {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub n_agents: usize,
    pub t_f: f64,
    pub cost: f64,
    pub u_c: [f64; 2],
    pub omega: f64,
    pub delta_theta: f64,
    pub winding: i64,
    pub theta0: f64,
    pub com_initial: [f64; 2],
    pub inertia: f64,
    pub samples: usize,
    pub rigidity_residual: f64,
}

impl Summary {
    pub fn new(scenario: &Scenario, sol: &PlanSolution, rigidity_residual: f64) -> Self {
        Self {
            name: scenario.name.clone(),
            description: scenario.description.clone(),
            n_agents: sol.n_agents(),
            t_f: sol.t_f,
            cost: sol.cost,
            u_c: [sol.u_c.x, sol.u_c.y],
            omega: sol.omega,
            delta_theta: sol.omega * sol.t_f,
            winding: sol.winding,
            theta0: sol.theta0,
            com_initial: [sol.r_c0.x, sol.r_c0.y],
            inertia: sol.shape.inertia(),
            samples: scenario.samples,
            rigidity_residual,
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv_header(n_agents: usize) -> Vec<String> {
    let mut header = vec!["t".to_owned()];
    for i in 1..=n_agents {
        header.extend([
            format!("x{i}"),
            format!("y{i}"),
            format!("ux{i}"),
            format!("uy{i}"),
        ]);
    }
    header.extend(["xc", "yc", "theta"].map(String::from));
    header
}

pub fn write_trajectory(path: &Path, sol: &PlanSolution, traj: &Trajectory) -> Result<(), Failure> {
    let fail = |e: csv::Error| Failure::io(format!("cannot write {}", path.display()), e);
    let mut writer = csv::Writer::from_path(path).map_err(fail)?;
    writer
        .write_record(csv_header(traj.n_agents()))
        .map_err(fail)?;
    let controls = traj
        .controls()
        .expect("planned trajectories carry controls");
    for ((&t, state), u) in traj.times().iter().zip(traj.states()).zip(controls) {
        let mut row = vec![num(t)];
        for (p, v) in state.positions().iter().zip(u) {
            row.extend([num(p.x), num(p.y), num(v.x), num(v.y)]);
        }
        let com = sol.com_at(t);
        row.extend([num(com.x), num(com.y), num(sol.heading_at(t))]);
        writer.write_record(&row).map_err(fail)?;
    }
    writer
        .flush()
        .map_err(|e| Failure::io(format!("cannot write {}", path.display()), e))
}

pub fn write_summary(path: &Path, summary: &Summary) -> Result<(), Failure> {
    let fail = |e: std::io::Error| Failure::io(format!("cannot write {}", path.display()), e);
    let mut text = serde_json::to_string_pretty(summary).expect("summary serializes");
    text.push('\n');
    File::create(path)
        .and_then(|mut f| f.write_all(text.as_bytes()))
        .map_err(fail)
}
