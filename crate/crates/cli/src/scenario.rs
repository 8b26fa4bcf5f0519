use std::fs;
use std::path::Path;

use rigidplan::{BoundaryConditions, Configuration};
use serde::Deserialize;

use crate::failure::Failure;

/// Boundary-value problem as read from a JSON file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    pub agents_initial: Vec<[f64; 2]>,
    pub agents_terminal: Vec<[f64; 2]>,
    pub t_f: f64,
    #[serde(default)]
    pub winding: i64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_samples() -> usize {
    201
}

fn default_tol() -> f64 {
    rigidplan::DEFAULT_CONGRUENCE_TOL
}

/// Values that may be overridden from the command line.
#[derive(Debug, Default, Clone, Copy)]
pub struct Overrides {
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub winding: Option<i64>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::io(format!("cannot read {}", path.display()), e))?;
        let scenario: Scenario = serde_json::from_str(&text)
            .map_err(|e| Failure::invalid(format!("malformed scenario {}: {e}", path.display())))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn apply(mut self, overrides: Overrides) -> Result<Self, Failure> {
        if let Some(samples) = overrides.samples {
            self.samples = samples;
        }
        if let Some(tol) = overrides.tol {
            self.tol = tol;
        }
        if let Some(winding) = overrides.winding {
            self.winding = winding;
        }
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<(), Failure> {
        if self.agents_initial.is_empty() {
            return Err(Failure::invalid("scenario has no agents"));
        }
        if self.agents_initial.len() != self.agents_terminal.len() {
            return Err(Failure::invalid(format!(
                "agents_initial has {} entries but agents_terminal has {}",
                self.agents_initial.len(),
                self.agents_terminal.len()
            )));
        }
        if !(self.t_f > 0.0 && self.t_f.is_finite()) {
            return Err(Failure::invalid(format!(
                "t_f must be positive, got {}",
                self.t_f
            )));
        }
        if self.samples < 2 {
            return Err(Failure::invalid(format!(
                "samples must be at least 2, got {}",
                self.samples
            )));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Failure::invalid(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }

    pub fn boundary(&self) -> Result<BoundaryConditions, Failure> {
        let config = |points: &[[f64; 2]]| -> Result<Configuration, Failure> {
            let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
            Ok(Configuration::from_xy(&pairs)?)
        };
        Ok(BoundaryConditions::new(
            config(&self.agents_initial)?,
            config(&self.agents_terminal)?,
            self.t_f,
        )
        .with_winding(self.winding)
        .with_tol(self.tol))
    }
}
