use crate::error::{Error, Result};
use crate::geometry::{Configuration, PlanarPoint};

/// Time-sampled agent positions and (optionally) controls on `[0, t_f]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<Configuration>,
    controls: Option<Vec<Vec<PlanarPoint>>>,
}

impl Trajectory {
    /// Validates and assembles a trajectory. Times must start at zero and
    /// increase strictly; every state and control sample must cover the same
    /// agents.
    pub fn new(
        times: Vec<f64>,
        states: Vec<Configuration>,
        controls: Option<Vec<Vec<PlanarPoint>>>,
    ) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidTrajectory("no samples".into()));
        }
        if times.len() != states.len() {
            return Err(Error::InvalidTrajectory(format!(
                "{} times but {} states",
                times.len(),
                states.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidTrajectory(format!(
                "first sample at t = {}, expected 0",
                times[0]
            )));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidTrajectory(
                "times must be finite and strictly increasing".into(),
            ));
        }
        let n = states[0].len();
        if let Some(bad) = states.iter().find(|s| s.len() != n) {
            return Err(Error::AgentCountMismatch(n, bad.len()));
        }
        if let Some(controls) = &controls {
            if controls.len() != times.len() {
                return Err(Error::InvalidTrajectory(format!(
                    "{} times but {} control samples",
                    times.len(),
                    controls.len()
                )));
            }
            if let Some(bad) = controls.iter().find(|u| u.len() != n) {
                return Err(Error::AgentCountMismatch(n, bad.len()));
            }
        }
        Ok(Self {
            times,
            states,
            controls,
        })
    }

    /// Each agent moves on the straight segment between its endpoints at
    /// constant speed. Generally violates rigidity.
    pub fn straight_line(
        initial: &Configuration,
        terminal: &Configuration,
        t_f: f64,
        n_samples: usize,
    ) -> Result<Self> {
        if initial.len() != terminal.len() {
            return Err(Error::AgentCountMismatch(initial.len(), terminal.len()));
        }
        if !(t_f > 0.0 && t_f.is_finite()) {
            return Err(Error::InvalidHorizon(t_f));
        }
        if n_samples < 2 {
            return Err(Error::InvalidSampleCount(n_samples));
        }
        let velocities: Vec<PlanarPoint> = initial
            .positions()
            .iter()
            .zip(terminal.positions())
            .map(|(&a, &b)| (b - a) / t_f)
            .collect();
        let times = uniform_grid(t_f, n_samples);
        let states = times
            .iter()
            .enumerate()
            .map(|(k, &t)| {
                if k + 1 == n_samples {
                    return Ok(terminal.clone());
                }
                let positions = initial
                    .positions()
                    .iter()
                    .zip(&velocities)
                    .map(|(&p, &v)| p + v * t)
                    .collect();
                Configuration::new(positions)
            })
            .collect::<Result<Vec<_>>>()?;
        let controls = vec![velocities; n_samples];
        Self::new(times, states, Some(controls))
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n_agents(&self) -> usize {
        self.states[0].len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn t_f(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }

    pub fn states(&self) -> &[Configuration] {
        &self.states
    }

    pub fn controls(&self) -> Option<&[Vec<PlanarPoint>]> {
        self.controls.as_deref()
    }

    /// Returns a copy with every agent position displaced by `offset(t)`.
    pub fn perturbed<F>(&self, offset: F) -> Self
    where
        F: Fn(f64) -> PlanarPoint,
    {
        let states = self
            .times
            .iter()
            .zip(&self.states)
            .map(|(&t, s)| {
                let d = offset(t);
                Configuration::new(s.positions().iter().map(|&p| p + d).collect())
                    .expect("perturbation keeps configuration valid")
            })
            .collect();
        Self {
            times: self.times.clone(),
            states,
            controls: None,
        }
    }

    /// Spacing of a uniform grid, or [`Error::NonUniformGrid`].
    pub fn uniform_step(&self) -> Result<f64> {
        if self.len() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: self.len(),
            });
        }
        let h = self.t_f() / (self.len() - 1) as f64;
        let slack = 1e-9 * h;
        if self
            .times
            .windows(2)
            .any(|w| (w[1] - w[0] - h).abs() > slack)
        {
            return Err(Error::NonUniformGrid);
        }
        Ok(h)
    }
}

/// `n` equally spaced times from 0 to `t_f`, with the last one exactly `t_f`.
pub(crate) fn uniform_grid(t_f: f64, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|k| {
            if k + 1 == n {
                t_f
            } else {
                t_f * k as f64 / last
            }
        })
        .collect()
}
