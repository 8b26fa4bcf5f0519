//! Direct transcription of the full multi-agent problem.
//!
//! Decision variables are the interior knot positions of every agent,
//! nondimensionalized by a reference length and the horizon. The objective is
//! the kinetic energy of the piecewise-linear path,
//!
//! ```text
//! f(z) = Σ_k Σ_i ‖z_{k+1,i} − z_{k,i}‖² / (2 Δτ)
//! ```
//!
//! and each constrained pair contributes `c = ‖z_a − z_b‖² − d²` at every
//! interior knot. The augmented Lagrangian weights constraint terms by `Δτ`
//! so that penalties are comparable across grid sizes:
//!
//! ```text
//! F(z) = f(z) + Δτ Σ_{k,p} (λ c + ρ/2 c²)
//! ```
//!
//! The straight-line initial guess is first projected knot by knot onto the
//! constraint set with Gauss-Newton steps. Each subproblem is minimized by Newton's method. The Hessian couples only
//! neighbouring knots, so it is block tridiagonal with `2N × 2N` blocks and
//! constant off-diagonal blocks `−I/Δτ`; a block Thomas sweep solves it.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::{reference_length, DiscretizedProblem, OracleSolution, FEASIBILITY_TOL};
use crate::error::Result;
use crate::geometry::{congruence_transform, Configuration, PlanarPoint, SCALE_FLOOR};
use crate::trajectory::{uniform_grid, Trajectory};

const MAX_NEWTON_STEPS: usize = 60;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 50;
/// Iteration continues past the reported feasibility threshold so that
/// distances outside the constraint set are also held tightly.
const FEASIBILITY_TARGET: f64 = 1e-3 * FEASIBILITY_TOL;
/// Penalty weight at schedule value 1, relative to the kinetic energy of
/// the nondimensional problem. At this weight the first subproblem already
/// keeps the formation within a few percent of its shape.
const PENALTY_UNIT: f64 = 100.0;
const MAX_RESTORATION_STEPS: usize = 50;
/// Outer iterations ending with a larger relative distance error than this
/// (and than before) are discarded.
const DISTORTION_LIMIT: f64 = 0.05;
/// Triangles with smaller normalized area carry no usable orientation.
const ORIENTATION_FLOOR: f64 = 1e-9;

/// Solves the transcribed problem from a straight-line initial guess.
///
/// Returns the last iterate with `converged = false` when the outer budget
/// runs out; see [`OracleSolution::ensure_converged`].
pub fn solve_direct(problem: &DiscretizedProblem) -> Result<OracleSolution> {
    let bc = &problem.boundary;
    if !(bc.t_f > 0.0 && bc.t_f.is_finite()) {
        return Err(crate::Error::InvalidHorizon(bc.t_f));
    }
    congruence_transform(&bc.initial, &bc.terminal, bc.tol)?;
    problem.validate()?;

    let nlp = Transcription::new(problem);
    let mut z = nlp.initial_guess();
    nlp.restore_feasibility(&mut z);
    let mut lambda = nlp.multiplier_estimate(&z);
    let mut newton_steps = 0;
    let mut iterations = 0;

    let mut gradient = nlp.gradient_measure(&nlp.gradient(&z, &lambda, 0.0));
    let mut violation = nlp.violation(&z);
    let done = |violation: f64, gradient: f64| {
        violation <= FEASIBILITY_TARGET && gradient <= problem.grad_tol
    };
    let mut finished = done(violation, gradient);

    while !finished && iterations < problem.max_iters {
        let rho = PENALTY_UNIT
            * problem.penalty_schedule[iterations.min(problem.penalty_schedule.len() - 1)];
        iterations += 1;
        let inner_tol = 0.1 * problem.grad_tol;
        let previous = z.clone();
        newton_steps += nlp.minimize(&mut z, &lambda, rho, inner_tol);
        let distorted = nlp.violation(&z);
        if distorted > DISTORTION_LIMIT && distorted > violation {
            // Too soft a penalty lets the formation fold onto the orientation
            // barrier, where it stays; retry from the last iterate.
            z = previous;
            continue;
        }

        // Gradient of F at the new point equals the Lagrangian gradient with
        // the updated multipliers λ + ρc.
        gradient = nlp.gradient_measure(&nlp.gradient(&z, &lambda, rho));
        for (l, c) in lambda.iter_mut().zip(nlp.constraints(&z)) {
            *l += rho * c;
        }
        violation = distorted;
        finished = done(violation, gradient);
    }
    let converged = violation <= FEASIBILITY_TOL && gradient <= problem.grad_tol;

    let trajectory = nlp.trajectory(&z)?;
    let cost = nlp.physical_cost(&z);
    Ok(OracleSolution {
        trajectory,
        cost,
        max_constraint_violation: violation,
        gradient_norm: gradient,
        converged,
        iterations,
        newton_steps,
    })
}

struct Transcription {
    n: usize,
    knots: usize,
    dtau: f64,
    t_f: f64,
    origin: PlanarPoint,
    length: f64,
    start: Vec<PlanarPoint>,
    end: Vec<PlanarPoint>,
    pairs: Vec<(usize, usize)>,
    target_sq: Vec<f64>,
    /// Agents `i ≥ 2` with the sign of the triangle (0, 1, i) at the start.
    orientation: Vec<(usize, f64)>,
}

impl Transcription {
    fn new(problem: &DiscretizedProblem) -> Self {
        let bc = &problem.boundary;
        let origin = bc.initial.center_of_mass();
        let length = reference_length(&bc.initial, &bc.terminal);
        let scale = |c: &Configuration| -> Vec<PlanarPoint> {
            c.positions()
                .iter()
                .map(|&p| (p - origin) / length)
                .collect()
        };
        let start = scale(&bc.initial);
        let end = scale(&bc.terminal);
        let target_sq = problem
            .constraint_pairs
            .iter()
            .map(|&(a, b)| (start[a] - start[b]).norm_squared())
            .collect();
        let orientation = (2..start.len())
            .filter_map(|i| {
                let area = (start[1] - start[0]).cross(start[i] - start[0]);
                (area.abs() > ORIENTATION_FLOOR).then(|| (i, area.signum()))
            })
            .collect();
        Self {
            n: bc.n_agents(),
            knots: problem.knots,
            dtau: 1.0 / (problem.knots - 1) as f64,
            t_f: bc.t_f,
            origin,
            length,
            start,
            end,
            pairs: problem.constraint_pairs.clone(),
            target_sq,
            orientation,
        }
    }

    fn interior(&self) -> usize {
        self.knots - 2
    }

    fn n_constraints(&self) -> usize {
        self.interior() * self.pairs.len()
    }

    fn initial_guess(&self) -> Vec<PlanarPoint> {
        let mut z = Vec::with_capacity(self.interior() * self.n);
        for k in 1..self.knots - 1 {
            let s = k as f64 * self.dtau;
            for i in 0..self.n {
                z.push(self.start[i] + (self.end[i] - self.start[i]) * s);
            }
        }
        z
    }

    /// Position of agent `i` at knot `k` (boundary knots included).
    fn knot<'a>(&'a self, z: &'a [PlanarPoint], k: usize) -> &'a [PlanarPoint] {
        if k == 0 {
            &self.start
        } else if k == self.knots - 1 {
            &self.end
        } else {
            &z[(k - 1) * self.n..k * self.n]
        }
    }

    fn energy(&self, z: &[PlanarPoint]) -> f64 {
        let mut sum = 0.0;
        for k in 0..self.knots - 1 {
            let (a, b) = (self.knot(z, k), self.knot(z, k + 1));
            sum += a
                .iter()
                .zip(b)
                .map(|(p, q)| (*q - *p).norm_squared())
                .sum::<f64>();
        }
        sum / (2.0 * self.dtau)
    }

    fn physical_cost(&self, z: &[PlanarPoint]) -> f64 {
        self.energy(z) * self.length * self.length / self.t_f
    }

    fn constraints(&self, z: &[PlanarPoint]) -> Vec<f64> {
        let mut c = Vec::with_capacity(self.n_constraints());
        for k in 1..self.knots - 1 {
            let x = self.knot(z, k);
            for (&(a, b), &d2) in self.pairs.iter().zip(&self.target_sq) {
                c.push((x[a] - x[b]).norm_squared() - d2);
            }
        }
        c
    }

    fn violation(&self, z: &[PlanarPoint]) -> f64 {
        let mut worst = 0.0_f64;
        for k in 1..self.knots - 1 {
            let x = self.knot(z, k);
            for (&(a, b), &d2) in self.pairs.iter().zip(&self.target_sq) {
                let d = d2.sqrt();
                let err = ((x[a] - x[b]).norm() - d).abs() / d.max(SCALE_FLOOR);
                worst = worst.max(err);
            }
        }
        worst
    }

    /// A proper rigid motion never mirrors a triangle. Distance constraints
    /// alone cannot tell a triangle from its reflection, so iterates that flip
    /// one are rejected.
    fn preserves_orientation(&self, z: &[PlanarPoint]) -> bool {
        (1..self.knots - 1).all(|k| self.oriented(self.knot(z, k)))
    }

    fn oriented(&self, x: &[PlanarPoint]) -> bool {
        self.orientation
            .iter()
            .all(|&(i, sign)| (x[1] - x[0]).cross(x[i] - x[0]) * sign > 0.0)
    }

    fn knot_residual(&self, x: &[PlanarPoint]) -> Vec<f64> {
        self.pairs
            .iter()
            .zip(&self.target_sq)
            .map(|(&(a, b), &d2)| (x[a] - x[b]).norm_squared() - d2)
            .collect()
    }

    fn knot_jacobian(&self, x: &[PlanarPoint]) -> DMatrix<f64> {
        let mut jac = DMatrix::<f64>::zeros(self.pairs.len(), 2 * self.n);
        for (p, &(a, b)) in self.pairs.iter().enumerate() {
            let d = (x[a] - x[b]) * 2.0;
            jac[(p, 2 * a)] = d.x;
            jac[(p, 2 * a + 1)] = d.y;
            jac[(p, 2 * b)] = -d.x;
            jac[(p, 2 * b + 1)] = -d.y;
        }
        jac
    }

    /// Least-squares multipliers making the Lagrangian gradient smallest at
    /// `z`, knot by knot. Zero where the constraint Jacobian is singular.
    fn multiplier_estimate(&self, z: &[PlanarPoint]) -> Vec<f64> {
        let np = self.pairs.len();
        let mut lambda = vec![0.0; self.n_constraints()];
        if np == 0 {
            return lambda;
        }
        let g = self.gradient(z, &lambda, 0.0);
        for (k, (x, gk)) in z.chunks(self.n).zip(g.chunks(self.n)).enumerate() {
            let jac = self.knot_jacobian(x);
            let Some(normal) = Cholesky::new(&jac * jac.transpose()) else {
                continue;
            };
            let rhs = &jac * DVector::from_iterator(2 * self.n, gk.iter().flat_map(|p| [p.x, p.y]));
            let l = normal.solve(&rhs) / -self.dtau;
            lambda[k * np..(k + 1) * np].copy_from_slice(l.as_slice());
        }
        lambda
    }

    /// Moves every interior knot onto the constraint set by minimum-norm
    /// Gauss-Newton steps, keeping triangle orientations. Knots where this
    /// stalls are left for the augmented Lagrangian.
    fn restore_feasibility(&self, z: &mut [PlanarPoint]) {
        let (n, np) = (self.n, self.pairs.len());
        if np == 0 {
            return;
        }
        for x in z.chunks_mut(n) {
            let mut c = self.knot_residual(x);
            let mut size = c.iter().map(|v| v * v).sum::<f64>();
            for _ in 0..MAX_RESTORATION_STEPS {
                if size.sqrt() <= 1e-14 {
                    break;
                }
                let jac = self.knot_jacobian(x);
                let Some(normal) = Cholesky::new(&jac * jac.transpose()) else {
                    break;
                };
                let step = jac.transpose() * normal.solve(&DVector::from_vec(c.clone()));
                let mut alpha = 1.0;
                let mut improved = false;
                for _ in 0..MAX_BACKTRACKS {
                    let trial: Vec<PlanarPoint> = x
                        .iter()
                        .enumerate()
                        .map(|(i, &p)| p - PlanarPoint::new(step[2 * i], step[2 * i + 1]) * alpha)
                        .collect();
                    let tc = self.knot_residual(&trial);
                    let tsize = tc.iter().map(|v| v * v).sum::<f64>();
                    if self.oriented(&trial) && tsize < size {
                        x.copy_from_slice(&trial);
                        c = tc;
                        size = tsize;
                        improved = true;
                        break;
                    }
                    alpha *= 0.5;
                }
                if !improved {
                    break;
                }
            }
        }
    }

    fn merit(&self, z: &[PlanarPoint], lambda: &[f64], rho: f64) -> f64 {
        let penalty: f64 = self
            .constraints(z)
            .iter()
            .zip(lambda)
            .map(|(c, l)| l * c + 0.5 * rho * c * c)
            .sum();
        self.energy(z) + self.dtau * penalty
    }

    fn gradient(&self, z: &[PlanarPoint], lambda: &[f64], rho: f64) -> Vec<PlanarPoint> {
        let n = self.n;
        let mut g = vec![PlanarPoint::ZERO; z.len()];
        let c = self.constraints(z);
        let np = self.pairs.len();
        for k in 1..self.knots - 1 {
            let (prev, cur, next) = (self.knot(z, k - 1), self.knot(z, k), self.knot(z, k + 1));
            let gk = &mut g[(k - 1) * n..k * n];
            for i in 0..n {
                gk[i] = (cur[i] * 2.0 - prev[i] - next[i]) / self.dtau;
            }
            for (p, &(a, b)) in self.pairs.iter().enumerate() {
                let idx = (k - 1) * np + p;
                let w = self.dtau * (lambda[idx] + rho * c[idx]);
                let d = (cur[a] - cur[b]) * (2.0 * w);
                gk[a] += d;
                gk[b] -= d;
            }
        }
        g
    }

    /// Largest per-knot gradient divided by `Δτ`: an acceleration-like
    /// residual independent of grid size.
    fn gradient_measure(&self, g: &[PlanarPoint]) -> f64 {
        g.iter().map(|v| v.norm()).fold(0.0, f64::max) / self.dtau
    }

    /// Diagonal Hessian blocks. With `clamp`, negative multiplier weights are
    /// dropped so every block is positive definite.
    fn hessian_blocks(
        &self,
        z: &[PlanarPoint],
        lambda: &[f64],
        rho: f64,
        clamp: bool,
    ) -> Vec<DMatrix<f64>> {
        let dim = 2 * self.n;
        let np = self.pairs.len();
        let c = self.constraints(z);
        (1..self.knots - 1)
            .map(|k| {
                let x = self.knot(z, k);
                let mut h = DMatrix::<f64>::identity(dim, dim) * (2.0 / self.dtau);
                for (p, &(a, b)) in self.pairs.iter().enumerate() {
                    let idx = (k - 1) * np + p;
                    let mut w = lambda[idx] + rho * c[idx];
                    if clamp {
                        w = w.max(0.0);
                    }
                    let d = x[a] - x[b];
                    let g = [2.0 * d.x, 2.0 * d.y];
                    for r in 0..2 {
                        for s in 0..2 {
                            let curvature = if r == s { 2.0 * w } else { 0.0 };
                            let outer = rho * g[r] * g[s];
                            let v = self.dtau * (curvature + outer);
                            h[(2 * a + r, 2 * a + s)] += v;
                            h[(2 * b + r, 2 * b + s)] += v;
                            h[(2 * a + r, 2 * b + s)] -= v;
                            h[(2 * b + r, 2 * a + s)] -= v;
                        }
                    }
                }
                h
            })
            .collect()
    }

    /// Solves `H x = rhs` for the block-tridiagonal Hessian with off-diagonal
    /// blocks `−I/Δτ`. Returns `None` if the matrix is not positive definite.
    fn block_solve(
        &self,
        blocks: Vec<DMatrix<f64>>,
        rhs: &[PlanarPoint],
    ) -> Option<Vec<PlanarPoint>> {
        let n = self.n;
        let dim = 2 * n;
        let coupling = 1.0 / self.dtau;
        let rhs_block = |k: usize| {
            DVector::from_iterator(dim, rhs[k * n..(k + 1) * n].iter().flat_map(|p| [p.x, p.y]))
        };

        let mut factors: Vec<Cholesky<f64, Dyn>> = Vec::with_capacity(blocks.len());
        let mut reduced: Vec<DVector<f64>> = Vec::with_capacity(blocks.len());
        for (k, mut block) in blocks.into_iter().enumerate() {
            let mut y = rhs_block(k);
            if let Some(prev) = factors.last() {
                block -= prev.inverse() * (coupling * coupling);
                y += prev.solve(&reduced[k - 1]) * coupling;
            }
            factors.push(Cholesky::new(block)?);
            reduced.push(y);
        }

        let mut out = vec![PlanarPoint::ZERO; rhs.len()];
        let mut next: Option<DVector<f64>> = None;
        for k in (0..factors.len()).rev() {
            let mut y = reduced[k].clone();
            if let Some(x_next) = &next {
                y += x_next * coupling;
            }
            let x = factors[k].solve(&y);
            for i in 0..n {
                out[k * n + i] = PlanarPoint::new(x[2 * i], x[2 * i + 1]);
            }
            next = Some(x);
        }
        Some(out)
    }

    /// Newton iterations on `F(·; λ, ρ)`; returns the number of steps taken.
    fn minimize(&self, z: &mut Vec<PlanarPoint>, lambda: &[f64], rho: f64, tol: f64) -> usize {
        let mut value = self.merit(z, lambda, rho);
        for step in 0..MAX_NEWTON_STEPS {
            let g = self.gradient(z, lambda, rho);
            let measure = self.gradient_measure(&g);
            if measure <= tol {
                return step;
            }
            let neg_g: Vec<PlanarPoint> = g.iter().map(|v| -*v).collect();
            let direction = self
                .block_solve(self.hessian_blocks(z, lambda, rho, false), &neg_g)
                .filter(|d| slope(&g, d) < 0.0)
                .or_else(|| self.block_solve(self.hessian_blocks(z, lambda, rho, true), &neg_g));
            let Some(direction) = direction else {
                return step;
            };
            let descent = slope(&g, &direction);
            if descent >= 0.0 {
                return step;
            }

            let mut alpha = 1.0;
            let mut accepted = false;
            let mut trial = z.clone();
            for _ in 0..MAX_BACKTRACKS {
                for ((t, x), d) in trial.iter_mut().zip(z.iter()).zip(&direction) {
                    *t = *x + *d * alpha;
                }
                if !self.preserves_orientation(&trial) {
                    alpha *= 0.5;
                    continue;
                }
                let candidate = self.merit(&trial, lambda, rho);
                let sufficient = candidate <= value + ARMIJO * alpha * descent;
                // Near the optimum the merit change drowns in roundoff; fall
                // back to requiring a smaller gradient.
                let flat = (candidate - value).abs() <= 1e-13 * value.abs().max(1.0)
                    && self.gradient_measure(&self.gradient(&trial, lambda, rho)) < measure;
                if sufficient || flat {
                    value = candidate;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted {
                return step;
            }
            std::mem::swap(z, &mut trial);
        }
        MAX_NEWTON_STEPS
    }

    fn trajectory(&self, z: &[PlanarPoint]) -> Result<Trajectory> {
        let times = uniform_grid(self.t_f, self.knots);
        let to_world = |p: &PlanarPoint| self.origin + *p * self.length;
        let states = (0..self.knots)
            .map(|k| Configuration::new(self.knot(z, k).iter().map(to_world).collect()))
            .collect::<Result<Vec<_>>>()?;
        let h = self.t_f * self.dtau;
        let segment =
            |k: usize, i: usize| (states[k + 1].positions()[i] - states[k].positions()[i]) / h;
        let controls = (0..self.knots)
            .map(|k| {
                (0..self.n)
                    .map(|i| match k {
                        0 => segment(0, i),
                        k if k == self.knots - 1 => segment(k - 1, i),
                        k => (segment(k - 1, i) + segment(k, i)) * 0.5,
                    })
                    .collect()
            })
            .collect();
        Trajectory::new(times, states, Some(controls))
    }
}

fn slope(g: &[PlanarPoint], d: &[PlanarPoint]) -> f64 {
    g.iter().zip(d).map(|(a, b)| a.dot(*b)).sum()
}
