//! Planar rigid formations.
//!
//! A formation of `N` agents is described intrinsically by the distance
//! `l_i` of each agent from the center of mass and its bearing `α_i`
//! relative to agent 1. Together with the center of mass `r_c` and the
//! heading `θ` (bearing of agent 1 about `r_c`) this gives
//!
//! ```text
//! r_i = r_c + l_i ŝ(α_i + θ),    ŝ(θ) = (cos θ, sin θ)
//! ```
//!
//! which satisfies every pairwise distance constraint for any `(r_c, θ)`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::trajectory::Trajectory;

/// Default congruence tolerance, relative to formation scale.
pub const DEFAULT_CONGRUENCE_TOL: f64 = 1e-9;

/// Relative tolerance under which agent 1 is considered to sit on the CoM.
pub const HEADING_TOL: f64 = 1e-12;

/// Floor applied to reference distances in [`rigidity_residual`].
pub const SCALE_FLOOR: f64 = 1e-12;

/// Relative tolerance for the centering invariant of [`FormationShape`].
const CENTERING_TOL: f64 = 1e-9;

/// A point (or displacement, or velocity) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanarPoint {
    pub x: f64,
    pub y: f64,
}

impl PlanarPoint {
    pub const ZERO: PlanarPoint = PlanarPoint { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Bearing from the positive x axis, in (−π, π].
    pub fn bearing(self) -> f64 {
        normalize_angle(self.y.atan2(self.x))
    }

    /// Rotation by +90°.
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn rotated(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<(f64, f64)> for PlanarPoint {
    fn from((x, y): (f64, f64)) -> Self {
        Self::new(x, y)
    }
}

impl From<[f64; 2]> for PlanarPoint {
    fn from([x, y]: [f64; 2]) -> Self {
        Self::new(x, y)
    }
}

impl fmt::Display for PlanarPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for PlanarPoint {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for PlanarPoint {
    fn add_assign(&mut self, rhs: Self) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for PlanarPoint {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl SubAssign for PlanarPoint {
    fn sub_assign(&mut self, rhs: Self) {
        self.x -= rhs.x;
        self.y -= rhs.y;
    }
}

impl Mul<f64> for PlanarPoint {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.x * rhs, self.y * rhs)
    }
}

impl Mul<PlanarPoint> for f64 {
    type Output = PlanarPoint;
    fn mul(self, rhs: PlanarPoint) -> PlanarPoint {
        rhs * self
    }
}

impl Div<f64> for PlanarPoint {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        Self::new(self.x / rhs, self.y / rhs)
    }
}

impl Neg for PlanarPoint {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl std::iter::Sum for PlanarPoint {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Add::add)
    }
}

/// Direction at angle `θ` from the horizontal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitBearing(pub f64);

impl UnitBearing {
    pub fn angle(self) -> f64 {
        self.0
    }

    /// ŝ(θ) = (cos θ, sin θ).
    pub fn unit(self) -> PlanarPoint {
        let (s, c) = self.0.sin_cos();
        PlanarPoint::new(c, s)
    }

    /// ŝ⊥(θ) = (−sin θ, cos θ), so that d/dt ŝ(θ(t)) = θ̇ ŝ⊥(θ(t)).
    pub fn perp(self) -> PlanarPoint {
        let (s, c) = self.0.sin_cos();
        PlanarPoint::new(-s, c)
    }
}

/// Maps an angle into (−π, π]; −π goes to +π.
pub fn normalize_angle(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Positions of all agents at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    positions: Vec<PlanarPoint>,
}

impl Configuration {
    pub fn new(positions: Vec<PlanarPoint>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::EmptyConfiguration);
        }
        if let Some(i) = positions.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { positions })
    }

    pub fn from_xy(points: &[(f64, f64)]) -> Result<Self> {
        Self::new(points.iter().copied().map(PlanarPoint::from).collect())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[PlanarPoint] {
        &self.positions
    }

    pub fn into_positions(self) -> Vec<PlanarPoint> {
        self.positions
    }

    pub fn center_of_mass(&self) -> PlanarPoint {
        center_of_mass(self)
    }

    /// Largest pairwise distance; zero for a single agent.
    pub fn formation_scale(&self) -> f64 {
        let p = &self.positions;
        let mut scale = 0.0_f64;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                scale = scale.max(p[i].distance(p[j]));
            }
        }
        scale
    }

    /// Largest coordinate magnitude, used to bound floating-point noise.
    pub(crate) fn magnitude(&self) -> f64 {
        self.positions.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    /// Rotates the configuration about `pivot` by `angle`, then shifts it by `offset`.
    pub fn transformed(&self, pivot: PlanarPoint, angle: f64, offset: PlanarPoint) -> Self {
        let positions = self
            .positions
            .iter()
            .map(|&p| pivot + (p - pivot).rotated(angle) + offset)
            .collect();
        Self { positions }
    }

    pub fn max_deviation(&self, other: &Configuration) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::AgentCountMismatch(self.len(), other.len()));
        }
        Ok(self
            .positions
            .iter()
            .zip(&other.positions)
            .map(|(a, b)| a.distance(*b))
            .fold(0.0, f64::max))
    }
}

/// Intrinsic description of a rigid formation about its center of mass.
#[derive(Debug, Clone, PartialEq)]
pub struct FormationShape {
    radii: Vec<f64>,
    bearings: Vec<f64>,
    inertia: f64,
}

impl FormationShape {
    /// Builds a shape from per-agent radii and bearings (agent 1 first, with
    /// bearing 0). The agents must be centered on their CoM.
    pub fn new(radii: Vec<f64>, bearings: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::EmptyConfiguration);
        }
        if radii.len() != bearings.len() {
            return Err(Error::InvalidShape(format!(
                "{} radii but {} bearings",
                radii.len(),
                bearings.len()
            )));
        }
        if radii.iter().chain(&bearings).any(|v| !v.is_finite()) {
            return Err(Error::InvalidShape("non-finite radius or bearing".into()));
        }
        if radii.iter().any(|&l| l < 0.0) {
            return Err(Error::InvalidShape("negative radius".into()));
        }
        if bearings[0] != 0.0 {
            return Err(Error::InvalidShape(format!(
                "bearing of agent 1 must be 0, got {}",
                bearings[0]
            )));
        }
        let bearings: Vec<f64> = bearings.into_iter().map(normalize_angle).collect();
        let max_radius = radii.iter().copied().fold(0.0, f64::max);
        let offset: PlanarPoint = radii
            .iter()
            .zip(&bearings)
            .map(|(&l, &a)| UnitBearing(a).unit() * l)
            .sum();
        if offset.norm() > CENTERING_TOL * max_radius {
            return Err(Error::InvalidShape(format!(
                "agents are not centered on their CoM (offset {:.3e})",
                offset.norm()
            )));
        }
        Ok(Self::from_parts(radii, bearings))
    }

    /// `n` agents stacked on the center of mass.
    pub fn collapsed(n: usize) -> Self {
        Self::from_parts(vec![0.0; n.max(1)], vec![0.0; n.max(1)])
    }

    fn from_parts(radii: Vec<f64>, bearings: Vec<f64>) -> Self {
        let inertia = radii.iter().map(|l| l * l).sum();
        Self {
            radii,
            bearings,
            inertia,
        }
    }

    pub fn n_agents(&self) -> usize {
        self.radii.len()
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn bearings(&self) -> &[f64] {
        &self.bearings
    }

    /// Moment of inertia about the CoM with unit masses, Σ l_i².
    pub fn inertia(&self) -> f64 {
        self.inertia
    }

    /// True when every agent sits on the CoM, so heading carries no meaning.
    pub fn is_collapsed(&self) -> bool {
        self.radii.iter().all(|&l| l == 0.0)
    }

    /// Offset of agent `i` from the CoM at heading `theta`.
    pub fn offset(&self, i: usize, theta: f64) -> PlanarPoint {
        UnitBearing(self.bearings[i] + theta).unit() * self.radii[i]
    }
}

/// A proper planar rigid motion: rotation about the centroid, then a
/// translation of the centroid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    pub translation: PlanarPoint,
    /// Principal rotation angle in (−π, π].
    pub rotation: f64,
    /// Extra full turns.
    pub winding: i64,
}

impl RigidMotion {
    pub fn effective_rotation(&self) -> f64 {
        self.rotation + TAU * self.winding as f64
    }

    pub fn apply(&self, config: &Configuration) -> Configuration {
        config.transformed(config.center_of_mass(), self.rotation, self.translation)
    }
}

pub fn center_of_mass(config: &Configuration) -> PlanarPoint {
    let n = config.len() as f64;
    config.positions().iter().copied().sum::<PlanarPoint>() / n
}

/// Splits a configuration into its intrinsic shape, CoM and heading.
///
/// Heading is the bearing of agent 1 about the CoM, so agent 1 must not
/// coincide with the CoM when there is more than one agent.
pub fn extract_shape(config: &Configuration) -> Result<(FormationShape, PlanarPoint, f64)> {
    let r_c = config.center_of_mass();
    if config.len() == 1 {
        return Ok((FormationShape::collapsed(1), r_c, 0.0));
    }
    let offsets: Vec<PlanarPoint> = config.positions().iter().map(|&p| p - r_c).collect();
    let tol = HEADING_TOL * config.magnitude().max(config.formation_scale());
    let lead = offsets[0];
    if lead.norm() <= tol {
        return Err(Error::DegenerateHeading);
    }
    let theta0 = lead.bearing();
    let radii: Vec<f64> = offsets.iter().map(|d| d.norm()).collect();
    let bearings: Vec<f64> = offsets
        .iter()
        .enumerate()
        .map(|(i, d)| {
            if i == 0 || radii[i] == 0.0 {
                0.0
            } else {
                normalize_angle(d.bearing() - theta0)
            }
        })
        .collect();
    Ok((FormationShape::from_parts(radii, bearings), r_c, theta0))
}

/// Places the formation with its CoM at `r_c` and heading `theta`.
pub fn reconstruct_positions(
    shape: &FormationShape,
    r_c: PlanarPoint,
    theta: f64,
) -> Configuration {
    let positions = (0..shape.n_agents())
        .map(|i| r_c + shape.offset(i, theta))
        .collect();
    Configuration { positions }
}

/// Finds the proper rigid motion taking `initial` onto `terminal`.
///
/// The rotation is the closed-form least-squares (Procrustes) angle of the
/// centered point sets. Fails when no proper motion fits within
/// `tol · formation_scale`; reports [`Error::ReflectionRequired`] when an
/// improper one would.
pub fn congruence_transform(
    initial: &Configuration,
    terminal: &Configuration,
    tol: f64,
) -> Result<RigidMotion> {
    if initial.len() != terminal.len() {
        return Err(Error::AgentCountMismatch(initial.len(), terminal.len()));
    }
    let c0 = initial.center_of_mass();
    let c1 = terminal.center_of_mass();
    let p: Vec<PlanarPoint> = initial.positions().iter().map(|&r| r - c0).collect();
    let q: Vec<PlanarPoint> = terminal.positions().iter().map(|&r| r - c1).collect();

    let scale = initial.formation_scale().max(terminal.formation_scale());
    // Roundoff floor so that exact data at large offsets is not rejected.
    let noise = 64.0 * f64::EPSILON * initial.magnitude().max(terminal.magnitude());
    let allowed = tol * scale + noise;

    let (rotation, residual) = best_rotation(&p, &q);
    if residual <= allowed {
        return Ok(RigidMotion {
            translation: c1 - c0,
            rotation,
            winding: 0,
        });
    }

    let mirrored: Vec<PlanarPoint> = p.iter().map(|d| PlanarPoint::new(d.x, -d.y)).collect();
    let (_, mirror_residual) = best_rotation(&mirrored, &q);
    if mirror_residual <= allowed {
        return Err(Error::ReflectionRequired { residual });
    }
    Err(Error::NotCongruent { residual, allowed })
}

/// Least-squares rotation angle of `p` onto `q` and the max pointwise residual.
fn best_rotation(p: &[PlanarPoint], q: &[PlanarPoint]) -> (f64, f64) {
    let (mut cross, mut dot) = (0.0, 0.0);
    for (a, b) in p.iter().zip(q) {
        cross += a.cross(*b);
        dot += a.dot(*b);
    }
    let mut angle = normalize_angle(cross.atan2(dot));
    // A half turn computed from noisy sums can land on either side of ±π.
    if PI - angle.abs() <= 1e-12 {
        angle = PI;
    }
    let residual = p
        .iter()
        .zip(q)
        .map(|(a, b)| a.rotated(angle).distance(*b))
        .fold(0.0, f64::max);
    (angle, residual)
}

/// Worst relative drift of any pairwise distance from its value at t = 0.
pub fn rigidity_residual(traj: &Trajectory) -> Result<f64> {
    if traj.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: traj.len(),
        });
    }
    let first = traj.states()[0].positions();
    let n = first.len();
    let mut worst = 0.0_f64;
    for state in traj.states() {
        let p = state.positions();
        for i in 0..n {
            for j in i + 1..n {
                let d0 = first[i].distance(first[j]);
                let d = p[i].distance(p[j]);
                worst = worst.max((d - d0).abs() / d0.max(SCALE_FLOOR));
            }
        }
    }
    Ok(worst)
}

/// Minimum number of distance constraints that make `n` planar agents rigid.
pub fn constraint_count(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::InvalidN(n));
    }
    Ok(2 * n - 3)
}

/// Rotational energy coefficient written over the first `N − 1` agents:
/// `Σ l_i² + Σ_i Σ_j l_i l_j cos(α_i − α_j)`. The double sum is the squared
/// offset of the last agent, so the result equals the inertia `Σ_{i=1}^N l_i²`.
pub fn rotational_coefficient(shape: &FormationShape) -> f64 {
    let free = shape.n_agents() - 1;
    let l = &shape.radii()[..free];
    let a = &shape.bearings()[..free];
    let own: f64 = l.iter().map(|x| x * x).sum();
    let mut coupled = 0.0;
    for i in 0..free {
        for j in 0..free {
            coupled += l[i] * l[j] * (a[i] - a[j]).cos();
        }
    }
    own + coupled
}
