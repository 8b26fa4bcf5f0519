#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rigidplan::{BoundaryConditions, Configuration, PlanarPoint, RigidMotion};
use std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn example_one() -> BoundaryConditions {
    BoundaryConditions::new(
        Configuration::from_xy(&[(0.0, 0.0), (0.0, 1.0)]).unwrap(),
        Configuration::from_xy(&[(0.5, 0.0), (1.0, 3f64.sqrt() / 2.0)]).unwrap(),
        1.0,
    )
}

pub fn random_formation(rng: &mut impl Rng, n: usize) -> Configuration {
    let points = (0..n)
        .map(|_| PlanarPoint::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Configuration::new(points).unwrap()
}

/// Whether the fan anchored on agents 0 and 1 is well conditioned: the base
/// is at least a tenth of the formation scale and every triangle (0, 1, i)
/// has all angles with sine at least 0.1.
pub fn well_conditioned_fan(config: &Configuration) -> bool {
    let p = config.positions();
    let base = p[1] - p[0];
    if base.norm() < 0.1 * config.formation_scale() {
        return false;
    }
    p.iter().skip(2).all(|&q| {
        let mut sides = [base.norm(), (q - p[0]).norm(), (q - p[1]).norm()];
        sides.sort_by(f64::total_cmp);
        base.cross(q - p[0]).abs() >= 0.1 * sides[1] * sides[2]
    })
}

/// Random formation with a well-conditioned fan, moved by a random proper
/// motion with `|rotation| < 0.9π`.
pub fn random_scenario(rng: &mut impl Rng, n: usize) -> BoundaryConditions {
    let initial = loop {
        let candidate = random_formation(rng, n);
        if well_conditioned_fan(&candidate) {
            break candidate;
        }
    };
    let motion = RigidMotion {
        translation: PlanarPoint::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
        rotation: rng.gen_range(-0.9 * PI..0.9 * PI),
        winding: 0,
    };
    let terminal = motion.apply(&initial);
    BoundaryConditions::new(initial, terminal, rng.gen_range(0.5..5.0))
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
