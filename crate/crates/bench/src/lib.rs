//! Fixtures shared by the benchmarks.

use rigidplan::{BoundaryConditions, Configuration, PlanarPoint, RigidMotion};

/// `n` agents on a slightly irregular ring, turned by 100° and moved.
pub fn ring_scenario(n: usize) -> BoundaryConditions {
    let points = (0..n)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / n as f64;
            let r = 1.0 + 0.1 * (3.0 * a).sin();
            PlanarPoint::new(r * a.cos(), r * a.sin())
        })
        .collect();
    let initial = Configuration::new(points).expect("finite points");
    let motion = RigidMotion {
        translation: PlanarPoint::new(3.0, -1.0),
        rotation: 100f64.to_radians(),
        winding: 0,
    };
    let terminal = motion.apply(&initial);
    BoundaryConditions::new(initial, terminal, 2.0)
}
