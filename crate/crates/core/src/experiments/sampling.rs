use rand::Rng;
use std::f64::consts::{FRAC_PI_2, TAU};

use crate::spaces::{BoundaryPoint, ProductEnd, Sign, Space, TreeEnd};

/// A random boundary direction. Tree ends get `depth` random labels (capped
/// by the truncation depth) followed by the all-0 tail.
pub fn random_boundary_point<R: Rng>(space: &Space, rng: &mut R, depth: u32) -> BoundaryPoint {
    match space {
        Space::Tree(t) => {
            let len = depth.min(t.truncation_depth) as usize;
            BoundaryPoint::Tree(TreeEnd::with_zero_tail((0..len).map(|_| rng.gen_range(0..t.branching)).collect()))
        }
        Space::Line { .. } => BoundaryPoint::Line(if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus }),
        Space::Plane { .. } | Space::Hyperbolic { .. } => BoundaryPoint::angle(rng.gen_range(0.0..TAU)),
        Space::Product(a, b) => BoundaryPoint::Product(Box::new(ProductEnd {
            first: random_boundary_point(a, rng, depth),
            second: random_boundary_point(b, rng, depth),
            alpha: rng.gen_range(0.0..FRAC_PI_2),
        })),
    }
}

/// A uniformly random parameter in `[0, horizon]` along `xi`.
pub fn random_time<R: Rng>(space: &Space, rng: &mut R, xi: &BoundaryPoint, cap: f64) -> f64 {
    rng.gen_range(0.0..=space.ray_horizon(xi).min(cap))
}
