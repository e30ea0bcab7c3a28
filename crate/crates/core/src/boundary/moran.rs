//! Moran's boundary metric: `d_A(ξ, η) = 1/t*` where `t*` is the time at
//! which the rays from the basepoint reach mutual distance `A`.

use crate::bisection::{first_crossing, Crossing};
use crate::error::{Error, Result};
use crate::spaces::{BoundaryPoint, Space};

/// Relative bisection tolerance used when callers do not pick one.
pub const DEFAULT_MORAN_TOL: f64 = 1e-14;

/// Crossing time `t*` with `d(γ_ξ(t*), γ_η(t*)) = A`, `None` when the rays
/// never separate.
///
/// The displacement `t ↦ d(γ_ξ(t), γ_η(t))` is convex with value 0 at the
/// basepoint, hence non-decreasing, and bounded by `2t`; a bracket starting
/// at `A/4` is therefore always below the level.
pub fn moran_crossing_time(space: &Space, scale: f64, xi: &BoundaryPoint, eta: &BoundaryPoint, tol: f64) -> Result<Option<f64>> {
    if !(scale > 0.0) {
        return Err(Error::InvalidParams(format!("A = {scale} must be positive")));
    }
    if space.same_direction(xi, eta) {
        return Ok(None);
    }
    let horizon = space.ray_horizon(xi).min(space.ray_horizon(eta));
    let crossing = first_crossing(|t| space.displacement(xi, eta, t), scale, scale / 4.0, horizon, tol)?;
    match crossing {
        Crossing::At(t) => Ok(Some(t)),
        // Rays that meet again at a positive time coincide when geodesics
        // extend uniquely, so the displacement is identically zero.
        Crossing::Beyond { value_at_horizon } if value_at_horizon == 0.0 && space.geodesics_extend_uniquely() => Ok(None),
        Crossing::Beyond { .. } => Err(Error::HorizonUndecidable { scale, horizon }),
    }
}

/// Moran distance `1/t*` (0 when `t* = ∞`), by bracketing and bisection to
/// relative tolerance `tol`.
pub fn moran_metric(space: &Space, scale: f64, xi: &BoundaryPoint, eta: &BoundaryPoint, tol: f64) -> Result<f64> {
    Ok(moran_crossing_time(space, scale, xi, eta, tol)?.map_or(0.0, |t| 1.0 / t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{build_space, SpaceSpec, TreeEnd};
    use std::f64::consts::PI;

    #[test]
    fn tree_pair_with_product_two() {
        let tree = build_space(&SpaceSpec::tree(3, 8)).unwrap();
        let a = BoundaryPoint::Tree(TreeEnd::with_zero_tail(vec![0, 0, 0]));
        let b = BoundaryPoint::Tree(TreeEnd::with_zero_tail(vec![0, 0, 1]));
        let d = moran_metric(&tree, 1.0, &a, &b, DEFAULT_MORAN_TOL).unwrap();
        assert!((d - 0.4).abs() < 1e-12);
    }

    #[test]
    fn plane_quarter_turn() {
        let plane = build_space(&SpaceSpec::plane()).unwrap();
        let d = moran_metric(&plane, 1.0, &BoundaryPoint::angle(0.0), &BoundaryPoint::angle(PI / 2.0), DEFAULT_MORAN_TOL)
            .unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn identical_points_are_at_distance_zero() {
        let plane = build_space(&SpaceSpec::plane()).unwrap();
        let x = BoundaryPoint::angle(1.0);
        assert_eq!(moran_metric(&plane, 1.0, &x, &x, DEFAULT_MORAN_TOL).unwrap(), 0.0);
    }

    #[test]
    fn hyperbolic_antipodal() {
        let h2 = build_space(&SpaceSpec::hyperbolic_plane()).unwrap();
        let d = moran_metric(&h2, 1.0, &BoundaryPoint::angle(0.5), &BoundaryPoint::angle(0.5 + PI), DEFAULT_MORAN_TOL)
            .unwrap();
        assert!((d - 2.0).abs() < 1e-12);
    }

    #[test]
    fn shallow_tree_cannot_bracket() {
        let tree = build_space(&SpaceSpec::tree(2, 3)).unwrap();
        let a = BoundaryPoint::Tree(TreeEnd::with_zero_tail(vec![1, 1, 1, 0]));
        let b = BoundaryPoint::Tree(TreeEnd::with_zero_tail(vec![1, 1, 1, 1]));
        assert!(matches!(
            moran_metric(&tree, 1.0, &a, &b, DEFAULT_MORAN_TOL),
            Err(Error::HorizonUndecidable { .. })
        ));
    }
}
