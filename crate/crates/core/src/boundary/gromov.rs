use serde::{Deserialize, Serialize};

use super::params::MetricParams;
use crate::error::{Error, Result};
use crate::spaces::{tree, BoundaryPoint, Point, Rational, Space, TreePoint};

/// Time used for limit estimates when the caller has no preference.
pub const DEFAULT_LIMIT_TIME: f64 = 60.0;

/// A boundary Gromov product; identical rays never diverge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GromovValue {
    Finite(f64),
    Infinite,
}

impl GromovValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            GromovValue::Finite(v) => Some(v),
            GromovValue::Infinite => None,
        }
    }
}

/// `(p|q)_base = ½(|p − base| + |q − base| − |p − q|)`.
pub fn gromov_product(space: &Space, p: &Point, q: &Point, base: &Point) -> Result<f64> {
    if let (Space::Tree(t), Point::Tree(a), Point::Tree(b), Point::Tree(o)) = (space, p, q, base) {
        for x in [a, b, o] {
            t.check_point(x)?;
        }
        return Ok(tree::to_f64(tree_gromov_product(t, a, b, o)));
    }
    let dp = space.distance(p, base)?;
    let dq = space.distance(q, base)?;
    let dpq = space.distance(p, q)?;
    Ok((0.5 * (dp + dq - dpq)).max(0.0))
}

/// Exact Gromov product on a tree.
pub fn tree_gromov_product(t: &tree::TreeSpace, p: &TreePoint, q: &TreePoint, base: &TreePoint) -> Rational {
    (t.distance_exact(p, base) + t.distance_exact(q, base) - t.distance_exact(p, q)) / Rational::from_integer(2)
}

/// Result of [`gromov_product_boundary`]: the estimate and the last observed
/// increase of the monotone sequence `t ↦ (γ(t)|γ′(t))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryProduct {
    pub value: GromovValue,
    pub gap: f64,
    pub converged: bool,
}

/// `(γ_ξ(t)|γ_η(t))` about the basepoint, i.e. `t − ½ d(γ_ξ(t), γ_η(t))`.
pub fn ray_product_at(space: &Space, xi: &BoundaryPoint, eta: &BoundaryPoint, t: f64) -> Result<f64> {
    Ok(t - 0.5 * space.displacement(xi, eta, t)?)
}

/// Boundary Gromov product `(ξ|η)` on a hyperbolic model space.
///
/// Trees and the line are handled exactly. Otherwise the non-decreasing
/// sequence `(γ_ξ(t)|γ_η(t))` is evaluated at `t_max` (which must lie
/// within the horizon) and at `t_max/2`; their difference is reported as the gap and
/// `converged` says whether it is within `tol`.
pub fn gromov_product_boundary(
    space: &Space,
    xi: &BoundaryPoint,
    eta: &BoundaryPoint,
    t_max: f64,
    tol: f64,
) -> Result<BoundaryProduct> {
    space.require_delta()?;
    let exact = |value| Ok(BoundaryProduct { value, gap: 0.0, converged: true });
    if space.same_direction(xi, eta) {
        return exact(GromovValue::Infinite);
    }
    match (space, xi, eta) {
        (Space::Tree(t), BoundaryPoint::Tree(a), BoundaryPoint::Tree(b)) => {
            t.check_end(a)?;
            t.check_end(b)?;
            match t.end_product(a, b) {
                Some(g) => exact(GromovValue::Finite(tree::to_f64(g))),
                None => exact(GromovValue::Infinite),
            }
        }
        (Space::Line { .. }, BoundaryPoint::Line(_), BoundaryPoint::Line(_)) => exact(GromovValue::Finite(0.0)),
        (Space::Hyperbolic { horizon, .. }, BoundaryPoint::Angle(_), BoundaryPoint::Angle(_)) => {
            if !(t_max > 0.0) {
                return Err(Error::InvalidParams(format!("t_max {t_max} must be positive")));
            }
            if t_max > *horizon {
                return Err(Error::HorizonExceeded { t: t_max, horizon: *horizon });
            }
            let late = ray_product_at(space, xi, eta, t_max)?;
            let early = ray_product_at(space, xi, eta, 0.5 * t_max)?;
            let gap = (late - early).max(0.0);
            Ok(BoundaryProduct { value: GromovValue::Finite(late.max(0.0)), gap, converged: gap <= tol })
        }
        _ => Err(Error::PointMismatch(space.kind().name())),
    }
}

/// `ρ_ε = e^{−ε·(ξ|η)}`, exactly 0 for identical points.
pub fn rho_eps(params: &MetricParams, gp: GromovValue) -> f64 {
    match gp {
        GromovValue::Finite(g) => (-params.epsilon * g).exp(),
        GromovValue::Infinite => 0.0,
    }
}
