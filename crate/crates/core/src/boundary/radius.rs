use super::gromov::{gromov_product_boundary, ray_product_at, DEFAULT_LIMIT_TIME};
use crate::error::{Error, Result};
use crate::spaces::{BoundaryPoint, Space};

/// Slack absorbing rounding in the comparison `(γ(R)|γ′(R)) ≥ (ξ|η) − s`.
pub const R_TOLERANCE: f64 = 1e-9;

/// Smallest `R` on the grid `{step, 2·step, …}` at which every net pair
/// satisfies `(γ_ξ(R)|γ_η(R)) ≥ (ξ|η) − s`.
///
/// The left side is non-decreasing in `R`, so each pair is resolved by a
/// binary search over the grid and the answer is the maximum over pairs.
/// A net with fewer than two distinct points yields `step`.
pub fn estimate_r(space: &Space, net: &[BoundaryPoint], s: f64, step: f64) -> Result<f64> {
    space.require_delta()?;
    if !(s > 0.0 && step > 0.0) {
        return Err(Error::InvalidParams(format!("s = {s} and grid step {step} must be positive")));
    }
    let horizon = space.horizon();
    let top = (horizon / step).floor() as u64;
    if top == 0 {
        return Err(Error::HorizonExceeded { t: step, horizon });
    }
    let t_max = DEFAULT_LIMIT_TIME.min(horizon);
    let mut worst = 1u64;
    for i in 0..net.len() {
        for j in i + 1..net.len() {
            let Some(gp) = gromov_product_boundary(space, &net[i], &net[j], t_max, R_TOLERANCE)?.value.finite() else {
                continue;
            };
            let target = gp - s - R_TOLERANCE;
            let holds = |k: u64| -> Result<bool> { Ok(ray_product_at(space, &net[i], &net[j], k as f64 * step)? >= target) };
            if holds(worst)? {
                continue;
            }
            if !holds(top)? {
                return Err(Error::HorizonExceeded { t: top as f64 * step, horizon });
            }
            let (mut lo, mut hi) = (worst, top);
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if holds(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            worst = hi;
        }
    }
    Ok(worst as f64 * step)
}
