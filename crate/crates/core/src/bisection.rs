//! First-crossing search for non-decreasing functions.

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;

/// Outcome of [`first_crossing`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossing {
    /// `f` reaches `level` at this parameter (to the requested tolerance).
    At(f64),
    /// `f` stays below `level` up to `horizon`.
    Beyond { value_at_horizon: f64 },
}

/// Locates `inf { t > 0 : f(t) ≥ level }` for a non-decreasing `f`.
///
/// The bracket starts at `[start, 2·start]`, halving downwards while
/// `f(start) ≥ level` and doubling upwards (capped at `horizon`) until the
/// level is reached. Bisection then stops once the bracket is narrower
/// than `rel_tol` relative to its upper end, or after [`MAX_ITERATIONS`].
pub fn first_crossing<F>(mut f: F, level: f64, start: f64, horizon: f64, rel_tol: f64) -> Result<Crossing>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(start > 0.0 && horizon > 0.0) {
        return Err(Error::InvalidParams(format!("bad bracket start {start} / horizon {horizon}")));
    }
    let mut lo = start.min(horizon);
    let mut hi;
    if f(lo)? >= level {
        hi = lo;
        loop {
            lo *= 0.5;
            if lo < f64::MIN_POSITIVE {
                return Ok(Crossing::At(0.0));
            }
            if f(lo)? < level {
                break;
            }
            hi = lo;
        }
    } else {
        hi = lo;
        loop {
            if hi >= horizon {
                let v = f(horizon)?;
                if v < level {
                    return Ok(Crossing::Beyond { value_at_horizon: v });
                }
                hi = horizon;
                break;
            }
            hi = (hi * 2.0).min(horizon);
            if f(hi)? >= level {
                break;
            }
            lo = hi;
        }
    }
    for _ in 0..MAX_ITERATIONS {
        if hi - lo <= rel_tol * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? >= level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Crossing::At(0.5 * (lo + hi)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_square_root() {
        match first_crossing(|t| Ok(t * t), 2.0, 0.25, 100.0, 1e-15).unwrap() {
            Crossing::At(t) => assert!((t - 2f64.sqrt()).abs() < 1e-14),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn plateau_then_linear() {
        // tree displacement with divergence depth 2: max(0, 2(t - 2))
        match first_crossing(|t| Ok((2.0 * (t - 2.0)).max(0.0)), 1.0, 0.25, 8.0, 1e-15).unwrap() {
            Crossing::At(t) => assert!((t - 2.5).abs() < 1e-14),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reports_beyond_horizon() {
        let r = first_crossing(|t| Ok(0.01 * t), 1.0, 0.25, 10.0, 1e-12).unwrap();
        assert_eq!(r, Crossing::Beyond { value_at_horizon: 0.1 });
    }

    #[test]
    fn halves_down_when_start_already_crosses() {
        match first_crossing(|t| Ok(10.0 * t), 1.0, 4.0, 100.0, 1e-15).unwrap() {
            Crossing::At(t) => assert!((t - 0.1).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }
}
