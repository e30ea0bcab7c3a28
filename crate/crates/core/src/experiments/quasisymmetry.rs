use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sampling::random_boundary_point;
use crate::boundary::{moran_metric, DEFAULT_MORAN_TOL};
use crate::error::{Error, Result};
use crate::spaces::{BoundaryPoint, Space};

/// Label depth of sampled tree ends.
const SAMPLE_DEPTH: u32 = 12;
/// Draws allowed per requested triple before giving up on degenerate draws.
const ATTEMPTS_PER_TRIPLE: usize = 100;

/// Moran distances of one triple `(x, a, b)` at the two scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionSample {
    pub x: BoundaryPoint,
    pub a: BoundaryPoint,
    pub b: BoundaryPoint,
    pub d_xa: f64,
    pub d_xb: f64,
    pub d_xa_prime: f64,
    pub d_xb_prime: f64,
    /// `d_A(x, a) / d_A(x, b)`.
    pub ratio: f64,
    /// `d_{A′}(x, a) / d_{A′}(x, b)`.
    pub ratio_prime: f64,
}

/// Samples random boundary triples and records their distance ratios under
/// Moran's metric at scales `A` and `A′`. Triples with coincident points are
/// redrawn.
pub fn quasisymmetry_distortion(space: &Space, a: f64, a_prime: f64, n_triples: usize, seed: u64) -> Result<Vec<DistortionSample>> {
    if !(a > 0.0 && a_prime > 0.0) {
        return Err(Error::InvalidParams(format!("scales A = {a} and A' = {a_prime} must be positive")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_triples);
    let mut attempts = 0;
    while out.len() < n_triples {
        attempts += 1;
        if attempts > ATTEMPTS_PER_TRIPLE * n_triples.max(1) {
            return Err(Error::Precondition(format!(
                "only {} non-degenerate triples in {attempts} draws",
                out.len()
            )));
        }
        let [x, p, q] = [0; 3].map(|_| random_boundary_point(space, &mut rng, SAMPLE_DEPTH));
        if space.same_direction(&x, &p) || space.same_direction(&x, &q) || space.same_direction(&p, &q) {
            continue;
        }
        let d = |s: f64, u: &BoundaryPoint| moran_metric(space, s, &x, u, DEFAULT_MORAN_TOL);
        let (d_xa, d_xb) = (d(a, &p)?, d(a, &q)?);
        let (d_xa_prime, d_xb_prime) = (d(a_prime, &p)?, d(a_prime, &q)?);
        if d_xb == 0.0 || d_xb_prime == 0.0 {
            continue;
        }
        out.push(DistortionSample {
            x,
            a: p,
            b: q,
            d_xa,
            d_xb,
            d_xa_prime,
            d_xb_prime,
            ratio: d_xa / d_xb,
            ratio_prime: d_xa_prime / d_xb_prime,
        });
    }
    Ok(out)
}
