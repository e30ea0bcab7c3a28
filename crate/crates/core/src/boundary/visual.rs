//! Chain-infimum visual metric restricted to a finite net.

use super::gromov::{gromov_product_boundary, rho_eps, GromovValue, DEFAULT_LIMIT_TIME};
use super::params::MetricParams;
use crate::error::{Error, Result};
use crate::spaces::{BoundaryPoint, Space};

/// Convergence tolerance passed to the boundary Gromov product.
const LIMIT_TOL: f64 = 1e-9;

/// Index of `xi` in `net`, comparing directions as the space does.
pub fn net_index(space: &Space, net: &[BoundaryPoint], xi: &BoundaryPoint) -> Result<usize> {
    net.iter()
        .position(|p| space.same_direction(p, xi))
        .ok_or_else(|| Error::NotInNet(format!("{xi:?}")))
}

/// Pairwise boundary Gromov products over a net, row-major.
pub fn net_gromov_products(space: &Space, net: &[BoundaryPoint]) -> Result<Vec<GromovValue>> {
    space.require_delta()?;
    let n = net.len();
    let t_max = DEFAULT_LIMIT_TIME.min(space.horizon());
    let mut gp = vec![GromovValue::Infinite; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = gromov_product_boundary(space, &net[i], &net[j], t_max, LIMIT_TOL)?.value;
            gp[i * n + j] = v;
            gp[j * n + i] = v;
        }
    }
    Ok(gp)
}

/// The visual metric on every pair of a net, with the direct values `ρ_ε`
/// kept alongside for certification.
#[derive(Debug, Clone, PartialEq)]
pub struct VisualNetMetric {
    pub n: usize,
    pub epsilon_prime: f64,
    pub rho: Vec<f64>,
    pub dist: Vec<f64>,
}

impl VisualNetMetric {
    pub fn new(space: &Space, params: &MetricParams, net: &[BoundaryPoint]) -> Result<Self> {
        params.validate()?;
        let n = net.len();
        let rho: Vec<f64> = net_gromov_products(space, net)?.into_iter().map(|g| rho_eps(params, g)).collect();
        let mut dist = rho.clone();
        for k in 0..n {
            for i in 0..n {
                let dik = dist[i * n + k];
                for j in 0..n {
                    let via = dik + dist[k * n + j];
                    if via < dist[i * n + j] {
                        dist[i * n + j] = via;
                    }
                }
            }
        }
        Ok(VisualNetMetric { n, epsilon_prime: params.epsilon_prime(), rho, dist })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn rho(&self, i: usize, j: usize) -> f64 {
        self.rho[i * self.n + j]
    }

    /// Largest violation of `(1 − 2ε′)ρ ≤ d ≤ ρ` over all pairs (0 if none).
    pub fn certificate_violation(&self) -> f64 {
        let lower = 1.0 - 2.0 * self.epsilon_prime;
        self.rho
            .iter()
            .zip(&self.dist)
            .map(|(&r, &d)| (lower * r - d).max(d - r).max(0.0))
            .fold(0.0, f64::max)
    }
}

/// Visual distance between two net points: a single-source shortest path in
/// the complete graph on the net with edge weights `ρ_ε`.
pub fn visual_metric(
    space: &Space,
    params: &MetricParams,
    net: &[BoundaryPoint],
    xi: &BoundaryPoint,
    eta: &BoundaryPoint,
) -> Result<f64> {
    params.validate()?;
    space.require_delta()?;
    let src = net_index(space, net, xi)?;
    let dst = net_index(space, net, eta)?;
    if src == dst {
        return Ok(0.0);
    }
    let rho = net_gromov_products(space, net)?;
    let n = net.len();
    let weight = |i: usize, j: usize| rho_eps(params, rho[i * n + j]);
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[src] = 0.0;
    for _ in 0..n {
        let Some(u) = (0..n).filter(|&v| !done[v]).min_by(|&a, &b| dist[a].total_cmp(&dist[b])) else {
            break;
        };
        if u == dst {
            break;
        }
        done[u] = true;
        for v in 0..n {
            if !done[v] {
                let w = dist[u] + weight(u, v);
                if w < dist[v] {
                    dist[v] = w;
                }
            }
        }
    }
    Ok(dist[dst])
}
