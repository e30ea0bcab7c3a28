//! Boundary covers intersected with the annulus `D ≤ d(x, p) ≤ D + W`.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::boundary::{moran_metric, DEFAULT_MORAN_TOL};
use crate::error::{Error, Result};
use crate::spaces::{BoundaryPoint, Space, SpaceKind, TreeEnd};

/// Samples per element along each axis of the radial × angular (or radial ×
/// branching-depth) grid.
pub const GRID: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusRow {
    #[serde(rename = "D")]
    pub d: f64,
    /// Largest diameter of a cone piece inside the annulus.
    pub mesh: f64,
    /// Lebesgue number of the annulus cover along its inner sphere.
    pub lebesgue: f64,
    /// Largest diameter of a cone piece on the outer sphere.
    #[serde(rename = "M")]
    pub m: f64,
    pub boundary_mesh: f64,
    pub boundary_lebesgue: f64,
    /// Number of elements of the boundary cover.
    pub elements: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusTable {
    pub space: SpaceKind,
    #[serde(rename = "A")]
    pub a: f64,
    pub width: f64,
    pub c: f64,
    pub rows: Vec<AnnulusRow>,
}

impl AnnulusTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("D,mesh,lebesgue,M\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.d, r.mesh, r.lebesgue, r.m));
        }
        out
    }

    /// Largest over smallest mesh across the rows.
    pub fn mesh_spread(&self) -> f64 {
        let hi = self.rows.iter().map(|r| r.mesh).fold(f64::NEG_INFINITY, f64::max);
        let lo = self.rows.iter().map(|r| r.mesh).fold(f64::INFINITY, f64::min);
        hi / lo
    }

    /// Least-squares slope of `M` against `D`.
    pub fn m_slope(&self) -> f64 {
        least_squares_slope(&self.rows.iter().map(|r| (r.d, r.m)).collect::<Vec<_>>())
    }
}

pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// One boundary cover at scale `2/D`, described by a representative element.
struct ConeCover {
    /// Rays spanning the representative element, for the sample grid.
    rays: Vec<BoundaryPoint>,
    /// A pair realizing the element diameter.
    widest: (BoundaryPoint, BoundaryPoint),
    /// A point whose best element is shallowest, with the nearest ray
    /// outside that element.
    tightest: (BoundaryPoint, BoundaryPoint),
    elements: u64,
}

/// Arcs of angular half-width `h = asin(A/D)` whose centers are `σ` apart
/// except for one shorter closing gap. Each arc has Moran diameter exactly
/// `2/D`; the worst point sits mid-gap at angle `h − σ/2 = 2 asin(cA/D)` from
/// the nearest arc end, so the Lebesgue number is exactly `2c/D`.
fn circle_cover(a: f64, d: f64, c: f64) -> Result<ConeCover> {
    if a / d > 1.0 {
        return Err(Error::Precondition(format!("no arc has Moran diameter 2/D = {} at A = {a}", 2.0 / d)));
    }
    let h = (a / d).asin();
    let ell = 2.0 * (c * a / d).asin();
    if !(ell < h) {
        return Err(Error::Precondition(format!(
            "arcs of Moran diameter 2/D cannot have Lebesgue number 2c/D for c = {c}"
        )));
    }
    let sigma = 2.0 * (h - ell);
    let n = (TAU / sigma).ceil();
    let rays = (0..GRID).map(|j| BoundaryPoint::Angle((-h + 2.0 * h * j as f64 / (GRID - 1) as f64).rem_euclid(TAU))).collect();
    Ok(ConeCover {
        rays,
        widest: (BoundaryPoint::angle(-h), BoundaryPoint::angle(h)),
        tightest: (BoundaryPoint::angle(sigma / 2.0), BoundaryPoint::angle(h)),
        elements: n as u64,
    })
}

fn ray(prefix_len: usize, branch_at: Option<usize>) -> BoundaryPoint {
    let mut labels = vec![0; prefix_len.max(branch_at.map_or(0, |b| b + 1))];
    if let Some(b) = branch_at {
        labels[b] = 1;
    }
    BoundaryPoint::Tree(TreeEnd::with_zero_tail(labels))
}

/// Depth-`k` cylinders with `k = ⌈D/2 − A/2⌉`, the shallowest whose Moran
/// diameter `1/(k + A/2)` is at most `2/D`.
fn cylinder_cover(space: &Space, a: f64, d: f64, c: f64, outer: f64) -> Result<ConeCover> {
    let tree = space.as_tree().ok_or(Error::PointMismatch("tree"))?;
    if tree.edge_length != crate::spaces::Rational::from_integer(1) {
        return Err(Error::InvalidParams("cylinder covers assume unit edges".into()));
    }
    let k = (d / 2.0 - a / 2.0).ceil().max(1.0) as usize;
    if (k - 1) as f64 + a / 2.0 > d / (2.0 * c) + 1e-12 {
        return Err(Error::Precondition(format!("depth-{k} cylinders have Lebesgue number below 2c/D")));
    }
    let top = outer.floor() as usize;
    let rays = (0..GRID).map(|j| ray(k, Some(k + (top.saturating_sub(k) * j) / (GRID - 1)))).collect();
    Ok(ConeCover {
        rays,
        widest: (ray(k, None), ray(k, Some(k))),
        tightest: (ray(k, None), ray(k, Some(k - 1))),
        elements: (tree.branching as u64).saturating_pow(k as u32),
    })
}

/// For each `D`: a boundary cover with Moran mesh `2/D` and Lebesgue number
/// `2c/D` at scale `A`, and the cone pieces it cuts from the annulus
/// `D ≤ r ≤ D + width`.
///
/// Every element of a cover is congruent to the representative under an
/// isometry fixing the basepoint, so diameters are measured on one element
/// over a [`GRID`] × [`GRID`] sample grid. `M` is the largest distance between
/// samples on the outer sphere; the Lebesgue number is measured along the
/// inner sphere from the worst-placed point to the nearest point outside its
/// best element.
pub fn annulus_cover_experiment(space: &Space, a: f64, width: f64, d_values: &[f64], c: f64) -> Result<AnnulusTable> {
    if !(a > 0.0 && width > 0.0 && c > 0.0 && c <= 1.0) {
        return Err(Error::InvalidParams("A and the width must be positive, 0 < c <= 1".into()));
    }
    if d_values.is_empty() || d_values.iter().any(|&d| !(d > 0.0)) || d_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams("D values must be positive and strictly ascending".into()));
    }
    let kind = space.kind();
    let mut rows = Vec::with_capacity(d_values.len());
    for &d in d_values {
        let outer = d + width;
        if outer > space.horizon() {
            return Err(Error::HorizonExceeded { t: outer, horizon: space.horizon() });
        }
        let cover = match kind {
            SpaceKind::Plane => circle_cover(a, d, c)?,
            SpaceKind::Tree => cylinder_cover(space, a, d, c, outer)?,
            _ => return Err(Error::InvalidParams(format!("annulus experiment runs on the plane or a tree, not {}", kind.name()))),
        };
        let radii: Vec<f64> = (0..GRID).map(|i| d + width * i as f64 / (GRID - 1) as f64).collect();
        let samples: Vec<(usize, f64)> = (0..cover.rays.len()).flat_map(|j| radii.iter().map(move |&r| (j, r))).collect();
        let (mut mesh, mut m) = (0.0f64, 0.0f64);
        for (x, &(i, u)) in samples.iter().enumerate() {
            for &(j, v) in &samples[x + 1..] {
                let dist = space.ray_pair_distance(&cover.rays[i], u, &cover.rays[j], v)?;
                mesh = mesh.max(dist);
                if u == outer && v == outer {
                    m = m.max(dist);
                }
            }
        }
        let (x, y) = &cover.tightest;
        rows.push(AnnulusRow {
            d,
            mesh,
            lebesgue: space.displacement(x, y, d)?,
            m,
            boundary_mesh: moran_metric(space, a, &cover.widest.0, &cover.widest.1, DEFAULT_MORAN_TOL)?,
            boundary_lebesgue: moran_metric(space, a, x, y, DEFAULT_MORAN_TOL)?,
            elements: cover.elements,
        });
    }
    Ok(AnnulusTable { space: kind, a, width, c, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{build_space, SpaceSpec};

    #[test]
    fn plane_outer_diameter() {
        let plane = build_space(&SpaceSpec::plane()).unwrap();
        let t = annulus_cover_experiment(&plane, 1.0, 10.0, &[100.0], 0.5).unwrap();
        let r = &t.rows[0];
        assert!((r.m - 2.2).abs() < 1e-9, "{}", r.m);
        assert!((r.lebesgue - 1.0).abs() < 1e-12);
        assert!((r.boundary_mesh - 0.02).abs() < 1e-12);
        assert!((r.boundary_lebesgue - 0.01).abs() < 1e-12);
        assert!(r.mesh <= r.m + 2.0 * 10.0);
    }

    #[test]
    fn tree_pieces_grow() {
        let tree = build_space(&SpaceSpec::tree(2, 96)).unwrap();
        let t = annulus_cover_experiment(&tree, 1.0, 10.0, &[10.0, 20.0, 40.0, 80.0], 0.5).unwrap();
        let ms: Vec<f64> = t.rows.iter().map(|r| r.m).collect();
        // k = 5, 10, 20, 40 and M = 2(D + W − k)
        assert_eq!(ms, vec![30.0, 40.0, 60.0, 100.0]);
        assert!((t.m_slope() - 1.0).abs() < 1e-12);
        assert!((t.rows[0].boundary_mesh - 1.0 / 5.5).abs() < 1e-12);
        assert!(t.to_csv().starts_with("D,mesh,lebesgue,M\n10,"));
    }

    #[test]
    fn rejects_impossible_capacity() {
        let plane = build_space(&SpaceSpec::plane()).unwrap();
        assert!(matches!(annulus_cover_experiment(&plane, 1.0, 10.0, &[10.0], 0.6), Err(Error::Precondition(_))));
        assert!(annulus_cover_experiment(&plane, 1.0, 10.0, &[20.0, 10.0], 0.5).is_err());
    }
}
