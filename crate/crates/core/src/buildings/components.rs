use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use super::skeleton::Skeleton;
use super::BuildingHandle;
use crate::error::{Error, Result};

/// A closed subset of the apartment in flat coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApartmentRegion {
    /// Tree apartments: a union of closed intervals of the line.
    Intervals(Vec<(f64, f64)>),
    /// Product apartments: `[a₁, b₁] × [a₂, b₂]`.
    Rectangle([(f64, f64); 2]),
    /// Product apartments: points within `radius` of some center.
    Discs { centers: Vec<[f64; 2]>, radius: f64 },
}

impl ApartmentRegion {
    fn rank(&self) -> usize {
        match self {
            ApartmentRegion::Intervals(_) => 1,
            _ => 2,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        const TOL: f64 = 1e-12;
        match self {
            ApartmentRegion::Intervals(iv) => iv.iter().any(|&(a, b)| x[0] >= a - TOL && x[0] <= b + TOL),
            ApartmentRegion::Rectangle(r) => (0..2).all(|k| x[k] >= r[k].0 - TOL && x[k] <= r[k].1 + TOL),
            ApartmentRegion::Discs { centers, radius } => {
                centers.iter().any(|c| (x[0] - c[0]).hypot(x[1] - c[1]) <= radius + TOL)
            }
        }
    }

    /// Largest `|x_k|` over the region.
    fn extent(&self, k: usize) -> f64 {
        match self {
            ApartmentRegion::Intervals(iv) => iv.iter().map(|&(a, b)| a.abs().max(b.abs())).fold(0.0, f64::max),
            ApartmentRegion::Rectangle(r) => r[k].0.abs().max(r[k].1.abs()),
            ApartmentRegion::Discs { centers, radius } => centers.iter().map(|c| c[k].abs() + radius).fold(0.0, f64::max),
        }
    }

    /// Depths at which factor `k` must be sampled so that the region's
    /// edges are represented exactly.
    fn breaks(&self, k: usize) -> Vec<f64> {
        match self {
            ApartmentRegion::Intervals(iv) => iv.iter().flat_map(|&(a, b)| [a.abs(), b.abs()]).collect(),
            ApartmentRegion::Rectangle(r) => vec![r[k].0.abs(), r[k].1.abs()],
            ApartmentRegion::Discs { .. } => Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            ApartmentRegion::Intervals(iv) => !iv.is_empty() && iv.iter().all(|&(a, b)| a <= b),
            ApartmentRegion::Rectangle(r) => r.iter().all(|&(a, b)| a <= b),
            ApartmentRegion::Discs { centers, radius } => !centers.is_empty() && *radius >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("malformed apartment region {self:?}")))
        }
    }
}

/// A connected component of `ρ⁻¹(U)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreimageComponent {
    pub id: usize,
    pub samples: usize,
    pub diameter: f64,
}

/// Sample skeletons of every factor with a component label for each sample
/// of the (product) skeleton lying in `ρ⁻¹(U)`.
pub(crate) struct Labeling {
    pub skeletons: Vec<Skeleton>,
    pub label: Vec<Option<usize>>,
    pub count: usize,
}

impl Labeling {
    pub fn flat_index(&self, per_factor: &[usize]) -> usize {
        match per_factor {
            [i] => *i,
            [i, j] => i * self.skeletons[1].len() + j,
            _ => unreachable!("rank is 1 or 2"),
        }
    }
}

pub(crate) fn label_components(b: &BuildingHandle, region: &ApartmentRegion, resolution: f64) -> Result<Labeling> {
    region.validate()?;
    if region.rank() != b.rank() {
        return Err(Error::InvalidParams(format!("region of rank {} for a rank-{} building", region.rank(), b.rank())));
    }
    let skeletons = b
        .factors
        .iter()
        .enumerate()
        .map(|(k, apt)| Skeleton::build(apt, region.extent(k), resolution, &region.breaks(k)))
        .collect::<Result<Vec<_>>>()?;
    let (inside, n) = match skeletons.as_slice() {
        [s] => ((0..s.len()).map(|i| region.contains(&[s.coord[i]])).collect::<Vec<_>>(), s.len()),
        [s, t] => {
            let mut v = Vec::with_capacity(s.len() * t.len());
            for i in 0..s.len() {
                for j in 0..t.len() {
                    v.push(region.contains(&[s.coord[i], t.coord[j]]));
                }
            }
            (v, s.len() * t.len())
        }
        _ => unreachable!("rank is 1 or 2"),
    };
    let mut uf = UnionFind::<usize>::new(n);
    match skeletons.as_slice() {
        [s] => {
            for i in 0..n {
                if let Some(p) = s.parent[i] {
                    if inside[i] && inside[p] {
                        uf.union(i, p);
                    }
                }
            }
        }
        [s, t] => {
            let m = t.len();
            for i in 0..s.len() {
                for j in 0..m {
                    let a = i * m + j;
                    if !inside[a] {
                        continue;
                    }
                    if let Some(p) = s.parent[i] {
                        if inside[p * m + j] {
                            uf.union(a, p * m + j);
                        }
                    }
                    if let Some(q) = t.parent[j] {
                        if inside[i * m + q] {
                            uf.union(a, i * m + q);
                        }
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    let mut ids = std::collections::HashMap::new();
    let label = (0..n)
        .map(|a| {
            inside[a].then(|| {
                let root = uf.find_mut(a);
                let next = ids.len();
                *ids.entry(root).or_insert(next)
            })
        })
        .collect();
    Ok(Labeling { skeletons, label, count: ids.len() })
}

/// Connected components of `ρ⁻¹(region)` inside the truncated building,
/// found on the skeleton subdivided at `resolution` (which must divide the
/// edge length at least twice).
///
/// Tree diameters come from a double sweep, which is exact on trees;
/// product diameters are brute-forced over the component's samples.
pub fn preimage_components(b: &BuildingHandle, region: &ApartmentRegion, resolution: f64) -> Result<Vec<PreimageComponent>> {
    let lab = label_components(b, region, resolution)?;
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); lab.count];
    for (a, l) in lab.label.iter().enumerate() {
        if let Some(k) = l {
            members[*k].push(a);
        }
    }
    let diameter = |nodes: &[usize]| -> f64 {
        match lab.skeletons.as_slice() {
            [s] => {
                let far = |src: usize| -> (usize, f64) {
                    let comp = lab.label[src];
                    let mut best = (src, 0.0);
                    let mut stack = vec![(src, usize::MAX, 0.0)];
                    while let Some((u, from, d)) = stack.pop() {
                        if d > best.1 {
                            best = (u, d);
                        }
                        for v in s.neighbours(u) {
                            if v != from && lab.label[v] == comp {
                                stack.push((v, u, d + (s.depth[u] - s.depth[v]).abs()));
                            }
                        }
                    }
                    best
                };
                far(far(nodes[0]).0).1
            }
            [s, t] => {
                let m = t.len();
                let mut best: f64 = 0.0;
                for (x, &a) in nodes.iter().enumerate() {
                    for &c in &nodes[x + 1..] {
                        best = best.max(s.distance(a / m, c / m).hypot(t.distance(a % m, c % m)));
                    }
                }
                best
            }
            _ => unreachable!(),
        }
    };
    Ok(members
        .iter()
        .enumerate()
        .map(|(id, nodes)| PreimageComponent { id, samples: nodes.len(), diameter: diameter(nodes) })
        .collect())
}
