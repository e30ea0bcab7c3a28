use serde::{Deserialize, Serialize};

use crate::boundary::{moran_metric, MetricParams, VisualNetMetric, DEFAULT_MORAN_TOL};
use crate::error::Result;
use crate::spaces::{BoundaryPoint, Space};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Visual,
    Moran,
}

/// Symmetric pairwise distances over a net.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub kind: MetricKind,
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Fills the matrix from `f(i, j)` for `i < j`.
    pub fn from_fn(kind: MetricKind, n: usize, mut f: impl FnMut(usize, usize) -> Result<f64>) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = f(i, j)?;
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        Ok(DistanceMatrix { kind, n, data })
    }

    pub fn moran(space: &Space, scale: f64, net: &[BoundaryPoint]) -> Result<Self> {
        Self::from_fn(MetricKind::Moran, net.len(), |i, j| moran_metric(space, scale, &net[i], &net[j], DEFAULT_MORAN_TOL))
    }

    pub fn visual(space: &Space, params: &MetricParams, net: &[BoundaryPoint]) -> Result<Self> {
        let vm = VisualNetMetric::new(space, params, net)?;
        Ok(DistanceMatrix { kind: MetricKind::Visual, n: vm.n, data: vm.dist })
    }

    pub fn for_kind(space: &Space, kind: MetricKind, params: &MetricParams, net: &[BoundaryPoint]) -> Result<Self> {
        match kind {
            MetricKind::Visual => Self::visual(space, params, net),
            MetricKind::Moran => Self::moran(space, params.moran_scale, net),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Largest nearest-neighbour distance: the coarsest gap in the net.
    pub fn spacing(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).filter(|&j| j != i).map(|j| self.get(i, j)).fold(f64::INFINITY, f64::min))
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max)
    }

    pub fn diameter_of(&self, members: &[usize]) -> f64 {
        let mut d: f64 = 0.0;
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                d = d.max(self.get(i, j));
            }
        }
        d
    }

    /// Smallest distance between a point of `a` and a point of `b`.
    pub fn set_distance(&self, a: &[usize], b: &[usize]) -> f64 {
        let mut d = f64::INFINITY;
        for &i in a {
            for &j in b {
                d = d.min(self.get(i, j));
            }
        }
        d
    }
}
