//! Subdivided 1-skeleton of a tree near the root.

use std::collections::HashMap;

use super::TreeApartment;
use crate::error::{Error, Result};
use crate::spaces::TreeEnd;

const EPS: f64 = 1e-12;

/// Samples of a tree up to a depth, each knowing its parent sample and its
/// signed apartment coordinate.
#[derive(Debug, Clone)]
pub(crate) struct Skeleton {
    pub depth: Vec<f64>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub coord: Vec<f64>,
    edge: f64,
    levels: usize,
    vertex: HashMap<Vec<u32>, usize>,
    /// Interior samples of the edge ending at a vertex sample, by depth.
    interior: HashMap<usize, Vec<usize>>,
}

/// Number of subdivisions of an edge of length `edge` at `resolution`.
pub(crate) fn subdivisions(edge: f64, resolution: f64) -> Result<usize> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::ResolutionTooCoarse(format!("resolution {resolution} must be positive")));
    }
    let n = edge / resolution;
    let k = n.round();
    if (n - k).abs() > 1e-9 * n.max(1.0) {
        return Err(Error::ResolutionTooCoarse(format!("resolution {resolution} does not divide the edge length {edge}")));
    }
    if k < 2.0 {
        return Err(Error::ResolutionTooCoarse(format!(
            "resolution {resolution} exceeds half the edge length {edge}; branch points would merge"
        )));
    }
    Ok(k as usize)
}

impl Skeleton {
    /// Samples every edge meeting the ball of radius `max_depth` at spacing
    /// `resolution`, plus the depths in `breaks`.
    pub fn build(apt: &TreeApartment, max_depth: f64, resolution: f64, breaks: &[f64]) -> Result<Self> {
        let edge = apt.edge_length();
        let n_sub = subdivisions(edge, resolution)?;
        let horizon = edge * apt.tree.truncation_depth as f64;
        if max_depth > horizon + EPS {
            return Err(Error::HorizonExceeded { t: max_depth, horizon });
        }
        let levels = ((max_depth / edge - EPS).ceil().max(0.0) as usize).min(apt.tree.truncation_depth as usize);
        let mut sk = Skeleton {
            depth: vec![0.0],
            parent: vec![None],
            children: vec![Vec::new()],
            coord: vec![0.0],
            edge,
            levels,
            vertex: HashMap::new(),
            interior: HashMap::new(),
        };
        sk.vertex.insert(Vec::new(), 0);
        let mut frontier = vec![(Vec::<u32>::new(), 0usize)];
        for level in 0..levels {
            let d0 = level as f64 * edge;
            let mut depths: Vec<f64> = (1..n_sub).map(|j| d0 + j as f64 * resolution).collect();
            depths.extend(breaks.iter().copied().filter(|&b| b > d0 + EPS && b < d0 + edge - EPS));
            depths.sort_by(f64::total_cmp);
            depths.dedup_by(|a, b| (*a - *b).abs() <= EPS);
            let mut next = Vec::with_capacity(frontier.len() * apt.tree.branching as usize);
            for (path, node) in &frontier {
                for label in 0..apt.tree.branching {
                    let side = if level == 0 { apt.side(label) } else { sk.coord[*node].signum() };
                    let mut prev = *node;
                    let mut samples = Vec::with_capacity(depths.len());
                    for &d in &depths {
                        prev = sk.push(prev, d, side * d);
                        samples.push(prev);
                    }
                    let end = d0 + edge;
                    let child = sk.push(prev, end, side * end);
                    let mut child_path = path.clone();
                    child_path.push(label);
                    sk.vertex.insert(child_path.clone(), child);
                    sk.interior.insert(child, samples);
                    next.push((child_path, child));
                }
            }
            frontier = next;
        }
        Ok(sk)
    }

    fn push(&mut self, parent: usize, depth: f64, coord: f64) -> usize {
        let id = self.depth.len();
        self.depth.push(depth);
        self.parent.push(Some(parent));
        self.children.push(Vec::new());
        self.coord.push(coord);
        self.children[parent].push(id);
        id
    }

    pub fn len(&self) -> usize {
        self.depth.len()
    }

    /// Sample nearest to the point at depth `t` on the ray towards `end`.
    pub fn snap(&self, end: &TreeEnd, t: f64) -> Result<usize> {
        let k = ((t / self.edge) + EPS).floor().max(0.0) as usize;
        let path: Vec<u32> = (0..k).map(|i| end.label(i)).collect();
        let off = t - k as f64 * self.edge;
        if off <= EPS {
            return self.vertex.get(&path).copied().ok_or(Error::HorizonExceeded {
                t,
                horizon: self.levels as f64 * self.edge,
            });
        }
        let mut child_path = path.clone();
        child_path.push(end.label(k));
        let (Some(&parent), Some(&child)) = (self.vertex.get(&path), self.vertex.get(&child_path)) else {
            return Err(Error::HorizonExceeded { t, horizon: self.levels as f64 * self.edge });
        };
        let candidates = std::iter::once(parent).chain(self.interior[&child].iter().copied()).chain(std::iter::once(child));
        Ok(candidates.min_by(|&a, &b| (self.depth[a] - t).abs().total_cmp(&(self.depth[b] - t).abs())).expect("nonempty"))
    }

    /// Tree distance between two samples.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        let (mut x, mut y) = (a, b);
        while x != y {
            if self.depth[x] >= self.depth[y] {
                x = self.parent[x].expect("root is the deepest common ancestor");
            } else {
                y = self.parent[y].expect("root is the deepest common ancestor");
            }
        }
        self.depth[a] + self.depth[b] - 2.0 * self.depth[x]
    }

    /// Sample-graph neighbours of `a`.
    pub fn neighbours(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.parent[a].into_iter().chain(self.children[a].iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{Rational, TreeSpace};

    fn apt() -> TreeApartment {
        TreeApartment::standard(TreeSpace::new(3, Rational::from_integer(1), 4).unwrap()).unwrap()
    }

    #[test]
    fn sample_counts_and_distances() {
        let sk = Skeleton::build(&apt(), 2.0, 0.5, &[]).unwrap();
        // 3 + 9 edges, two samples each, plus the root
        assert_eq!(sk.len(), 1 + 12 * 2);
        let end = TreeEnd::with_zero_tail(vec![2, 1]);
        let a = sk.snap(&end, 1.5).unwrap();
        let b = sk.snap(&TreeEnd::with_zero_tail(vec![2, 0]), 2.0).unwrap();
        assert_eq!(sk.distance(a, b), 1.5);
        assert_eq!(sk.coord[b], -2.0);
        assert_eq!(sk.coord[sk.snap(&TreeEnd::with_zero_tail(vec![0, 2]), 2.0).unwrap()], 2.0);
    }

    #[test]
    fn breaks_are_sampled() {
        let sk = Skeleton::build(&apt(), 1.0, 0.5, &[0.3]).unwrap();
        let s = sk.snap(&TreeEnd::with_zero_tail(vec![1]), 0.3).unwrap();
        assert!((sk.depth[s] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn coarse_resolutions_rejected() {
        assert!(matches!(subdivisions(1.0, 0.3), Err(Error::ResolutionTooCoarse(_))));
        assert!(matches!(subdivisions(1.0, 1.0), Err(Error::ResolutionTooCoarse(_))));
        assert_eq!(subdivisions(1.0, 0.125).unwrap(), 8);
    }
}
