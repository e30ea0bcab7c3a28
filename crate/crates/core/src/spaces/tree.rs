//! Rooted regular metric trees with exact rational arithmetic.
//!
//! A point is a vertex path from the root plus an optional partial step
//! along one child edge. Boundary points (ends) are eventually periodic
//! label sequences.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

const QUANTUM_BITS: u32 = 40;

/// Rounds a float onto the dyadic grid `2^-40 Z` used for tree ray parameters.
pub fn quantize(t: f64) -> Rational {
    let scale = (1i64 << QUANTUM_BITS) as f64;
    Rational::new((t * scale).round() as i64, 1i64 << QUANTUM_BITS)
}

pub fn to_f64(r: Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A point of a rooted tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreePoint {
    /// Labels of the vertex path from the root.
    pub path: Vec<u32>,
    /// Partial step `(child label, offset)` with `0 < offset < edge_length`.
    pub edge: Option<(u32, Rational)>,
}

impl TreePoint {
    pub fn root() -> Self {
        TreePoint { path: Vec::new(), edge: None }
    }

    pub fn vertex(path: Vec<u32>) -> Self {
        TreePoint { path, edge: None }
    }

    fn full_labels(&self) -> impl Iterator<Item = u32> + '_ {
        self.path.iter().copied().chain(self.edge.map(|(l, _)| l))
    }

    /// First label of the geodesic from the root, `None` at the root.
    pub fn first_label(&self) -> Option<u32> {
        self.full_labels().next()
    }
}

/// An end of the tree: the label sequence `preperiod · period^∞`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeEnd {
    pub preperiod: Vec<u32>,
    pub period: Vec<u32>,
}

impl TreeEnd {
    /// Builds an end in canonical form (primitive period, shortest preperiod),
    /// so that structural equality coincides with equality of sequences.
    pub fn new(mut preperiod: Vec<u32>, mut period: Vec<u32>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidSpec("tree end needs a nonempty period".into()));
        }
        let n = period.len();
        if let Some(d) = (1..=n).find(|&d| n % d == 0 && (d..n).all(|i| period[i] == period[i % d])) {
            period.truncate(d);
        }
        while let Some(&last) = preperiod.last() {
            if last == period[period.len() - 1] {
                preperiod.pop();
                period.rotate_right(1);
            } else {
                break;
            }
        }
        Ok(TreeEnd { preperiod, period })
    }

    /// The end following `prefix` and then the constant label 0.
    pub fn with_zero_tail(prefix: Vec<u32>) -> Self {
        TreeEnd::new(prefix, vec![0]).expect("nonempty period")
    }

    pub fn label(&self, i: usize) -> u32 {
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    /// Index of the first differing label, `None` if the sequences agree.
    pub fn divergence_index(&self, other: &TreeEnd) -> Option<usize> {
        let pre = self.preperiod.len().max(other.preperiod.len());
        let a = self.period.len();
        let b = other.period.len();
        let lcm = a / gcd(a, b) * b;
        (0..pre + lcm).find(|&i| self.label(i) != other.label(i))
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Regular rooted tree truncated at a fixed depth.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeSpace {
    pub branching: u32,
    pub edge_length: Rational,
    pub truncation_depth: u32,
}

impl TreeSpace {
    pub fn new(branching: u32, edge_length: Rational, truncation_depth: u32) -> Result<Self> {
        if branching < 2 {
            return Err(Error::InvalidSpec(format!("tree branching {branching} < 2")));
        }
        if edge_length <= Rational::zero() {
            return Err(Error::InvalidSpec("tree edge length must be positive".into()));
        }
        if truncation_depth < 2 {
            return Err(Error::InvalidSpec(format!("truncation depth {truncation_depth} < 2")));
        }
        Ok(TreeSpace { branching, edge_length, truncation_depth })
    }

    pub fn horizon(&self) -> Rational {
        self.edge_length * Rational::from_integer(self.truncation_depth as i64)
    }

    /// Distance from the root.
    pub fn depth(&self, p: &TreePoint) -> Rational {
        let mut d = self.edge_length * Rational::from_integer(p.path.len() as i64);
        if let Some((_, off)) = p.edge {
            d += off;
        }
        d
    }

    pub fn check_point(&self, p: &TreePoint) -> Result<()> {
        if p.full_labels().any(|l| l >= self.branching) {
            return Err(Error::PointMismatch("tree label out of range"));
        }
        if let Some((_, off)) = p.edge {
            if off <= Rational::zero() || off >= self.edge_length {
                return Err(Error::PointMismatch("tree edge offset outside (0, edge_length)"));
            }
        }
        let d = self.depth(p);
        if d > self.horizon() {
            return Err(Error::HorizonExceeded { t: to_f64(d), horizon: to_f64(self.horizon()) });
        }
        Ok(())
    }

    pub fn check_end(&self, e: &TreeEnd) -> Result<()> {
        if e.preperiod.iter().chain(&e.period).any(|&l| l >= self.branching) {
            return Err(Error::PointMismatch("tree end label out of range"));
        }
        Ok(())
    }

    /// Depth of the meet of the geodesics from the root to `p` and `q`,
    /// which is the Gromov product `(p|q)` based at the root.
    pub fn meet_depth(&self, p: &TreePoint, q: &TreePoint) -> Rational {
        let common = p.full_labels().zip(q.full_labels()).take_while(|(a, b)| a == b).count();
        let shared = self.edge_length * Rational::from_integer(common as i64);
        shared.min(self.depth(p)).min(self.depth(q))
    }

    pub fn distance_exact(&self, p: &TreePoint, q: &TreePoint) -> Rational {
        let meet = self.meet_depth(p, q);
        self.depth(p) + self.depth(q) - meet * Rational::from_integer(2)
    }

    /// Point at depth `depth` along the geodesic from the root towards `labels`.
    pub fn point_along(&self, labels: impl Fn(usize) -> u32, depth: Rational) -> Result<TreePoint> {
        if depth < Rational::zero() {
            return Err(Error::InvalidParams("negative ray parameter".into()));
        }
        let horizon = self.horizon();
        if depth > horizon {
            return Err(Error::HorizonExceeded { t: to_f64(depth), horizon: to_f64(horizon) });
        }
        let steps = (depth / self.edge_length).floor();
        let k = steps.to_integer() as usize;
        let offset = depth - steps * self.edge_length;
        let path: Vec<u32> = (0..k).map(&labels).collect();
        let edge = (!offset.is_zero()).then(|| (labels(k), offset));
        Ok(TreePoint { path, edge })
    }

    pub fn ray_point(&self, end: &TreeEnd, t: Rational) -> Result<TreePoint> {
        self.point_along(|i| end.label(i), t)
    }

    /// Exact boundary Gromov product `(ξ|η)`: the depth at which the ends
    /// diverge, `None` when they coincide.
    pub fn end_product(&self, a: &TreeEnd, b: &TreeEnd) -> Option<Rational> {
        a.divergence_index(b)
            .map(|i| self.edge_length * Rational::from_integer(i as i64))
    }

    /// One end per depth-`k` cylinder, extended by the all-0 tail, in
    /// lexicographic order of the prefix.
    pub fn boundary_net(&self, k: u32) -> Result<Vec<TreeEnd>> {
        if k > self.truncation_depth {
            return Err(Error::ResolutionExceedsTruncation { requested: k, limit: self.truncation_depth });
        }
        let b = self.branching as usize;
        let count = b.checked_pow(k).ok_or_else(|| Error::InvalidParams("net too large".into()))?;
        Ok((0..count)
            .map(|mut idx| {
                let mut prefix = vec![0u32; k as usize];
                for slot in prefix.iter_mut().rev() {
                    *slot = (idx % b) as u32;
                    idx /= b;
                }
                TreeEnd::with_zero_tail(prefix)
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ternary() -> TreeSpace {
        TreeSpace::new(3, Rational::from_integer(1), 8).unwrap()
    }

    #[test]
    fn canonical_ends_compare_structurally() {
        let a = TreeEnd::new(vec![1, 0, 1], vec![0, 1, 0, 1]).unwrap();
        let b = TreeEnd::new(vec![1], vec![0, 1]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.divergence_index(&b), None);
        let c = TreeEnd::with_zero_tail(vec![2, 0, 0]);
        assert_eq!(c, TreeEnd::new(vec![2], vec![0]).unwrap());
    }

    #[test]
    fn depth_three_points_sharing_depth_one_prefix() {
        let t = ternary();
        let p = TreePoint::vertex(vec![1, 0, 2]);
        let q = TreePoint::vertex(vec![1, 2, 2]);
        assert_eq!(t.distance_exact(&p, &q), Rational::from_integer(4));
        assert_eq!(t.meet_depth(&p, &q), Rational::from_integer(1));
    }

    #[test]
    fn partial_edge_distance() {
        let t = ternary();
        let p = TreePoint { path: vec![0], edge: Some((1, Rational::new(1, 4))) };
        let q = TreePoint::vertex(vec![0, 1]);
        assert_eq!(t.distance_exact(&p, &q), Rational::new(3, 4));
        let r = TreePoint { path: vec![0], edge: Some((2, Rational::new(1, 2))) };
        assert_eq!(t.distance_exact(&p, &r), Rational::new(3, 4));
    }

    #[test]
    fn ray_point_at_two_and_a_half() {
        let t = ternary();
        let end = TreeEnd::new(vec![], vec![0, 1]).unwrap();
        let p = t.ray_point(&end, Rational::new(5, 2)).unwrap();
        assert_eq!(p.path, vec![0, 1]);
        assert_eq!(p.edge, Some((0, Rational::new(1, 2))));
    }

    #[test]
    fn horizon_is_a_hard_failure() {
        let t = ternary();
        let end = TreeEnd::with_zero_tail(vec![]);
        assert!(t.ray_point(&end, Rational::from_integer(8)).is_ok());
        assert!(matches!(
            t.ray_point(&end, Rational::new(17, 2)),
            Err(Error::HorizonExceeded { .. })
        ));
    }

    #[test]
    fn net_enumerates_cylinders() {
        let t = ternary();
        let net = t.boundary_net(2).unwrap();
        assert_eq!(net.len(), 9);
        assert_eq!(net[5], TreeEnd::with_zero_tail(vec![1, 2]));
        assert!(t.boundary_net(9).is_err());
    }

    #[test]
    fn invalid_trees_rejected() {
        assert!(TreeSpace::new(1, Rational::from_integer(1), 4).is_err());
        assert!(TreeSpace::new(3, Rational::from_integer(0), 4).is_err());
        assert!(TreeSpace::new(3, Rational::from_integer(1), 1).is_err());
    }
}
