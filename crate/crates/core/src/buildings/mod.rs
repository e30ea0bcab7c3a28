//! Trees and products of two trees viewed as buildings: a distinguished
//! apartment through the basepoint, the retraction onto it centred at a
//! base chamber, preimage components, and the pullback of apartment covers.

mod components;
mod pullback;
mod skeleton;

pub use components::{preimage_components, ApartmentRegion, PreimageComponent};
pub use pullback::{pullback_bounds_check, pullback_cover, BuildingBounds, PullbackReport, PulledCover};

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::spaces::{build_space, tree, BoundaryPoint, Point, Sign, Space, SpaceSpec, TreeEnd, TreePoint, TreeSpace};

/// A bi-infinite line through the root of a tree, given by two ends whose
/// first labels differ. The base chamber is the first edge towards `plus`.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeApartment {
    pub tree: TreeSpace,
    pub plus: TreeEnd,
    pub minus: TreeEnd,
}

impl TreeApartment {
    pub fn new(tree: TreeSpace, plus: TreeEnd, minus: TreeEnd) -> Result<Self> {
        tree.check_end(&plus)?;
        tree.check_end(&minus)?;
        if plus.label(0) == minus.label(0) {
            return Err(Error::InvalidSpec("apartment ends must leave the root along different edges".into()));
        }
        Ok(TreeApartment { tree, plus, minus })
    }

    /// The line `0^∞` / `1 0^∞`.
    pub fn standard(tree: TreeSpace) -> Result<Self> {
        Self::new(tree, TreeEnd::with_zero_tail(vec![]), TreeEnd::with_zero_tail(vec![1]))
    }

    pub fn edge_length(&self) -> f64 {
        tree::to_f64(self.tree.edge_length)
    }

    /// `+1` on the chamber side of the root, `−1` elsewhere.
    pub fn side(&self, first_label: u32) -> f64 {
        if first_label == self.plus.label(0) {
            1.0
        } else {
            -1.0
        }
    }

    /// Signed position of `ρ(x)` on the apartment line.
    pub fn coordinate(&self, x: &TreePoint) -> Result<f64> {
        self.tree.check_point(x)?;
        let d = tree::to_f64(self.tree.depth(x));
        Ok(x.first_label().map_or(0.0, |l| self.side(l) * d))
    }

    pub fn end_sign(&self, e: &TreeEnd) -> Sign {
        if self.side(e.label(0)) > 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// Folds `x` onto the apartment, preserving its distance from the root.
    pub fn retract(&self, x: &TreePoint) -> Result<TreePoint> {
        self.tree.check_point(x)?;
        let depth = self.tree.depth(x);
        let end = match x.first_label() {
            Some(l) if self.side(l) > 0.0 => &self.plus,
            Some(_) => &self.minus,
            None => return Ok(TreePoint::root()),
        };
        self.tree.ray_point(end, depth)
    }
}

/// A tree or a product of two trees with a distinguished apartment.
#[derive(Debug, Clone, PartialEq)]
pub struct BuildingHandle {
    pub space: Space,
    pub factors: Vec<TreeApartment>,
}

impl BuildingHandle {
    /// Tree (one factor) or product of two trees, with standard apartments.
    pub fn from_spec(spec: &SpaceSpec) -> Result<Self> {
        let space = build_space(spec)?;
        let factors = match &space {
            Space::Tree(t) => vec![TreeApartment::standard(t.clone())?],
            Space::Product(a, b) => match (a.as_tree(), b.as_tree()) {
                (Some(x), Some(y)) => vec![TreeApartment::standard(x.clone())?, TreeApartment::standard(y.clone())?],
                _ => return Err(Error::InvalidSpec("buildings are products of trees".into())),
            },
            _ => return Err(Error::InvalidSpec(format!("{} is not a tree building", space.kind().name()))),
        };
        Ok(BuildingHandle { space, factors })
    }

    pub fn with_apartments(space: Space, factors: Vec<TreeApartment>) -> Result<Self> {
        let ok = match (&space, factors.as_slice()) {
            (Space::Tree(t), [f]) => *t == f.tree,
            (Space::Product(a, b), [f, g]) => a.as_tree() == Some(&f.tree) && b.as_tree() == Some(&g.tree),
            _ => false,
        };
        if !ok {
            return Err(Error::InvalidSpec("apartments do not match the building factors".into()));
        }
        Ok(BuildingHandle { space, factors })
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Diameter of the base chamber (an edge, or a product of two edges).
    pub fn chamber_diameter(&self) -> f64 {
        self.factors.iter().map(|f| f.edge_length().powi(2)).sum::<f64>().sqrt()
    }

    /// The apartment as a model space: the line or the plane.
    pub fn apartment_space(&self) -> Space {
        let spec = if self.rank() == 1 { SpaceSpec::line() } else { SpaceSpec::plane() };
        build_space(&spec).expect("model apartment")
    }

    /// Boundary net of the apartment: both ends of the line, or the `m`
    /// angles `(j + ½)·2π/m` of the flat, which line up with product nets
    /// whose α-grid has `m/4` points.
    pub fn apartment_net(&self, m: usize) -> Result<Vec<BoundaryPoint>> {
        if self.rank() == 1 {
            return Ok(vec![BoundaryPoint::Line(Sign::Plus), BoundaryPoint::Line(Sign::Minus)]);
        }
        if m == 0 || m % 4 != 0 {
            return Err(Error::InvalidParams(format!("apartment circle net size {m} must be a positive multiple of 4")));
        }
        Ok((0..m).map(|j| BoundaryPoint::Angle((j as f64 + 0.5) * TAU / m as f64)).collect())
    }

    /// Flat coordinates of `ρ(x)`.
    pub fn coordinates(&self, x: &Point) -> Result<Vec<f64>> {
        match (x, self.factors.as_slice()) {
            (Point::Tree(p), [f]) => Ok(vec![f.coordinate(p)?]),
            (Point::Product(a, b), [f, g]) => match (a.as_ref(), b.as_ref()) {
                (Point::Tree(p), Point::Tree(q)) => Ok(vec![f.coordinate(p)?, g.coordinate(q)?]),
                _ => Err(Error::PointMismatch("product of trees")),
            },
            _ => Err(Error::PointMismatch("tree building")),
        }
    }

    /// The retraction `ρ` onto the apartment centred at the base chamber.
    pub fn apartment_retraction(&self, x: &Point) -> Result<Point> {
        match (x, self.factors.as_slice()) {
            (Point::Tree(p), [f]) => Ok(Point::Tree(f.retract(p)?)),
            (Point::Product(a, b), [f, g]) => match (a.as_ref(), b.as_ref()) {
                (Point::Tree(p), Point::Tree(q)) => Ok(Point::Product(
                    Box::new(Point::Tree(f.retract(p)?)),
                    Box::new(Point::Tree(g.retract(q)?)),
                )),
                _ => Err(Error::PointMismatch("product of trees")),
            },
            _ => Err(Error::PointMismatch("tree building")),
        }
    }

    /// The apartment direction `ρ` sends the ray towards `zeta` to.
    pub fn apartment_direction(&self, zeta: &BoundaryPoint) -> Result<BoundaryPoint> {
        match (zeta, self.factors.as_slice()) {
            (BoundaryPoint::Tree(e), [f]) => Ok(BoundaryPoint::Line(f.end_sign(e))),
            (BoundaryPoint::Product(pe), [f, g]) => match (&pe.first, &pe.second) {
                (BoundaryPoint::Tree(a), BoundaryPoint::Tree(b)) => {
                    let x = f.side(a.label(0)) * pe.alpha.cos();
                    let y = g.side(b.label(0)) * pe.alpha.sin();
                    Ok(BoundaryPoint::angle(y.atan2(x)))
                }
                _ => Err(Error::PointMismatch("product of trees")),
            },
            _ => Err(Error::PointMismatch("tree building")),
        }
    }

    /// Position in the apartment of the ray towards `dir` at time `t`.
    pub fn apartment_point(&self, dir: &BoundaryPoint, t: f64) -> Result<Vec<f64>> {
        match dir {
            BoundaryPoint::Line(s) if self.rank() == 1 => Ok(vec![s.value() * t]),
            BoundaryPoint::Angle(phi) if self.rank() == 2 => Ok(vec![t * phi.cos(), t * phi.sin()]),
            _ => Err(Error::PointMismatch("apartment direction")),
        }
    }
}

/// Index of the apartment net point matching `dir` to within `1e-9`.
pub(crate) fn apartment_index(net: &[BoundaryPoint], dir: &BoundaryPoint) -> Result<usize> {
    net.iter()
        .position(|p| match (p, dir) {
            (BoundaryPoint::Angle(a), BoundaryPoint::Angle(b)) => {
                let d = (a - b).rem_euclid(TAU);
                d.min(TAU - d) < 1e-9
            }
            _ => p == dir,
        })
        .ok_or_else(|| Error::NotInNet(format!("apartment direction {dir:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::Rational;

    fn ternary(depth: u32) -> BuildingHandle {
        BuildingHandle::from_spec(&SpaceSpec::tree(3, depth)).unwrap()
    }

    #[test]
    fn apartment_points_are_fixed() {
        let b = ternary(6);
        let f = &b.factors[0];
        for end in [&f.plus, &f.minus] {
            for k in 0..=12 {
                let x = Point::Tree(f.tree.ray_point(end, Rational::new(k, 2)).unwrap());
                assert_eq!(b.apartment_retraction(&x).unwrap(), x);
            }
        }
    }

    #[test]
    fn off_apartment_point_through_chamber() {
        let b = ternary(6);
        let x = Point::Tree(TreePoint::vertex(vec![0, 2, 1]));
        let r = b.apartment_retraction(&x).unwrap();
        assert_eq!(r, Point::Tree(TreePoint::vertex(vec![0, 0, 0])));
        assert_eq!(b.coordinates(&x).unwrap(), vec![3.0]);
        let y = Point::Tree(TreePoint::vertex(vec![2, 2]));
        assert_eq!(b.coordinates(&y).unwrap(), vec![-2.0]);
        let p = b.space.basepoint();
        assert_eq!(b.space.distance(&p, &r).unwrap(), b.space.distance(&p, &x).unwrap());
    }

    #[test]
    fn product_directions_line_up_with_the_circle_net() {
        let b = BuildingHandle::from_spec(&SpaceSpec::product(SpaceSpec::tree(2, 5), SpaceSpec::tree(2, 5))).unwrap();
        let net = b
            .space
            .boundary_net(&crate::spaces::NetResolution::Product {
                first: Box::new(crate::spaces::NetResolution::Depth(2)),
                second: Box::new(crate::spaces::NetResolution::Depth(2)),
                alpha_grid: 3,
            })
            .unwrap();
        let circle = b.apartment_net(12).unwrap();
        for z in &net {
            apartment_index(&circle, &b.apartment_direction(z).unwrap()).unwrap();
        }
        assert!((b.chamber_diameter() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bad_apartments_rejected() {
        let t = TreeSpace::new(3, Rational::from_integer(1), 4).unwrap();
        let e = TreeEnd::with_zero_tail(vec![1, 1]);
        let f = TreeEnd::with_zero_tail(vec![1, 2]);
        assert!(TreeApartment::new(t.clone(), e, f).is_err());
        assert!(BuildingHandle::from_spec(&SpaceSpec::plane()).is_err());
    }
}
