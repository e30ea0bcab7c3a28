//! Pointed model CAT(0) spaces: rooted trees, the Euclidean line and plane,
//! the hyperbolic plane, and binary products.
//!
//! Every space is pointed: rays start at the basepoint, which is the root
//! of a tree and the origin of the other models. Handles are immutable.

mod hyperbolic;
pub mod spec;
pub mod tree;

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use hyperbolic::hyperbolic_distance;
pub use spec::{SpaceKind, SpaceSpec};
pub use tree::{Rational, TreeEnd, TreePoint, TreeSpace};

/// Hyperbolicity constant used for the hyperbolic plane unless overridden.
pub const DEFAULT_H2_DELTA: f64 = 1.098_612_288_668_109_8;
const DEFAULT_EUCLIDEAN_HORIZON: f64 = 1.0e6;
/// `cosh` of larger arguments squared overflows `f64`.
const DEFAULT_H2_HORIZON: f64 = 300.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Polar coordinates about the basepoint of the hyperbolic plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Polar {
    pub r: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Point {
    Tree(TreePoint),
    Line(f64),
    Plane([f64; 2]),
    Hyperbolic(Polar),
    Product(Box<Point>, Box<Point>),
}

/// Direction of a product ray: `t ↦ (γ₁(t cos α), γ₂(t sin α))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductEnd {
    pub first: BoundaryPoint,
    pub second: BoundaryPoint,
    pub alpha: f64,
}

/// A point at infinity, identified with the unit-speed ray from the basepoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryPoint {
    Tree(TreeEnd),
    Line(Sign),
    /// Plane and hyperbolic plane: angle in `[0, 2π)`.
    Angle(f64),
    Product(Box<ProductEnd>),
}

impl BoundaryPoint {
    pub fn angle(theta: f64) -> Self {
        BoundaryPoint::Angle(theta.rem_euclid(TAU))
    }
}

/// How finely to sample the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetResolution {
    /// Tree: one end per depth-k cylinder.
    Depth(u32),
    /// Plane / hyperbolic plane: m equally spaced angles.
    Angles(usize),
    /// Line: both ends.
    Signs,
    Product { first: Box<NetResolution>, second: Box<NetResolution>, alpha_grid: usize },
}

/// Midpoint grid of `count` angles in `(0, π/2)`.
pub fn alpha_grid(count: usize) -> Vec<f64> {
    (0..count).map(|j| (j as f64 + 0.5) * FRAC_PI_2 / count as f64).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Space {
    Tree(TreeSpace),
    Line { horizon: f64 },
    Plane { horizon: f64 },
    Hyperbolic { delta: f64, horizon: f64 },
    Product(Box<Space>, Box<Space>),
}

/// Validates a spec and builds the corresponding immutable space handle.
pub fn build_space(spec: &SpaceSpec) -> Result<Space> {
    let horizon = |default: f64| -> Result<f64> {
        match spec.horizon {
            Some(h) if !(h.is_finite() && h > 0.0) => Err(Error::InvalidSpec(format!("horizon {h} must be positive"))),
            Some(h) => Ok(h),
            None => Ok(default),
        }
    };
    match spec.kind {
        SpaceKind::Tree => {
            let branching = spec.tree_branching.ok_or_else(|| Error::InvalidSpec("tree needs tree_branching".into()))?;
            let depth = spec.truncation_depth.ok_or_else(|| Error::InvalidSpec("tree needs truncation_depth".into()))?;
            let edge = spec.edge_length.unwrap_or_else(|| Rational::from_integer(1));
            if spec.delta.is_some_and(|d| d != 0.0) {
                return Err(Error::InvalidSpec("trees are 0-hyperbolic; delta must be 0".into()));
            }
            Ok(Space::Tree(TreeSpace::new(branching, edge, depth)?))
        }
        SpaceKind::Line => {
            if spec.delta.is_some_and(|d| d != 0.0) {
                return Err(Error::InvalidSpec("the line is 0-hyperbolic; delta must be 0".into()));
            }
            Ok(Space::Line { horizon: horizon(DEFAULT_EUCLIDEAN_HORIZON)? })
        }
        SpaceKind::Plane => {
            if spec.delta.is_some() {
                return Err(Error::InvalidSpec("the Euclidean plane is not hyperbolic; delta must be absent".into()));
            }
            Ok(Space::Plane { horizon: horizon(DEFAULT_EUCLIDEAN_HORIZON)? })
        }
        SpaceKind::HyperbolicPlane => {
            let delta = spec.delta.unwrap_or(DEFAULT_H2_DELTA);
            if !(delta.is_finite() && delta > 0.0) {
                return Err(Error::InvalidSpec(format!("hyperbolic plane delta {delta} must be positive")));
            }
            let h = horizon(DEFAULT_H2_HORIZON)?;
            if h > DEFAULT_H2_HORIZON {
                return Err(Error::InvalidSpec(format!("hyperbolic horizon {h} exceeds {DEFAULT_H2_HORIZON}")));
            }
            Ok(Space::Hyperbolic { delta, horizon: h })
        }
        SpaceKind::Product => {
            let factors = spec.factors.as_ref().ok_or_else(|| Error::InvalidSpec("product needs factors".into()))?;
            if factors.len() != 2 {
                return Err(Error::InvalidSpec(format!("product needs exactly 2 factors, got {}", factors.len())));
            }
            if spec.delta.is_some() {
                return Err(Error::InvalidSpec("products of unbounded spaces contain flats; delta must be absent".into()));
            }
            Ok(Space::Product(Box::new(build_space(&factors[0])?), Box::new(build_space(&factors[1])?)))
        }
    }
}

impl Space {
    pub fn kind(&self) -> SpaceKind {
        match self {
            Space::Tree(_) => SpaceKind::Tree,
            Space::Line { .. } => SpaceKind::Line,
            Space::Plane { .. } => SpaceKind::Plane,
            Space::Hyperbolic { .. } => SpaceKind::HyperbolicPlane,
            Space::Product(..) => SpaceKind::Product,
        }
    }

    /// The configured hyperbolicity constant, absent for non-hyperbolic spaces.
    pub fn delta(&self) -> Option<f64> {
        match self {
            Space::Tree(_) | Space::Line { .. } => Some(0.0),
            Space::Hyperbolic { delta, .. } => Some(*delta),
            Space::Plane { .. } | Space::Product(..) => None,
        }
    }

    /// Fails with `NotHyperbolic` unless the space carries a δ.
    pub fn require_delta(&self) -> Result<f64> {
        self.delta().ok_or(Error::NotHyperbolic(self.kind().name()))
    }

    pub fn as_tree(&self) -> Option<&TreeSpace> {
        match self {
            Space::Tree(t) => Some(t),
            _ => None,
        }
    }

    /// Largest ray parameter valid for every direction.
    pub fn horizon(&self) -> f64 {
        match self {
            Space::Tree(t) => tree::to_f64(t.horizon()),
            Space::Line { horizon } | Space::Plane { horizon } | Space::Hyperbolic { horizon, .. } => *horizon,
            Space::Product(a, b) => a.horizon().min(b.horizon()),
        }
    }

    /// Largest parameter at which the ray towards `xi` can be evaluated.
    pub fn ray_horizon(&self, xi: &BoundaryPoint) -> f64 {
        match (self, xi) {
            (Space::Product(a, b), BoundaryPoint::Product(e)) => {
                let (c, s) = (e.alpha.cos(), e.alpha.sin());
                let ha = if c > 0.0 { a.ray_horizon(&e.first) / c } else { f64::INFINITY };
                let hb = if s > 0.0 { b.ray_horizon(&e.second) / s } else { f64::INFINITY };
                ha.min(hb)
            }
            _ => self.horizon(),
        }
    }

    /// Whether two rays from the basepoint that meet at a positive time
    /// coincide forever (true for the Riemannian models, false for trees).
    pub fn geodesics_extend_uniquely(&self) -> bool {
        match self {
            Space::Tree(_) => false,
            Space::Line { .. } | Space::Plane { .. } | Space::Hyperbolic { .. } => true,
            Space::Product(a, b) => a.geodesics_extend_uniquely() && b.geodesics_extend_uniquely(),
        }
    }

    pub fn basepoint(&self) -> Point {
        match self {
            Space::Tree(_) => Point::Tree(TreePoint::root()),
            Space::Line { .. } => Point::Line(0.0),
            Space::Plane { .. } => Point::Plane([0.0, 0.0]),
            Space::Hyperbolic { .. } => Point::Hyperbolic(Polar { r: 0.0, theta: 0.0 }),
            Space::Product(a, b) => Point::Product(Box::new(a.basepoint()), Box::new(b.basepoint())),
        }
    }

    pub fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        match (self, p, q) {
            (Space::Tree(t), Point::Tree(a), Point::Tree(b)) => {
                t.check_point(a)?;
                t.check_point(b)?;
                Ok(tree::to_f64(t.distance_exact(a, b)))
            }
            (Space::Line { .. }, Point::Line(a), Point::Line(b)) => Ok((a - b).abs()),
            (Space::Plane { .. }, Point::Plane(a), Point::Plane(b)) => Ok((a[0] - b[0]).hypot(a[1] - b[1])),
            (Space::Hyperbolic { .. }, Point::Hyperbolic(a), Point::Hyperbolic(b)) => Ok(hyperbolic_distance(*a, *b)),
            (Space::Product(sa, sb), Point::Product(a1, a2), Point::Product(b1, b2)) => {
                Ok(sa.distance(a1, b1)?.hypot(sb.distance(a2, b2)?))
            }
            _ => Err(Error::PointMismatch(self.kind().name())),
        }
    }

    /// Unit-speed ray towards `xi`, evaluated at `t`.
    pub fn ray_eval(&self, xi: &BoundaryPoint, t: f64) -> Result<Point> {
        if !(t >= 0.0) {
            return Err(Error::InvalidParams(format!("ray parameter {t} must be nonnegative")));
        }
        match (self, xi) {
            (Space::Tree(tr), BoundaryPoint::Tree(end)) => {
                let horizon = tree::to_f64(tr.horizon());
                if t > horizon {
                    return Err(Error::HorizonExceeded { t, horizon });
                }
                tr.check_end(end)?;
                Ok(Point::Tree(tr.ray_point(end, tree::quantize(t).min(tr.horizon()))?))
            }
            (Space::Line { horizon }, BoundaryPoint::Line(s)) => {
                check_horizon(t, *horizon)?;
                Ok(Point::Line(s.value() * t))
            }
            (Space::Plane { horizon }, BoundaryPoint::Angle(theta)) => {
                check_horizon(t, *horizon)?;
                Ok(Point::Plane([t * theta.cos(), t * theta.sin()]))
            }
            (Space::Hyperbolic { horizon, .. }, BoundaryPoint::Angle(theta)) => {
                check_horizon(t, *horizon)?;
                Ok(Point::Hyperbolic(Polar { r: t, theta: *theta }))
            }
            (Space::Product(a, b), BoundaryPoint::Product(e)) => {
                let h = self.ray_horizon(xi);
                if t > h * (1.0 + 1e-12) {
                    return Err(Error::HorizonExceeded { t, horizon: h });
                }
                let ta = (t * e.alpha.cos()).min(a.ray_horizon(&e.first));
                let tb = (t * e.alpha.sin()).min(b.ray_horizon(&e.second));
                Ok(Point::Product(
                    Box::new(a.ray_eval(&e.first, ta.max(0.0))?),
                    Box::new(b.ray_eval(&e.second, tb.max(0.0))?),
                ))
            }
            _ => Err(Error::PointMismatch(self.kind().name())),
        }
    }

    /// Distance between the two rays at the common time `t`.
    pub fn displacement(&self, xi: &BoundaryPoint, eta: &BoundaryPoint, t: f64) -> Result<f64> {
        self.ray_pair_distance(xi, t, eta, t)
    }

    /// `d(γ_ξ(u), γ_η(v))`, computed without materializing the points.
    pub fn ray_pair_distance(&self, xi: &BoundaryPoint, u: f64, eta: &BoundaryPoint, v: f64) -> Result<f64> {
        if !(u >= 0.0 && v >= 0.0) {
            return Err(Error::InvalidParams(format!("ray parameters {u}, {v} must be nonnegative")));
        }
        match (self, xi, eta) {
            // Points at depths u and v meet at depth min(u, v, (ξ|η)).
            (Space::Tree(tr), BoundaryPoint::Tree(a), BoundaryPoint::Tree(b)) => {
                let horizon = tree::to_f64(tr.horizon());
                if u.max(v) > horizon {
                    return Err(Error::HorizonExceeded { t: u.max(v), horizon });
                }
                tr.check_end(a)?;
                tr.check_end(b)?;
                let qu = tree::quantize(u).min(tr.horizon());
                let qv = tree::quantize(v).min(tr.horizon());
                let meet = match tr.end_product(a, b) {
                    Some(g) => g.min(qu).min(qv),
                    None => qu.min(qv),
                };
                Ok(tree::to_f64(qu + qv - meet * Rational::from_integer(2)))
            }
            (Space::Line { horizon }, BoundaryPoint::Line(a), BoundaryPoint::Line(b)) => {
                check_horizon(u.max(v), *horizon)?;
                Ok((a.value() * u - b.value() * v).abs())
            }
            (Space::Plane { horizon }, BoundaryPoint::Angle(a), BoundaryPoint::Angle(b)) => {
                check_horizon(u.max(v), *horizon)?;
                if u == v {
                    return Ok(2.0 * u * (0.5 * (a - b)).sin().abs());
                }
                Ok((u * a.cos() - v * b.cos()).hypot(u * a.sin() - v * b.sin()))
            }
            (Space::Hyperbolic { horizon, .. }, BoundaryPoint::Angle(a), BoundaryPoint::Angle(b)) => {
                check_horizon(u.max(v), *horizon)?;
                Ok(hyperbolic_distance(Polar { r: u, theta: *a }, Polar { r: v, theta: *b }))
            }
            (Space::Product(sa, sb), BoundaryPoint::Product(e), BoundaryPoint::Product(f)) => {
                let (hx, hy) = (self.ray_horizon(xi), self.ray_horizon(eta));
                if u > hx * (1.0 + 1e-12) {
                    return Err(Error::HorizonExceeded { t: u, horizon: hx });
                }
                if v > hy * (1.0 + 1e-12) {
                    return Err(Error::HorizonExceeded { t: v, horizon: hy });
                }
                let clamp = |s: &Space, p: &BoundaryPoint, t: f64| t.min(s.ray_horizon(p)).max(0.0);
                let d1 = sa.ray_pair_distance(
                    &e.first,
                    clamp(sa, &e.first, u * e.alpha.cos()),
                    &f.first,
                    clamp(sa, &f.first, v * f.alpha.cos()),
                )?;
                let d2 = sb.ray_pair_distance(
                    &e.second,
                    clamp(sb, &e.second, u * e.alpha.sin()),
                    &f.second,
                    clamp(sb, &f.second, v * f.alpha.sin()),
                )?;
                Ok(d1.hypot(d2))
            }
            _ => Err(Error::PointMismatch(self.kind().name())),
        }
    }

    /// A deterministic finite stand-in for the boundary.
    pub fn boundary_net(&self, resolution: &NetResolution) -> Result<Vec<BoundaryPoint>> {
        match (self, resolution) {
            (Space::Tree(t), NetResolution::Depth(k)) => {
                Ok(t.boundary_net(*k)?.into_iter().map(BoundaryPoint::Tree).collect())
            }
            (Space::Line { .. }, NetResolution::Signs) => {
                Ok(vec![BoundaryPoint::Line(Sign::Plus), BoundaryPoint::Line(Sign::Minus)])
            }
            (Space::Plane { .. } | Space::Hyperbolic { .. }, NetResolution::Angles(m)) => {
                if *m == 0 {
                    return Err(Error::InvalidParams("angular net needs at least one point".into()));
                }
                Ok((0..*m).map(|j| BoundaryPoint::Angle(TAU * j as f64 / *m as f64)).collect())
            }
            (Space::Product(a, b), NetResolution::Product { first, second, alpha_grid: g }) => {
                if *g == 0 {
                    return Err(Error::InvalidParams("product net needs a nonempty alpha grid".into()));
                }
                let na = a.boundary_net(first)?;
                let nb = b.boundary_net(second)?;
                let alphas = alpha_grid(*g);
                let mut out = Vec::with_capacity(na.len() * nb.len() * g);
                for x in &na {
                    for y in &nb {
                        for &alpha in &alphas {
                            out.push(BoundaryPoint::Product(Box::new(ProductEnd {
                                first: x.clone(),
                                second: y.clone(),
                                alpha,
                            })));
                        }
                    }
                }
                Ok(out)
            }
            _ => Err(Error::InvalidParams(format!("resolution {resolution:?} does not fit a {}", self.kind().name()))),
        }
    }

    /// Equality of boundary points, with angles compared modulo 2π.
    pub fn same_direction(&self, xi: &BoundaryPoint, eta: &BoundaryPoint) -> bool {
        match (xi, eta) {
            (BoundaryPoint::Angle(a), BoundaryPoint::Angle(b)) => {
                let d = (a - b).rem_euclid(TAU);
                d == 0.0
            }
            (BoundaryPoint::Product(a), BoundaryPoint::Product(b)) => {
                if let Space::Product(sa, sb) = self {
                    if a.alpha != b.alpha {
                        return false;
                    }
                    let need_first = a.alpha.cos() > 0.0;
                    let need_second = a.alpha.sin() > 0.0;
                    (!need_first || sa.same_direction(&a.first, &b.first))
                        && (!need_second || sb.same_direction(&a.second, &b.second))
                } else {
                    false
                }
            }
            _ => xi == eta,
        }
    }
}

fn check_horizon(t: f64, horizon: f64) -> Result<()> {
    if t > horizon {
        Err(Error::HorizonExceeded { t, horizon })
    } else {
        Ok(())
    }
}
