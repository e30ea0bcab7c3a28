use serde::{Deserialize, Serialize};

use super::components::{label_components, ApartmentRegion};
use super::{apartment_index, BuildingHandle};
use crate::boundary::MetricParams;
use crate::covers::{cover_stats, Cover, CoverElement, DistanceMatrix, MetricKind};
use crate::error::{Error, Result};
use crate::serde_ext::ext_f64;
use crate::spaces::{BoundaryPoint, Space};

/// The constants of the pullback argument.
///
/// `S = 2(1 + r/ε_L)` and `D = R·r/ε_L` make the preimage-component bound
/// `2R + 2D + M` read `S·R + M`; `S′ = S(c+1)/c` and `c′ = c(S′A + M)/A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuildingBounds {
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub r: f64,
    #[serde(rename = "S_prime")]
    pub s_prime: f64,
    pub c_prime: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    /// Lebesgue number `ε_L` of the auxiliary cover of `B_r(p)`; configured.
    pub lebesgue_eps: f64,
}

impl BuildingBounds {
    pub fn new(m: f64, r: f64, lebesgue_eps: f64, big_r: f64, c: f64, a: f64) -> Result<Self> {
        if !(m > 0.0) {
            return Err(Error::InvalidParams(format!("chamber diameter M = {m} must be positive")));
        }
        if !(r >= 2.0 * m) {
            return Err(Error::InvalidParams(format!("r = {r} must be at least 2M = {}", 2.0 * m)));
        }
        if !(lebesgue_eps > 0.0 && big_r >= 0.0 && c > 0.0 && a > 0.0) {
            return Err(Error::InvalidParams("epsilon, R, c and A must be positive".into()));
        }
        let s = 2.0 * (1.0 + r / lebesgue_eps);
        let s_prime = s * (c + 1.0) / c;
        Ok(BuildingBounds {
            s,
            m,
            d: big_r * r / lebesgue_eps,
            r,
            s_prime,
            c_prime: c * (s_prime * a + m) / a,
            big_r,
            lebesgue_eps,
        })
    }

    /// Bounds for pulling back at Moran scale `a` with boundedness `c`:
    /// `R = (c+1)A/c`, the diameter of the neighbourhood `N(W)`.
    pub fn for_pullback(b: &BuildingHandle, r: f64, lebesgue_eps: f64, c: f64, a: f64) -> Result<Self> {
        Self::new(b.chamber_diameter(), r, lebesgue_eps, (c + 1.0) * a / c, c, a)
    }

    /// `2R + 2D + M`.
    pub fn component_bound(&self) -> f64 {
        2.0 * self.big_r + 2.0 * self.d + self.m
    }
}

/// A cover of a building boundary net pulled back from the apartment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulledCover {
    pub cover: Cover,
    /// Per element: the apartment element and preimage component it came from.
    pub sources: Vec<(usize, usize)>,
    pub t_outer: f64,
    pub t_inner: f64,
    pub resolution: f64,
    pub apartment_families: usize,
}

/// Skeleton spacing: at most `A/8`, dividing every edge at least twice.
fn pullback_resolution(b: &BuildingHandle, a: f64) -> f64 {
    let e = b.factors.iter().map(|f| f.edge_length()).fold(f64::INFINITY, f64::min);
    e / (8.0 * e / a).ceil().max(2.0)
}

fn check_apartment_cover(b: &BuildingHandle, cover: &Cover, l: f64, c: f64, a: f64) -> Result<()> {
    if !(c > 1.0) {
        return Err(Error::Precondition(format!("boundedness multiplier c = {c} must exceed 1")));
    }
    if !(l > 0.0 && a > 0.0) {
        return Err(Error::InvalidParams("L and A must be positive".into()));
    }
    if cover.metric_kind != MetricKind::Moran || cover.params.moran_scale != a {
        return Err(Error::Precondition("apartment cover must be measured in Moran's metric at scale A".into()));
    }
    let dm = DistanceMatrix::moran(&b.apartment_space(), a, &cover.net)?;
    let stats = cover_stats(&dm, cover, Some(l))?;
    if let Some(sep) = stats.min_family_separation.iter().find(|&&s| s < l - 1e-12) {
        return Err(Error::Precondition(format!("apartment families are only {sep}-separated, need L = {l}")));
    }
    if stats.mesh > c * l + 1e-12 {
        return Err(Error::Precondition(format!("apartment mesh {} exceeds cL = {}", stats.mesh, c * l)));
    }
    Ok(())
}

/// Pulls an apartment cover back to the building boundary net.
///
/// For each apartment element `U`, the sphere sets `V_U` at radius `1/L` are
/// thickened by `A/2`, the preimage of the thickening is split into
/// connected components `K`, and every net ray whose point at time `1/L`
/// retracts into `V_U` and lies in `K` joins the element keyed by `(U, K)`.
/// Elements keep the color of `U`.
pub fn pullback_cover(
    b: &BuildingHandle,
    apartment_cover: &Cover,
    l: f64,
    c: f64,
    a: f64,
    net: &[BoundaryPoint],
) -> Result<PulledCover> {
    check_apartment_cover(b, apartment_cover, l, c, a)?;
    let (t_outer, t_inner) = (1.0 / l, 1.0 / (c * l));
    for z in net {
        let h = b.space.ray_horizon(z);
        if t_outer > h {
            return Err(Error::HorizonExceeded { t: t_outer, horizon: h });
        }
    }
    let resolution = pullback_resolution(b, a);
    let dirs = net
        .iter()
        .map(|z| apartment_index(&apartment_cover.net, &b.apartment_direction(z)?))
        .collect::<Result<Vec<_>>>()?;
    let mut elements = Vec::new();
    let mut sources = Vec::new();
    for (u, el) in apartment_cover.elements.iter().enumerate() {
        let centers = el
            .members
            .iter()
            .map(|&m| b.apartment_point(&apartment_cover.net[m], t_outer))
            .collect::<Result<Vec<_>>>()?;
        let region = if b.rank() == 1 {
            ApartmentRegion::Intervals(centers.iter().map(|x| (x[0] - a / 2.0, x[0] + a / 2.0)).collect())
        } else {
            ApartmentRegion::Discs { centers: centers.iter().map(|x| [x[0], x[1]]).collect(), radius: a / 2.0 }
        };
        let lab = label_components(b, &region, resolution)?;
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); lab.count];
        for (i, z) in net.iter().enumerate() {
            if !el.contains(dirs[i]) {
                continue;
            }
            let per_factor = match (&b.space, z) {
                (Space::Tree(_), BoundaryPoint::Tree(e)) => vec![lab.skeletons[0].snap(e, t_outer)?],
                (Space::Product(..), BoundaryPoint::Product(pe)) => match (&pe.first, &pe.second) {
                    (BoundaryPoint::Tree(e), BoundaryPoint::Tree(f)) => vec![
                        lab.skeletons[0].snap(e, t_outer * pe.alpha.cos())?,
                        lab.skeletons[1].snap(f, t_outer * pe.alpha.sin())?,
                    ],
                    _ => return Err(Error::PointMismatch("product of trees")),
                },
                _ => return Err(Error::PointMismatch("tree building")),
            };
            let Some(k) = lab.label[lab.flat_index(&per_factor)] else {
                return Err(Error::ResolutionTooCoarse(format!("ray {i} at time 1/L snaps outside the A/2-neighbourhood")));
            };
            groups[k].push(i);
        }
        for (k, members) in groups.into_iter().enumerate() {
            if !members.is_empty() {
                elements.push(CoverElement::new(members, el.color).with_descriptor(format!("U{u}/K{k}")));
                sources.push((u, k));
            }
        }
    }
    let cover = Cover::new(MetricKind::Moran, MetricParams::moran(a)?, net.to_vec(), elements)?;
    Ok(PulledCover { cover, sources, t_outer, t_inner, resolution, apartment_families: apartment_cover.n_colors() })
}

/// Measured quantities of a pulled-back cover against their bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PullbackReport {
    pub l: f64,
    pub c: f64,
    #[serde(rename = "A")]
    pub a: f64,
    /// Smallest distance at radius `1/L` between distinct same-color sets.
    #[serde(with = "ext_f64")]
    pub v_separation: f64,
    pub v_separation_bound: f64,
    /// Largest diameter of a set at radius `1/(cL)`.
    pub w_diameter: f64,
    pub w_diameter_bound: f64,
    /// Smallest Moran distance between distinct same-color sets.
    #[serde(with = "ext_f64")]
    pub moran_separation: f64,
    pub moran_separation_bound: f64,
    /// Largest Moran diameter of a set.
    pub moran_diameter: f64,
    pub moran_diameter_bound: f64,
    pub families: usize,
    pub apartment_families: usize,
    pub elements: usize,
    pub v_separation_ok: bool,
    pub w_diameter_ok: bool,
    pub moran_separation_ok: bool,
    pub moran_diameter_ok: bool,
    pub families_preserved: bool,
}

impl PullbackReport {
    pub fn passed(&self) -> bool {
        self.v_separation_ok && self.w_diameter_ok && self.moran_separation_ok && self.moran_diameter_ok && self.families_preserved
    }
}

/// Measures a pulled-back cover. `moran` must be the Moran matrix of the
/// cover's net at scale `A`. Violations are recorded, not raised.
pub fn pullback_bounds_check(
    b: &BuildingHandle,
    pulled: &PulledCover,
    l: f64,
    c: f64,
    a: f64,
    bounds: &BuildingBounds,
    moran: &DistanceMatrix,
) -> Result<PullbackReport> {
    const TOL: f64 = 1e-9;
    let cover = &pulled.cover;
    let net = &cover.net;
    let stats = cover_stats(moran, cover, Some(l))?;
    let ray_gap = |i: usize, j: usize, t: f64| b.space.displacement(&net[i], &net[j], t);
    let mut v_sep = f64::INFINITY;
    for fam in cover.families() {
        for (x, &e) in fam.iter().enumerate() {
            for &f in &fam[x + 1..] {
                for &i in &cover.elements[e].members {
                    for &j in &cover.elements[f].members {
                        v_sep = v_sep.min(ray_gap(i, j, pulled.t_outer)?);
                    }
                }
            }
        }
    }
    let mut w_diam: f64 = 0.0;
    for el in &cover.elements {
        for (x, &i) in el.members.iter().enumerate() {
            for &j in &el.members[x + 1..] {
                w_diam = w_diam.max(ray_gap(i, j, pulled.t_inner)?);
            }
        }
    }
    let moran_sep = stats.min_family_separation.iter().copied().fold(f64::INFINITY, f64::min);
    let (v_bound, w_bound) = (a / 2.0, bounds.s_prime * a + bounds.m);
    let (sep_bound, diam_bound) = (l / 2.0, bounds.c_prime * l);
    Ok(PullbackReport {
        l,
        c,
        a,
        v_separation: v_sep,
        v_separation_bound: v_bound,
        w_diameter: w_diam,
        w_diameter_bound: w_bound,
        moran_separation: moran_sep,
        moran_separation_bound: sep_bound,
        moran_diameter: stats.mesh,
        moran_diameter_bound: diam_bound,
        families: cover.n_colors(),
        apartment_families: pulled.apartment_families,
        elements: cover.elements.len(),
        v_separation_ok: v_sep >= v_bound - TOL,
        w_diameter_ok: w_diam <= w_bound + TOL,
        moran_separation_ok: moran_sep >= sep_bound - TOL,
        moran_diameter_ok: stats.mesh <= diam_bound + TOL,
        families_preserved: cover.n_colors() == pulled.apartment_families,
    })
}
