use serde::{Deserialize, Serialize};

use super::{Cover, DistanceMatrix};
use crate::error::{Error, Result};
use crate::serde_ext::{ext_f64, ext_f64_vec};

/// Measured analytics of a cover. Infinite values serialize as `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverStats {
    /// Target scale the cover was built for, if any.
    pub lambda: Option<f64>,
    pub mesh: f64,
    #[serde(with = "ext_f64")]
    pub lebesgue: f64,
    pub order: usize,
    #[serde(with = "ext_f64")]
    pub capacity: f64,
    /// Per color: smallest distance between points of distinct elements.
    #[serde(with = "ext_f64_vec")]
    pub min_family_separation: Vec<f64>,
    /// Some element has an empty complement, making the Lebesgue number infinite.
    pub empty_complement: bool,
    /// Coarsest nearest-neighbour gap of the net; Lebesgue numbers measured
    /// on the net overestimate the continuum value by at most this much.
    pub net_spacing: f64,
}

/// Number of elements containing each net point.
pub fn multiplicities(cover: &Cover) -> Vec<usize> {
    let mut mult = vec![0usize; cover.net.len()];
    for el in &cover.elements {
        for &m in &el.members {
            mult[m] += 1;
        }
    }
    mult
}

/// Mesh, order, Lebesgue number, capacity and family separations of `cover`
/// measured in `dm`, which must be the matrix of the cover's net.
pub fn cover_stats(dm: &DistanceMatrix, cover: &Cover, lambda: Option<f64>) -> Result<CoverStats> {
    cover.validate()?;
    if dm.kind != cover.metric_kind {
        return Err(Error::InvalidCover(format!("cover is {:?} but distances are {:?}", cover.metric_kind, dm.kind)));
    }
    let n = cover.net.len();
    if dm.len() != n {
        return Err(Error::InvalidCover(format!("matrix has {} points, net has {n}", dm.len())));
    }
    let mesh = cover.elements.iter().map(|e| dm.diameter_of(&e.members)).fold(0.0, f64::max);
    let order = multiplicities(cover).into_iter().max().unwrap_or(0);

    let mut empty_complement = false;
    let mut lebesgue = f64::INFINITY;
    let mut depth = vec![0.0f64; n];
    for el in &cover.elements {
        if el.members.len() == n {
            empty_complement = true;
        }
        let mut inside = vec![false; n];
        for &m in &el.members {
            inside[m] = true;
        }
        for &x in &el.members {
            let d = (0..n).filter(|&y| !inside[y]).map(|y| dm.get(x, y)).fold(f64::INFINITY, f64::min);
            depth[x] = depth[x].max(d);
        }
    }
    for d in depth {
        lebesgue = lebesgue.min(d);
    }

    let capacity = if lebesgue.is_infinite() || mesh == 0.0 { f64::INFINITY } else { lebesgue / mesh };
    let min_family_separation = cover
        .families()
        .iter()
        .map(|fam| {
            let mut sep = f64::INFINITY;
            for (a, &e) in fam.iter().enumerate() {
                for &f in &fam[a + 1..] {
                    sep = sep.min(dm.set_distance(&cover.elements[e].members, &cover.elements[f].members));
                }
            }
            sep
        })
        .collect();
    Ok(CoverStats {
        lambda,
        mesh,
        lebesgue,
        order,
        capacity,
        min_family_separation,
        empty_complement,
        net_spacing: dm.spacing(),
    })
}
