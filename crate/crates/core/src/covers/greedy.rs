use std::collections::HashMap;

use super::{Cover, CoverElement, DistanceMatrix};
use crate::boundary::MetricParams;
use crate::error::{Error, Result};
use crate::spaces::BoundaryPoint;

/// How a seed grows into a cover element.
#[derive(Debug, Clone, PartialEq)]
pub enum Absorption {
    /// Every uncovered net point within this distance of the seed.
    Ball(f64),
    /// Every uncovered net point in the seed's class.
    Classes(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GreedyOptions {
    /// Defaults to `Ball(L)`.
    pub absorption: Option<Absorption>,
    /// When set, a seed that conflicts with every color may be merged with
    /// the conflicting elements of the lowest color whose union stays within
    /// this diameter.
    pub max_merge_diameter: Option<f64>,
}

/// Class index of each tree end by its depth-`depth` prefix (its cylinder).
pub fn cylinder_classes(net: &[BoundaryPoint], depth: usize) -> Result<Vec<usize>> {
    let mut ids: HashMap<Vec<u32>, usize> = HashMap::new();
    net.iter()
        .map(|p| match p {
            BoundaryPoint::Tree(e) => {
                let prefix: Vec<u32> = (0..depth).map(|i| e.label(i)).collect();
                let next = ids.len();
                Ok(*ids.entry(prefix).or_insert(next))
            }
            _ => Err(Error::PointMismatch("cylinders need tree ends")),
        })
        .collect()
}

/// Greedy witness for `n_colors` families of `L`-separated sets.
///
/// Seeds are taken in net index order among uncovered points; each seed
/// absorbs uncovered points as configured and receives the lowest color
/// none of whose elements comes within `L` of it.
pub fn greedy_colored_cover(
    dm: &DistanceMatrix,
    params: &MetricParams,
    net: &[BoundaryPoint],
    l: f64,
    n_colors: usize,
    opts: &GreedyOptions,
) -> Result<Cover> {
    if !(l > 0.0) {
        return Err(Error::InvalidParams(format!("separation L = {l} must be positive")));
    }
    if n_colors == 0 {
        return Err(Error::InvalidParams("need at least one color".into()));
    }
    let n = net.len();
    if dm.len() != n {
        return Err(Error::InvalidParams(format!("matrix has {} points, net has {n}", dm.len())));
    }
    if let Some(Absorption::Classes(c)) = &opts.absorption {
        if c.len() != n {
            return Err(Error::InvalidParams("one class per net point required".into()));
        }
    }
    let absorption = opts.absorption.clone().unwrap_or(Absorption::Ball(l));
    let mut covered = vec![false; n];
    let mut elements: Vec<CoverElement> = Vec::new();
    for seed in 0..n {
        if covered[seed] {
            continue;
        }
        let members: Vec<usize> = (0..n)
            .filter(|&y| {
                !covered[y]
                    && match &absorption {
                        Absorption::Ball(r) => y == seed || dm.get(seed, y) <= *r,
                        Absorption::Classes(c) => c[y] == c[seed],
                    }
            })
            .collect();
        let conflicts = |color: usize, elements: &[CoverElement]| -> Vec<usize> {
            elements
                .iter()
                .enumerate()
                .filter(|(_, e)| e.color == color && dm.set_distance(&e.members, &members) < l)
                .map(|(k, _)| k)
                .collect()
        };
        for &m in &members {
            covered[m] = true;
        }
        if let Some(color) = (0..n_colors).find(|&c| conflicts(c, &elements).is_empty()) {
            elements.push(CoverElement::new(members, color).with_descriptor(format!("seed {seed}")));
            continue;
        }
        let merged = opts.max_merge_diameter.and_then(|cap| {
            (0..n_colors).find_map(|color| {
                let hit = conflicts(color, &elements);
                let mut union = members.clone();
                for &k in &hit {
                    union.extend_from_slice(&elements[k].members);
                }
                (dm.diameter_of(&union) <= cap).then_some((color, hit, union))
            })
        });
        let Some((color, hit, union)) = merged else {
            return Err(Error::InsufficientColors { colors: n_colors, point: seed });
        };
        for &k in hit.iter().rev() {
            elements.remove(k);
        }
        elements.push(CoverElement::new(union, color).with_descriptor(format!("merged at seed {seed}")));
    }
    Cover::new(dm.kind, *params, net.to_vec(), elements)
}
