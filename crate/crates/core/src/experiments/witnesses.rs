//! Covers and nets used as test witnesses by the suite.

use std::f64::consts::TAU;

use crate::boundary::MetricParams;
use crate::covers::{Cover, CoverElement, MetricKind};
use crate::error::{Error, Result};
use crate::spaces::BoundaryPoint;

/// One single-color element per class label.
pub fn class_cover(kind: MetricKind, params: MetricParams, net: Vec<BoundaryPoint>, classes: &[usize]) -> Result<Cover> {
    if classes.len() != net.len() {
        return Err(Error::InvalidParams("one class per net point required".into()));
    }
    let n_classes = classes.iter().max().map_or(0, |m| m + 1);
    let mut members = vec![Vec::new(); n_classes];
    for (i, &c) in classes.iter().enumerate() {
        members[c].push(i);
    }
    let elements = members
        .into_iter()
        .enumerate()
        .filter(|(_, m)| !m.is_empty())
        .map(|(c, m)| CoverElement::new(m, 0).with_descriptor(format!("class {c}")))
        .collect();
    Cover::new(kind, params, net, elements)
}

/// `clusters` groups of angles: group `j` starts at `2πj/clusters` and
/// holds `size` points spread evenly over an arc of angular width `width`.
/// Returns the net and each point's group.
pub fn clustered_circle(clusters: usize, size: usize, width: f64) -> (Vec<BoundaryPoint>, Vec<usize>) {
    let mut net = Vec::with_capacity(clusters * size);
    let mut groups = Vec::with_capacity(clusters * size);
    for j in 0..clusters {
        let base = TAU * j as f64 / clusters as f64;
        for i in 0..size {
            let offset = if size > 1 { width * i as f64 / (size - 1) as f64 } else { 0.0 };
            net.push(BoundaryPoint::angle(base + offset));
            groups.push(j);
        }
    }
    (net, groups)
}

/// Apartment circle cover: consecutive pairs of the `m`-point circle net,
/// colored alternately. Needs `m` divisible by 4.
pub fn alternating_pair_cover(net: Vec<BoundaryPoint>, scale: f64) -> Result<Cover> {
    let m = net.len();
    if m == 0 || m % 4 != 0 {
        return Err(Error::InvalidParams(format!("circle net size {m} must be a positive multiple of 4")));
    }
    let elements = (0..m / 2).map(|q| CoverElement::new(vec![2 * q, 2 * q + 1], q % 2)).collect();
    Cover::new(MetricKind::Moran, MetricParams::moran(scale)?, net, elements)
}

/// The two ends of a line apartment as singletons of one family.
pub fn line_ends_cover(net: Vec<BoundaryPoint>, scale: f64) -> Result<Cover> {
    let elements = (0..net.len()).map(|i| CoverElement::new(vec![i], 0)).collect();
    Cover::new(MetricKind::Moran, MetricParams::moran(scale)?, net, elements)
}
