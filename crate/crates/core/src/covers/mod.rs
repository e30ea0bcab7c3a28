//! Colored covers of boundary nets and their analytics: mesh, order,
//! Lebesgue number, capacity and family separation.

mod greedy;
mod matrix;
mod profile;
mod stats;
mod transfer;

pub use greedy::{cylinder_classes, greedy_colored_cover, Absorption, GreedyOptions};
pub use matrix::{DistanceMatrix, MetricKind};
pub use profile::{cdim_profile, CdimProfile, ProfileEntry};
pub use stats::{cover_stats, multiplicities, CoverStats};
pub use transfer::{capacity_transfer_check, TransferReport};

use serde::{Deserialize, Serialize};

use crate::boundary::MetricParams;
use crate::error::{Error, Result};
use crate::spaces::BoundaryPoint;

/// One set of a colored cover.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverElement {
    /// Sorted, duplicate-free net indices.
    pub members: Vec<usize>,
    pub color: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub descriptor: Option<String>,
}

impl CoverElement {
    pub fn new(mut members: Vec<usize>, color: usize) -> Self {
        members.sort_unstable();
        members.dedup();
        CoverElement { members, color, descriptor: None }
    }

    pub fn with_descriptor(mut self, descriptor: impl Into<String>) -> Self {
        self.descriptor = Some(descriptor.into());
        self
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }
}

/// A cover of a boundary net by colored elements, measured in one metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cover {
    pub metric_kind: MetricKind,
    pub params: MetricParams,
    pub net: Vec<BoundaryPoint>,
    pub elements: Vec<CoverElement>,
}

impl Cover {
    pub fn new(metric_kind: MetricKind, params: MetricParams, net: Vec<BoundaryPoint>, elements: Vec<CoverElement>) -> Result<Self> {
        let cover = Cover { metric_kind, params, net, elements };
        cover.validate()?;
        Ok(cover)
    }

    /// Nonempty elements with valid indices, covering the whole net, with
    /// colors forming `0..n`.
    pub fn validate(&self) -> Result<()> {
        if self.elements.is_empty() {
            return Err(Error::EmptyCover);
        }
        let n = self.net.len();
        let mut covered = vec![false; n];
        let mut used = Vec::new();
        for (e, el) in self.elements.iter().enumerate() {
            if el.members.is_empty() {
                return Err(Error::InvalidCover(format!("element {e} is empty")));
            }
            if !el.members.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InvalidCover(format!("element {e} members are not sorted and distinct")));
            }
            for &m in &el.members {
                if m >= n {
                    return Err(Error::InvalidCover(format!("element {e} refers to index {m}, net has {n} points")));
                }
                covered[m] = true;
            }
            if used.len() <= el.color {
                used.resize(el.color + 1, false);
            }
            used[el.color] = true;
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(Error::InvalidCover(format!("net point {i} is not covered")));
        }
        if let Some(c) = used.iter().position(|u| !u) {
            return Err(Error::InvalidCover(format!("color {c} is unused but higher colors appear")));
        }
        Ok(())
    }

    pub fn n_colors(&self) -> usize {
        self.elements.iter().map(|e| e.color + 1).max().unwrap_or(0)
    }

    /// Element indices grouped by color.
    pub fn families(&self) -> Vec<Vec<usize>> {
        let mut fams = vec![Vec::new(); self.n_colors()];
        for (e, el) in self.elements.iter().enumerate() {
            fams[el.color].push(e);
        }
        fams
    }
}
