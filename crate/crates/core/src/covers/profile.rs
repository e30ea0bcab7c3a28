use serde::{Deserialize, Serialize};

use super::{cover_stats, greedy_colored_cover, DistanceMatrix, GreedyOptions};
use crate::boundary::MetricParams;
use crate::error::{Error, Result};
use crate::spaces::BoundaryPoint;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub lambda: f64,
    /// Fewest families for which the greedy cover succeeded, if any did.
    pub families: Option<usize>,
    pub mesh: Option<f64>,
    /// Measured boundedness multiplier `mesh / λ`.
    pub c_prime: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdimProfile {
    pub entries: Vec<ProfileEntry>,
    /// Largest family count over the scales, minus one; `None` if some scale
    /// needed more than the allowed number of families.
    pub estimate: Option<usize>,
}

/// Families needed by greedy covers at each scale `λ` (with separation
/// `L = λ`), trying 1, 2, … up to `max_order` colors.
///
/// With `merge_factor = Some(f)`, merges up to diameter `f·λ` are allowed.
pub fn cdim_profile(
    dm: &DistanceMatrix,
    params: &MetricParams,
    net: &[BoundaryPoint],
    scales: &[f64],
    max_order: usize,
    merge_factor: Option<f64>,
) -> Result<CdimProfile> {
    if scales.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidParams("scales must be descending".into()));
    }
    let spacing = dm.spacing();
    let mut entries = Vec::with_capacity(scales.len());
    for &lambda in scales {
        if lambda < spacing {
            return Err(Error::ScaleBelowResolution { scale: lambda, spacing });
        }
        let opts = GreedyOptions { absorption: None, max_merge_diameter: merge_factor.map(|f| f * lambda) };
        let mut entry = ProfileEntry { lambda, families: None, mesh: None, c_prime: None };
        for colors in 1..=max_order {
            match greedy_colored_cover(dm, params, net, lambda, colors, &opts) {
                Ok(cover) => {
                    let mesh = cover_stats(dm, &cover, Some(lambda))?.mesh;
                    entry = ProfileEntry { lambda, families: Some(colors), mesh: Some(mesh), c_prime: Some(mesh / lambda) };
                    break;
                }
                Err(Error::InsufficientColors { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        entries.push(entry);
    }
    let estimate = entries
        .iter()
        .map(|e| e.families)
        .collect::<Option<Vec<_>>>()
        .and_then(|f| f.into_iter().max())
        .map(|m| m - 1);
    Ok(CdimProfile { entries, estimate })
}
